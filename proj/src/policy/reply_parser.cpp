#include "uiminer/policy/reply_parser.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <optional>

namespace uiminer::policy {

using device::Action;
using device::ActionKind;

namespace {

bool is_blank(char c) { return c == ' ' || c == '\t'; }

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

// Reads "[ content ]" starting at pos (after optional blanks). Content may not
// span lines or contain ']'.
std::optional<std::string> bracket(std::string_view text, std::size_t& pos) {
    std::size_t p = pos;
    while (p < text.size() && is_blank(text[p])) ++p;
    if (p >= text.size() || text[p] != '[') return std::nullopt;
    const std::size_t start = p + 1;
    std::size_t end = start;
    while (end < text.size() && text[end] != ']' && text[end] != '\n' && text[end] != '[') ++end;
    if (end >= text.size() || text[end] != ']') return std::nullopt;
    pos = end + 1;
    return trim(text.substr(start, end - start));
}

struct Match {
    std::size_t begin = 0;
    std::size_t end = 0;
    Action action;
};

std::optional<Match> primitive_at(std::string_view text, std::size_t begin) {
    std::size_t pos = begin;
    const auto verb = bracket(text, pos);
    if (!verb) return std::nullopt;
    const auto kind = device::action_kind_from_string(*verb);
    if (!kind || lower(*verb) == "long_tap" || lower(*verb) == "longtap") return std::nullopt;
    const auto arg = bracket(text, pos);
    if (!arg || arg->empty()) return std::nullopt;

    Match m;
    m.begin = begin;
    switch (*kind) {
        case ActionKind::Scroll: {
            const auto d = device::direction_from_string(*arg);
            if (!d) return std::nullopt;
            m.action = Action::scroll(*d);
            break;
        }
        case ActionKind::Input: {
            const auto value = bracket(text, pos);
            if (!value || value->empty()) return std::nullopt;
            m.action = Action::input(*arg, *value);
            break;
        }
        case ActionKind::Tap: m.action = Action::tap(*arg); break;
        case ActionKind::LongTap: m.action = Action::long_tap(*arg); break;
    }
    m.end = pos;
    return m;
}

// Index marker at the end of `prefix`: digits, optional [.):-], blanks.
// Returns the index and the offset where the marker starts.
std::optional<std::pair<int, std::size_t>> trailing_index(std::string_view prefix) {
    std::size_t e = prefix.size();
    while (e > 0 && is_blank(prefix[e - 1])) --e;
    if (e > 0 && (prefix[e - 1] == '.' || prefix[e - 1] == ')' || prefix[e - 1] == ':' || prefix[e - 1] == '-')) --e;
    while (e > 0 && is_blank(prefix[e - 1])) --e;
    std::size_t b = e;
    while (b > 0 && std::isdigit(static_cast<unsigned char>(prefix[b - 1]))) --b;
    if (b == e || e - b > 6) return std::nullopt;
    // The number must stand alone, not end a longer token like "v2".
    if (b > 0 && std::isalnum(static_cast<unsigned char>(prefix[b - 1]))) return std::nullopt;
    return std::make_pair(std::stoi(std::string(prefix.substr(b, e - b))), b);
}

void add_fragments(std::string_view region, std::vector<std::string>& out) {
    std::size_t start = 0;
    while (start <= region.size()) {
        auto nl = region.find('\n', start);
        if (nl == std::string_view::npos) nl = region.size();
        std::string piece = trim(region.substr(start, nl - start));
        const bool meaningful = std::any_of(piece.begin(), piece.end(), [](char c) {
            return std::isalnum(static_cast<unsigned char>(c)) || static_cast<unsigned char>(c) >= 0x80;
        });
        if (meaningful) out.push_back(std::move(piece));
        start = nl + 1;
    }
}

}  // namespace

ParsedPlan parse_reply(std::string_view reply) {
    ParsedPlan plan;
    plan.reply = std::string(reply);

    struct Indexed {
        int index;
        Action action;
    };
    std::vector<Indexed> found;
    int current_index = 0;
    std::size_t cursor = 0;  // end of the last consumed region
    std::size_t scan = 0;
    while (scan < reply.size()) {
        const auto open = reply.find('[', scan);
        if (open == std::string_view::npos) break;
        auto m = primitive_at(reply, open);
        if (!m) {
            scan = open + 1;
            continue;
        }
        const std::size_t line_start = [&] {
            const auto nl = reply.rfind('\n', open == 0 ? 0 : open - 1);
            return nl == std::string_view::npos || open == 0 ? std::size_t{0} : nl + 1;
        }();
        const std::size_t prefix_start = std::max(cursor, line_start);
        std::size_t fragment_end = open;
        if (auto idx = trailing_index(reply.substr(prefix_start, open - prefix_start))) {
            current_index = idx->first;
            fragment_end = prefix_start + idx->second;
        }
        add_fragments(reply.substr(cursor, fragment_end - cursor), plan.unparsed_fragments);
        found.push_back({current_index, std::move(m->action)});
        cursor = m->end;
        scan = m->end;
    }
    add_fragments(reply.substr(std::min(cursor, reply.size())), plan.unparsed_fragments);

    std::stable_sort(found.begin(), found.end(), [](const Indexed& a, const Indexed& b) { return a.index < b.index; });
    for (auto& f : found) plan.steps.push_back(std::move(f.action));
    return plan;
}

std::string render_plan(const std::vector<Action>& actions, bool numbered) {
    std::string out;
    for (std::size_t i = 0; i < actions.size(); ++i) {
        if (i) out += numbered ? "\n" : ", ";
        if (numbered) out += std::to_string(i + 1) + ". ";
        out += device::to_primitive(actions[i]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Free-text fallback

namespace {

struct Verb {
    const char* word;
    ActionKind kind;
};

constexpr std::array<Verb, 10> kVerbs = {{
    {"tap", ActionKind::Tap},
    {"click", ActionKind::Tap},
    {"press", ActionKind::Tap},
    {"type", ActionKind::Input},
    {"enter", ActionKind::Input},
    {"create", ActionKind::Input},
    {"scroll", ActionKind::Scroll},
    {"swipe", ActionKind::Scroll},
    {"hold", ActionKind::LongTap},
    {"long-press", ActionKind::LongTap},
}};

bool inflection_of(std::string_view token, std::string_view verb) {
    if (token == verb) return true;
    for (const char* suffix : {"s", "es", "ed", "ing", "d"}) {
        if (token == std::string(verb) + suffix) return true;
    }
    if (!verb.empty() && verb.back() == 'e') {
        const auto stem = verb.substr(0, verb.size() - 1);
        if (token == std::string(stem) + "ing") return true;
    }
    // tap -> tapping, tapped
    if (token == std::string(verb) + verb.back() + "ing" || token == std::string(verb) + verb.back() + "ed") return true;
    return false;
}

struct Token {
    std::string text;  // lowercase, edge punctuation stripped
    std::string raw;   // original spelling, edge punctuation stripped
    std::size_t end = 0;
};

std::string strip_edges(std::string_view s) {
    std::size_t b = 0, e = s.size();
    auto edge = [](char c) {
        return c == ',' || c == ';' || c == ':' || c == '!' || c == '?' || c == '(' || c == ')' || c == '.' ||
               c == '"' || c == '\'';
    };
    while (b < e && edge(s[b])) ++b;
    while (e > b && edge(s[e - 1])) --e;
    return std::string(s.substr(b, e - b));
}

std::vector<Token> tokenize(std::string_view clause) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < clause.size()) {
        while (i < clause.size() && std::isspace(static_cast<unsigned char>(clause[i]))) ++i;
        const std::size_t start = i;
        while (i < clause.size() && !std::isspace(static_cast<unsigned char>(clause[i]))) ++i;
        if (i > start) {
            const std::string raw = strip_edges(clause.substr(start, i - start));
            if (!raw.empty()) out.push_back({lower(raw), raw, i});
        }
    }
    return out;
}

std::vector<std::string> split_clauses(std::string_view text) {
    std::vector<std::string> clauses;
    std::string current;
    auto flush = [&] {
        std::string t = trim(current);
        if (!t.empty()) clauses.push_back(std::move(t));
        current.clear();
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        const bool boundary_next = i + 1 >= text.size() || std::isspace(static_cast<unsigned char>(text[i + 1]));
        if (c == '\n' || c == ';' || ((c == '.' || c == '!' || c == '?' || c == ',') && boundary_next)) {
            flush();
            continue;
        }
        current.push_back(c);
    }
    flush();

    // Further split on conjunctions joining two instructions.
    std::vector<std::string> out;
    for (const auto& clause : clauses) {
        std::string rest = clause;
        for (;;) {
            const std::string l = lower(rest);
            std::size_t cut = std::string::npos;
            std::size_t skip = 0;
            for (const char* conj : {" and then ", " then ", " and ", " after that "}) {
                const auto p = l.find(conj);
                if (p != std::string::npos && p < cut) {
                    cut = p;
                    skip = std::string(conj).size();
                }
            }
            if (cut == std::string::npos) break;
            out.push_back(trim(rest.substr(0, cut)));
            rest = rest.substr(cut + skip);
        }
        out.push_back(trim(rest));
    }
    out.erase(std::remove_if(out.begin(), out.end(), [](const std::string& s) { return s.empty(); }), out.end());
    return out;
}

std::size_t longest_common_substring(const std::string& a, const std::string& b) {
    if (a.empty() || b.empty()) return 0;
    std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
    std::size_t best = 0;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : 0;
            best = std::max(best, cur[j]);
        }
        std::swap(prev, cur);
    }
    return best;
}

std::string humanize_id(std::string_view id) {
    // "com.app:id/login_button" -> "login button"
    const auto slash = id.rfind('/');
    std::string out = lower(slash == std::string_view::npos ? id : id.substr(slash + 1));
    std::replace(out.begin(), out.end(), '_', ' ');
    std::replace(out.begin(), out.end(), '-', ' ');
    return out;
}

const vh::ViewNode* best_target(const std::string& clause_lower, const std::vector<const vh::ViewNode*>& candidates) {
    constexpr std::size_t kMinOverlap = 3;
    const vh::ViewNode* best = nullptr;
    std::size_t best_score = 0;
    for (const auto* node : candidates) {
        if (node->resource_id.empty()) continue;
        std::size_t score = 0;
        for (const auto& key : {humanize_id(node->resource_id), lower(node->text), lower(node->content_desc)}) {
            score = std::max(score, longest_common_substring(clause_lower, key));
        }
        if (score > best_score) {
            best_score = score;
            best = node;
        }
    }
    return best_score >= kMinOverlap ? best : nullptr;
}

std::optional<std::string> quoted_value(std::string_view clause) {
    for (const auto& [open, close] : std::array<std::pair<std::string_view, std::string_view>, 3>{
             {{"\"", "\""}, {"'", "'"}, {"\xE2\x80\x9C", "\xE2\x80\x9D"}}}) {
        const auto b = clause.find(open);
        if (b == std::string_view::npos) continue;
        const auto e = clause.find(close, b + open.size());
        if (e == std::string_view::npos) continue;
        auto v = std::string(clause.substr(b + open.size(), e - b - open.size()));
        if (!v.empty()) return v;
    }
    return std::nullopt;
}

std::optional<std::string> input_value(std::string_view clause, const std::vector<Token>& tokens, std::size_t verb_pos) {
    if (auto q = quoted_value(clause)) return q;
    static const std::array<std::string_view, 14> kFiller = {"the", "a",    "an",  "in",    "into", "on",    "your",
                                                             "some", "my", "field", "box", "text", "value", "valid"};
    if (verb_pos + 1 < tokens.size()) {
        const auto& next = tokens[verb_pos + 1];
        if (std::find(kFiller.begin(), kFiller.end(), next.text) == kFiller.end()) return next.raw;
    }
    for (std::size_t i = verb_pos + 1; i + 1 < tokens.size(); ++i) {
        if (tokens[i].text == "of" || tokens[i].text == "as" || tokens[i].text == "with") return tokens[i + 1].raw;
    }
    return std::nullopt;
}

}  // namespace

ParsedPlan parse_free_text(std::string_view reply, const vh::ViewTree& tree) {
    ParsedPlan plan;
    plan.reply = std::string(reply);
    plan.used_fallback = true;
    const auto interactive = vh::interactive_elements(tree);
    std::vector<const vh::ViewNode*> editable;
    for (const auto* n : interactive) {
        if (n->editable) editable.push_back(n);
    }

    for (const auto& clause : split_clauses(reply)) {
        const auto tokens = tokenize(clause);
        std::optional<std::pair<ActionKind, std::size_t>> verb;
        for (std::size_t i = 0; i < tokens.size() && !verb; ++i) {
            for (const auto& v : kVerbs) {
                if (inflection_of(tokens[i].text, v.word)) {
                    verb = std::make_pair(v.kind, i);
                    break;
                }
            }
        }
        if (!verb) {
            plan.unparsed_fragments.push_back(clause);
            continue;
        }
        const std::string clause_lower = lower(clause);
        std::optional<Action> action;
        switch (verb->first) {
            case ActionKind::Scroll: {
                auto dir = device::Direction::Down;
                for (const auto& t : tokens) {
                    if (auto d = device::direction_from_string(t.text)) {
                        dir = *d;
                        break;
                    }
                }
                action = Action::scroll(dir);
                break;
            }
            case ActionKind::Input: {
                const auto value = input_value(clause, tokens, verb->second);
                // Keep the value out of target matching.
                std::string target_text = clause_lower;
                if (value) {
                    const auto p = target_text.find(lower(*value));
                    if (p != std::string::npos) target_text.erase(p, value->size());
                }
                const auto* node = best_target(target_text, editable.empty() ? interactive : editable);
                if (value && node) action = Action::input(node->resource_id, *value);
                break;
            }
            case ActionKind::Tap:
            case ActionKind::LongTap: {
                const auto* node = best_target(clause_lower, interactive);
                if (node) {
                    action = verb->first == ActionKind::Tap ? Action::tap(node->resource_id)
                                                            : Action::long_tap(node->resource_id);
                }
                break;
            }
        }
        if (action) {
            plan.steps.push_back(std::move(*action));
        } else {
            plan.unparsed_fragments.push_back(clause);
        }
    }
    return plan;
}

}  // namespace uiminer::policy
