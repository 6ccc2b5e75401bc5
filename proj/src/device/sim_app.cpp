#include "uiminer/device/sim_app.hpp"

#include "uiminer/error.hpp"
#include "uiminer/vh/json_tree.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <sstream>

namespace uiminer::device {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& invariant, const std::string& detail) {
    throw Error(ErrorKind::FixtureInvalid, invariant + ": " + detail);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::NotFound, path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> string_list(const json& j, const char* key) {
    std::vector<std::string> out;
    if (j.contains(key)) {
        for (const auto& v : j.at(key)) out.push_back(v.get<std::string>());
    }
    return out;
}

bool same_trigger(const Matcher& a, const Matcher& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case ActionKind::Scroll: return a.direction == b.direction;
        case ActionKind::Input:
            if (a.target != b.target) return false;
            // Distinct patterns are taken to be disjoint; a collision at run
            // time is still reported by SimDriver.
            return !a.value_pattern || !b.value_pattern || *a.value_pattern == *b.value_pattern;
        default: return a.target == b.target;
    }
}

}  // namespace

bool Guard::holds(const std::set<std::string>& flags) const {
    for (const auto& f : requires_flags) {
        if (!flags.count(f)) return false;
    }
    for (const auto& f : forbids_flags) {
        if (flags.count(f)) return false;
    }
    return true;
}

bool Guard::compatible_with(const Guard& other) const {
    auto clash = [](const std::vector<std::string>& req, const std::vector<std::string>& forb) {
        return std::any_of(req.begin(), req.end(),
                           [&](const std::string& f) { return std::find(forb.begin(), forb.end(), f) != forb.end(); });
    };
    return !clash(requires_flags, other.forbids_flags) && !clash(other.requires_flags, forbids_flags) &&
           !clash(requires_flags, forbids_flags) && !clash(other.requires_flags, other.forbids_flags);
}

bool Matcher::matches(const Action& action) const {
    if (action.kind != kind) return false;
    switch (kind) {
        case ActionKind::Scroll: return action.direction == direction;
        case ActionKind::Input:
            if (action.target != target) return false;
            return !value_pattern || std::regex_match(action.value, std::regex(*value_pattern));
        default: return action.target == target;
    }
}

void validate_sim_app(const SimApp& app) {
    if (app.app_id.empty()) invalid("app_id", "missing");
    if (app.declared_activities.empty()) invalid("declared_activities", "empty");
    if (app.screen_width <= 0 || app.screen_height <= 0) invalid("screen", "dimensions must be positive");
    if (!app.states.count(app.initial_state)) invalid("initial_state", "'" + app.initial_state + "' is not a state");
    for (const auto& [id, state] : app.states) {
        if (state.activity_name.empty()) invalid("activity_name", "state '" + id + "' has none");
        if (!app.declared_activities.count(state.activity_name)) {
            invalid("activity_name", "state '" + id + "' uses undeclared activity " + state.activity_name);
        }
        if (state.tree.roots.empty()) invalid("tree", "state '" + id + "' has an empty tree");
        if (state.back_to != kExitState && !app.states.count(state.back_to)) {
            invalid("back", "state '" + id + "' backs to unknown state '" + state.back_to + "'");
        }
    }
    for (std::size_t i = 0; i < app.transitions.size(); ++i) {
        const auto& t = app.transitions[i];
        if (!app.states.count(t.from) || (!app.states.count(t.to) && t.to != kExitState)) {
            invalid("transition endpoint", "'" + t.from + "' -> '" + t.to + "'");
        }
        Action probe{t.matcher.kind, t.matcher.target, t.matcher.direction,
                     t.matcher.kind == ActionKind::Input ? std::string("x") : std::string()};
        if (auto problem = validate(probe); !problem.empty()) invalid("matcher", problem);
        if (t.matcher.kind != ActionKind::Scroll &&
            vh::find_by_resource_id(app.states.at(t.from).tree, t.matcher.target) == nullptr) {
            invalid("matcher target", "'" + t.matcher.target + "' is not on state '" + t.from + "'");
        }
        if (t.matcher.value_pattern) {
            try {
                std::regex check(*t.matcher.value_pattern);
            } catch (const std::regex_error&) {
                invalid("value_pattern", "'" + *t.matcher.value_pattern + "' does not compile");
            }
        }
        for (std::size_t k = 0; k < i; ++k) {
            const auto& other = app.transitions[k];
            if (other.from == t.from && same_trigger(other.matcher, t.matcher) && other.guard.compatible_with(t.guard)) {
                invalid("ambiguous transition", "state '" + t.from + "' has two transitions on " +
                                                    std::string(to_string(t.matcher.kind)) + " " + t.matcher.target);
            }
        }
    }
}

SimApp sim_app_from_json(const json& j, const std::filesystem::path& base_dir) {
    SimApp app;
    try {
        app.app_id = j.at("app_id").get<std::string>();
        if (j.contains("screen")) {
            app.screen_width = j["screen"].value("width", 1080);
            app.screen_height = j["screen"].value("height", 1920);
        }
        for (const auto& a : j.at("declared_activities")) app.declared_activities.insert(a.get<std::string>());
        app.initial_state = j.at("initial_state").get<std::string>();
        for (const auto& [id, s] : j.at("states").items()) {
            SimState state;
            state.activity_name = s.value("activity", "");
            state.terminal = s.value("terminal", false);
            state.back_to = s.value("back", app.initial_state);
            if (s.contains("tree_file")) {
                const auto xml = read_file(base_dir / s.at("tree_file").get<std::string>());
                state.tree = vh::parse_hierarchy(xml, app.screen_width, app.screen_height);
            } else if (s.contains("tree") && s.at("tree").is_string()) {
                state.tree = vh::parse_hierarchy(s.at("tree").get<std::string>(), app.screen_width, app.screen_height);
            } else if (s.contains("tree")) {
                state.tree = vh::tree_from_json(s.at("tree"), app.screen_width, app.screen_height);
            } else {
                invalid("tree", "state '" + id + "' has no tree");
            }
            app.states.emplace(id, std::move(state));
        }
        for (const auto& t : j.value("transitions", json::array())) {
            SimTransition tr;
            tr.from = t.at("from").get<std::string>();
            tr.to = t.at("to").get<std::string>();
            const auto& m = t.at("match");
            const auto kind = action_kind_from_string(m.at("kind").get<std::string>());
            if (!kind) invalid("matcher", "unknown kind " + m.dump());
            tr.matcher.kind = *kind;
            tr.matcher.target = m.value("target", "");
            if (m.contains("direction")) {
                tr.matcher.direction = direction_from_string(m.at("direction").get<std::string>());
                if (!tr.matcher.direction) invalid("matcher", "unknown direction " + m.dump());
            }
            if (m.contains("value_pattern")) tr.matcher.value_pattern = m.at("value_pattern").get<std::string>();
            if (t.contains("guard")) {
                tr.guard.requires_flags = string_list(t.at("guard"), "requires");
                tr.guard.forbids_flags = string_list(t.at("guard"), "forbids");
            }
            tr.set_flags = string_list(t, "set");
            tr.clear_flags = string_list(t, "clear");
            app.transitions.push_back(std::move(tr));
        }
    } catch (const json::exception& e) {
        invalid("schema", e.what());
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::FixtureInvalid) throw;
        invalid("tree", e.what());
    }
    validate_sim_app(app);
    return app;
}

SimApp load_sim_app(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        invalid("schema", path.string() + ": " + e.what());
    }
    return sim_app_from_json(j, path.parent_path());
}

}  // namespace uiminer::device
