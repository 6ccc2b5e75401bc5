#include "xml_reader.hpp"

#include "uiminer/error.hpp"

#include <cstdint>

namespace uiminer::vh::detail {

namespace {

class Reader {
public:
    explicit Reader(std::string_view text) : text_(text) {}

    XmlElement document() {
        skip_prolog();
        if (!starts_with("<")) fail("expected root element");
        XmlElement root = element(0);
        skip_misc();
        if (pos_ != text_.size()) fail("content after root element");
        return root;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw Error(ErrorKind::MalformedXml, what + " at offset " + std::to_string(pos_));
    }

    bool starts_with(std::string_view s) const { return text_.substr(pos_, s.size()) == s; }
    bool at_end() const { return pos_ >= text_.size(); }

    void skip_ws() {
        while (!at_end() && is_space(text_[pos_])) ++pos_;
    }
    static bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }
    static bool is_name_char(char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
               c == '-' || c == '.' || c == ':' || static_cast<unsigned char>(c) >= 0x80;
    }

    void skip_until(std::string_view terminator) {
        const auto end = text_.find(terminator, pos_);
        if (end == std::string_view::npos) fail("unterminated construct");
        pos_ = end + terminator.size();
    }

    // Comments, PIs and whitespace are legal between top-level constructs.
    void skip_misc() {
        for (;;) {
            skip_ws();
            if (starts_with("<?")) {
                skip_until("?>");
            } else if (starts_with("<!--")) {
                skip_until("-->");
            } else {
                return;
            }
        }
    }

    void skip_prolog() {
        if (starts_with("\xEF\xBB\xBF")) pos_ += 3;
        for (;;) {
            skip_misc();
            if (starts_with("<!DOCTYPE")) {
                int depth = 0;
                while (!at_end()) {
                    const char c = text_[pos_++];
                    if (c == '[') ++depth;
                    if (c == ']') --depth;
                    if (c == '>' && depth <= 0) break;
                }
            } else {
                return;
            }
        }
    }

    std::string name() {
        const std::size_t start = pos_;
        while (!at_end() && is_name_char(text_[pos_])) ++pos_;
        if (pos_ == start) fail("expected a name");
        return std::string(text_.substr(start, pos_ - start));
    }

    static void append_utf8(std::string& out, std::uint32_t cp) {
        if (cp < 0x80) {
            out.push_back(static_cast<char>(cp));
        } else if (cp < 0x800) {
            out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else if (cp < 0x10000) {
            out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else {
            out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        }
    }

    std::string decode(std::string_view raw) {
        std::string out;
        out.reserve(raw.size());
        for (std::size_t i = 0; i < raw.size(); ++i) {
            if (raw[i] != '&') {
                out.push_back(raw[i]);
                continue;
            }
            const auto semi = raw.find(';', i);
            if (semi == std::string_view::npos) fail("unterminated entity");
            const auto entity = raw.substr(i + 1, semi - i - 1);
            if (entity == "lt") {
                out.push_back('<');
            } else if (entity == "gt") {
                out.push_back('>');
            } else if (entity == "amp") {
                out.push_back('&');
            } else if (entity == "quot") {
                out.push_back('"');
            } else if (entity == "apos") {
                out.push_back('\'');
            } else if (entity.size() > 1 && entity[0] == '#') {
                std::uint32_t cp = 0;
                const bool hex = entity[1] == 'x' || entity[1] == 'X';
                const auto digits = entity.substr(hex ? 2 : 1);
                if (digits.empty()) fail("empty character reference");
                for (char c : digits) {
                    int v = -1;
                    if (c >= '0' && c <= '9') v = c - '0';
                    else if (hex && c >= 'a' && c <= 'f') v = c - 'a' + 10;
                    else if (hex && c >= 'A' && c <= 'F') v = c - 'A' + 10;
                    if (v < 0) fail("bad character reference");
                    cp = cp * (hex ? 16 : 10) + static_cast<std::uint32_t>(v);
                    if (cp > 0x10FFFF) fail("character reference out of range");
                }
                append_utf8(out, cp);
            } else {
                fail("unknown entity &" + std::string(entity) + ";");
            }
            i = semi;
        }
        return out;
    }

    XmlElement element(int depth) {
        if (depth > 512) fail("nesting too deep");
        ++pos_;  // '<'
        XmlElement el;
        el.name = name();
        for (;;) {
            const std::size_t before = pos_;
            skip_ws();
            if (at_end()) fail("unterminated start tag");
            if (starts_with("/>")) {
                pos_ += 2;
                return el;
            }
            if (text_[pos_] == '>') {
                ++pos_;
                break;
            }
            if (pos_ == before) fail("expected whitespace before attribute");
            std::string key = name();
            skip_ws();
            if (at_end() || text_[pos_] != '=') fail("expected '=' after attribute " + key);
            ++pos_;
            skip_ws();
            if (at_end() || (text_[pos_] != '"' && text_[pos_] != '\'')) fail("expected quoted value");
            const char quote = text_[pos_++];
            const auto end = text_.find(quote, pos_);
            if (end == std::string_view::npos) fail("unterminated attribute value");
            const auto raw = text_.substr(pos_, end - pos_);
            if (raw.find('<') != std::string_view::npos) fail("'<' in attribute value");
            for (const auto& [existing, _] : el.attributes) {
                if (existing == key) fail("duplicate attribute " + key);
            }
            el.attributes.emplace_back(std::move(key), decode(raw));
            pos_ = end + 1;
        }
        // Content.
        for (;;) {
            if (at_end()) fail("unterminated element <" + el.name + ">");
            if (starts_with("</")) {
                pos_ += 2;
                const std::string closing = name();
                if (closing != el.name) fail("mismatched </" + closing + "> for <" + el.name + ">");
                skip_ws();
                if (at_end() || text_[pos_] != '>') fail("expected '>'");
                ++pos_;
                return el;
            }
            if (starts_with("<!--")) {
                skip_until("-->");
            } else if (starts_with("<![CDATA[")) {
                skip_until("]]>");
            } else if (starts_with("<?")) {
                skip_until("?>");
            } else if (text_[pos_] == '<') {
                el.children.push_back(element(depth + 1));
            } else {
                const auto next = text_.find('<', pos_);
                pos_ = next == std::string_view::npos ? text_.size() : next;
            }
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace

const std::string* XmlElement::attribute(std::string_view key) const {
    for (const auto& [k, v] : attributes) {
        if (k == key) return &v;
    }
    return nullptr;
}

XmlElement parse_xml(std::string_view text) { return Reader(text).document(); }

std::string escape_attribute(std::string_view value) {
    std::string out;
    out.reserve(value.size());
    for (char c : value) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\n': out += "&#10;"; break;
            case '\r': out += "&#13;"; break;
            case '\t': out += "&#9;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

}  // namespace uiminer::vh::detail
