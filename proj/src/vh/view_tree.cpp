#include "uiminer/vh/view_tree.hpp"

#include "uiminer/error.hpp"
#include "uiminer/util/md5.hpp"
#include "xml_reader.hpp"

#include <charconv>

namespace uiminer::vh {

namespace {

void count_nodes(const ViewNode& node, std::size_t& n) {
    ++n;
    for (const auto& child : node.children) count_nodes(child, n);
}

void visit_node(const ViewNode& node, int depth, const std::function<void(const ViewNode&, int)>& visit) {
    visit(node, depth);
    for (const auto& child : node.children) visit_node(child, depth + 1, visit);
}

bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

bool parse_bool(const std::string* value) { return value != nullptr && *value == "true"; }

std::string attr_or_empty(const detail::XmlElement& el, std::string_view key) {
    const auto* v = el.attribute(key);
    return v ? *v : std::string();
}

void renumber(ViewNode& node, int& next) {
    node.draw_index = next++;
    node.editable = ends_with(node.widget_class, "EditText");
    for (auto& child : node.children) renumber(child, next);
}

ViewNode to_node(const detail::XmlElement& el, int& next_index) {
    ViewNode node;
    node.widget_class = attr_or_empty(el, "class");
    node.resource_id = attr_or_empty(el, "resource-id");
    node.text = attr_or_empty(el, "text");
    node.content_desc = attr_or_empty(el, "content-desc");
    if (const auto* b = el.attribute("bounds")) node.bounds = parse_bounds(*b);
    node.clickable = parse_bool(el.attribute("clickable"));
    node.long_clickable = parse_bool(el.attribute("long-clickable"));
    node.scrollable = parse_bool(el.attribute("scrollable"));
    node.enabled = parse_bool(el.attribute("enabled"));
    node.editable = ends_with(node.widget_class, "EditText");
    node.draw_index = next_index++;
    for (const auto& child : el.children) {
        if (child.name == "node") {
            node.children.push_back(to_node(child, next_index));
        }
    }
    return node;
}

// Collects `node` elements, looking through wrapper elements such as <hierarchy>.
void collect_roots(const detail::XmlElement& el, std::vector<const detail::XmlElement*>& out) {
    if (el.name == "node") {
        out.push_back(&el);
        return;
    }
    for (const auto& child : el.children) collect_roots(child, out);
}

void write_node(const ViewNode& node, int sibling_index, int depth, std::string& out) {
    out.append(static_cast<std::size_t>(depth) * 2, ' ');
    out += "<node index=\"" + std::to_string(sibling_index) + "\"";
    out += " text=\"" + detail::escape_attribute(node.text) + "\"";
    out += " resource-id=\"" + detail::escape_attribute(node.resource_id) + "\"";
    out += " class=\"" + detail::escape_attribute(node.widget_class) + "\"";
    out += " content-desc=\"" + detail::escape_attribute(node.content_desc) + "\"";
    out += std::string(" clickable=\"") + (node.clickable ? "true" : "false") + "\"";
    out += std::string(" enabled=\"") + (node.enabled ? "true" : "false") + "\"";
    out += std::string(" scrollable=\"") + (node.scrollable ? "true" : "false") + "\"";
    out += std::string(" long-clickable=\"") + (node.long_clickable ? "true" : "false") + "\"";
    out += " bounds=\"" + format_bounds(node.bounds) + "\"";
    if (node.children.empty()) {
        out += " />\n";
        return;
    }
    out += ">\n";
    for (std::size_t i = 0; i < node.children.size(); ++i) {
        write_node(node.children[i], static_cast<int>(i), depth + 1, out);
    }
    out.append(static_cast<std::size_t>(depth) * 2, ' ');
    out += "</node>\n";
}

std::string prompt_field(std::string_view value) {
    std::string out;
    out.reserve(value.size());
    for (char c : value) {
        if (c == '\n' || c == '\r' || c == '\t') out.push_back(' ');
        else if (c == '"') out += "\\\"";
        else out.push_back(c);
    }
    return out;
}

}  // namespace

std::size_t ViewTree::node_count() const {
    std::size_t n = 0;
    for (const auto& root : roots) count_nodes(root, n);
    return n;
}

bool structurally_equal(const ViewTree& a, const ViewTree& b) {
    return a.screen_width == b.screen_width && a.screen_height == b.screen_height && a.roots == b.roots;
}

void for_each_preorder(const ViewTree& tree, const std::function<void(const ViewNode&, int)>& visit) {
    for (const auto& root : tree.roots) visit_node(root, 0, visit);
}

std::vector<const ViewNode*> preorder(const ViewTree& tree) {
    std::vector<const ViewNode*> out;
    for_each_preorder(tree, [&](const ViewNode& n, int) { out.push_back(&n); });
    return out;
}

std::vector<const ViewNode*> leaves(const ViewTree& tree) {
    std::vector<const ViewNode*> out;
    for_each_preorder(tree, [&](const ViewNode& n, int) {
        if (n.is_leaf()) out.push_back(&n);
    });
    return out;
}

const ViewNode* find_by_resource_id(const ViewTree& tree, std::string_view resource_id) {
    if (resource_id.empty()) return nullptr;
    for (const auto* node : preorder(tree)) {
        if (node->resource_id == resource_id) return node;
    }
    return nullptr;
}

std::string_view simple_name(std::string_view widget_class) {
    const auto dot = widget_class.rfind('.');
    return dot == std::string_view::npos ? widget_class : widget_class.substr(dot + 1);
}

void normalize(ViewTree& tree) {
    int next = 0;
    for (auto& root : tree.roots) renumber(root, next);
}

Rect parse_bounds(std::string_view text) {
    const std::string original(text);
    auto bad = [&]() -> Error { return Error(ErrorKind::MalformedBounds, "'" + original + "'"); };

    int values[4] = {0, 0, 0, 0};
    std::size_t pos = 0;
    for (int pair = 0; pair < 2; ++pair) {
        if (pos >= text.size() || text[pos] != '[') throw bad();
        ++pos;
        for (int k = 0; k < 2; ++k) {
            const char* begin = text.data() + pos;
            const char* end = text.data() + text.size();
            if (begin == end || *begin < '0' || *begin > '9') throw bad();
            auto [ptr, ec] = std::from_chars(begin, end, values[pair * 2 + k]);
            if (ec != std::errc()) throw bad();
            pos += static_cast<std::size_t>(ptr - begin);
            const char expected = k == 0 ? ',' : ']';
            if (pos >= text.size() || text[pos] != expected) throw bad();
            ++pos;
        }
    }
    if (pos != text.size()) throw bad();
    Rect r{values[0], values[1], values[2], values[3]};
    if (r.left > r.right || r.top > r.bottom) throw bad();
    return r;
}

std::string format_bounds(const Rect& r) {
    return "[" + std::to_string(r.left) + "," + std::to_string(r.top) + "][" + std::to_string(r.right) + "," +
           std::to_string(r.bottom) + "]";
}

ViewTree parse_hierarchy(std::string_view xml_text, int screen_w, int screen_h) {
    if (screen_w <= 0 || screen_h <= 0) {
        throw Error(ErrorKind::InvalidArgument, "screen dimensions must be positive");
    }
    const auto document = detail::parse_xml(xml_text);
    std::vector<const detail::XmlElement*> root_elements;
    collect_roots(document, root_elements);
    if (root_elements.empty()) throw Error(ErrorKind::EmptyHierarchy, "dump contains no <node> elements");

    ViewTree tree;
    tree.screen_width = screen_w;
    tree.screen_height = screen_h;
    tree.source_digest = util::md5_hex(xml_text);
    int next_index = 0;
    for (const auto* el : root_elements) tree.roots.push_back(to_node(*el, next_index));
    return tree;
}

std::string serialize_hierarchy(const ViewTree& tree) {
    std::string out = "<?xml version='1.0' encoding='UTF-8' standalone='yes' ?>\n<hierarchy rotation=\"0\">\n";
    for (std::size_t i = 0; i < tree.roots.size(); ++i) {
        write_node(tree.roots[i], static_cast<int>(i), 1, out);
    }
    out += "</hierarchy>\n";
    return out;
}

std::vector<const ViewNode*> interactive_elements(const ViewTree& tree) {
    std::vector<const ViewNode*> out;
    for_each_preorder(tree, [&](const ViewNode& n, int) {
        if (n.is_interactive()) out.push_back(&n);
    });
    return out;
}

std::string serialize_for_prompt(const ViewTree& tree, std::size_t max_chars) {
    const auto elements = interactive_elements(tree);
    if (elements.empty()) return "(no interactive elements)";

    std::vector<std::string> lines;
    lines.reserve(elements.size());
    for (std::size_t i = 0; i < elements.size(); ++i) {
        const auto* e = elements[i];
        lines.push_back(std::to_string(i + 1) + ". " + std::string(simple_name(e->widget_class)) +
                        " id=" + prompt_field(e->resource_id) + " text=\"" + prompt_field(e->text) +
                        "\" desc=\"" + prompt_field(e->content_desc) + "\"");
    }

    std::size_t total = 0;
    for (const auto& line : lines) total += line.size();
    total += lines.size() - 1;
    if (total <= max_chars) {
        std::string out;
        for (std::size_t i = 0; i < lines.size(); ++i) {
            if (i) out.push_back('\n');
            out += lines[i];
        }
        return out;
    }

    // Keep the longest prefix of whole lines that still leaves room for the
    // trailing omission marker.
    std::string out;
    std::size_t kept = 0;
    for (;;) {
        if (kept == lines.size()) break;
        const std::string marker = "(+" + std::to_string(lines.size() - kept - 1) + " omitted)";
        const std::size_t candidate = out.size() + (kept ? 1 : 0) + lines[kept].size() + 1 + marker.size();
        if (candidate > max_chars) break;
        if (kept) out.push_back('\n');
        out += lines[kept];
        ++kept;
    }
    const std::string marker = "(+" + std::to_string(lines.size() - kept) + " omitted)";
    if (kept) out.push_back('\n');
    out += marker;
    return out;
}

}  // namespace uiminer::vh
