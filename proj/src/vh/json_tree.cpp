#include "uiminer/vh/json_tree.hpp"

#include "uiminer/error.hpp"

namespace uiminer::vh {

using nlohmann::json;

ViewNode node_from_json(const json& j) {
    if (!j.is_object()) throw Error(ErrorKind::InvalidArgument, "tree node must be a JSON object");
    ViewNode node;
    node.widget_class = j.value("class", "");
    if (node.widget_class.find('.') == std::string::npos && !node.widget_class.empty()) {
        node.widget_class = "android.widget." + node.widget_class;
    }
    node.resource_id = j.value("id", "");
    node.text = j.value("text", "");
    node.content_desc = j.value("desc", "");
    if (j.contains("bounds")) {
        const auto& b = j.at("bounds");
        if (!b.is_array() || b.size() != 4) throw Error(ErrorKind::MalformedBounds, b.dump());
        node.bounds = Rect{b[0].get<int>(), b[1].get<int>(), b[2].get<int>(), b[3].get<int>()};
        if (node.bounds.left > node.bounds.right || node.bounds.top > node.bounds.bottom || node.bounds.left < 0 ||
            node.bounds.top < 0) {
            throw Error(ErrorKind::MalformedBounds, b.dump());
        }
    }
    node.clickable = j.value("clickable", false);
    node.long_clickable = j.value("long_clickable", false);
    node.scrollable = j.value("scrollable", false);
    node.enabled = j.value("enabled", true);
    if (j.contains("children")) {
        for (const auto& child : j.at("children")) node.children.push_back(node_from_json(child));
    }
    return node;
}

json node_to_json(const ViewNode& node) {
    json j = {
        {"class", node.widget_class},
        {"id", node.resource_id},
        {"text", node.text},
        {"desc", node.content_desc},
        {"bounds", {node.bounds.left, node.bounds.top, node.bounds.right, node.bounds.bottom}},
        {"clickable", node.clickable},
        {"long_clickable", node.long_clickable},
        {"scrollable", node.scrollable},
        {"enabled", node.enabled},
    };
    if (!node.children.empty()) {
        json children = json::array();
        for (const auto& child : node.children) children.push_back(node_to_json(child));
        j["children"] = std::move(children);
    }
    return j;
}

ViewTree tree_from_json(const json& j, int screen_w, int screen_h) {
    ViewTree tree;
    tree.screen_width = screen_w;
    tree.screen_height = screen_h;
    if (j.is_array()) {
        for (const auto& root : j) tree.roots.push_back(node_from_json(root));
    } else {
        tree.roots.push_back(node_from_json(j));
    }
    if (tree.roots.empty()) throw Error(ErrorKind::EmptyHierarchy, "inline tree has no nodes");
    normalize(tree);
    return tree;
}

}  // namespace uiminer::vh
