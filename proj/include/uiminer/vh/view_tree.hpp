#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace uiminer::vh {

// Screen-space pixel rectangle, origin top-left, half-open on right/bottom.
struct Rect {
    int left = 0;
    int top = 0;
    int right = 0;
    int bottom = 0;

    int width() const { return right - left; }
    int height() const { return bottom - top; }
    std::int64_t area() const { return static_cast<std::int64_t>(width()) * height(); }
    bool contains(const Rect& other) const {
        return left <= other.left && top <= other.top && other.right <= right && other.bottom <= bottom;
    }
    int center_x() const { return left + width() / 2; }
    int center_y() const { return top + height() / 2; }

    bool operator==(const Rect&) const = default;
};

struct ViewNode {
    std::string widget_class;
    std::string resource_id;
    std::string text;
    std::string content_desc;
    Rect bounds;
    bool clickable = false;
    bool long_clickable = false;
    bool scrollable = false;
    bool editable = false;
    bool enabled = true;
    int draw_index = 0;
    std::vector<ViewNode> children;

    bool is_leaf() const { return children.empty(); }
    bool is_interactive() const { return enabled && (clickable || long_clickable || scrollable || editable); }

    bool operator==(const ViewNode&) const = default;
};

// A parsed dump. UIAutomator emits one top-level node per window, so the tree
// is a forest; `roots` is never empty for a parsed tree.
struct ViewTree {
    std::vector<ViewNode> roots;
    int screen_width = 0;
    int screen_height = 0;
    std::string source_digest;

    std::size_t node_count() const;
};

// Equality over everything except source_digest.
bool structurally_equal(const ViewTree& a, const ViewTree& b);

// Pre-order visit; the callback also receives the depth (roots are depth 0).
void for_each_preorder(const ViewTree& tree, const std::function<void(const ViewNode&, int depth)>& visit);

std::vector<const ViewNode*> preorder(const ViewTree& tree);
std::vector<const ViewNode*> leaves(const ViewTree& tree);

// Returns the first node (in draw order) whose resource id equals `resource_id`.
const ViewNode* find_by_resource_id(const ViewTree& tree, std::string_view resource_id);

// "android.widget.Button" -> "Button".
std::string_view simple_name(std::string_view widget_class);

// Re-numbers draw_index in pre-order and recomputes `editable` from the class
// name. Used by builders that assemble trees programmatically.
void normalize(ViewTree& tree);

ViewTree parse_hierarchy(std::string_view xml_text, int screen_w, int screen_h);
std::string serialize_hierarchy(const ViewTree& tree);

// Parses the `[l,t][r,b]` attribute grammar.
Rect parse_bounds(std::string_view text);
std::string format_bounds(const Rect& rect);

std::vector<const ViewNode*> interactive_elements(const ViewTree& tree);

std::string serialize_for_prompt(const ViewTree& tree, std::size_t max_chars);

}  // namespace uiminer::vh
