#include "uiminer/store/layout.hpp"

#include "uiminer/error.hpp"
#include "uiminer/util/png.hpp"

namespace uiminer::store {

namespace {

// Marks grid lines whose centre falls inside [lo, hi) of a screen of `extent`
// pixels split into `cells` lines: lo <= (2k+1)*extent/(2*cells) < hi.
void covered_lines(int lo, int hi, int extent, int cells, std::vector<char>& out) {
    out.assign(static_cast<std::size_t>(cells), 0);
    const std::int64_t lo2 = 2LL * cells * lo;
    const std::int64_t hi2 = 2LL * cells * hi;
    for (int k = 0; k < cells; ++k) {
        const std::int64_t centre2 = (2LL * k + 1) * extent;
        out[static_cast<std::size_t>(k)] = lo2 <= centre2 && centre2 < hi2;
    }
}

}  // namespace

bool is_text_leaf(const vh::ViewNode& node) {
    return vh::simple_name(node.widget_class).find("Text") != std::string_view::npos || !node.text.empty();
}

LayoutImage render_layout(const vh::ViewTree& tree, int grid_w, int grid_h) {
    if (grid_w <= 0 || grid_h <= 0) throw Error(ErrorKind::InvalidArgument, "layout grid dimensions must be positive");
    if (tree.screen_width <= 0 || tree.screen_height <= 0) {
        throw Error(ErrorKind::InvalidArgument, "tree has no screen dimensions");
    }
    LayoutImage image;
    image.width = grid_w;
    image.height = grid_h;
    image.cells.assign(static_cast<std::size_t>(grid_w) * grid_h, Cell::Background);

    std::vector<char> cols;
    std::vector<char> rows;
    for (const auto* leaf : vh::leaves(tree)) {
        const auto& b = leaf->bounds;
        if (b.area() == 0) continue;
        covered_lines(b.left, b.right, tree.screen_width, grid_w, cols);
        covered_lines(b.top, b.bottom, tree.screen_height, grid_h, rows);
        const Cell value = is_text_leaf(*leaf) ? Cell::Text : Cell::NonText;
        for (int y = 0; y < grid_h; ++y) {
            if (!rows[static_cast<std::size_t>(y)]) continue;
            for (int x = 0; x < grid_w; ++x) {
                if (cols[static_cast<std::size_t>(x)]) image.cells[static_cast<std::size_t>(y) * grid_w + x] = value;
            }
        }
    }
    return image;
}

double layout_distance(const LayoutImage& a, const LayoutImage& b) {
    if (a.width != b.width || a.height != b.height) {
        throw Error(ErrorKind::InvalidArgument, "layout images differ in size");
    }
    if (a.cells.empty()) return 0.0;
    std::size_t diff = 0;
    for (std::size_t i = 0; i < a.cells.size(); ++i) diff += a.cells[i] != b.cells[i];
    return static_cast<double>(diff) / static_cast<double>(a.cells.size());
}

std::vector<std::uint8_t> layout_to_png(const LayoutImage& image) {
    std::vector<std::uint8_t> rgb;
    rgb.reserve(image.cells.size() * 3);
    for (const auto cell : image.cells) {
        switch (cell) {
            case Cell::Background: rgb.insert(rgb.end(), {255, 255, 255}); break;
            case Cell::Text: rgb.insert(rgb.end(), {52, 101, 164}); break;
            case Cell::NonText: rgb.insert(rgb.end(), {245, 121, 0}); break;
        }
    }
    return util::encode_png_rgb(rgb, image.width, image.height);
}

}  // namespace uiminer::store
