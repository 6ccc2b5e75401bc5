#pragma once

#include "uiminer/vh/view_tree.hpp"

#include <cstdint>
#include <vector>

namespace uiminer::store {

enum class Cell : std::uint8_t { Background = 0, Text = 1, NonText = 2 };

// Coarse rasterization of leaf bounding boxes. The default 56x100 grid keeps
// a 9:16 portrait aspect.
struct LayoutImage {
    static constexpr int kDefaultWidth = 56;
    static constexpr int kDefaultHeight = 100;

    int width = 0;
    int height = 0;
    std::vector<Cell> cells;  // row-major

    Cell at(int x, int y) const { return cells[static_cast<std::size_t>(y) * width + x]; }
    bool operator==(const LayoutImage&) const = default;
};

// A leaf covers a cell when it contains the screen pixel under the cell
// centre; the latest-drawn covering leaf decides the cell. Leaves whose class
// name contains "Text" or that carry text are Text, others NonText.
LayoutImage render_layout(const vh::ViewTree& tree, int grid_w = LayoutImage::kDefaultWidth,
                          int grid_h = LayoutImage::kDefaultHeight);

bool is_text_leaf(const vh::ViewNode& node);

// Fraction of differing cells; images must have equal dimensions.
double layout_distance(const LayoutImage& a, const LayoutImage& b);

// White background, blue text, orange non-text.
std::vector<std::uint8_t> layout_to_png(const LayoutImage& image);

}  // namespace uiminer::store
