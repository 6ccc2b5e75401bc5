#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace uiminer::util {

// Encodes 8-bit RGB pixels (row-major, 3 bytes per pixel) as a PNG file.
std::vector<std::uint8_t> encode_png_rgb(std::span<const std::uint8_t> rgb, int width, int height);

struct PngSize {
    int width = 0;
    int height = 0;
};

// Reads the IHDR dimensions; returns {0,0} for anything that is not a PNG.
PngSize png_dimensions(std::span<const std::uint8_t> png);

}  // namespace uiminer::util
