#pragma once

#include "uiminer/vh/view_tree.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace uiminer::device {

struct ScreenCapture {
    vh::ViewTree tree;
    std::vector<std::uint8_t> screenshot;  // PNG
    std::string activity_name;
    std::int64_t captured_at = 0;  // UTC ms
    std::string app_id;
    std::string raw_dump;
};

}  // namespace uiminer::device
