#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace uiminer::util {

// RFC 1321 message digest. Streaming: update() any number of times, then
// digest() once.
class Md5 {
public:
    Md5();

    void update(std::span<const std::uint8_t> bytes);
    void update(std::string_view text);
    std::array<std::uint8_t, 16> digest();

private:
    void transform(const std::uint8_t* block);

    std::array<std::uint32_t, 4> state_;
    std::array<std::uint8_t, 64> buffer_{};
    std::uint64_t length_ = 0;
    bool finished_ = false;
};

std::string md5_hex(std::string_view text);
std::string to_hex(std::span<const std::uint8_t> bytes);

}  // namespace uiminer::util
