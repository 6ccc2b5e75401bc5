#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace uiminer::noise {

enum class NoiseKind { Duplicate, Overlaid, PartialRender, Other };
enum class FlagSource { Auto, Human };

struct NoiseFlag {
    NoiseKind kind = NoiseKind::Other;
    // Duplicate: the retained record's id. Overlaid: the node's draw_index.
    // Other (human): free text.
    std::string detail;
    FlagSource source = FlagSource::Auto;

    bool operator==(const NoiseFlag&) const = default;
};

std::string_view to_string(NoiseKind kind);
std::string_view to_string(FlagSource source);
std::optional<NoiseKind> noise_kind_from_string(std::string_view s);
std::optional<FlagSource> flag_source_from_string(std::string_view s);

}  // namespace uiminer::noise
