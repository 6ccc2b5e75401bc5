#include "uiminer/noise/flag.hpp"

namespace uiminer::noise {

std::string_view to_string(NoiseKind kind) {
    switch (kind) {
        case NoiseKind::Duplicate: return "duplicate";
        case NoiseKind::Overlaid: return "overlaid";
        case NoiseKind::PartialRender: return "partial_render";
        case NoiseKind::Other: return "other";
    }
    return "other";
}

std::string_view to_string(FlagSource source) { return source == FlagSource::Auto ? "auto" : "human"; }

std::optional<NoiseKind> noise_kind_from_string(std::string_view s) {
    if (s == "duplicate") return NoiseKind::Duplicate;
    if (s == "overlaid") return NoiseKind::Overlaid;
    if (s == "partial_render") return NoiseKind::PartialRender;
    if (s == "other") return NoiseKind::Other;
    return std::nullopt;
}

std::optional<FlagSource> flag_source_from_string(std::string_view s) {
    if (s == "auto") return FlagSource::Auto;
    if (s == "human") return FlagSource::Human;
    return std::nullopt;
}

}  // namespace uiminer::noise
