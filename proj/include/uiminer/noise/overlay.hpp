#pragma once

#include "uiminer/vh/view_tree.hpp"

#include <chrono>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace uiminer::noise {

struct OverlayScore {
    int draw_index = 0;
    double score = 0.0;
    bool flagged = false;
};

// Scores every node of a tree for "hidden under a later view". The screenshot
// is only consulted by image-based scorers.
class OverlayScorer {
public:
    virtual ~OverlayScorer() = default;
    virtual std::vector<OverlayScore> score(const vh::ViewTree& tree,
                                            std::span<const std::uint8_t> screenshot) const = 0;
};

// Deterministic default: a node scores 1.0 iff a single later-drawn,
// non-descendant node with non-zero area contains its bounds.
class OcclusionHeuristic final : public OverlayScorer {
public:
    std::vector<OverlayScore> score(const vh::ViewTree& tree, std::span<const std::uint8_t> screenshot) const override;
};

// Client for an external classifier. Per node it POSTs
//   {"screenshot": <base64 PNG>, "mask": {"left":..,"top":..,"right":..,"bottom":..},
//    "draw_index": n, "screen_width": w, "screen_height": h}
// and expects {"probability": p} with p in [0,1]. Nodes with p > threshold
// are flagged. Transport failures raise ScorerUnavailable.
class HttpOverlayScorer final : public OverlayScorer {
public:
    explicit HttpOverlayScorer(std::string url, double threshold = 0.5,
                               std::chrono::milliseconds timeout = std::chrono::milliseconds(10000));

    std::vector<OverlayScore> score(const vh::ViewTree& tree, std::span<const std::uint8_t> screenshot) const override;

private:
    std::string url_;
    double threshold_;
    std::chrono::milliseconds timeout_;
};

// Runs the default heuristic.
std::vector<OverlayScore> detect_overlaid(const vh::ViewTree& tree);

std::vector<int> flagged_draw_indices(const std::vector<OverlayScore>& scores);

}  // namespace uiminer::noise
