#pragma once

#include "uiminer/noise/flag.hpp"
#include "uiminer/noise/overlay.hpp"
#include "uiminer/noise/type_index.hpp"
#include "uiminer/store/record.hpp"
#include "uiminer/vh/view_tree.hpp"

#include "json.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace uiminer::device {
struct ScreenCapture;
}

namespace uiminer::noise {

struct DuplicateFlag {
    std::size_t index = 0;  // position in the input list
    NoiseFlag flag;
};

// Groups by (app_id, tree_digest); in each class the earliest record in list
// order is retained and every later one is flagged with the retained id.
std::vector<DuplicateFlag> detect_duplicates(const std::vector<store::DatasetRecord>& records);

std::optional<NoiseFlag> detect_partial_render(bool stable);
std::optional<NoiseFlag> detect_partial_render(const device::ScreenCapture& capture, bool stable);

struct CorpusItem {
    store::DatasetRecord record;
    vh::ViewTree tree;
    std::vector<std::uint8_t> screenshot;
};

struct PipelineOptions {
    const TypeIndexTable* table = nullptr;   // standard table when null
    const OverlayScorer* scorer = nullptr;   // occlusion heuristic when null
};

struct PipelineReport {
    std::size_t total = 0;
    std::size_t kept = 0;
    std::size_t auto_removed = 0;
    std::size_t human_removed = 0;
    std::map<NoiseKind, std::size_t> removed_by_kind;
    double retention_fraction = 1.0;

    static PipelineReport from_counts(std::size_t total, std::size_t auto_removed, std::size_t human_removed);

    nlohmann::json to_json() const;
    std::string to_table() const;
};

// Runs partial-render, duplicate and overlay detection, in that order, over
// every pending record. A record leaves the candidate set at its first flag,
// so each removal is attributed to exactly one kind. Records that are already
// auto-removed or flagged pass through untouched and are counted as removed.
// Mutates status, flags and tree_digest of the items.
PipelineReport run_pipeline(std::vector<CorpusItem>& items, const PipelineOptions& options = {});

}  // namespace uiminer::noise
