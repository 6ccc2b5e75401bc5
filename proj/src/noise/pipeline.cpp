#include "uiminer/noise/pipeline.hpp"

#include "uiminer/noise/structural_hash.hpp"

#include "uiminer/device/capture.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <unordered_map>

namespace uiminer::noise {

std::vector<DuplicateFlag> detect_duplicates(const std::vector<store::DatasetRecord>& records) {
    std::unordered_map<std::string, std::size_t> first_seen;
    std::vector<DuplicateFlag> flags;
    for (std::size_t i = 0; i < records.size(); ++i) {
        // '\n' cannot appear in an app id, so the key is unambiguous.
        const std::string key = records[i].app_id + '\n' + records[i].tree_digest;
        const auto [it, inserted] = first_seen.emplace(key, i);
        if (!inserted) {
            flags.push_back({i, NoiseFlag{NoiseKind::Duplicate, records[it->second].record_id, FlagSource::Auto}});
        }
    }
    return flags;
}

std::optional<NoiseFlag> detect_partial_render(bool stable) {
    if (stable) return std::nullopt;
    return NoiseFlag{NoiseKind::PartialRender, "render did not stabilise", FlagSource::Auto};
}

std::optional<NoiseFlag> detect_partial_render(const device::ScreenCapture&, bool stable) {
    return detect_partial_render(stable);
}

PipelineReport PipelineReport::from_counts(std::size_t total, std::size_t auto_removed, std::size_t human_removed) {
    PipelineReport report;
    report.total = total;
    report.auto_removed = auto_removed;
    report.human_removed = human_removed;
    report.kept = total - auto_removed - human_removed;
    report.retention_fraction = total == 0 ? 1.0 : static_cast<double>(report.kept) / static_cast<double>(total);
    return report;
}

nlohmann::json PipelineReport::to_json() const {
    nlohmann::json by_kind = nlohmann::json::object();
    for (const auto kind : {NoiseKind::PartialRender, NoiseKind::Duplicate, NoiseKind::Overlaid, NoiseKind::Other}) {
        const auto it = removed_by_kind.find(kind);
        by_kind[std::string(to_string(kind))] = it == removed_by_kind.end() ? 0 : it->second;
    }
    return {
        {"total", total},
        {"kept", kept},
        {"auto_removed", auto_removed},
        {"human_removed", human_removed},
        {"removed_by_kind", by_kind},
        {"retention_fraction", retention_fraction},
    };
}

std::string PipelineReport::to_table() const {
    std::ostringstream out;
    char pct[32];
    std::snprintf(pct, sizeof(pct), "%.1f%%", retention_fraction * 100.0);
    out << "total            " << total << "\n";
    out << "auto removed     " << auto_removed << "\n";
    for (const auto kind : {NoiseKind::PartialRender, NoiseKind::Duplicate, NoiseKind::Overlaid, NoiseKind::Other}) {
        const auto it = removed_by_kind.find(kind);
        if (it == removed_by_kind.end()) continue;
        out << "  " << to_string(kind);
        for (std::size_t pad = to_string(kind).size(); pad < 15; ++pad) out << ' ';
        out << it->second << "\n";
    }
    out << "human removed    " << human_removed << "\n";
    out << "kept             " << kept << "\n";
    out << "retention        " << pct << "\n";
    return out.str();
}

PipelineReport run_pipeline(std::vector<CorpusItem>& items, const PipelineOptions& options) {
    const TypeIndexTable& table = options.table ? *options.table : TypeIndexTable::standard();
    const OcclusionHeuristic heuristic;
    const OverlayScorer& scorer = options.scorer ? *options.scorer : static_cast<const OverlayScorer&>(heuristic);

    PipelineReport report;
    report.total = items.size();

    auto remove = [](CorpusItem& item, NoiseFlag flag) {
        item.record.flags.push_back(std::move(flag));
        item.record.status = store::RecordStatus::AutoRemoved;
    };
    auto candidate = [](const CorpusItem& item) {
        return item.record.status == store::RecordStatus::Pending ||
               item.record.status == store::RecordStatus::Validated;
    };

    for (auto& item : items) {
        item.record.tree_digest = structural_hash(item.tree, table);
    }

    for (auto& item : items) {
        if (item.record.status != store::RecordStatus::Pending) continue;
        if (auto flag = detect_partial_render(item.record.render_stable)) remove(item, std::move(*flag));
    }

    // Validated records take part as retention anchors but are never flagged.
    std::vector<store::DatasetRecord> survivors;
    std::vector<std::size_t> survivor_pos;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (!candidate(items[i])) continue;
        survivors.push_back(items[i].record);
        survivor_pos.push_back(i);
    }
    for (auto& dup : detect_duplicates(survivors)) {
        auto& item = items[survivor_pos[dup.index]];
        if (item.record.status == store::RecordStatus::Pending) remove(item, std::move(dup.flag));
    }

    for (auto& item : items) {
        if (item.record.status != store::RecordStatus::Pending) continue;
        const auto flagged = flagged_draw_indices(scorer.score(item.tree, item.screenshot));
        if (!flagged.empty()) {
            remove(item, NoiseFlag{NoiseKind::Overlaid, std::to_string(flagged.front()), FlagSource::Auto});
        }
    }

    for (const auto& item : items) {
        switch (item.record.status) {
            case store::RecordStatus::AutoRemoved: {
                ++report.auto_removed;
                const auto it = std::find_if(item.record.flags.begin(), item.record.flags.end(),
                                             [](const NoiseFlag& f) { return f.source == FlagSource::Auto; });
                ++report.removed_by_kind[it == item.record.flags.end() ? NoiseKind::Other : it->kind];
                break;
            }
            case store::RecordStatus::Flagged: ++report.human_removed; break;
            default: ++report.kept; break;
        }
    }
    report.retention_fraction =
        report.total == 0 ? 1.0 : static_cast<double>(report.kept) / static_cast<double>(report.total);
    return report;
}

}  // namespace uiminer::noise
