#pragma once

#include "uiminer/noise/flag.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace uiminer::store {

enum class RecordStatus { Pending, AutoRemoved, Flagged, Validated };

std::string_view to_string(RecordStatus status);
std::optional<RecordStatus> record_status_from_string(std::string_view s);

struct DatasetRecord {
    // "<structural hash>-<captured_at>"; see make_record_id.
    std::string record_id;
    std::string app_id;
    std::string app_category;
    std::string activity_name;
    // Blob paths relative to the app directory.
    std::string screenshot_path;
    std::string dump_path;
    std::string tree_digest;
    std::int64_t captured_at = 0;
    int screen_width = 0;
    int screen_height = 0;
    bool render_stable = true;
    RecordStatus status = RecordStatus::Pending;
    std::vector<noise::NoiseFlag> flags;
    std::optional<std::string> annotator_id;
    std::optional<std::int64_t> decided_at;

    bool operator==(const DatasetRecord&) const = default;
};

std::string make_record_id(const std::string& structural_hash, std::int64_t captured_at);

// Checks the status/flag invariants; returns an empty string when valid.
std::string validate_record(const DatasetRecord& record);

nlohmann::json to_json(const DatasetRecord& record);
DatasetRecord record_from_json(const nlohmann::json& j);

}  // namespace uiminer::store
