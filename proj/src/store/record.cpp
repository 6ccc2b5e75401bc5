#include "uiminer/store/record.hpp"

#include "uiminer/error.hpp"

namespace uiminer::store {

using nlohmann::json;

std::string_view to_string(RecordStatus status) {
    switch (status) {
        case RecordStatus::Pending: return "pending";
        case RecordStatus::AutoRemoved: return "auto_removed";
        case RecordStatus::Flagged: return "flagged";
        case RecordStatus::Validated: return "validated";
    }
    return "pending";
}

std::optional<RecordStatus> record_status_from_string(std::string_view s) {
    if (s == "pending") return RecordStatus::Pending;
    if (s == "auto_removed") return RecordStatus::AutoRemoved;
    if (s == "flagged") return RecordStatus::Flagged;
    if (s == "validated") return RecordStatus::Validated;
    return std::nullopt;
}

std::string make_record_id(const std::string& structural_hash, std::int64_t captured_at) {
    return structural_hash + "-" + std::to_string(captured_at);
}

std::string validate_record(const DatasetRecord& r) {
    if (r.record_id.empty()) return "record_id is empty";
    if (r.app_id.empty()) return "app_id is empty";
    if ((r.status == RecordStatus::AutoRemoved || r.status == RecordStatus::Flagged) && r.flags.empty()) {
        return "removed or flagged record carries no flag";
    }
    if (r.status == RecordStatus::Validated) {
        for (const auto& f : r.flags) {
            if (f.source == noise::FlagSource::Human) return "validated record carries a human flag";
        }
    }
    for (const auto& f : r.flags) {
        if (f.kind == noise::NoiseKind::Duplicate && f.detail.empty()) {
            return "duplicate flag without the retained record id";
        }
    }
    return {};
}

json to_json(const DatasetRecord& r) {
    json flags = json::array();
    for (const auto& f : r.flags) {
        flags.push_back({{"kind", to_string(f.kind)}, {"detail", f.detail}, {"source", to_string(f.source)}});
    }
    json j = {
        {"record_id", r.record_id},
        {"app_id", r.app_id},
        {"app_category", r.app_category},
        {"activity_name", r.activity_name},
        {"screenshot_path", r.screenshot_path},
        {"dump_path", r.dump_path},
        {"tree_digest", r.tree_digest},
        {"captured_at", r.captured_at},
        {"screen_width", r.screen_width},
        {"screen_height", r.screen_height},
        {"render_stable", r.render_stable},
        {"status", to_string(r.status)},
        {"flags", std::move(flags)},
        {"annotator_id", r.annotator_id ? json(*r.annotator_id) : json(nullptr)},
        {"decided_at", r.decided_at ? json(*r.decided_at) : json(nullptr)},
    };
    return j;
}

DatasetRecord record_from_json(const json& j) {
    try {
        DatasetRecord r;
        r.record_id = j.at("record_id").get<std::string>();
        r.app_id = j.at("app_id").get<std::string>();
        r.app_category = j.value("app_category", "");
        r.activity_name = j.value("activity_name", "");
        r.screenshot_path = j.value("screenshot_path", "");
        r.dump_path = j.value("dump_path", "");
        r.tree_digest = j.value("tree_digest", "");
        r.captured_at = j.value("captured_at", std::int64_t{0});
        r.screen_width = j.value("screen_width", 0);
        r.screen_height = j.value("screen_height", 0);
        r.render_stable = j.value("render_stable", true);
        const auto status = record_status_from_string(j.value("status", "pending"));
        if (!status) throw Error(ErrorKind::InvalidArgument, "unknown status " + j.value("status", ""));
        r.status = *status;
        for (const auto& f : j.value("flags", json::array())) {
            const auto kind = noise::noise_kind_from_string(f.at("kind").get<std::string>());
            const auto source = noise::flag_source_from_string(f.value("source", "auto"));
            if (!kind || !source) throw Error(ErrorKind::InvalidArgument, "bad flag " + f.dump());
            r.flags.push_back({*kind, f.value("detail", ""), *source});
        }
        if (j.contains("annotator_id") && !j["annotator_id"].is_null()) {
            r.annotator_id = j["annotator_id"].get<std::string>();
        }
        if (j.contains("decided_at") && !j["decided_at"].is_null()) {
            r.decided_at = j["decided_at"].get<std::int64_t>();
        }
        return r;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::InvalidArgument, std::string("malformed record: ") + e.what());
    }
}

}  // namespace uiminer::store
