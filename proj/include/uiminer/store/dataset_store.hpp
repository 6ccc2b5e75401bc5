#pragma once

#include "uiminer/device/capture.hpp"
#include "uiminer/store/layout.hpp"
#include "uiminer/store/record.hpp"

#include "json.hpp"

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

namespace uiminer::store {

struct AppMetadata {
    std::string category;
    std::optional<double> rating;
    std::optional<std::int64_t> installs;
};

struct RecordFilter {
    std::optional<RecordStatus> status;
    std::optional<std::string> app_id;
    std::optional<std::string> category;
};

struct IngestResult {
    std::string record_id;
    bool created = false;
};

struct SimilarRecord {
    DatasetRecord record;
    double distance = 0.0;
};

struct CorpusStats {
    std::size_t total = 0;
    std::map<std::string, std::size_t> per_category;
    std::map<std::string, std::size_t> per_status;
    std::map<std::string, std::size_t> per_app;
    // Only for categories whose apps carry the metadata.
    std::map<std::string, double> mean_rating_by_category;
    std::map<std::string, std::int64_t> installs_by_category;
    double retention_fraction = 1.0;

    nlohmann::json to_json() const;
    std::string to_csv() const;
    std::string to_table() const;
};

enum class CasOutcome { Applied, NotFound, Conflict };

// Directory-backed record store:
//   <root>/apps.json                  app metadata manifest
//   <root>/<app_id>/records.jsonl     append-only; last line per id wins,
//                                     {"tombstone": id} deletes
//   <root>/<app_id>/blobs/            screenshots and dumps
// Thread-safe: concurrent readers, writers serialized.
class DatasetStore {
public:
    // Creates the root directory when missing and loads every app directory.
    explicit DatasetStore(std::filesystem::path root);

    const std::filesystem::path& root() const { return root_; }

    // Atomic per record; replaces a record with the same id. Throws
    // InvalidArgument when the record violates its invariants, StorageFull,
    // Io.
    void put_record(const DatasetRecord& record);
    // Also writes blobs/<id>.png and blobs/<id>.xml and points the record at them.
    void put_record(DatasetRecord record, const std::vector<std::uint8_t>& screenshot, const std::string& dump);

    DatasetRecord get_record(const std::string& record_id) const;  // NotFound
    bool contains(const std::string& record_id) const;
    // Ordered by (app_id, captured_at, record_id).
    std::vector<DatasetRecord> list_records(const RecordFilter& filter = {}) const;
    void remove_record(const std::string& record_id);  // NotFound
    // Rewrites every records.jsonl with only live records.
    void compact();

    // Content-addressed ingest: record_id = structural hash + capture time.
    // Re-ingesting the same capture returns the existing id.
    IngestResult ingest_capture(const device::ScreenCapture& capture, bool render_stable);

    // Replaces the record only if its current status equals `expected`; the
    // write is flushed to disk before returning Applied.
    CasOutcome compare_and_set(const std::string& record_id, RecordStatus expected, const DatasetRecord& updated);

    CorpusStats corpus_stats() const;

    // k validated records nearest to the validated query by layout distance,
    // ties by record_id. Throws NotFound, InvalidArgument (query not
    // validated, k < 1), InsufficientCorpus.
    std::vector<SimilarRecord> retrieve_similar(const std::string& query_id, std::size_t k) const;

    vh::ViewTree load_tree(const DatasetRecord& record) const;
    LayoutImage layout_of(const DatasetRecord& record) const;
    std::vector<std::uint8_t> load_screenshot(const DatasetRecord& record) const;
    // Resolves <app>/<relative> inside the root; nullopt for paths escaping it.
    std::optional<std::filesystem::path> blob_path(const std::string& app_id, const std::string& relative) const;

    void set_app_metadata(const std::string& app_id, const AppMetadata& meta);
    std::optional<AppMetadata> app_metadata(const std::string& app_id) const;
    // Merges {"<app_id>": {"category": .., "rating": .., "installs": ..}}.
    void load_manifest(const std::filesystem::path& path);

private:
    void load();
    void append_line(const std::string& app_id, const std::string& line, bool sync);
    void write_manifest();
    void check_app_id(const std::string& app_id) const;
    void put_locked(DatasetRecord record, bool sync);

    std::filesystem::path root_;
    mutable std::shared_mutex mutex_;
    std::map<std::string, DatasetRecord> records_;
    std::map<std::string, AppMetadata> apps_;
    mutable std::mutex layout_mutex_;
    mutable std::map<std::string, LayoutImage> layout_cache_;
};

}  // namespace uiminer::store
