#include "uiminer/store/dataset_store.hpp"

#include "uiminer/error.hpp"
#include "uiminer/noise/pipeline.hpp"
#include "uiminer/noise/structural_hash.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fcntl.h>
#include <fstream>
#include <iterator>
#include <sstream>
#include <unistd.h>

namespace uiminer::store {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kRecordsFile = "records.jsonl";
constexpr const char* kManifestFile = "apps.json";

[[noreturn]] void throw_io(const fs::path& path, int err) {
    if (err == ENOSPC || err == EDQUOT) throw Error(ErrorKind::StorageFull, path.string());
    throw Error(ErrorKind::Io, path.string() + ": " + std::strerror(err));
}

void write_all(int fd, const char* data, std::size_t size, const fs::path& path) {
    while (size > 0) {
        const ssize_t n = ::write(fd, data, size);
        if (n < 0) {
            if (errno == EINTR) continue;
            const int err = errno;
            ::close(fd);
            throw_io(path, err);
        }
        data += n;
        size -= static_cast<std::size_t>(n);
    }
}

// Writes to a temporary sibling, fsyncs, then renames over the target.
void write_atomically(const fs::path& path, std::string_view bytes) {
    const fs::path tmp = path.string() + ".tmp";
    const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
    if (fd < 0) throw_io(tmp, errno);
    write_all(fd, bytes.data(), bytes.size(), tmp);
    if (::fsync(fd) != 0) {
        const int err = errno;
        ::close(fd);
        throw_io(tmp, err);
    }
    ::close(fd);
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw Error(ErrorKind::Io, "rename " + tmp.string() + ": " + ec.message());
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

bool record_less(const DatasetRecord& a, const DatasetRecord& b) {
    return std::tie(a.app_id, a.captured_at, a.record_id) < std::tie(b.app_id, b.captured_at, b.record_id);
}

json metadata_json(const AppMetadata& m) {
    json j = {{"category", m.category}};
    if (m.rating) j["rating"] = *m.rating;
    if (m.installs) j["installs"] = *m.installs;
    return j;
}

AppMetadata metadata_from(const json& j) {
    AppMetadata m;
    m.category = j.value("category", "");
    if (j.contains("rating") && j["rating"].is_number()) m.rating = j["rating"].get<double>();
    if (j.contains("installs") && j["installs"].is_number()) m.installs = j["installs"].get<std::int64_t>();
    return m;
}

}  // namespace

DatasetStore::DatasetStore(fs::path root) : root_(std::move(root)) {
    std::error_code ec;
    fs::create_directories(root_, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create " + root_.string() + ": " + ec.message());
    load();
}

void DatasetStore::check_app_id(const std::string& app_id) const {
    if (app_id.empty() || app_id == "." || app_id == ".." || app_id.find_first_of("/\\") != std::string::npos ||
        app_id.find('\0') != std::string::npos) {
        throw Error(ErrorKind::InvalidArgument, "unusable app_id '" + app_id + "'");
    }
}

void DatasetStore::load() {
    std::unique_lock lock(mutex_);
    records_.clear();
    apps_.clear();
    const fs::path manifest = root_ / kManifestFile;
    if (fs::exists(manifest)) {
        try {
            const auto j = json::parse(read_file(manifest));
            for (const auto& [app, meta] : j.items()) apps_[app] = metadata_from(meta);
        } catch (const json::exception& e) {
            throw Error(ErrorKind::Io, manifest.string() + ": " + e.what());
        }
    }
    std::vector<fs::path> dirs;
    for (const auto& entry : fs::directory_iterator(root_)) {
        if (entry.is_directory() && fs::exists(entry.path() / kRecordsFile)) dirs.push_back(entry.path());
    }
    std::sort(dirs.begin(), dirs.end());
    for (const auto& dir : dirs) {
        std::ifstream in(dir / kRecordsFile);
        std::string line;
        std::size_t line_no = 0;
        std::vector<std::string> lines;
        while (std::getline(in, line)) lines.push_back(line);
        for (const auto& l : lines) {
            ++line_no;
            if (l.empty()) continue;
            json j;
            try {
                j = json::parse(l);
            } catch (const json::exception&) {
                // A torn final line from an interrupted append is ignored.
                if (line_no == lines.size()) break;
                throw Error(ErrorKind::Io, (dir / kRecordsFile).string() + ":" + std::to_string(line_no) + ": bad JSON");
            }
            if (j.contains("tombstone")) {
                records_.erase(j["tombstone"].get<std::string>());
                continue;
            }
            try {
                auto rec = record_from_json(j);
                records_[rec.record_id] = std::move(rec);
            } catch (const std::exception& e) {
                throw Error(ErrorKind::Io,
                            (dir / kRecordsFile).string() + ":" + std::to_string(line_no) + ": " + e.what());
            }
        }
    }
}

void DatasetStore::append_line(const std::string& app_id, const std::string& line, bool sync) {
    const fs::path dir = root_ / app_id;
    std::error_code ec;
    fs::create_directories(dir / "blobs", ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());
    const fs::path path = dir / kRecordsFile;
    const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd < 0) throw_io(path, errno);
    const std::string data = line + "\n";
    write_all(fd, data.data(), data.size(), path);
    if (sync && ::fsync(fd) != 0) {
        const int err = errno;
        ::close(fd);
        throw_io(path, err);
    }
    ::close(fd);
}

void DatasetStore::put_locked(DatasetRecord record, bool sync) {
    check_app_id(record.app_id);
    if (auto problem = validate_record(record); !problem.empty()) {
        throw Error(ErrorKind::InvalidArgument, record.record_id + ": " + problem);
    }
    if (record.app_category.empty()) {
        if (auto it = apps_.find(record.app_id); it != apps_.end()) record.app_category = it->second.category;
    }
    append_line(record.app_id, to_json(record).dump(), sync);
    {
        std::lock_guard cache_lock(layout_mutex_);
        layout_cache_.erase(record.record_id);
    }
    records_[record.record_id] = std::move(record);
}

void DatasetStore::put_record(const DatasetRecord& record) {
    std::unique_lock lock(mutex_);
    put_locked(record, false);
}

void DatasetStore::put_record(DatasetRecord record, const std::vector<std::uint8_t>& screenshot, const std::string& dump) {
    check_app_id(record.app_id);
    if (record.record_id.empty() || record.record_id.find('/') != std::string::npos) {
        throw Error(ErrorKind::InvalidArgument, "unusable record_id '" + record.record_id + "'");
    }
    std::unique_lock lock(mutex_);
    const fs::path blobs = root_ / record.app_id / "blobs";
    std::error_code ec;
    fs::create_directories(blobs, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create " + blobs.string() + ": " + ec.message());
    record.screenshot_path = "blobs/" + record.record_id + ".png";
    record.dump_path = "blobs/" + record.record_id + ".xml";
    write_atomically(blobs / (record.record_id + ".png"),
                     std::string_view(reinterpret_cast<const char*>(screenshot.data()), screenshot.size()));
    write_atomically(blobs / (record.record_id + ".xml"), dump);
    put_locked(std::move(record), false);
}

DatasetRecord DatasetStore::get_record(const std::string& record_id) const {
    std::shared_lock lock(mutex_);
    const auto it = records_.find(record_id);
    if (it == records_.end()) throw Error(ErrorKind::NotFound, "record " + record_id);
    return it->second;
}

bool DatasetStore::contains(const std::string& record_id) const {
    std::shared_lock lock(mutex_);
    return records_.count(record_id) > 0;
}

std::vector<DatasetRecord> DatasetStore::list_records(const RecordFilter& filter) const {
    std::vector<DatasetRecord> out;
    {
        std::shared_lock lock(mutex_);
        for (const auto& [_, r] : records_) {
            if (filter.status && r.status != *filter.status) continue;
            if (filter.app_id && r.app_id != *filter.app_id) continue;
            if (filter.category && r.app_category != *filter.category) continue;
            out.push_back(r);
        }
    }
    std::sort(out.begin(), out.end(), record_less);
    return out;
}

void DatasetStore::remove_record(const std::string& record_id) {
    std::unique_lock lock(mutex_);
    const auto it = records_.find(record_id);
    if (it == records_.end()) throw Error(ErrorKind::NotFound, "record " + record_id);
    append_line(it->second.app_id, json{{"tombstone", record_id}}.dump(), false);
    records_.erase(it);
}

void DatasetStore::compact() {
    std::unique_lock lock(mutex_);
    std::map<std::string, std::vector<const DatasetRecord*>> by_app;
    for (const auto& [_, r] : records_) by_app[r.app_id].push_back(&r);
    for (const auto& entry : fs::directory_iterator(root_)) {
        if (!entry.is_directory() || !fs::exists(entry.path() / kRecordsFile)) continue;
        const std::string app = entry.path().filename().string();
        auto recs = by_app[app];
        std::sort(recs.begin(), recs.end(), [](const auto* a, const auto* b) { return record_less(*a, *b); });
        std::string content;
        for (const auto* r : recs) content += to_json(*r).dump() + "\n";
        write_atomically(entry.path() / kRecordsFile, content);
    }
}

IngestResult DatasetStore::ingest_capture(const device::ScreenCapture& capture, bool render_stable) {
    DatasetRecord record;
    record.tree_digest = noise::structural_hash(capture.tree);
    record.record_id = make_record_id(record.tree_digest, capture.captured_at);
    if (contains(record.record_id)) return {record.record_id, false};
    record.app_id = capture.app_id;
    record.activity_name = capture.activity_name;
    record.captured_at = capture.captured_at;
    record.screen_width = capture.tree.screen_width;
    record.screen_height = capture.tree.screen_height;
    record.render_stable = render_stable;
    record.status = RecordStatus::Pending;
    const std::string dump = capture.raw_dump.empty() ? vh::serialize_hierarchy(capture.tree) : capture.raw_dump;
    const std::string id = record.record_id;
    put_record(std::move(record), capture.screenshot, dump);
    return {id, true};
}

CasOutcome DatasetStore::compare_and_set(const std::string& record_id, RecordStatus expected,
                                         const DatasetRecord& updated) {
    if (updated.record_id != record_id) {
        throw Error(ErrorKind::InvalidArgument, "record id mismatch in compare_and_set");
    }
    std::unique_lock lock(mutex_);
    const auto it = records_.find(record_id);
    if (it == records_.end()) return CasOutcome::NotFound;
    if (it->second.status != expected) return CasOutcome::Conflict;
    put_locked(updated, true);
    return CasOutcome::Applied;
}

// ---------------------------------------------------------------------------

nlohmann::json CorpusStats::to_json() const {
    json j = {{"total", total},
              {"per_category", per_category},
              {"per_status", per_status},
              {"per_app", per_app},
              {"retention_fraction", retention_fraction}};
    if (!mean_rating_by_category.empty()) j["mean_rating_by_category"] = mean_rating_by_category;
    if (!installs_by_category.empty()) j["installs_by_category"] = installs_by_category;
    return j;
}

std::string CorpusStats::to_csv() const {
    std::ostringstream out;
    out << "section,key,value\n";
    out << "total,," << total << "\n";
    for (const auto& [k, v] : per_category) out << "category," << k << "," << v << "\n";
    for (const auto& [k, v] : per_status) out << "status," << k << "," << v << "\n";
    for (const auto& [k, v] : per_app) out << "app," << k << "," << v << "\n";
    for (const auto& [k, v] : mean_rating_by_category) out << "mean_rating," << k << "," << v << "\n";
    for (const auto& [k, v] : installs_by_category) out << "installs," << k << "," << v << "\n";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", retention_fraction);
    out << "retention,," << buf << "\n";
    return out.str();
}

std::string CorpusStats::to_table() const {
    std::ostringstream out;
    char buf[64];
    out << "total records: " << total << "\n";
    std::snprintf(buf, sizeof buf, "%.1f%%", retention_fraction * 100.0);
    out << "retention:     " << buf << "\n";
    auto section = [&](const char* title, const std::map<std::string, std::size_t>& m) {
        out << title << ":\n";
        for (const auto& [k, v] : m) out << "  " << (k.empty() ? "(none)" : k) << "  " << v << "\n";
    };
    section("by status", per_status);
    section("by category", per_category);
    section("by app", per_app);
    return out.str();
}

CorpusStats DatasetStore::corpus_stats() const {
    CorpusStats s;
    std::shared_lock lock(mutex_);
    for (auto st : {RecordStatus::Pending, RecordStatus::AutoRemoved, RecordStatus::Flagged, RecordStatus::Validated}) {
        s.per_status[std::string(to_string(st))] = 0;
    }
    std::size_t auto_removed = 0, human_removed = 0;
    for (const auto& [_, r] : records_) {
        ++s.total;
        ++s.per_category[r.app_category];
        ++s.per_status[std::string(to_string(r.status))];
        ++s.per_app[r.app_id];
        if (r.status == RecordStatus::AutoRemoved) ++auto_removed;
        if (r.status == RecordStatus::Flagged) ++human_removed;
    }
    s.retention_fraction = noise::PipelineReport::from_counts(s.total, auto_removed, human_removed).retention_fraction;

    std::map<std::string, std::pair<double, int>> rating_sum;
    for (const auto& [app, meta] : apps_) {
        if (!s.per_app.count(app)) continue;
        if (meta.rating) {
            rating_sum[meta.category].first += *meta.rating;
            ++rating_sum[meta.category].second;
        }
        if (meta.installs) s.installs_by_category[meta.category] += *meta.installs;
    }
    for (const auto& [cat, sum] : rating_sum) s.mean_rating_by_category[cat] = sum.first / sum.second;
    return s;
}

// ---------------------------------------------------------------------------

std::optional<fs::path> DatasetStore::blob_path(const std::string& app_id, const std::string& relative) const {
    if (app_id.empty() || app_id == "." || app_id == ".." || app_id.find('/') != std::string::npos) return std::nullopt;
    const fs::path rel(relative);
    if (rel.empty() || rel.is_absolute()) return std::nullopt;
    for (const auto& part : rel) {
        if (part == "..") return std::nullopt;
    }
    return root_ / app_id / rel;
}

vh::ViewTree DatasetStore::load_tree(const DatasetRecord& record) const {
    const auto path = blob_path(record.app_id, record.dump_path);
    if (!path) throw Error(ErrorKind::NotFound, "dump for " + record.record_id);
    if (!fs::exists(*path)) throw Error(ErrorKind::NotFound, path->string());
    return vh::parse_hierarchy(read_file(*path), record.screen_width, record.screen_height);
}

std::vector<std::uint8_t> DatasetStore::load_screenshot(const DatasetRecord& record) const {
    const auto path = blob_path(record.app_id, record.screenshot_path);
    if (!path || !fs::exists(*path)) return {};
    const auto bytes = read_file(*path);
    return {bytes.begin(), bytes.end()};
}

LayoutImage DatasetStore::layout_of(const DatasetRecord& record) const {
    {
        std::lock_guard lock(layout_mutex_);
        if (auto it = layout_cache_.find(record.record_id); it != layout_cache_.end()) return it->second;
    }
    auto image = render_layout(load_tree(record));
    std::lock_guard lock(layout_mutex_);
    layout_cache_[record.record_id] = image;
    return image;
}

std::vector<SimilarRecord> DatasetStore::retrieve_similar(const std::string& query_id, std::size_t k) const {
    if (k < 1) throw Error(ErrorKind::InvalidArgument, "k must be >= 1");
    const DatasetRecord query = get_record(query_id);
    if (query.status != RecordStatus::Validated) {
        throw Error(ErrorKind::InvalidArgument, "query " + query_id + " is not validated");
    }
    const auto candidates = list_records(RecordFilter{RecordStatus::Validated, std::nullopt, std::nullopt});
    if (candidates.size() - 1 < k) {
        throw Error(ErrorKind::InsufficientCorpus, "need " + std::to_string(k) + " candidates, have " +
                                                       std::to_string(candidates.size() - 1));
    }
    const LayoutImage q = layout_of(query);
    std::vector<SimilarRecord> scored;
    for (const auto& c : candidates) {
        if (c.record_id == query_id) continue;
        scored.push_back({c, layout_distance(q, layout_of(c))});
    }
    std::sort(scored.begin(), scored.end(), [](const SimilarRecord& a, const SimilarRecord& b) {
        if (a.distance != b.distance) return a.distance < b.distance;
        return a.record.record_id < b.record.record_id;
    });
    scored.resize(k);
    return scored;
}

// ---------------------------------------------------------------------------

void DatasetStore::write_manifest() {
    json j = json::object();
    for (const auto& [app, meta] : apps_) j[app] = metadata_json(meta);
    write_atomically(root_ / kManifestFile, j.dump(2) + "\n");
}

void DatasetStore::set_app_metadata(const std::string& app_id, const AppMetadata& meta) {
    check_app_id(app_id);
    std::unique_lock lock(mutex_);
    apps_[app_id] = meta;
    write_manifest();
}

std::optional<AppMetadata> DatasetStore::app_metadata(const std::string& app_id) const {
    std::shared_lock lock(mutex_);
    const auto it = apps_.find(app_id);
    if (it == apps_.end()) return std::nullopt;
    return it->second;
}

void DatasetStore::load_manifest(const fs::path& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw Error(ErrorKind::InvalidArgument, path.string() + ": " + e.what());
    }
    if (!j.is_object()) throw Error(ErrorKind::InvalidArgument, path.string() + ": expected an object");
    std::unique_lock lock(mutex_);
    for (const auto& [app, meta] : j.items()) {
        check_app_id(app);
        apps_[app] = metadata_from(meta);
    }
    write_manifest();
}

}  // namespace uiminer::store
