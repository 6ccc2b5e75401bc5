#include "uiminer/annotate/service.hpp"

#include "uiminer/error.hpp"
#include "uiminer/util/rng.hpp"

#include "httplib.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <set>

namespace uiminer::annotate {

using nlohmann::json;
using store::DatasetRecord;
using store::RecordStatus;

namespace {

const std::set<std::string>& known_reasons() {
    static const std::set<std::string> reasons = {"partially_rendered", "overlaid_view_hierarchy", "duplicate_ui",
                                                  "other"};
    return reasons;
}

noise::NoiseKind kind_for_reason(const std::string& reason) {
    if (reason == "partially_rendered") return noise::NoiseKind::PartialRender;
    if (reason == "overlaid_view_hierarchy") return noise::NoiseKind::Overlaid;
    if (reason == "duplicate_ui") return noise::NoiseKind::Duplicate;
    return noise::NoiseKind::Other;
}

std::string to_hex(std::string_view s) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    for (unsigned char c : s) {
        out.push_back(digits[c >> 4]);
        out.push_back(digits[c & 15]);
    }
    return out;
}

std::optional<std::string> from_hex(std::string_view s) {
    if (s.size() % 2) return std::nullopt;
    auto val = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        return -1;
    };
    std::string out;
    for (std::size_t i = 0; i < s.size(); i += 2) {
        const int hi = val(s[i]), lo = val(s[i + 1]);
        if (hi < 0 || lo < 0) return std::nullopt;
        out.push_back(static_cast<char>(hi * 16 + lo));
    }
    return out;
}

// Cursor = position after the last returned record in listing order.
std::string make_cursor(const DatasetRecord& r) {
    return to_hex(json::array({r.app_id, r.captured_at, r.record_id}).dump());
}

struct CursorKey {
    std::string app_id;
    std::int64_t captured_at = 0;
    std::string record_id;
};

std::optional<CursorKey> parse_cursor(const std::string& cursor) {
    const auto raw = from_hex(cursor);
    if (!raw) return std::nullopt;
    try {
        const auto j = json::parse(*raw);
        return CursorKey{j.at(0).get<std::string>(), j.at(1).get<std::int64_t>(), j.at(2).get<std::string>()};
    } catch (const json::exception&) {
        return std::nullopt;
    }
}

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
    send_json(res, status, {{"error", message}});
}

std::optional<std::size_t> parse_size(const std::string& s) {
    if (s.empty() || s.size() > 9 || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(std::stoul(s));
}

std::optional<double> parse_double(const std::string& s) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) return std::nullopt;
        return v;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

std::optional<std::uint64_t> parse_u64(const std::string& s) {
    if (s.empty() || s.size() > 20 || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        return std::nullopt;
    }
    try {
        return std::stoull(s);
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

int status_for(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::NotFound: return 404;
        case ErrorKind::InvalidArgument: return 400;
        case ErrorKind::Io:
        case ErrorKind::StorageFull: return 503;
        default: return 500;
    }
}

json summary_json(const DatasetRecord& r) {
    return {{"record_id", r.record_id},
            {"app_id", r.app_id},
            {"status", store::to_string(r.status)},
            {"annotator_id", r.annotator_id ? json(*r.annotator_id) : json(nullptr)},
            {"decided_at", r.decided_at ? json(*r.decided_at) : json(nullptr)}};
}

}  // namespace

AnnotationDecision decision_from_json(const json& j, const std::string& record_id) {
    if (!j.is_object()) throw Error(ErrorKind::InvalidArgument, "decision must be a JSON object");
    AnnotationDecision d;
    d.record_id = record_id;
    try {
        const auto verdict = j.at("verdict").get<std::string>();
        if (verdict == "valid") d.verdict = Verdict::Valid;
        else if (verdict == "invalid") d.verdict = Verdict::Invalid;
        else throw Error(ErrorKind::InvalidArgument, "verdict must be 'valid' or 'invalid'");
        if (j.contains("reasons")) d.reasons = j.at("reasons").get<std::vector<std::string>>();
        if (j.contains("other_text") && !j.at("other_text").is_null()) d.other_text = j.at("other_text").get<std::string>();
        if (j.contains("annotator_id")) d.annotator_id = j.at("annotator_id").get<std::string>();
    } catch (const json::exception& e) {
        throw Error(ErrorKind::InvalidArgument, e.what());
    }
    return d;
}

std::string validate_decision(const AnnotationDecision& d) {
    if (d.annotator_id.empty()) return "annotator_id is required";
    std::set<std::string> seen;
    for (const auto& r : d.reasons) {
        if (!known_reasons().count(r)) return "unknown reason '" + r + "'";
        if (!seen.insert(r).second) return "duplicate reason '" + r + "'";
    }
    if (d.verdict == Verdict::Invalid && d.reasons.empty()) return "invalid verdict needs at least one reason";
    if (d.verdict == Verdict::Valid && !d.reasons.empty()) return "valid verdict cannot carry reasons";
    const bool has_other = seen.count("other") > 0;
    if (has_other && d.other_text.empty()) return "other_text is required with reason 'other'";
    if (!has_other && !d.other_text.empty()) return "other_text is only allowed with reason 'other'";
    return {};
}

DatasetRecord apply_decision(DatasetRecord record, const AnnotationDecision& d, std::int64_t decided_at) {
    record.annotator_id = d.annotator_id;
    record.decided_at = decided_at;
    if (d.verdict == Verdict::Valid) {
        record.status = RecordStatus::Validated;
        return record;
    }
    record.status = RecordStatus::Flagged;
    for (const auto& reason : d.reasons) {
        const auto kind = kind_for_reason(reason);
        std::string detail = kind == noise::NoiseKind::Other ? d.other_text : reason;
        record.flags.push_back({kind, std::move(detail), noise::FlagSource::Human});
    }
    return record;
}

std::vector<DatasetRecord> audit_sample(const store::DatasetStore& store, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction <= 1.0)) throw Error(ErrorKind::InvalidArgument, "fraction must be in (0, 1]");
    std::vector<DatasetRecord> decided;
    for (auto& r : store.list_records()) {
        if (r.status == RecordStatus::Validated || r.status == RecordStatus::Flagged) decided.push_back(std::move(r));
    }
    const auto n = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(decided.size()) + 1e-9));
    std::vector<DatasetRecord> out;
    for (auto i : util::sample_without_replacement(decided.size(), n, seed)) out.push_back(decided[i]);
    return out;
}

AnnotationService::AnnotationService(std::shared_ptr<store::DatasetStore> store, ServiceOptions options)
    : store_(std::move(store)), options_(options), server_(std::make_unique<httplib::Server>()) {
    install_routes();
}

AnnotationService::~AnnotationService() { stop(); }

bool AnnotationService::listen(const std::string& host, int port) { return server_->listen(host, port); }

int AnnotationService::bind_any_port(const std::string& host) { return server_->bind_to_any_port(host); }

bool AnnotationService::serve() { return server_->listen_after_bind(); }

void AnnotationService::stop() {
    if (server_) server_->stop();
}

void AnnotationService::wait_until_ready() const { server_->wait_until_ready(); }

void AnnotationService::install_routes() {
    auto& svr = *server_;
    const std::string origin = options_.allowed_origin;
    svr.set_default_headers({{"Access-Control-Allow-Origin", origin},
                             {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                             {"Access-Control-Allow-Headers", "Content-Type"},
                             {"Access-Control-Max-Age", "600"}});

    svr.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    svr.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
        send_json(res, 200, {{"ok", true}, {"store", store_ != nullptr}});
    });

    svr.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        try {
            std::rethrow_exception(ep);
        } catch (const Error& e) {
            send_error(res, status_for(e), e.what());
        } catch (const std::exception& e) {
            send_error(res, 500, e.what());
        }
    });

    svr.Get("/uis", [this](const httplib::Request& req, httplib::Response& res) {
        if (!store_) return send_error(res, 503, "store unavailable");
        RecordStatus status = RecordStatus::Pending;
        if (req.has_param("status")) {
            const auto s = store::record_status_from_string(req.get_param_value("status"));
            if (!s) return send_error(res, 400, "unknown status '" + req.get_param_value("status") + "'");
            status = *s;
        }
        std::size_t limit = options_.default_page_size;
        if (req.has_param("limit")) {
            const auto l = parse_size(req.get_param_value("limit"));
            if (!l || *l == 0) return send_error(res, 400, "limit must be a positive integer");
            limit = std::min(*l, options_.max_page_size);
        }
        std::optional<CursorKey> after;
        if (req.has_param("cursor") && !req.get_param_value("cursor").empty()) {
            after = parse_cursor(req.get_param_value("cursor"));
            if (!after) return send_error(res, 400, "malformed cursor");
        }

        const auto records = store_->list_records(store::RecordFilter{status, std::nullopt, std::nullopt});
        auto it = records.begin();
        if (after) {
            it = std::find_if(records.begin(), records.end(), [&](const DatasetRecord& r) {
                return std::tie(r.app_id, r.captured_at, r.record_id) >
                       std::tie(after->app_id, after->captured_at, after->record_id);
            });
        }
        json items = json::array();
        const DatasetRecord* last = nullptr;
        for (; it != records.end() && items.size() < limit; ++it) {
            json boxes = json::array();
            std::string tree_error;
            try {
                const auto tree = store_->load_tree(*it);
                for (const auto* leaf : vh::leaves(tree)) {
                    const auto& b = leaf->bounds;
                    boxes.push_back({{"left", b.left}, {"top", b.top}, {"right", b.right}, {"bottom", b.bottom},
                                     {"class", leaf->widget_class}, {"resource_id", leaf->resource_id}});
                }
            } catch (const Error& e) {
                tree_error = e.what();
            }
            json item = {{"record_id", it->record_id},
                         {"app_id", it->app_id},
                         {"app_category", it->app_category},
                         {"activity_name", it->activity_name},
                         {"status", store::to_string(it->status)},
                         {"screenshot_url", "/blobs/" + it->app_id + "/" + it->screenshot_path},
                         {"screen_width", it->screen_width},
                         {"screen_height", it->screen_height},
                         {"boxes", boxes}};
            if (!tree_error.empty()) item["tree_error"] = tree_error;
            items.push_back(std::move(item));
            last = &*it;
        }
        json body = {{"items", items}, {"next_cursor", nullptr}};
        if (last && it != records.end()) body["next_cursor"] = make_cursor(*last);
        send_json(res, 200, body);
    });

    svr.Post(R"(/uis/([^/]+)/decision)", [this](const httplib::Request& req, httplib::Response& res) {
        if (!store_) return send_error(res, 503, "store unavailable");
        const std::string id = req.matches[1];
        if (!store_->contains(id)) return send_error(res, 404, "unknown record " + id);
        json body;
        try {
            body = json::parse(req.body);
        } catch (const json::exception&) {
            return send_error(res, 400, "body is not valid JSON");
        }
        AnnotationDecision decision;
        try {
            decision = decision_from_json(body, id);
        } catch (const Error& e) {
            return send_error(res, 422, e.detail());
        }
        if (auto problem = validate_decision(decision); !problem.empty()) return send_error(res, 422, problem);

        const DatasetRecord current = store_->get_record(id);
        if (current.status != RecordStatus::Pending) {
            return send_error(res, 409, "record already " + std::string(store::to_string(current.status)));
        }
        util::Clock& clock = options_.clock ? *options_.clock : system_clock_;
        const auto updated = apply_decision(current, decision, clock.now_ms());
        switch (store_->compare_and_set(id, RecordStatus::Pending, updated)) {
            case store::CasOutcome::Applied: return send_json(res, 200, summary_json(updated));
            case store::CasOutcome::NotFound: return send_error(res, 404, "unknown record " + id);
            case store::CasOutcome::Conflict: return send_error(res, 409, "record already decided");
        }
    });

    svr.Get("/audit/sample", [this](const httplib::Request& req, httplib::Response& res) {
        if (!store_) return send_error(res, 503, "store unavailable");
        const auto fraction = req.has_param("fraction") ? parse_double(req.get_param_value("fraction")) : std::nullopt;
        if (!fraction || !(*fraction > 0.0 && *fraction <= 1.0)) {
            return send_error(res, 422, "fraction must be in (0, 1]");
        }
        std::uint64_t seed = 0;
        if (req.has_param("seed")) {
            const auto s = parse_u64(req.get_param_value("seed"));
            if (!s) return send_error(res, 400, "seed must be a non-negative integer");
            seed = *s;
        }
        const auto sample = audit_sample(*store_, *fraction, seed);
        json items = json::array();
        for (const auto& r : sample) items.push_back(summary_json(r));
        std::size_t decided = 0;
        for (const auto& r : store_->list_records()) {
            decided += r.status == RecordStatus::Validated || r.status == RecordStatus::Flagged;
        }
        send_json(res, 200, {{"fraction", *fraction}, {"seed", seed}, {"population", decided}, {"items", items}});
    });

    svr.Get(R"(/blobs/([^/]+)/(.+))", [this](const httplib::Request& req, httplib::Response& res) {
        if (!store_) return send_error(res, 503, "store unavailable");
        const auto path = store_->blob_path(req.matches[1], req.matches[2]);
        if (!path || !std::filesystem::is_regular_file(*path)) return send_error(res, 404, "no such blob");
        std::ifstream in(*path, std::ios::binary);
        std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
        const auto ext = path->extension().string();
        const char* type = ext == ".png" ? "image/png" : ext == ".xml" ? "application/xml" : "application/octet-stream";
        res.status = 200;
        res.set_content(std::move(bytes), type);
    });
}

}  // namespace uiminer::annotate
