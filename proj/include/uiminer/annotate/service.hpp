#pragma once

#include "uiminer/store/dataset_store.hpp"
#include "uiminer/util/clock.hpp"

#include "json.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace httplib {
class Server;
}

namespace uiminer::annotate {

enum class Verdict { Valid, Invalid };

struct AnnotationDecision {
    std::string record_id;
    Verdict verdict = Verdict::Valid;
    // Subset of partially_rendered, overlaid_view_hierarchy, duplicate_ui, other.
    std::vector<std::string> reasons;
    std::string other_text;
    std::string annotator_id;
};

// Parses a POST body; throws InvalidArgument on malformed JSON or shape.
AnnotationDecision decision_from_json(const nlohmann::json& j, const std::string& record_id);
// Empty when the decision satisfies its invariants, else the violation.
std::string validate_decision(const AnnotationDecision& d);
// Applies a decision to a pending record.
store::DatasetRecord apply_decision(store::DatasetRecord record, const AnnotationDecision& d, std::int64_t decided_at);

// Decided records (validated or flagged) in store order; floor(f*N) of them,
// drawn without replacement from `seed`.
std::vector<store::DatasetRecord> audit_sample(const store::DatasetStore& store, double fraction, std::uint64_t seed);

struct ServiceOptions {
    std::string allowed_origin = "*";
    std::size_t default_page_size = 50;
    std::size_t max_page_size = 500;
    util::Clock* clock = nullptr;  // system clock when null
};

// HTTP API:
//   GET  /uis?status=pending&limit=n&cursor=c
//   POST /uis/{id}/decision
//   GET  /audit/sample?fraction=f&seed=s
//   GET  /blobs/{app_id}/{path}
//   GET  /health
// A null store answers 503 everywhere except /health.
class AnnotationService {
public:
    explicit AnnotationService(std::shared_ptr<store::DatasetStore> store, ServiceOptions options = {});
    ~AnnotationService();

    AnnotationService(const AnnotationService&) = delete;
    AnnotationService& operator=(const AnnotationService&) = delete;

    // Binds and serves on the calling thread until stop().
    bool listen(const std::string& host, int port);
    // Binds to an ephemeral port and returns it (-1 on failure); follow with serve().
    int bind_any_port(const std::string& host);
    bool serve();
    void stop();
    void wait_until_ready() const;

private:
    void install_routes();

    std::shared_ptr<store::DatasetStore> store_;
    ServiceOptions options_;
    util::SystemClock system_clock_;
    std::unique_ptr<httplib::Server> server_;
};

}  // namespace uiminer::annotate
