#pragma once

#include "uiminer/device/driver.hpp"
#include "uiminer/policy/policy.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace uiminer::explorer {

struct SessionConfig {
    // Exactly one budget kind must be set.
    std::optional<int> max_steps;
    std::optional<std::int64_t> max_duration_ms;
    int wait_ms = 2000;
    int max_render_retries = 2;
    bool restart_on_exit = true;
    int back_on_stuck_after = 3;
    std::uint64_t rng_seed = 0;
    std::optional<device::LoginHook> login_hook;

    // Throws InvalidArgument.
    void validate() const;
};

struct CaptureEntry {
    device::ScreenCapture capture;
    bool stable = true;
    std::string structural_hash;
};

// One loop iteration. A step either runs a policy plan, a login script, a
// back navigation, or only records a restart.
struct TraceStep {
    std::size_t capture_index = 0;
    std::vector<device::Action> plan;
    std::vector<device::Action> executed;
    std::vector<device::ExecutionResult> results;
    std::string reply;
    bool used_fallback = false;
    bool back = false;
    bool login = false;
    bool restarted = false;
    std::string error;
};

struct SessionTrace {
    std::string app_id;
    std::string policy_name;
    std::vector<CaptureEntry> captures;
    std::vector<TraceStep> actions;
    std::set<std::string> visited_activities;
    std::int64_t started_at = 0;
    std::int64_t ended_at = 0;
    bool aborted = false;
    std::string abort_reason;
};

SessionTrace run_session(device::Driver& driver, const policy::Policy& policy, const SessionConfig& config);

// |visited ∩ declared| / |declared|. Throws EmptyDeclared.
double activity_coverage(const SessionTrace& trace, const std::set<std::string>& declared);
double activity_coverage(const std::set<std::string>& visited, const std::set<std::string>& declared);

// Writes trace.json plus captures/NNNN.xml and captures/NNNN.png.
void save_trace(const SessionTrace& trace, const std::filesystem::path& dir);
SessionTrace load_trace(const std::filesystem::path& dir);

}  // namespace uiminer::explorer
