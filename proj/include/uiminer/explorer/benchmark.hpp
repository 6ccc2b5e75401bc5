#pragma once

#include "uiminer/device/sim_app.hpp"
#include "uiminer/explorer/session.hpp"
#include "uiminer/policy/policy.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace uiminer::explorer {

struct BenchmarkCell {
    std::string app_id;
    std::string policy_name;
    std::uint64_t seed = 0;
    double coverage = 0.0;
    std::size_t visited = 0;
    std::size_t declared = 0;
    std::string error;  // non-empty when the session failed; coverage is then 0
};

struct CoverageReport {
    // Ordered app-major, then policy, then seed, independent of scheduling.
    std::vector<BenchmarkCell> cells;
    // policy -> app -> mean coverage over seeds
    std::map<std::string, std::map<std::string, double>> per_app;
    // policy -> median over apps of per_app
    std::map<std::string, double> median;

    std::string to_csv() const;
    std::string to_table() const;
};

double median(std::vector<double> values);

// Runs one session per (app, policy, seed) on a fresh SimDriver, using
// `jobs` worker threads. config.rng_seed is replaced by each cell's seed.
// Throws EmptyBenchmark when apps or policies is empty.
CoverageReport run_benchmark(const std::vector<std::shared_ptr<const device::SimApp>>& apps,
                             const std::vector<std::shared_ptr<const policy::Policy>>& policies,
                             const SessionConfig& config, const std::vector<std::uint64_t>& seeds, int jobs = 1);

}  // namespace uiminer::explorer
