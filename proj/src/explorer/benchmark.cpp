#include "uiminer/explorer/benchmark.hpp"

#include "uiminer/device/sim_driver.hpp"
#include "uiminer/error.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <thread>

namespace uiminer::explorer {

double median(std::vector<double> values) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

namespace {

std::string fixed4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    return out + "\"";
}

}  // namespace

CoverageReport run_benchmark(const std::vector<std::shared_ptr<const device::SimApp>>& apps,
                             const std::vector<std::shared_ptr<const policy::Policy>>& policies,
                             const SessionConfig& config, const std::vector<std::uint64_t>& seeds, int jobs) {
    if (apps.empty()) throw Error(ErrorKind::EmptyBenchmark, "no apps");
    if (policies.empty()) throw Error(ErrorKind::EmptyBenchmark, "no policies");
    if (seeds.empty()) throw Error(ErrorKind::EmptyBenchmark, "no seeds");
    config.validate();

    CoverageReport report;
    for (const auto& app : apps) {
        for (const auto& p : policies) {
            for (auto seed : seeds) {
                BenchmarkCell cell;
                cell.app_id = app->app_id;
                cell.policy_name = p->name();
                cell.seed = seed;
                cell.declared = app->declared_activities.size();
                report.cells.push_back(cell);
            }
        }
    }

    const std::size_t per_app = policies.size() * seeds.size();
    auto run_cell = [&](std::size_t i) {
        auto& cell = report.cells[i];
        const auto& app = apps[i / per_app];
        const auto& pol = policies[(i % per_app) / seeds.size()];
        SessionConfig cfg = config;
        cfg.rng_seed = cell.seed;
        try {
            device::SimDriver driver(app);
            const auto trace = run_session(driver, *pol, cfg);
            cell.coverage = activity_coverage(trace, app->declared_activities);
            for (const auto& a : trace.visited_activities) cell.visited += app->declared_activities.count(a);
            if (trace.aborted) cell.error = trace.abort_reason;
        } catch (const std::exception& e) {
            cell.coverage = 0.0;
            cell.error = e.what();
        }
    };

    const std::size_t n = report.cells.size();
    const std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), 1, n);
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) run_cell(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) run_cell(i);
            });
        }
        for (auto& t : pool) t.join();
    }

    for (const auto& p : policies) {
        std::vector<double> app_means;
        for (const auto& app : apps) {
            double sum = 0.0;
            for (const auto& cell : report.cells) {
                if (cell.app_id == app->app_id && cell.policy_name == p->name()) sum += cell.coverage;
            }
            const double mean = sum / static_cast<double>(seeds.size());
            report.per_app[p->name()][app->app_id] = mean;
            app_means.push_back(mean);
        }
        report.median[p->name()] = median(app_means);
    }
    return report;
}

std::string CoverageReport::to_csv() const {
    std::string out = "app_id,policy,seed,coverage,visited,declared,error\n";
    for (const auto& c : cells) {
        out += csv_field(c.app_id) + "," + csv_field(c.policy_name) + "," + std::to_string(c.seed) + "," +
               fixed4(c.coverage) + "," + std::to_string(c.visited) + "," + std::to_string(c.declared) + "," +
               csv_field(c.error) + "\n";
    }
    return out;
}

std::string CoverageReport::to_table() const {
    std::vector<std::string> apps;
    for (const auto& c : cells) {
        if (std::find(apps.begin(), apps.end(), c.app_id) == apps.end()) apps.push_back(c.app_id);
    }
    std::size_t w = 6;
    for (const auto& a : apps) w = std::max(w, a.size());

    auto pad = [](std::string s, std::size_t width) {
        if (s.size() < width) s.append(width - s.size(), ' ');
        return s;
    };
    std::string out = pad("app", w);
    for (const auto& [policy, _] : median) out += "  " + pad(policy, std::max<std::size_t>(policy.size(), 8));
    out += "\n";
    for (const auto& app : apps) {
        out += pad(app, w);
        for (const auto& [policy, _] : median) {
            out += "  " + pad(fixed4(per_app.at(policy).at(app)), std::max<std::size_t>(policy.size(), 8));
        }
        out += "\n";
    }
    out += pad("median", w);
    for (const auto& [policy, m] : median) out += "  " + pad(fixed4(m), std::max<std::size_t>(policy.size(), 8));
    out += "\n";
    return out;
}

}  // namespace uiminer::explorer
