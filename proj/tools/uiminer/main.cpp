#include "uiminer/annotate/service.hpp"
#include "uiminer/device/adb_driver.hpp"
#include "uiminer/device/sim_driver.hpp"
#include "uiminer/error.hpp"
#include "uiminer/explorer/benchmark.hpp"
#include "uiminer/explorer/session.hpp"
#include "uiminer/noise/pipeline.hpp"
#include "uiminer/policy/policy.hpp"
#include "uiminer/store/dataset_store.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#ifndef UIMINER_FIXTURE_DIR
#define UIMINER_FIXTURE_DIR "fixtures"
#endif

namespace fs = std::filesystem;
using namespace uiminer;
using nlohmann::json;

namespace {

// Thrown for bad flag values that CLI11 cannot catch itself.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    std::uint64_t seed = 0;
    bool fixed_clock = false;
    int jobs = 1;
    std::string adb_path;
    std::string serial;
    std::string llm_url;
    std::string prompt_file;
    std::string type_index_file;
    std::string scorer_url;
    bool no_role = false;
    bool no_primitives = false;
};

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
}

fs::path resolve_fixture(const std::string& name) {
    const fs::path direct(name);
    if (fs::is_regular_file(direct)) return direct;
    const fs::path base(UIMINER_FIXTURE_DIR);
    for (const auto& candidate : {base / (name + ".json"), base / "suite" / (name + ".json")}) {
        if (fs::is_regular_file(candidate)) return candidate;
    }
    throw UsageError("--device: no sim fixture named '" + name + "'");
}

policy::PromptTemplate prompt_template(const Common& c) {
    policy::PromptTemplate t = c.prompt_file.empty() ? policy::PromptTemplate{}
                                                     : policy::PromptTemplate::from_file(c.prompt_file);
    if (c.no_role) t.include_role = false;
    if (c.no_primitives) t.include_primitives = false;
    t.validate();
    return t;
}

std::shared_ptr<const policy::Policy> make_policy(const std::string& spec, const Common& c) {
    if (spec == "random") return std::make_shared<policy::RandomPolicy>();
    if (spec == "llm") {
        auto backend = std::make_shared<llm::RemoteBackend>(llm::remote_options_from_env(c.llm_url));
        return std::make_shared<policy::LlmPolicy>("llm", backend, prompt_template(c));
    }
    if (spec.rfind("scripted:", 0) == 0) {
        const std::string rules = spec.substr(9);
        if (rules.empty()) throw UsageError("--policy: scripted:<rules file> needs a file");
        auto backend = std::make_shared<llm::ScriptedBackend>(llm::ScriptedBackend::from_file(rules));
        return std::make_shared<policy::LlmPolicy>("scripted", backend, prompt_template(c));
    }
    throw UsageError("--policy: unknown policy '" + spec + "' (random | llm | scripted:<rules>)");
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
    std::vector<std::uint64_t> out;
    std::stringstream ss(text);
    std::string part;
    try {
        while (std::getline(ss, part, ',')) {
            const auto dash = part.find('-');
            if (dash == std::string::npos) {
                out.push_back(std::stoull(part));
                continue;
            }
            const auto lo = std::stoull(part.substr(0, dash));
            const auto hi = std::stoull(part.substr(dash + 1));
            if (hi < lo || hi - lo > 100000) throw UsageError("--seeds: bad range '" + part + "'");
            for (auto s = lo; s <= hi; ++s) out.push_back(s);
        }
    } catch (const std::logic_error&) {
        throw UsageError("--seeds: cannot parse '" + text + "'");
    }
    if (out.empty()) throw UsageError("--seeds: empty");
    return out;
}

explorer::SessionConfig session_config(int steps, double minutes, int wait_ms, std::uint64_t seed) {
    explorer::SessionConfig cfg;
    if ((steps > 0) == (minutes > 0)) throw UsageError("exactly one of --budget-steps / --budget-minutes is required");
    if (steps > 0) cfg.max_steps = steps;
    else cfg.max_duration_ms = static_cast<std::int64_t>(minutes * 60000.0);
    if (wait_ms < 0) throw UsageError("--wait-ms must be >= 0");
    cfg.wait_ms = wait_ms;
    cfg.rng_seed = seed;
    return cfg;
}

std::int64_t now_or_fixed(const Common& c) {
    return c.fixed_clock ? 0 : util::SystemClock().now_ms();
}

// ---------------------------------------------------------------------------

int cmd_explore(const Common& c, const std::string& device_spec, const std::string& policy_spec, int steps,
                double minutes, int wait_ms, const std::string& out_dir, const std::string& store_dir,
                const std::string& package) {
    const auto cfg = session_config(steps, minutes, wait_ms, c.seed);
    const auto pol = make_policy(policy_spec, c);

    std::unique_ptr<device::Driver> driver;
    if (device_spec.rfind("sim:", 0) == 0) {
        auto app = std::make_shared<const device::SimApp>(device::load_sim_app(resolve_fixture(device_spec.substr(4))));
        driver = std::make_unique<device::SimDriver>(app, now_or_fixed(c));
    } else if (device_spec == "adb") {
        if (package.empty()) throw UsageError("--app is required with --device adb");
        device::AdbOptions opts;
        opts.adb_path = c.adb_path;
        opts.serial = c.serial;
        opts.package = package;
        auto adb = std::make_unique<device::AdbDriver>(opts, std::make_shared<device::ProcessRunner>());
        adb->connect();
        adb->launch();
        driver = std::move(adb);
    } else {
        throw UsageError("--device: expected adb or sim:<fixture>, got '" + device_spec + "'");
    }

    const auto declared = driver->list_activities();
    const auto trace = explorer::run_session(*driver, *pol, cfg);
    explorer::save_trace(trace, out_dir);
    if (!store_dir.empty()) {
        store::DatasetStore st(store_dir);
        std::size_t created = 0;
        for (const auto& e : trace.captures) created += st.ingest_capture(e.capture, e.stable).created;
        std::printf("ingested %zu new records into %s\n", created, store_dir.c_str());
    }
    const double cov = explorer::activity_coverage(trace, declared);
    std::size_t hit = 0;
    for (const auto& a : trace.visited_activities) hit += declared.count(a);
    std::printf("app %s policy %s steps %zu captures %zu\n", trace.app_id.c_str(), trace.policy_name.c_str(),
                trace.actions.size(), trace.captures.size());
    std::printf("coverage %.4f (%zu/%zu activities)\n", cov, hit, declared.size());
    if (trace.aborted) {
        std::fprintf(stderr, "session aborted: %s\n", trace.abort_reason.c_str());
        return 1;
    }
    return 0;
}

int cmd_benchmark(const Common& c, const std::string& apps_dir, const std::string& policies, const std::string& seeds,
                  int steps, double minutes, int wait_ms, const std::string& out) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(apps_dir)) {
        const auto name = entry.path().filename().string();
        if (entry.is_regular_file() && entry.path().extension() == ".json" && name.find(".rules.") == std::string::npos &&
            name.find(".manifest.") == std::string::npos) {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    std::vector<std::shared_ptr<const device::SimApp>> apps;
    for (const auto& f : files) apps.push_back(std::make_shared<const device::SimApp>(device::load_sim_app(f)));

    std::vector<std::shared_ptr<const policy::Policy>> pols;
    std::stringstream ss(policies);
    std::string spec;
    while (std::getline(ss, spec, ',')) pols.push_back(make_policy(spec, c));

    const auto cfg = session_config(steps, minutes, wait_ms, c.seed);
    const auto report = explorer::run_benchmark(apps, pols, cfg, parse_seeds(seeds), c.jobs);
    if (!out.empty()) write_text(out, report.to_csv());
    std::fputs(report.to_table().c_str(), stdout);
    return 0;
}

int cmd_filter(const Common& c, const std::string& in_dir, const std::string& out_dir, const std::string& counts_file,
               const std::string& format) {
    noise::PipelineReport report;
    if (!counts_file.empty()) {
        json j;
        try {
            j = json::parse(read_text(counts_file));
            report = noise::PipelineReport::from_counts(j.at("total").get<std::size_t>(),
                                                        j.at("auto_removed").get<std::size_t>(),
                                                        j.value("human_removed", std::size_t{0}));
        } catch (const json::exception& e) {
            throw Error(ErrorKind::InvalidArgument, counts_file + ": " + e.what());
        }
    } else {
        if (in_dir.empty() || out_dir.empty()) throw UsageError("filter needs --in and --out (or --counts)");
        std::optional<noise::TypeIndexTable> table;
        if (!c.type_index_file.empty()) table = noise::TypeIndexTable::from_file(c.type_index_file);
        std::unique_ptr<noise::OverlayScorer> scorer;
        if (!c.scorer_url.empty()) scorer = std::make_unique<noise::HttpOverlayScorer>(c.scorer_url);

        store::DatasetStore in(in_dir);
        std::vector<noise::CorpusItem> items;
        std::vector<std::string> dumps;
        for (auto& r : in.list_records()) {
            noise::CorpusItem item;
            item.tree = in.load_tree(r);
            item.screenshot = in.load_screenshot(r);
            dumps.push_back(read_text(*in.blob_path(r.app_id, r.dump_path)));
            item.record = std::move(r);
            items.push_back(std::move(item));
        }
        noise::PipelineOptions opts;
        opts.table = table ? &*table : nullptr;
        opts.scorer = scorer.get();
        report = noise::run_pipeline(items, opts);

        const bool same = fs::weakly_canonical(in_dir) == fs::weakly_canonical(out_dir);
        if (same) {
            for (const auto& item : items) in.put_record(item.record);
        } else {
            store::DatasetStore out(out_dir);
            for (std::size_t i = 0; i < items.size(); ++i) {
                if (auto meta = in.app_metadata(items[i].record.app_id)) out.set_app_metadata(items[i].record.app_id, *meta);
                out.put_record(items[i].record, items[i].screenshot, dumps[i]);
            }
        }
    }
    if (format == "json") std::printf("%s\n", report.to_json().dump(2).c_str());
    else std::fputs(report.to_table().c_str(), stdout);
    return 0;
}

int cmd_stats(const std::string& store_dir, const std::string& format, const std::string& manifest) {
    store::DatasetStore st(store_dir);
    if (!manifest.empty()) st.load_manifest(manifest);
    const auto stats = st.corpus_stats();
    if (format == "csv") std::fputs(stats.to_csv().c_str(), stdout);
    else if (format == "json") std::printf("%s\n", stats.to_json().dump(2).c_str());
    else std::fputs(stats.to_table().c_str(), stdout);
    return 0;
}

int cmd_retrieve(const std::string& store_dir, const std::string& query, int top) {
    if (top < 1) throw UsageError("--top must be >= 1");
    store::DatasetStore st(store_dir);
    const auto hits = st.retrieve_similar(query, static_cast<std::size_t>(top));
    std::printf("rank  distance  record_id  app_id\n");
    for (std::size_t i = 0; i < hits.size(); ++i) {
        std::printf("%-4zu  %.6f  %s  %s\n", i + 1, hits[i].distance, hits[i].record.record_id.c_str(),
                    hits[i].record.app_id.c_str());
    }
    return 0;
}

annotate::AnnotationService* g_service = nullptr;

void on_signal(int) {
    if (g_service) g_service->stop();
}

int cmd_annotate_serve(const Common& c, const std::string& store_dir, const std::string& host, int port,
                       const std::string& origin) {
    if (port < 0 || port > 65535) throw UsageError("--port out of range");
    std::shared_ptr<store::DatasetStore> st;
    try {
        st = std::make_shared<store::DatasetStore>(store_dir);
    } catch (const Error& e) {
        std::fprintf(stderr, "store unavailable, serving 503: %s\n", e.what());
    }
    util::ManualClock fixed(0);
    annotate::ServiceOptions opts;
    opts.allowed_origin = origin;
    if (c.fixed_clock) opts.clock = &fixed;
    annotate::AnnotationService service(st, opts);
    g_service = &service;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    int bound = port;
    if (port == 0) {
        bound = service.bind_any_port(host);
        if (bound < 0) throw Error(ErrorKind::Io, "cannot bind " + host);
        std::printf("listening on http://%s:%d\n", host.c_str(), bound);
        std::fflush(stdout);
        service.serve();
    } else {
        std::printf("listening on http://%s:%d\n", host.c_str(), bound);
        std::fflush(stdout);
        if (!service.listen(host, port)) throw Error(ErrorKind::Io, "cannot listen on " + host + ":" + std::to_string(port));
    }
    g_service = nullptr;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"uiminer: mobile UI mining toolkit"};
    app.require_subcommand(1);
    Common c;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--seed", c.seed, "Seed for every random choice");
        sub->add_flag("--fixed-clock", c.fixed_clock, "Pin timestamps to 0 for byte-identical outputs");
        sub->add_option("--jobs", c.jobs, "Parallel sessions")->check(CLI::PositiveNumber);
        sub->add_option("--adb-path", c.adb_path, "adb binary (default $UI_MINER_ADB, then adb)");
        sub->add_option("--serial", c.serial, "adb device serial");
        sub->add_option("--llm-url", c.llm_url, "Chat-completion base URL (default $UI_MINER_LLM_URL)");
        sub->add_option("--prompt-file", c.prompt_file, "Prompt template JSON");
        sub->add_flag("--no-role", c.no_role, "Omit the role message");
        sub->add_flag("--no-primitives", c.no_primitives, "Omit the action-format sentence");
        sub->add_option("--type-index-file", c.type_index_file, "Widget type index table JSON");
        sub->add_option("--scorer-url", c.scorer_url, "External overlay scorer endpoint");
    };

    std::string device_spec, policy_spec, out, store_dir, package, apps_dir, policies, seeds = "0", in_dir, counts,
        format = "table", query, host = "127.0.0.1", origin = "*", manifest;
    int steps = 0, wait_ms = 2000, top = 5, port = 8080;
    double minutes = 0;

    auto* explore = app.add_subcommand("explore", "Run one exploration session");
    add_common(explore);
    explore->add_option("--device", device_spec, "adb | sim:<fixture>")->required();
    explore->add_option("--policy", policy_spec, "random | llm | scripted:<rules>")->required();
    explore->add_option("--budget-steps", steps, "Step budget");
    explore->add_option("--budget-minutes", minutes, "Wall-clock budget");
    explore->add_option("--wait-ms", wait_ms, "Render wait");
    explore->add_option("--out", out, "Trace directory")->required();
    explore->add_option("--store", store_dir, "Also ingest captures into this store");
    explore->add_option("--app", package, "Package under test (adb)");

    auto* bench = app.add_subcommand("benchmark", "Coverage benchmark over a directory of sim fixtures");
    add_common(bench);
    bench->add_option("--apps", apps_dir, "Fixture directory")->required()->check(CLI::ExistingDirectory);
    bench->add_option("--policies", policies, "Comma-separated policies")->required();
    bench->add_option("--seeds", seeds, "e.g. 0-9 or 1,2,5");
    bench->add_option("--budget-steps", steps, "Step budget");
    bench->add_option("--budget-minutes", minutes, "Wall-clock budget");
    bench->add_option("--wait-ms", wait_ms, "Render wait");
    bench->add_option("--out", out, "CSV report path");

    auto* filter = app.add_subcommand("filter", "Run the noise pipeline over a store");
    add_common(filter);
    filter->add_option("--in", in_dir, "Input store");
    filter->add_option("--out", out, "Output store (may equal --in)");
    filter->add_option("--counts", counts, "JSON {total, auto_removed, human_removed} instead of a store");
    filter->add_option("--format", format, "table | json")->check(CLI::IsMember({"table", "json"}));

    auto* stats = app.add_subcommand("stats", "Corpus statistics");
    add_common(stats);
    stats->add_option("--store", store_dir, "Store directory")->required();
    stats->add_option("--format", format, "table | csv | json")->check(CLI::IsMember({"table", "csv", "json"}));
    stats->add_option("--manifest", manifest, "App metadata manifest to merge first");

    auto* retrieve = app.add_subcommand("retrieve", "Layout-similar validated records");
    add_common(retrieve);
    retrieve->add_option("--store", store_dir, "Store directory")->required();
    retrieve->add_option("--query", query, "Query record id")->required();
    retrieve->add_option("--top", top, "Number of results");

    auto* serve = app.add_subcommand("annotate-serve", "Annotation HTTP service");
    add_common(serve);
    serve->add_option("--store", store_dir, "Store directory")->required();
    serve->add_option("--port", port, "Port (0 picks a free one)");
    serve->add_option("--host", host, "Bind address");
    serve->add_option("--origin", origin, "Allowed CORS origin");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*explore) return cmd_explore(c, device_spec, policy_spec, steps, minutes, wait_ms, out, store_dir, package);
        if (*bench) return cmd_benchmark(c, apps_dir, policies, seeds, steps, minutes, wait_ms, out);
        if (*filter) return cmd_filter(c, in_dir, out, counts, format);
        if (*stats) return cmd_stats(store_dir, format, manifest);
        if (*retrieve) return cmd_retrieve(store_dir, query, top);
        if (*serve) return cmd_annotate_serve(c, store_dir, host, port, origin);
    } catch (const UsageError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
