#include "uiminer/explorer/session.hpp"

#include "uiminer/error.hpp"
#include "uiminer/noise/structural_hash.hpp"
#include "uiminer/util/rng.hpp"

#include "json.hpp"

#include <cstdio>
#include <fstream>
#include <iterator>

namespace uiminer::explorer {

using nlohmann::json;

void SessionConfig::validate() const {
    if (max_steps.has_value() == max_duration_ms.has_value()) {
        throw Error(ErrorKind::InvalidArgument, "exactly one of max_steps / max_duration_ms must be set");
    }
    if (max_steps && *max_steps < 0) throw Error(ErrorKind::InvalidArgument, "max_steps must be >= 0");
    if (max_duration_ms && *max_duration_ms < 0) throw Error(ErrorKind::InvalidArgument, "max_duration_ms must be >= 0");
    if (wait_ms < 0) throw Error(ErrorKind::InvalidArgument, "wait_ms must be >= 0");
    if (max_render_retries < 0) throw Error(ErrorKind::InvalidArgument, "max_render_retries must be >= 0");
    if (back_on_stuck_after < 1) throw Error(ErrorKind::InvalidArgument, "back_on_stuck_after must be >= 1");
}

namespace {

bool budget_left(const SessionConfig& config, int steps, std::int64_t elapsed) {
    if (config.max_steps) return steps < *config.max_steps;
    return elapsed < *config.max_duration_ms;
}

void execute_plan(device::Driver& driver, const std::vector<device::Action>& plan, TraceStep& step) {
    for (const auto& action : plan) {
        try {
            step.results.push_back(driver.execute(action));
            step.executed.push_back(action);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::TargetNotFound && e.kind() != ErrorKind::InvalidAction) throw;
            step.error = e.what();
            return;
        }
    }
}

}  // namespace

SessionTrace run_session(device::Driver& driver, const policy::Policy& policy, const SessionConfig& config) {
    config.validate();
    SessionTrace trace;
    trace.app_id = driver.app_id();
    trace.policy_name = policy.name();
    auto& clock = driver.clock();
    trace.started_at = clock.now_ms();

    int steps = 0;
    int same_hash_run = 0;
    try {
        while (budget_left(config, steps, clock.now_ms() - trace.started_at)) {
            TraceStep step;
            if (!driver.app_running()) {
                if (!config.restart_on_exit) break;
                driver.launch();
                step.restarted = true;
                same_hash_run = 0;
            }

            auto render = device::wait_for_render(driver, config.wait_ms, config.max_render_retries);
            CaptureEntry entry;
            entry.structural_hash = noise::structural_hash(render.capture.tree);
            entry.stable = render.stable;
            if (!trace.captures.empty() && trace.captures.back().structural_hash == entry.structural_hash) {
                ++same_hash_run;
            } else {
                same_hash_run = 1;
            }
            entry.capture = std::move(render.capture);
            trace.visited_activities.insert(entry.capture.activity_name);
            trace.captures.push_back(std::move(entry));
            step.capture_index = trace.captures.size() - 1;
            const auto& capture = trace.captures.back().capture;

            if (config.login_hook && config.login_hook->matches(capture.tree)) {
                step.login = true;
                step.plan = config.login_hook->script;
                execute_plan(driver, step.plan, step);
            } else if (same_hash_run >= config.back_on_stuck_after) {
                step.back = true;
                driver.back();
                same_hash_run = 0;
            } else {
                try {
                    auto plan = policy.next_plan(capture, util::mix_seed(config.rng_seed, static_cast<std::uint64_t>(steps)));
                    step.plan = std::move(plan.steps);
                    step.reply = std::move(plan.reply);
                    step.used_fallback = plan.used_fallback;
                } catch (const Error& e) {
                    if (e.kind() != ErrorKind::BackendTimeout && e.kind() != ErrorKind::BackendRefused) throw;
                    step.error = e.what();
                }
                execute_plan(driver, step.plan, step);
            }
            trace.actions.push_back(std::move(step));
            ++steps;
        }
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::DeviceUnavailable) throw;
        trace.aborted = true;
        trace.abort_reason = e.what();
    }
    trace.ended_at = clock.now_ms();
    return trace;
}

double activity_coverage(const std::set<std::string>& visited, const std::set<std::string>& declared) {
    if (declared.empty()) throw Error(ErrorKind::EmptyDeclared, "no declared activities");
    std::size_t hit = 0;
    for (const auto& a : visited) hit += declared.count(a);
    return static_cast<double>(hit) / static_cast<double>(declared.size());
}

double activity_coverage(const SessionTrace& trace, const std::set<std::string>& declared) {
    return activity_coverage(trace.visited_activities, declared);
}

// ---------------------------------------------------------------------------
// Persistence

namespace {

std::string capture_stem(std::size_t i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04zu", i);
    return buf;
}

json actions_json(const std::vector<device::Action>& actions) {
    json out = json::array();
    for (const auto& a : actions) out.push_back(device::to_json(a));
    return out;
}

std::vector<device::Action> actions_from(const json& j) {
    std::vector<device::Action> out;
    for (const auto& a : j) out.push_back(device::action_from_json(a));
    return out;
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

void save_trace(const SessionTrace& trace, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir / "captures", ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());

    json captures = json::array();
    for (std::size_t i = 0; i < trace.captures.size(); ++i) {
        const auto& e = trace.captures[i];
        const auto stem = capture_stem(i);
        const std::string dump = e.capture.raw_dump.empty() ? vh::serialize_hierarchy(e.capture.tree) : e.capture.raw_dump;
        write_file(dir / "captures" / (stem + ".xml"), dump);
        write_file(dir / "captures" / (stem + ".png"),
                   std::string_view(reinterpret_cast<const char*>(e.capture.screenshot.data()), e.capture.screenshot.size()));
        captures.push_back({{"index", i},
                            {"activity", e.capture.activity_name},
                            {"captured_at", e.capture.captured_at},
                            {"stable", e.stable},
                            {"structural_hash", e.structural_hash},
                            {"screen_width", e.capture.tree.screen_width},
                            {"screen_height", e.capture.tree.screen_height},
                            {"dump", "captures/" + stem + ".xml"},
                            {"screenshot", "captures/" + stem + ".png"}});
    }
    json steps = json::array();
    for (const auto& s : trace.actions) {
        json results = json::array();
        for (const auto& r : s.results) results.push_back({{"applied", r.applied}, {"note", r.note}});
        steps.push_back({{"capture_index", s.capture_index},
                         {"plan", actions_json(s.plan)},
                         {"executed", actions_json(s.executed)},
                         {"results", results},
                         {"reply", s.reply},
                         {"used_fallback", s.used_fallback},
                         {"back", s.back},
                         {"login", s.login},
                         {"restarted", s.restarted},
                         {"error", s.error}});
    }
    const json doc = {{"app_id", trace.app_id},
                      {"policy", trace.policy_name},
                      {"started_at", trace.started_at},
                      {"ended_at", trace.ended_at},
                      {"aborted", trace.aborted},
                      {"abort_reason", trace.abort_reason},
                      {"visited_activities", trace.visited_activities},
                      {"captures", captures},
                      {"actions", steps}};
    write_file(dir / "trace.json", doc.dump(2) + "\n");
}

SessionTrace load_trace(const std::filesystem::path& dir) {
    json doc;
    try {
        doc = json::parse(read_file(dir / "trace.json"));
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Io, "trace.json: " + std::string(e.what()));
    }
    SessionTrace trace;
    try {
        trace.app_id = doc.at("app_id").get<std::string>();
        trace.policy_name = doc.at("policy").get<std::string>();
        trace.started_at = doc.at("started_at").get<std::int64_t>();
        trace.ended_at = doc.at("ended_at").get<std::int64_t>();
        trace.aborted = doc.at("aborted").get<bool>();
        trace.abort_reason = doc.value("abort_reason", "");
        trace.visited_activities = doc.at("visited_activities").get<std::set<std::string>>();
        for (const auto& c : doc.at("captures")) {
            CaptureEntry e;
            e.stable = c.at("stable").get<bool>();
            e.structural_hash = c.at("structural_hash").get<std::string>();
            e.capture.activity_name = c.at("activity").get<std::string>();
            e.capture.captured_at = c.at("captured_at").get<std::int64_t>();
            e.capture.app_id = trace.app_id;
            e.capture.raw_dump = read_file(dir / c.at("dump").get<std::string>());
            e.capture.tree = vh::parse_hierarchy(e.capture.raw_dump, c.at("screen_width").get<int>(),
                                                 c.at("screen_height").get<int>());
            const auto png = read_file(dir / c.at("screenshot").get<std::string>());
            e.capture.screenshot.assign(png.begin(), png.end());
            trace.captures.push_back(std::move(e));
        }
        for (const auto& s : doc.at("actions")) {
            TraceStep step;
            step.capture_index = s.at("capture_index").get<std::size_t>();
            step.plan = actions_from(s.at("plan"));
            step.executed = actions_from(s.at("executed"));
            for (const auto& r : s.at("results")) {
                step.results.push_back({r.at("applied").get<bool>(), r.at("note").get<std::string>()});
            }
            step.reply = s.value("reply", "");
            step.used_fallback = s.value("used_fallback", false);
            step.back = s.value("back", false);
            step.login = s.value("login", false);
            step.restarted = s.value("restarted", false);
            step.error = s.value("error", "");
            trace.actions.push_back(std::move(step));
        }
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Io, "trace.json: " + std::string(e.what()));
    }
    return trace;
}

}  // namespace uiminer::explorer
