#include "uiminer/device/adb_driver.hpp"

#include "uiminer/error.hpp"

#include <cstdlib>
#include <regex>

namespace uiminer::device {

namespace {

bool mentions_missing_device(const std::string& err) {
    return err.find("no devices") != std::string::npos || err.find("device offline") != std::string::npos ||
           (err.find("device '") != std::string::npos && err.find("not found") != std::string::npos) ||
           err.find("device not found") != std::string::npos;
}

std::string expand_activity(const std::string& package, const std::string& activity) {
    if (!activity.empty() && activity.front() == '.') return package + activity;
    return activity;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::string resolve_adb_path(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("UI_MINER_ADB"); env && *env) return env;
    return "adb";
}

std::string escape_input_text(const std::string& value) {
    static const std::string kSpecial = "\\'\"`()<>|;&*~$!?#[]{}";
    std::string out;
    for (char c : value) {
        if (c == ' ') {
            out += "%s";
        } else if (kSpecial.find(c) != std::string::npos) {
            out.push_back('\\');
            out.push_back(c);
        } else {
            out.push_back(c);
        }
    }
    return out;
}

std::optional<std::pair<std::string, std::string>> parse_focused_activity(const std::string& text) {
    static const std::regex focus(R"(mCurrentFocus=Window\{\S+ \S+ ([A-Za-z0-9_.]+)/([A-Za-z0-9_.$]+)\})");
    static const std::regex app(R"(mFocusedApp=\S*\{\S+ \S+ ([A-Za-z0-9_.]+)/([A-Za-z0-9_.$]+))");
    std::smatch m;
    if (std::regex_search(text, m, focus) || std::regex_search(text, m, app)) {
        return std::make_pair(m[1].str(), expand_activity(m[1].str(), m[2].str()));
    }
    return std::nullopt;
}

std::set<std::string> parse_package_activities(const std::string& text, const std::string& package) {
    std::set<std::string> out;
    const std::string escaped = std::regex_replace(package, std::regex(R"([.^$|()\[\]{}*+?\\])"), R"(\$&)");
    const std::regex component("(^|\\s)" + escaped + "/([A-Za-z0-9_.$]+)");
    for (std::sregex_iterator it(text.begin(), text.end(), component), end; it != end; ++it) {
        out.insert(expand_activity(package, (*it)[2].str()));
    }
    return out;
}

AdbDriver::AdbDriver(AdbOptions options, std::shared_ptr<CommandRunner> runner, std::shared_ptr<util::Clock> clock)
    : options_(std::move(options)), runner_(std::move(runner)), clock_(std::move(clock)) {
    options_.adb_path = resolve_adb_path(options_.adb_path);
}

CommandResult AdbDriver::adb(std::vector<std::string> args) {
    std::vector<std::string> argv = {options_.adb_path};
    if (!options_.serial.empty()) {
        argv.push_back("-s");
        argv.push_back(options_.serial);
    }
    argv.insert(argv.end(), std::make_move_iterator(args.begin()), std::make_move_iterator(args.end()));
    auto result = runner_->run(argv);
    if (result.spawn_failed) throw Error(ErrorKind::DeviceUnavailable, "cannot run " + options_.adb_path);
    if (result.timed_out) throw Error(ErrorKind::DeviceUnavailable, "adb timed out");
    if (mentions_missing_device(result.err)) throw Error(ErrorKind::DeviceUnavailable, trim(result.err));
    return result;
}

void AdbDriver::connect() {
    const auto r = adb({"get-state"});
    if (r.exit_code != 0 || trim(r.out) != "device") {
        throw Error(ErrorKind::DeviceUnavailable, "get-state: " + trim(r.out + r.err));
    }
}

std::pair<int, int> AdbDriver::screen_size() {
    if (screen_) return *screen_;
    const auto r = adb({"shell", "wm", "size"});
    static const std::regex physical(R"(Physical size:\s*(\d+)x(\d+))");
    static const std::regex override_size(R"(Override size:\s*(\d+)x(\d+))");
    std::smatch m;
    if (r.exit_code != 0 ||
        !(std::regex_search(r.out, m, override_size) || std::regex_search(r.out, m, physical))) {
        throw Error(ErrorKind::DumpFailed, "cannot read screen size: " + trim(r.out + r.err));
    }
    screen_ = std::make_pair(std::stoi(m[1].str()), std::stoi(m[2].str()));
    return *screen_;
}

std::optional<std::pair<std::string, std::string>> AdbDriver::focused() {
    const auto r = adb({"shell", "dumpsys", "window"});
    if (r.exit_code != 0) return std::nullopt;
    return parse_focused_activity(r.out);
}

ScreenCapture AdbDriver::capture() {
    const auto [w, h] = screen_size();
    const auto dump = adb({"shell", "uiautomator", "dump", options_.remote_dump_path});
    if (dump.exit_code != 0) throw Error(ErrorKind::DumpFailed, "uiautomator dump: " + trim(dump.out + dump.err));
    const auto cat = adb({"exec-out", "cat", options_.remote_dump_path});
    if (cat.exit_code != 0 || trim(cat.out).empty()) throw Error(ErrorKind::DumpFailed, "empty hierarchy dump");

    ScreenCapture c;
    c.raw_dump = cat.out;
    try {
        c.tree = vh::parse_hierarchy(c.raw_dump, w, h);
    } catch (const Error& e) {
        throw Error(ErrorKind::DumpFailed, e.what());
    }
    const auto shot = adb({"exec-out", "screencap", "-p"});
    if (shot.exit_code != 0) throw Error(ErrorKind::DumpFailed, "screencap: " + trim(shot.err));
    c.screenshot.assign(shot.out.begin(), shot.out.end());
    const auto f = focused();
    if (!f) throw Error(ErrorKind::DumpFailed, "cannot determine the focused activity");
    c.activity_name = f->second;
    c.app_id = options_.package;
    c.captured_at = clock_->now_ms();
    last_tree_ = c.tree;
    return c;
}

ExecutionResult AdbDriver::execute(const Action& action) {
    if (auto problem = validate(action); !problem.empty()) throw Error(ErrorKind::InvalidAction, problem);
    if (action.kind == ActionKind::Scroll) {
        const auto [w, h] = screen_size();
        const int cx = w / 2, cy = h / 2;
        int x1 = cx, y1 = cy, x2 = cx, y2 = cy;
        // The finger moves opposite to the direction the content scrolls.
        switch (*action.direction) {
            case Direction::Down: y1 = h * 3 / 4; y2 = h / 4; break;
            case Direction::Up: y1 = h / 4; y2 = h * 3 / 4; break;
            case Direction::Right: x1 = w * 3 / 4; x2 = w / 4; break;
            case Direction::Left: x1 = w / 4; x2 = w * 3 / 4; break;
        }
        const auto r = adb({"shell", "input", "swipe", std::to_string(x1), std::to_string(y1), std::to_string(x2),
                            std::to_string(y2), std::to_string(options_.scroll_ms)});
        return {r.exit_code == 0, "swipe " + std::string(to_string(*action.direction))};
    }

    if (!last_tree_) capture();
    const auto* node = vh::find_by_resource_id(*last_tree_, action.target);
    if (node == nullptr) throw Error(ErrorKind::TargetNotFound, "'" + action.target + "'");
    const std::string x = std::to_string(node->bounds.center_x());
    const std::string y = std::to_string(node->bounds.center_y());

    switch (action.kind) {
        case ActionKind::Tap: {
            const auto r = adb({"shell", "input", "tap", x, y});
            return {r.exit_code == 0, "tap " + x + "," + y};
        }
        case ActionKind::LongTap: {
            const auto r = adb({"shell", "input", "swipe", x, y, x, y, std::to_string(options_.long_tap_ms)});
            return {r.exit_code == 0, "long-tap " + x + "," + y};
        }
        case ActionKind::Input: {
            auto r = adb({"shell", "input", "tap", x, y});
            if (r.exit_code != 0) return {false, "focus tap failed"};
            if (!node->text.empty()) {
                adb({"shell", "input", "keyevent", "KEYCODE_MOVE_END"});
                std::vector<std::string> del = {"shell", "input", "keyevent"};
                for (std::size_t i = 0; i < node->text.size(); ++i) del.push_back("KEYCODE_DEL");
                adb(std::move(del));
            }
            r = adb({"shell", "input", "text", escape_input_text(action.value)});
            return {r.exit_code == 0, "input into " + action.target};
        }
        case ActionKind::Scroll: break;
    }
    return {false, "unsupported action"};
}

void AdbDriver::back() {
    adb({"shell", "input", "keyevent", "4"});
    last_tree_.reset();
}

void AdbDriver::launch() {
    const auto r = adb({"shell", "monkey", "-p", options_.package, "-c", "android.intent.category.LAUNCHER", "1"});
    if (r.exit_code != 0) throw Error(ErrorKind::DeviceUnavailable, "cannot launch " + options_.package);
    last_tree_.reset();
}

bool AdbDriver::app_running() {
    const auto f = focused();
    return f && f->first == options_.package;
}

std::set<std::string> AdbDriver::list_activities() {
    const auto r = adb({"shell", "dumpsys", "package", options_.package});
    if (r.exit_code != 0) throw Error(ErrorKind::ManifestUnavailable, trim(r.err));
    auto activities = parse_package_activities(r.out, options_.package);
    if (activities.empty()) throw Error(ErrorKind::ManifestUnavailable, "no activities listed for " + options_.package);
    return activities;
}

}  // namespace uiminer::device
