#pragma once

#include "uiminer/device/command_runner.hpp"
#include "uiminer/device/driver.hpp"

#include <memory>
#include <optional>
#include <string>

namespace uiminer::device {

struct AdbOptions {
    std::string adb_path;  // empty: $UI_MINER_ADB, then "adb"
    std::string serial;    // empty: adb's default device
    std::string package;   // app under test
    int long_tap_ms = 600;
    int scroll_ms = 300;
    std::string remote_dump_path = "/sdcard/window_dump.xml";
};

std::string resolve_adb_path(const std::string& flag_value);

// Escapes a value for `adb shell input text`: spaces become %s and shell
// metacharacters are backslash-escaped.
std::string escape_input_text(const std::string& value);

// Parses the focused "<package>/<activity>" out of `dumpsys window` output.
// Relative activity names (".Main") are expanded with the package.
std::optional<std::pair<std::string, std::string>> parse_focused_activity(const std::string& dumpsys_window);

// Collects "<package>/<activity>" component names from `dumpsys package`.
std::set<std::string> parse_package_activities(const std::string& dumpsys_package, const std::string& package);

// Real device over the adb command-line tool.
class AdbDriver final : public Driver {
public:
    AdbDriver(AdbOptions options, std::shared_ptr<CommandRunner> runner,
              std::shared_ptr<util::Clock> clock = std::make_shared<util::SystemClock>());

    const std::string& app_id() const override { return options_.package; }
    ScreenCapture capture() override;
    ExecutionResult execute(const Action& action) override;
    void back() override;
    void launch() override;
    bool app_running() override;
    std::set<std::string> list_activities() override;
    util::Clock& clock() override { return *clock_; }

    // Fails with DeviceUnavailable unless `adb get-state` reports "device".
    void connect();

private:
    CommandResult adb(std::vector<std::string> args);
    std::pair<int, int> screen_size();
    std::optional<std::pair<std::string, std::string>> focused();

    AdbOptions options_;
    std::shared_ptr<CommandRunner> runner_;
    std::shared_ptr<util::Clock> clock_;
    std::optional<std::pair<int, int>> screen_;
    std::optional<vh::ViewTree> last_tree_;
};

}  // namespace uiminer::device
