#pragma once

#include "uiminer/device/action.hpp"
#include "uiminer/device/capture.hpp"
#include "uiminer/util/clock.hpp"

#include <set>
#include <string>
#include <vector>

namespace uiminer::device {

// One device or simulated app. Not thread-safe: a driver serves a single
// exploration session at a time.
class Driver {
public:
    virtual ~Driver() = default;

    virtual const std::string& app_id() const = 0;

    // Current foreground screen. Throws DeviceUnavailable or DumpFailed.
    virtual ScreenCapture capture() = 0;

    // Throws InvalidAction for malformed actions and TargetNotFound when the
    // target id is absent from the current screen; in both cases the device
    // is left untouched.
    virtual ExecutionResult execute(const Action& action) = 0;

    // System back navigation.
    virtual void back() = 0;

    // (Re)starts the app from its launcher entry.
    virtual void launch() = 0;

    // False once the app under test is no longer in the foreground.
    virtual bool app_running() = 0;

    // Activities the app declares.
    virtual std::set<std::string> list_activities() = 0;

    virtual util::Clock& clock() = 0;
};

struct RenderResult {
    ScreenCapture capture;
    bool stable = false;
    int captures_taken = 0;
};

// Sleeps wait_ms and captures, then keeps capturing every wait_ms until two
// consecutive captures have equal structural hashes or max_retries extra
// captures have been spent. stable reports whether the last two matched.
RenderResult wait_for_render(Driver& driver, int wait_ms, int max_retries);

// Stand-in for account sign-in automation: when any node's resource id on the
// current screen matches id_pattern (ECMAScript regex, full match), the script
// is executed in order.
struct LoginHook {
    std::string id_pattern;
    std::vector<Action> script;

    bool matches(const vh::ViewTree& tree) const;
};

// Runs the hook if it matches; returns the per-step results (empty when the
// hook did not fire). Stops at the first TargetNotFound.
std::vector<ExecutionResult> run_login_hook(Driver& driver, const LoginHook& hook, const ScreenCapture& capture);

}  // namespace uiminer::device
