#include "uiminer/device/driver.hpp"

#include "uiminer/error.hpp"
#include "uiminer/noise/structural_hash.hpp"

#include <regex>

namespace uiminer::device {

RenderResult wait_for_render(Driver& driver, int wait_ms, int max_retries) {
    if (wait_ms < 0 || max_retries < 0) {
        throw Error(ErrorKind::InvalidArgument, "wait_ms and max_retries must be non-negative");
    }
    RenderResult result;
    driver.clock().sleep_ms(wait_ms);
    ScreenCapture previous = driver.capture();
    result.captures_taken = 1;
    std::string previous_hash = noise::structural_hash(previous.tree);

    for (int retries = 0;; ++retries) {
        driver.clock().sleep_ms(wait_ms);
        ScreenCapture current = driver.capture();
        ++result.captures_taken;
        std::string current_hash = noise::structural_hash(current.tree);
        const bool stable = current_hash == previous_hash;
        if (stable || retries >= max_retries) {
            result.capture = std::move(current);
            result.stable = stable;
            return result;
        }
        previous_hash = std::move(current_hash);
    }
}

bool LoginHook::matches(const vh::ViewTree& tree) const {
    if (id_pattern.empty()) return false;
    const std::regex pattern(id_pattern);
    for (const auto* node : vh::preorder(tree)) {
        if (!node->resource_id.empty() && std::regex_match(node->resource_id, pattern)) return true;
    }
    return false;
}

std::vector<ExecutionResult> run_login_hook(Driver& driver, const LoginHook& hook, const ScreenCapture& capture) {
    std::vector<ExecutionResult> results;
    if (!hook.matches(capture.tree)) return results;
    for (const auto& action : hook.script) {
        try {
            results.push_back(driver.execute(action));
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::TargetNotFound) throw;
            results.push_back({false, e.what()});
            break;
        }
    }
    return results;
}

}  // namespace uiminer::device
