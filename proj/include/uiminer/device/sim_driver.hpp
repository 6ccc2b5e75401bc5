#pragma once

#include "uiminer/device/driver.hpp"
#include "uiminer/device/sim_app.hpp"

#include <map>
#include <memory>
#include <set>
#include <string>

namespace uiminer::device {

// Drives a SimApp. Renders instantly; timestamps come from a ManualClock so
// runs are reproducible.
class SimDriver final : public Driver {
public:
    explicit SimDriver(std::shared_ptr<const SimApp> app, std::int64_t clock_start_ms = 0);

    const std::string& app_id() const override { return app_->app_id; }
    ScreenCapture capture() override;
    ExecutionResult execute(const Action& action) override;
    void back() override;
    void launch() override;
    bool app_running() override { return running_; }
    std::set<std::string> list_activities() override { return app_->declared_activities; }
    util::Clock& clock() override { return clock_; }

    const std::string& current_state() const { return state_; }
    const std::set<std::string>& flags() const { return flags_; }
    const SimApp& app() const { return *app_; }

private:
    struct Rendered {
        std::string raw_dump;
        vh::ViewTree tree;
        std::vector<std::uint8_t> screenshot;
    };
    const Rendered& rendered(const std::string& state_id);

    std::shared_ptr<const SimApp> app_;
    util::ManualClock clock_;
    std::string state_;
    std::set<std::string> flags_;
    bool running_ = true;
    std::map<std::string, Rendered> cache_;
};

}  // namespace uiminer::device
