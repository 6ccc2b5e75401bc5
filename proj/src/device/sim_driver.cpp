#include "uiminer/device/sim_driver.hpp"

#include "uiminer/error.hpp"
#include "uiminer/store/layout.hpp"

namespace uiminer::device {

namespace {

// Screenshots are layout renders at 1/8 of the screen resolution.
constexpr int kScreenshotScale = 8;

}  // namespace

SimDriver::SimDriver(std::shared_ptr<const SimApp> app, std::int64_t clock_start_ms)
    : app_(std::move(app)), clock_(clock_start_ms), state_(app_->initial_state) {}

const SimDriver::Rendered& SimDriver::rendered(const std::string& state_id) {
    auto it = cache_.find(state_id);
    if (it != cache_.end()) return it->second;
    const auto& state = app_->states.at(state_id);
    Rendered r;
    r.raw_dump = vh::serialize_hierarchy(state.tree);
    r.tree = vh::parse_hierarchy(r.raw_dump, app_->screen_width, app_->screen_height);
    const int w = std::max(1, app_->screen_width / kScreenshotScale);
    const int h = std::max(1, app_->screen_height / kScreenshotScale);
    r.screenshot = store::layout_to_png(store::render_layout(r.tree, w, h));
    return cache_.emplace(state_id, std::move(r)).first->second;
}

ScreenCapture SimDriver::capture() {
    if (!running_) throw Error(ErrorKind::DumpFailed, app_->app_id + " is not in the foreground");
    const auto& r = rendered(state_);
    ScreenCapture c;
    c.tree = r.tree;
    c.screenshot = r.screenshot;
    c.raw_dump = r.raw_dump;
    c.activity_name = app_->states.at(state_).activity_name;
    c.captured_at = clock_.now_ms();
    c.app_id = app_->app_id;
    return c;
}

ExecutionResult SimDriver::execute(const Action& action) {
    if (auto problem = validate(action); !problem.empty()) throw Error(ErrorKind::InvalidAction, problem);
    // Outside the app nothing it declares is on screen.
    if (!running_) {
        if (action.kind == ActionKind::Scroll) return {false, app_->app_id + " is not in the foreground"};
        throw Error(ErrorKind::TargetNotFound, "'" + action.target + "': " + app_->app_id + " is not in the foreground");
    }
    const auto& state = app_->states.at(state_);
    if (action.kind != ActionKind::Scroll && vh::find_by_resource_id(state.tree, action.target) == nullptr) {
        throw Error(ErrorKind::TargetNotFound, "'" + action.target + "' on state '" + state_ + "'");
    }

    const SimTransition* chosen = nullptr;
    for (const auto& t : app_->transitions) {
        if (t.from != state_ || !t.matcher.matches(action) || !t.guard.holds(flags_)) continue;
        if (chosen != nullptr) {
            throw Error(ErrorKind::FixtureInvalid, "ambiguous transition: two transitions match " +
                                                       to_primitive(action) + " on state '" + state_ + "'");
        }
        chosen = &t;
    }
    if (chosen == nullptr) return {false, "no transition for " + to_primitive(action) + " on '" + state_ + "'"};

    for (const auto& f : chosen->clear_flags) flags_.erase(f);
    for (const auto& f : chosen->set_flags) flags_.insert(f);
    const std::string from = state_;
    if (chosen->to == kExitState) {
        running_ = false;
        return {true, from + " -> " + kExitState};
    }
    state_ = chosen->to;
    return {true, from + " -> " + state_};
}

void SimDriver::back() {
    if (!running_) return;
    const auto& target = app_->states.at(state_).back_to;
    if (target == kExitState) {
        running_ = false;
    } else {
        state_ = target;
    }
}

void SimDriver::launch() {
    running_ = true;
    state_ = app_->initial_state;
    flags_.clear();
}

}  // namespace uiminer::device
