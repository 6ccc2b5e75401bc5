#pragma once

#include "uiminer/device/action.hpp"
#include "uiminer/vh/view_tree.hpp"

#include "json.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace uiminer::device {

// Guard over named boolean flags: all `requires` set, none of `forbids` set.
struct Guard {
    std::vector<std::string> requires_flags;
    std::vector<std::string> forbids_flags;

    bool holds(const std::set<std::string>& flags) const;
    bool compatible_with(const Guard& other) const;
};

struct Matcher {
    ActionKind kind = ActionKind::Tap;
    std::string target;                        // Tap, LongTap, Input
    std::optional<Direction> direction;        // Scroll
    std::optional<std::string> value_pattern;  // Input; full-match ECMAScript regex

    bool matches(const Action& action) const;
};

struct SimTransition {
    std::string from;
    Matcher matcher;
    std::string to;
    Guard guard;
    std::vector<std::string> set_flags;
    std::vector<std::string> clear_flags;
};

struct SimState {
    std::string activity_name;
    vh::ViewTree tree;
    bool terminal = false;
    // Destination of system back; kExitState leaves the app.
    std::string back_to;
};

inline constexpr const char* kExitState = "<exit>";

// Declarative finite-state app fixture.
struct SimApp {
    std::string app_id;
    std::set<std::string> declared_activities;
    std::map<std::string, SimState> states;
    std::vector<SimTransition> transitions;
    std::string initial_state;
    int screen_width = 1080;
    int screen_height = 1920;
};

// Fixture JSON:
// {
//   "app_id": "com.example", "initial_state": "welcome",
//   "screen": {"width": 1080, "height": 1920},
//   "declared_activities": ["com.example.WelcomeActivity", ...],
//   "states": {
//     "welcome": {"activity": "...", "terminal": false, "back": "welcome",
//                 "tree": <inline node JSON | inline dump XML string>,
//                 "tree_file": "relative/path.xml"},
//   ("back" and a transition "to" may also be "<exit>", which leaves the app.)
//     ...},
//   "transitions": [
//     {"from": "welcome", "to": "main",
//      "match": {"kind": "tap", "target": "agree"},
//      "guard": {"requires": ["policy_checked"], "forbids": []},
//      "set": [], "clear": []}]
// }
// Every invariant is checked; violations raise FixtureInvalid naming it.
SimApp sim_app_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
SimApp load_sim_app(const std::filesystem::path& path);

// Re-checks the invariants of an already built app.
void validate_sim_app(const SimApp& app);

}  // namespace uiminer::device
