#pragma once

#include "json.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace uiminer::device {

enum class ActionKind { Tap, LongTap, Scroll, Input };
enum class Direction { Up, Down, Left, Right };

std::string_view to_string(ActionKind kind);  // "tap", "long-tap", "scroll", "input"
std::string_view to_string(Direction direction);
std::optional<ActionKind> action_kind_from_string(std::string_view s);  // case-insensitive
std::optional<Direction> direction_from_string(std::string_view s);     // case-insensitive

// One primitive interaction. Which fields are meaningful depends on kind:
// Tap/LongTap need target, Scroll needs direction, Input needs target and a
// non-empty value. Everything else must stay unset.
struct Action {
    ActionKind kind = ActionKind::Tap;
    std::string target;
    std::optional<Direction> direction;
    std::string value;

    static Action tap(std::string target) { return {ActionKind::Tap, std::move(target), std::nullopt, {}}; }
    static Action long_tap(std::string target) { return {ActionKind::LongTap, std::move(target), std::nullopt, {}}; }
    static Action scroll(Direction d) { return {ActionKind::Scroll, {}, d, {}}; }
    static Action input(std::string target, std::string value) {
        return {ActionKind::Input, std::move(target), std::nullopt, std::move(value)};
    }

    bool operator==(const Action&) const = default;
};

// Empty string when the action satisfies its kind's field requirements.
std::string validate(const Action& action);

// "[tap] [id]", "[scroll] [down]", "[input] [id] [value]", "[long-tap] [id]".
std::string to_primitive(const Action& action);

nlohmann::json to_json(const Action& action);
Action action_from_json(const nlohmann::json& j);

struct ExecutionResult {
    bool applied = false;
    std::string note;
};

}  // namespace uiminer::device
