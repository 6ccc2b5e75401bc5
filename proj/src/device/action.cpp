#include "uiminer/device/action.hpp"

#include "uiminer/error.hpp"

#include <algorithm>
#include <cctype>

namespace uiminer::device {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

}  // namespace

std::string_view to_string(ActionKind kind) {
    switch (kind) {
        case ActionKind::Tap: return "tap";
        case ActionKind::LongTap: return "long-tap";
        case ActionKind::Scroll: return "scroll";
        case ActionKind::Input: return "input";
    }
    return "tap";
}

std::string_view to_string(Direction direction) {
    switch (direction) {
        case Direction::Up: return "up";
        case Direction::Down: return "down";
        case Direction::Left: return "left";
        case Direction::Right: return "right";
    }
    return "down";
}

std::optional<ActionKind> action_kind_from_string(std::string_view s) {
    const auto l = lower(s);
    if (l == "tap") return ActionKind::Tap;
    if (l == "long-tap" || l == "long_tap" || l == "longtap") return ActionKind::LongTap;
    if (l == "scroll") return ActionKind::Scroll;
    if (l == "input") return ActionKind::Input;
    return std::nullopt;
}

std::optional<Direction> direction_from_string(std::string_view s) {
    const auto l = lower(s);
    if (l == "up") return Direction::Up;
    if (l == "down") return Direction::Down;
    if (l == "left") return Direction::Left;
    if (l == "right") return Direction::Right;
    return std::nullopt;
}

std::string validate(const Action& a) {
    switch (a.kind) {
        case ActionKind::Tap:
        case ActionKind::LongTap:
            if (a.target.empty()) return std::string(to_string(a.kind)) + " requires a target";
            if (a.direction || !a.value.empty()) return std::string(to_string(a.kind)) + " takes only a target";
            return {};
        case ActionKind::Scroll:
            if (!a.direction) return "scroll requires a direction";
            if (!a.target.empty() || !a.value.empty()) return "scroll takes only a direction";
            return {};
        case ActionKind::Input:
            if (a.target.empty()) return "input requires a target";
            if (a.value.empty()) return "input requires a non-empty value";
            if (a.direction) return "input takes no direction";
            return {};
    }
    return "unknown action kind";
}

std::string to_primitive(const Action& a) {
    std::string out = "[" + std::string(to_string(a.kind)) + "] [";
    switch (a.kind) {
        case ActionKind::Scroll: out += a.direction ? std::string(to_string(*a.direction)) : ""; break;
        default: out += a.target; break;
    }
    out += "]";
    if (a.kind == ActionKind::Input) out += " [" + a.value + "]";
    return out;
}

nlohmann::json to_json(const Action& a) {
    nlohmann::json j = {{"kind", to_string(a.kind)}};
    if (!a.target.empty()) j["target"] = a.target;
    if (a.direction) j["direction"] = to_string(*a.direction);
    if (!a.value.empty()) j["value"] = a.value;
    return j;
}

Action action_from_json(const nlohmann::json& j) {
    const auto kind = action_kind_from_string(j.at("kind").get<std::string>());
    if (!kind) throw Error(ErrorKind::InvalidAction, "unknown action kind in " + j.dump());
    Action a;
    a.kind = *kind;
    a.target = j.value("target", "");
    a.value = j.value("value", "");
    if (j.contains("direction")) {
        a.direction = direction_from_string(j.at("direction").get<std::string>());
        if (!a.direction) throw Error(ErrorKind::InvalidAction, "unknown direction in " + j.dump());
    }
    if (auto problem = validate(a); !problem.empty()) throw Error(ErrorKind::InvalidAction, problem);
    return a;
}

}  // namespace uiminer::device
