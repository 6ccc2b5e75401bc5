#pragma once

#include "uiminer/device/action.hpp"
#include "uiminer/vh/view_tree.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace uiminer::policy {

struct ParsedPlan {
    std::vector<device::Action> steps;
    std::vector<std::string> unparsed_fragments;
    // Raw model reply and whether the free-text fallback produced the steps.
    std::string reply;
    bool used_fallback = false;
};

// Extracts bracketed primitives ("[tap] [id]", "[long-tap] [id]",
// "[scroll] [up|down|left|right]", "[input] [id] [value]"; verbs are
// case-insensitive). A number right before a primitive on the same line
// ("2. [tap] [x]") is its index; unnumbered primitives inherit the index of
// the closest numbered one before them, or 0. Steps are stably sorted by
// index. Non-primitive text is returned line by line in unparsed_fragments,
// except pieces made only of separators. Never throws.
ParsedPlan parse_reply(std::string_view reply);

// Renders actions as a numbered primitive list, one per line.
std::string render_plan(const std::vector<device::Action>& actions, bool numbered = true);

// Natural-language fallback used when a reply carries no primitives. Verbs:
// tap/click/press -> Tap, type/enter/create -> Input, scroll/swipe -> Scroll,
// hold -> LongTap. Targets are the interactive elements whose id, text or
// description shares the longest common substring (at least 3 characters)
// with the clause.
ParsedPlan parse_free_text(std::string_view reply, const vh::ViewTree& tree);

}  // namespace uiminer::policy
