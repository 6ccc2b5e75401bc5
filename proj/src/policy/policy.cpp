#include "uiminer/policy/policy.hpp"

#include "uiminer/util/rng.hpp"

#include <random>

namespace uiminer::policy {

using device::Action;

LlmPolicy::LlmPolicy(std::string name, std::shared_ptr<const llm::Backend> backend, PromptTemplate tmpl,
                     std::size_t max_chars, std::chrono::milliseconds timeout)
    : name_(std::move(name)),
      backend_(std::move(backend)),
      template_(std::move(tmpl)),
      max_chars_(max_chars),
      timeout_(timeout) {
    template_.validate();
}

ParsedPlan LlmPolicy::next_plan(const device::ScreenCapture& capture, std::uint64_t) const {
    const auto messages = build_prompt(template_, capture, max_chars_);
    const std::string reply = backend_->complete(messages, timeout_);
    ParsedPlan plan = parse_reply(reply);
    if (plan.steps.empty()) plan = parse_free_text(reply, capture.tree);
    return plan;
}

ParsedPlan RandomPolicy::next_plan(const device::ScreenCapture& capture, std::uint64_t seed) const {
    std::vector<Action> options;
    for (const auto* node : vh::interactive_elements(capture.tree)) {
        const bool has_id = !node->resource_id.empty();
        if (has_id && node->clickable) options.push_back(Action::tap(node->resource_id));
        if (has_id && node->long_clickable) options.push_back(Action::long_tap(node->resource_id));
        if (has_id && node->editable) options.push_back(Action::input(node->resource_id, ""));
        if (node->scrollable) options.push_back(Action::scroll(device::Direction::Down));
    }
    ParsedPlan plan;
    if (options.empty()) return plan;

    std::mt19937_64 rng(seed);
    Action action = options[util::uniform_below(rng, options.size())];
    if (action.kind == device::ActionKind::Scroll) {
        action.direction = static_cast<device::Direction>(util::uniform_below(rng, 4));
    } else if (action.kind == device::ActionKind::Input) {
        action.value = kRandomInputLexicon[util::uniform_below(rng, kRandomInputLexicon.size())];
    }
    plan.steps.push_back(std::move(action));
    return plan;
}

}  // namespace uiminer::policy
