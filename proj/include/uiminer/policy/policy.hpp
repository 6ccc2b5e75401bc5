#pragma once

#include "uiminer/device/capture.hpp"
#include "uiminer/llm/backend.hpp"
#include "uiminer/policy/prompt.hpp"
#include "uiminer/policy/reply_parser.hpp"

#include <array>
#include <chrono>
#include <cstdint>
#include <memory>
#include <string>

namespace uiminer::policy {

// Policies are immutable; next_plan may be called concurrently.
class Policy {
public:
    virtual ~Policy() = default;
    virtual const std::string& name() const = 0;
    virtual ParsedPlan next_plan(const device::ScreenCapture& capture, std::uint64_t seed) const = 0;
};

// Prompt -> backend -> parse_reply. When the reply carries no primitives the
// free-text fallback is applied to it.
class LlmPolicy final : public Policy {
public:
    LlmPolicy(std::string name, std::shared_ptr<const llm::Backend> backend, PromptTemplate tmpl = {},
              std::size_t max_chars = 4000, std::chrono::milliseconds timeout = std::chrono::seconds(60));

    const std::string& name() const override { return name_; }
    ParsedPlan next_plan(const device::ScreenCapture& capture, std::uint64_t seed) const override;

private:
    std::string name_;
    std::shared_ptr<const llm::Backend> backend_;
    PromptTemplate template_;
    std::size_t max_chars_;
    std::chrono::milliseconds timeout_;
};

inline constexpr std::array<const char*, 4> kRandomInputLexicon = {"test", "example@gmail.com", "123456789",
                                                                     "Aa1!aaaa"};

// Monkey-style baseline: one action drawn uniformly over (element, applicable
// kind) pairs. Tap/LongTap/Input need an element with a resource id; Scroll
// applies to scrollable elements.
class RandomPolicy final : public Policy {
public:
    explicit RandomPolicy(std::string name = "random") : name_(std::move(name)) {}

    const std::string& name() const override { return name_; }
    ParsedPlan next_plan(const device::ScreenCapture& capture, std::uint64_t seed) const override;

private:
    std::string name_;
};

}  // namespace uiminer::policy
