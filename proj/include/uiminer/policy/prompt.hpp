#pragma once

#include "uiminer/device/capture.hpp"
#include "uiminer/llm/backend.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace uiminer::policy {

inline constexpr const char* kDefaultRole = "You are an app expert tasked with exploring apps for maximum coverage.";
inline constexpr const char* kDefaultQuestion = "How would you interact with the following UI <UI>?";
inline constexpr const char* kDefaultPrimitives =
    "Please answer the interactions in the following format: [tap] [resource_id], [scroll] [direction], "
    "[input] [resource_id] [value], [long-tap] [resource_id].";
inline constexpr const char* kUiPlaceholder = "<UI>";

struct PromptTemplate {
    std::string role_text = kDefaultRole;
    std::string question_text = kDefaultQuestion;
    std::string primitives_text = kDefaultPrimitives;
    bool include_role = true;
    bool include_primitives = true;

    // Throws InvalidArgument unless question_text holds exactly one <UI>.
    void validate() const;

    // {"role": "...", "question": "...", "primitives": "...",
    //  "include_role": true, "include_primitives": true}; absent keys keep defaults.
    static PromptTemplate from_file(const std::filesystem::path& path);
};

std::vector<llm::ChatMessage> build_prompt(const PromptTemplate& tmpl, const device::ScreenCapture& capture,
                                           std::size_t max_chars);

}  // namespace uiminer::policy
