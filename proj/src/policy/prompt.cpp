#include "uiminer/policy/prompt.hpp"

#include "uiminer/error.hpp"

#include <fstream>

namespace uiminer::policy {

void PromptTemplate::validate() const {
    const std::string placeholder = kUiPlaceholder;
    const auto first = question_text.find(placeholder);
    if (first == std::string::npos || question_text.find(placeholder, first + 1) != std::string::npos) {
        throw Error(ErrorKind::InvalidArgument, "question text must contain <UI> exactly once");
    }
}

PromptTemplate PromptTemplate::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::NotFound, "prompt file " + path.string());
    PromptTemplate t;
    try {
        const auto j = nlohmann::json::parse(in);
        t.role_text = j.value("role", t.role_text);
        t.question_text = j.value("question", t.question_text);
        t.primitives_text = j.value("primitives", t.primitives_text);
        t.include_role = j.value("include_role", t.include_role);
        t.include_primitives = j.value("include_primitives", t.include_primitives);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidArgument, path.string() + ": " + e.what());
    }
    t.validate();
    return t;
}

std::vector<llm::ChatMessage> build_prompt(const PromptTemplate& tmpl, const device::ScreenCapture& capture,
                                           std::size_t max_chars) {
    tmpl.validate();
    if (max_chars < 256) throw Error(ErrorKind::InvalidArgument, "max_chars must be at least 256");

    std::vector<llm::ChatMessage> messages;
    if (tmpl.include_role) messages.push_back({llm::Role::System, tmpl.role_text});

    std::string user = tmpl.question_text;
    user.replace(user.find(kUiPlaceholder), std::string(kUiPlaceholder).size(),
                 vh::serialize_for_prompt(capture.tree, max_chars));
    if (tmpl.include_primitives) {
        user += "\n";
        user += tmpl.primitives_text;
    }
    messages.push_back({llm::Role::User, std::move(user)});
    return messages;
}

}  // namespace uiminer::policy
