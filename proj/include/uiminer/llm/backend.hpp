#pragma once

#include "json.hpp"

#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <regex>
#include <semaphore>
#include <string>
#include <vector>

namespace uiminer::llm {

enum class Role { System, User, Assistant };

std::string_view to_string(Role role);

struct ChatMessage {
    Role role = Role::User;
    std::string content;

    bool operator==(const ChatMessage&) const = default;
};

class Backend {
public:
    virtual ~Backend() = default;

    // Messages must be non-empty and end with a user message.
    virtual std::string complete(const std::vector<ChatMessage>& messages, std::chrono::milliseconds timeout) const = 0;
};

// Throws InvalidArgument when the conversation violates the contract above.
void check_conversation(const std::vector<ChatMessage>& messages);

// Deterministic replies chosen by the first rule that matches the last user
// message. Rules match either a plain substring or an ECMAScript regex
// (searched, not full-matched).
class ScriptedBackend final : public Backend {
public:
    struct Rule {
        std::optional<std::string> contains;
        std::optional<std::string> pattern;
        std::string reply;
    };

    ScriptedBackend(std::vector<Rule> rules, std::string default_reply);

    // {"rules": [{"contains": "...", "reply": "..."}, {"pattern": "...", "reply": "..."}],
    //  "default_reply": "..."}
    static ScriptedBackend from_json(const nlohmann::json& j);
    static ScriptedBackend from_file(const std::filesystem::path& path);

    std::string complete(const std::vector<ChatMessage>& messages, std::chrono::milliseconds timeout) const override;

private:
    std::vector<Rule> rules_;
    std::vector<std::optional<std::regex>> compiled_;
    std::string default_reply_;
};

struct RemoteOptions {
    std::string base_url;  // e.g. https://api.openai.com/v1 ; "/chat/completions" is appended
    std::string api_key;
    std::string model = "gpt-3.5-turbo";
    double temperature = 0.0;
    int max_retries = 3;
    std::chrono::milliseconds backoff_base{500};
    int max_in_flight = 4;
};

// Fills base_url/api_key from UI_MINER_LLM_URL / UI_MINER_LLM_KEY when the
// corresponding flag value is empty.
RemoteOptions remote_options_from_env(const std::string& url_flag);

// Chat-completion over HTTP. Transport failures, 408, 429 and 5xx are retried
// with exponential backoff; other non-2xx statuses fail immediately.
class RemoteBackend final : public Backend {
public:
    explicit RemoteBackend(RemoteOptions options);

    std::string complete(const std::vector<ChatMessage>& messages, std::chrono::milliseconds timeout) const override;

    static nlohmann::json request_body(const RemoteOptions& options, const std::vector<ChatMessage>& messages);

private:
    RemoteOptions options_;
    std::string origin_;
    std::string path_;
    mutable std::unique_ptr<std::counting_semaphore<>> in_flight_;
};

}  // namespace uiminer::llm
