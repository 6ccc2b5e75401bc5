#include "uiminer/llm/backend.hpp"

#include "uiminer/error.hpp"

#include "httplib.h"

#include <cstdlib>
#include <fstream>
#include <thread>

namespace uiminer::llm {

using nlohmann::json;

std::string_view to_string(Role role) {
    switch (role) {
        case Role::System: return "system";
        case Role::User: return "user";
        case Role::Assistant: return "assistant";
    }
    return "user";
}

void check_conversation(const std::vector<ChatMessage>& messages) {
    if (messages.empty()) throw Error(ErrorKind::InvalidArgument, "conversation is empty");
    if (messages.back().role != Role::User) throw Error(ErrorKind::InvalidArgument, "conversation must end with a user message");
    for (const auto& m : messages) {
        if (m.role != Role::Assistant && m.content.empty()) {
            throw Error(ErrorKind::InvalidArgument, std::string(to_string(m.role)) + " message is empty");
        }
    }
}

ScriptedBackend::ScriptedBackend(std::vector<Rule> rules, std::string default_reply)
    : rules_(std::move(rules)), default_reply_(std::move(default_reply)) {
    compiled_.reserve(rules_.size());
    for (const auto& r : rules_) {
        if (r.pattern) {
            try {
                compiled_.emplace_back(std::regex(*r.pattern));
            } catch (const std::regex_error& e) {
                throw Error(ErrorKind::InvalidArgument, "rule pattern '" + *r.pattern + "': " + e.what());
            }
        } else if (r.contains) {
            compiled_.emplace_back(std::nullopt);
        } else {
            throw Error(ErrorKind::InvalidArgument, "scripted rule needs 'contains' or 'pattern'");
        }
    }
}

ScriptedBackend ScriptedBackend::from_json(const json& j) {
    try {
        std::vector<Rule> rules;
        for (const auto& r : j.value("rules", json::array())) {
            Rule rule;
            if (r.contains("contains")) rule.contains = r.at("contains").get<std::string>();
            if (r.contains("pattern")) rule.pattern = r.at("pattern").get<std::string>();
            rule.reply = r.at("reply").get<std::string>();
            rules.push_back(std::move(rule));
        }
        return ScriptedBackend(std::move(rules), j.value("default_reply", ""));
    } catch (const json::exception& e) {
        throw Error(ErrorKind::InvalidArgument, std::string("scripted rules: ") + e.what());
    }
}

ScriptedBackend ScriptedBackend::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::NotFound, "rules file " + path.string());
    try {
        return from_json(json::parse(in));
    } catch (const json::exception& e) {
        throw Error(ErrorKind::InvalidArgument, path.string() + ": " + e.what());
    }
}

std::string ScriptedBackend::complete(const std::vector<ChatMessage>& messages, std::chrono::milliseconds) const {
    check_conversation(messages);
    const std::string& last = messages.back().content;
    for (std::size_t i = 0; i < rules_.size(); ++i) {
        const bool hit = compiled_[i] ? std::regex_search(last, *compiled_[i])
                                      : last.find(*rules_[i].contains) != std::string::npos;
        if (hit) return rules_[i].reply;
    }
    return default_reply_;
}

RemoteOptions remote_options_from_env(const std::string& url_flag) {
    RemoteOptions o;
    o.base_url = url_flag;
    if (o.base_url.empty()) {
        if (const char* env = std::getenv("UI_MINER_LLM_URL"); env && *env) o.base_url = env;
    }
    if (const char* key = std::getenv("UI_MINER_LLM_KEY"); key) o.api_key = key;
    return o;
}

RemoteBackend::RemoteBackend(RemoteOptions options) : options_(std::move(options)) {
    if (options_.api_key.empty()) throw Error(ErrorKind::NoApiKey, "set UI_MINER_LLM_KEY");
    if (options_.base_url.empty()) throw Error(ErrorKind::InvalidArgument, "no LLM endpoint configured");
    std::string url = options_.base_url;
    while (!url.empty() && url.back() == '/') url.pop_back();
    const auto scheme = url.find("://");
    const auto path_start = url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
    origin_ = path_start == std::string::npos ? url : url.substr(0, path_start);
    path_ = (path_start == std::string::npos ? std::string() : url.substr(path_start)) + "/chat/completions";
    in_flight_ = std::make_unique<std::counting_semaphore<>>(std::max(1, options_.max_in_flight));
}

json RemoteBackend::request_body(const RemoteOptions& options, const std::vector<ChatMessage>& messages) {
    json msgs = json::array();
    for (const auto& m : messages) msgs.push_back({{"role", to_string(m.role)}, {"content", m.content}});
    return {{"model", options.model}, {"temperature", options.temperature}, {"messages", std::move(msgs)}};
}

std::string RemoteBackend::complete(const std::vector<ChatMessage>& messages, std::chrono::milliseconds timeout) const {
    check_conversation(messages);
    const std::string body = request_body(options_, messages).dump();

    in_flight_->acquire();
    struct Release {
        std::counting_semaphore<>* s;
        ~Release() { s->release(); }
    } release{in_flight_.get()};

    httplib::Client client(origin_);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    client.set_bearer_token_auth(options_.api_key);

    std::string last_problem;
    bool last_was_timeout = false;
    for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
        if (attempt > 0) std::this_thread::sleep_for(options_.backoff_base * (1 << (attempt - 1)));
        auto res = client.Post(path_, body, "application/json");
        if (!res) {
            last_was_timeout = res.error() == httplib::Error::Read || res.error() == httplib::Error::Write ||
                               res.error() == httplib::Error::ConnectionTimeout;
            last_problem = httplib::to_string(res.error());
            continue;
        }
        if (res->status == 408 || res->status == 429 || res->status >= 500) {
            last_was_timeout = res->status == 408;
            last_problem = "HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status < 200 || res->status >= 300) {
            throw Error(ErrorKind::BackendRefused, "HTTP " + std::to_string(res->status) + ": " + res->body);
        }
        try {
            return json::parse(res->body).at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const json::exception& e) {
            throw Error(ErrorKind::BackendRefused, std::string("malformed completion: ") + e.what());
        }
    }
    throw Error(last_was_timeout ? ErrorKind::BackendTimeout : ErrorKind::BackendRefused,
                "giving up after " + std::to_string(options_.max_retries + 1) + " attempts: " + last_problem);
}

}  // namespace uiminer::llm
