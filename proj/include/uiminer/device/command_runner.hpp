#pragma once

#include <chrono>
#include <string>
#include <vector>

namespace uiminer::device {

struct CommandResult {
    int exit_code = 0;
    std::string out;
    std::string err;
    bool spawn_failed = false;
    bool timed_out = false;
};

class CommandRunner {
public:
    virtual ~CommandRunner() = default;
    virtual CommandResult run(const std::vector<std::string>& argv) = 0;
};

// fork/exec with captured stdout and stderr.
class ProcessRunner final : public CommandRunner {
public:
    explicit ProcessRunner(std::chrono::milliseconds timeout = std::chrono::seconds(30)) : timeout_(timeout) {}
    CommandResult run(const std::vector<std::string>& argv) override;

private:
    std::chrono::milliseconds timeout_;
};

}  // namespace uiminer::device
