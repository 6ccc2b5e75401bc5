#include "uiminer/device/command_runner.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cerrno>

namespace uiminer::device {

CommandResult ProcessRunner::run(const std::vector<std::string>& argv) {
    CommandResult result;
    if (argv.empty()) {
        result.spawn_failed = true;
        result.exit_code = 127;
        return result;
    }
    int out_pipe[2];
    int err_pipe[2];
    int status_pipe[2];
    if (pipe(out_pipe) != 0 || pipe(err_pipe) != 0 || pipe2(status_pipe, O_CLOEXEC) != 0) {
        result.spawn_failed = true;
        result.exit_code = 127;
        return result;
    }

    const pid_t pid = fork();
    if (pid < 0) {
        result.spawn_failed = true;
        result.exit_code = 127;
        return result;
    }
    if (pid == 0) {
        dup2(out_pipe[1], STDOUT_FILENO);
        dup2(err_pipe[1], STDERR_FILENO);
        close(out_pipe[0]);
        close(err_pipe[0]);
        close(status_pipe[0]);
        std::vector<char*> args;
        for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
        args.push_back(nullptr);
        execvp(args[0], args.data());
        const int code = errno;
        (void)!write(status_pipe[1], &code, sizeof(code));
        _exit(127);
    }
    close(out_pipe[1]);
    close(err_pipe[1]);
    close(status_pipe[1]);

    const auto deadline = std::chrono::steady_clock::now() + timeout_;
    std::array<pollfd, 2> fds = {{{out_pipe[0], POLLIN, 0}, {err_pipe[0], POLLIN, 0}}};
    std::array<std::string*, 2> sinks = {&result.out, &result.err};
    int open_fds = 2;
    char buf[65536];
    while (open_fds > 0) {
        const auto remaining =
            std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        if (remaining.count() <= 0) {
            kill(pid, SIGKILL);
            result.timed_out = true;
            break;
        }
        const int ready = poll(fds.data(), fds.size(), static_cast<int>(remaining.count()));
        if (ready < 0 && errno == EINTR) continue;
        if (ready <= 0) continue;
        for (std::size_t i = 0; i < fds.size(); ++i) {
            if (fds[i].fd < 0 || !(fds[i].revents & (POLLIN | POLLHUP | POLLERR))) continue;
            const ssize_t n = read(fds[i].fd, buf, sizeof(buf));
            if (n > 0) {
                sinks[i]->append(buf, static_cast<std::size_t>(n));
            } else {
                close(fds[i].fd);
                fds[i].fd = -1;
                --open_fds;
            }
        }
    }
    for (auto& f : fds) {
        if (f.fd >= 0) close(f.fd);
    }

    int exec_errno = 0;
    if (read(status_pipe[0], &exec_errno, sizeof(exec_errno)) == sizeof(exec_errno)) result.spawn_failed = true;
    close(status_pipe[0]);

    int status = 0;
    waitpid(pid, &status, 0);
    if (result.timed_out) {
        result.exit_code = -1;
    } else if (WIFEXITED(status)) {
        result.exit_code = WEXITSTATUS(status);
    } else {
        result.exit_code = -1;
    }
    return result;
}

}  // namespace uiminer::device
