// Copyright Contributors to the purikit project.
// SPDX-License-Identifier: Apache-2.0

#include "purikit/process.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <condition_variable>
#include <cstring>
#include <mutex>

#include "purikit/error.hpp"

extern char** environ;

namespace purikit {

namespace {

class ProcessLimiter {
public:
    void acquire()
    {
        std::unique_lock lock(mutex_);
        cv_.wait(lock, [&] { return running_ < cap_; });
        ++running_;
    }
    void release()
    {
        {
            std::lock_guard lock(mutex_);
            --running_;
        }
        cv_.notify_one();
    }
    void set_cap(int cap)
    {
        {
            std::lock_guard lock(mutex_);
            cap_ = std::max(1, cap);
        }
        cv_.notify_all();
    }
    int cap()
    {
        std::lock_guard lock(mutex_);
        return cap_;
    }

private:
    std::mutex mutex_;
    std::condition_variable cv_;
    int cap_ = 4;
    int running_ = 0;
};

ProcessLimiter& limiter()
{
    static ProcessLimiter instance;
    return instance;
}

struct Slot {
    Slot() { limiter().acquire(); }
    ~Slot() { limiter().release(); }
    Slot(const Slot&) = delete;
    Slot& operator=(const Slot&) = delete;
};

struct Fd {
    int fd = -1;
    ~Fd() { close(); }
    void close()
    {
        if (fd >= 0)
            ::close(fd);
        fd = -1;
    }
};

}  // namespace

void set_process_cap(int cap) { limiter().set_cap(cap); }
int process_cap() { return limiter().cap(); }

std::string tail_excerpt(const std::string& text, std::size_t max_len)
{
    std::string s = text.size() > max_len ? "..." + text.substr(text.size() - max_len) : text;
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r'))
        s.pop_back();
    return s;
}

ProcessResult run_process(const std::string& command, const std::vector<std::string>& args,
                          std::optional<double> timeout_s)
{
    Slot slot;

    // sh -c '<command> "$@"' sh arg...
    std::vector<std::string> argv_storage = {"sh", "-c", command + " \"$@\"", "sh"};
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_storage)
        argv.push_back(a.data());
    argv.push_back(nullptr);

    int out_pipe[2], err_pipe[2];
    if (pipe2(out_pipe, O_CLOEXEC) != 0)
        fail(ErrorCode::BackendUnavailable, std::string("pipe: ") + std::strerror(errno));
    Fd out_r{out_pipe[0]}, out_w{out_pipe[1]};
    if (pipe2(err_pipe, O_CLOEXEC) != 0)
        fail(ErrorCode::BackendUnavailable, std::string("pipe: ") + std::strerror(errno));
    Fd err_r{err_pipe[0]}, err_w{err_pipe[1]};

    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_addopen(&actions, 0, "/dev/null", O_RDONLY, 0);
    posix_spawn_file_actions_adddup2(&actions, out_w.fd, 1);
    posix_spawn_file_actions_adddup2(&actions, err_w.fd, 2);
    posix_spawnattr_t attr;
    posix_spawnattr_init(&attr);
    posix_spawnattr_setflags(&attr, POSIX_SPAWN_SETPGROUP);
    posix_spawnattr_setpgroup(&attr, 0);

    pid_t pid = 0;
    const int rc = posix_spawn(&pid, "/bin/sh", &actions, &attr, argv.data(), environ);
    posix_spawn_file_actions_destroy(&actions);
    posix_spawnattr_destroy(&attr);
    if (rc != 0)
        fail(ErrorCode::BackendUnavailable, "cannot spawn /bin/sh: " + std::string(std::strerror(rc)));
    out_w.close();
    err_w.close();

    ProcessResult result;
    using clock = std::chrono::steady_clock;
    const auto deadline = timeout_s
        ? clock::now() + std::chrono::duration_cast<clock::duration>(std::chrono::duration<double>(*timeout_s))
        : clock::time_point::max();

    char buf[4096];
    while (out_r.fd >= 0 || err_r.fd >= 0) {
        pollfd fds[2];
        int n = 0;
        if (out_r.fd >= 0)
            fds[n++] = {out_r.fd, POLLIN, 0};
        if (err_r.fd >= 0)
            fds[n++] = {err_r.fd, POLLIN, 0};
        int wait_ms = -1;
        if (timeout_s) {
            const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - clock::now()).count();
            if (left <= 0) {
                result.timed_out = true;
                break;
            }
            wait_ms = static_cast<int>(std::min<long long>(left, 1000));
        }
        const int ready = poll(fds, static_cast<nfds_t>(n), wait_ms);
        if (ready < 0 && errno != EINTR)
            break;
        for (int i = 0; i < n && ready > 0; ++i) {
            if (!(fds[i].revents & (POLLIN | POLLHUP | POLLERR)))
                continue;
            const ssize_t got = read(fds[i].fd, buf, sizeof buf);
            const bool is_out = fds[i].fd == out_r.fd;
            if (got > 0)
                (is_out ? result.out : result.err).append(buf, static_cast<std::size_t>(got));
            else if (got == 0 || errno != EINTR)
                (is_out ? out_r : err_r).close();
        }
    }

    if (result.timed_out)
        kill(-pid, SIGKILL);
    int status = 0;
    while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
    // Orphans that kept the pipes open would otherwise linger.
    if (result.timed_out)
        kill(-pid, SIGKILL);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

}  // namespace purikit
