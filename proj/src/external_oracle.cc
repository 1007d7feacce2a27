/*
 * Copyright 2026 The GPX Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "gpx/external_oracle.h"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <stdexcept>
#include <thread>

extern char** environ;

namespace gpx {
namespace {

constexpr std::size_t kStderrTail = 4096;

void SetNonBlocking(int fd) {
  const int flags = fcntl(fd, F_GETFL);
  fcntl(fd, F_SETFL, flags | O_NONBLOCK);
}

void CloseFd(int& fd) {
  if (fd >= 0) close(fd);
  fd = -1;
}

std::string Quote(const std::string& text) {
  constexpr std::size_t kMax = 60;
  return "\"" + (text.size() > kMax ? text.substr(0, kMax) + "..." : text) + "\"";
}

}  // namespace

std::string FormatRequestLine(std::span<const double> row) {
  std::string line;
  char buf[32];
  for (std::size_t j = 0; j < row.size(); ++j) {
    if (j > 0) line += ',';
    std::snprintf(buf, sizeof(buf), "%.17g", row[j]);
    line += buf;
  }
  return line;
}

ExternalOracle::ExternalOracle(const std::string& command, Task task,
                               std::size_t n_features,
                               std::chrono::milliseconds timeout)
    : task_(task), n_features_(n_features), timeout_(timeout) {
  signal(SIGPIPE, SIG_IGN);
  int in[2];
  int out[2];
  int err[2];
  if (pipe2(in, O_CLOEXEC) != 0) {
    throw std::runtime_error("external oracle: pipe failed");
  }
  if (pipe2(out, O_CLOEXEC) != 0) {
    close(in[0]);
    close(in[1]);
    throw std::runtime_error("external oracle: pipe failed");
  }
  if (pipe2(err, O_CLOEXEC) != 0) {
    for (const int fd : {in[0], in[1], out[0], out[1]}) close(fd);
    throw std::runtime_error("external oracle: pipe failed");
  }
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in[0], STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, out[1], STDOUT_FILENO);
  posix_spawn_file_actions_adddup2(&actions, err[1], STDERR_FILENO);
  std::string sh = "sh";
  std::string dash_c = "-c";
  std::string cmd = command;
  char* argv[] = {sh.data(), dash_c.data(), cmd.data(), nullptr};
  const int rc = posix_spawn(&pid_, "/bin/sh", &actions, nullptr, argv, environ);
  posix_spawn_file_actions_destroy(&actions);
  close(in[0]);
  close(out[1]);
  close(err[1]);
  stdin_fd_ = in[1];
  stdout_fd_ = out[0];
  stderr_fd_ = err[0];
  if (rc != 0) {
    pid_ = -1;
    Shutdown();
    throw std::runtime_error("external oracle: cannot spawn '" + command +
                             "': " + std::strerror(rc));
  }
  SetNonBlocking(stdin_fd_);
  SetNonBlocking(stdout_fd_);
  SetNonBlocking(stderr_fd_);
}

ExternalOracle::~ExternalOracle() { Shutdown(); }

void ExternalOracle::Shutdown() {
  CloseFd(stdin_fd_);
  if (pid_ > 0) {
    int status = 0;
    bool reaped = false;
    for (int i = 0; i < 100 && !reaped; ++i) {
      reaped = waitpid(pid_, &status, WNOHANG) == pid_;
      if (!reaped) std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    if (!reaped) {
      kill(pid_, SIGKILL);
      waitpid(pid_, &status, 0);
    }
    pid_ = -1;
  }
  CloseFd(stdout_fd_);
  CloseFd(stderr_fd_);
}

void ExternalOracle::DrainStderr() const {
  if (stderr_fd_ < 0) return;
  char buf[4096];
  const auto deadline =
      std::chrono::steady_clock::now() + std::chrono::milliseconds(200);
  while (std::chrono::steady_clock::now() < deadline) {
    pollfd p{stderr_fd_, POLLIN, 0};
    if (poll(&p, 1, 20) <= 0) continue;
    const ssize_t got = read(stderr_fd_, buf, sizeof(buf));
    if (got <= 0) {
      if (got < 0 && (errno == EAGAIN || errno == EINTR)) continue;
      return;
    }
    stderr_tail_.append(buf, static_cast<std::size_t>(got));
    if (stderr_tail_.size() > kStderrTail) {
      stderr_tail_.erase(0, stderr_tail_.size() - kStderrTail);
    }
  }
}

std::string ExternalOracle::Diagnostics() const {
  std::string out;
  if (pid_ > 0) {
    int status = 0;
    pid_t done = 0;
    for (int i = 0; i < 10 && done == 0; ++i) {
      done = waitpid(pid_, &status, WNOHANG);
      if (done == 0) std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    if (done == pid_) {
      pid_ = -1;
      if (WIFEXITED(status)) {
        out += "; child exited with status " + std::to_string(WEXITSTATUS(status));
      } else if (WIFSIGNALED(status)) {
        out += "; child killed by signal " + std::to_string(WTERMSIG(status));
      }
    }
  }
  std::string tail = stderr_tail_;
  while (!tail.empty() && (tail.back() == '\n' || tail.back() == '\r')) {
    tail.pop_back();
  }
  if (!tail.empty()) out += "; child stderr: " + tail;
  return out;
}

void ExternalOracle::Fail(const std::string& message) const {
  failed_ = true;
  DrainStderr();
  throw std::runtime_error("external oracle: " + message + Diagnostics());
}

std::vector<double> ExternalOracle::PredictBatch(const Matrix& rows) const {
  std::lock_guard<std::mutex> lock(mu_);
  if (failed_) throw std::runtime_error("external oracle: unusable after an earlier error");
  CheckOracleInput(*this, rows);
  const std::size_t m = rows.rows();
  if (m == 0) return {};

  char buf[65536];
  // Output that arrives between batches breaks the 1:1 ordering.
  if (!pending_.empty()) Fail("prediction count mismatch: unexpected output between batches");
  {
    pollfd p{stdout_fd_, POLLIN, 0};
    if (poll(&p, 1, 0) > 0) {
      const ssize_t got = read(stdout_fd_, buf, sizeof(buf));
      if (got > 0) Fail("prediction count mismatch: unexpected output between batches");
      if (got == 0) Fail("prediction count mismatch: child closed its output");
    }
  }

  std::string request;
  for (std::size_t r = 0; r < m; ++r) {
    request += FormatRequestLine(rows.row(r));
    request += '\n';
  }
  std::size_t written = 0;
  bool can_write = true;
  std::vector<double> out;
  out.reserve(m);
  const auto deadline = std::chrono::steady_clock::now() + timeout_;

  while (out.size() < m) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      Fail("prediction count mismatch: expected " + std::to_string(m) +
           " predictions, got " + std::to_string(out.size()) + " before timeout");
    }
    pollfd fds[3] = {{stdout_fd_, POLLIN, 0},
                     {stderr_fd_, POLLIN, 0},
                     {stdin_fd_, POLLOUT, 0}};
    const nfds_t nfds = can_write && written < request.size() ? 3 : 2;
    const int ready = poll(fds, nfds, static_cast<int>(left.count()));
    if (ready < 0) {
      if (errno == EINTR) continue;
      Fail(std::string("poll failed: ") + std::strerror(errno));
    }
    if (nfds == 3 && fds[2].revents != 0) {
      const ssize_t n = write(stdin_fd_, request.data() + written,
                              request.size() - written);
      if (n > 0) {
        written += static_cast<std::size_t>(n);
      } else if (n < 0 && errno != EAGAIN && errno != EINTR) {
        can_write = false;
      }
    }
    if (fds[1].revents != 0) {
      const ssize_t n = read(stderr_fd_, buf, sizeof(buf));
      if (n > 0) {
        stderr_tail_.append(buf, static_cast<std::size_t>(n));
        if (stderr_tail_.size() > kStderrTail) {
          stderr_tail_.erase(0, stderr_tail_.size() - kStderrTail);
        }
      }
    }
    if (fds[0].revents != 0) {
      const ssize_t n = read(stdout_fd_, buf, sizeof(buf));
      if (n < 0) {
        if (errno == EAGAIN || errno == EINTR) continue;
        Fail(std::string("read failed: ") + std::strerror(errno));
      }
      if (n == 0) {
        Fail("prediction count mismatch: expected " + std::to_string(m) +
             " predictions, got " + std::to_string(out.size()));
      }
      pending_.append(buf, static_cast<std::size_t>(n));
      std::size_t start = 0;
      for (std::size_t nl; (nl = pending_.find('\n', start)) != std::string::npos;
           start = nl + 1) {
        const std::string line = pending_.substr(start, nl - start);
        if (out.size() == m) {
          pending_.clear();
          Fail("prediction count mismatch: more than " + std::to_string(m) +
               " predictions");
        }
        char* end = nullptr;
        const double v = line.empty() ? NAN : std::strtod(line.c_str(), &end);
        if (line.empty() || end != line.c_str() + line.size() || !std::isfinite(v)) {
          pending_.clear();
          Fail("malformed prediction on line " + std::to_string(out.size() + 1) +
               ": " + Quote(line));
        }
        out.push_back(v);
      }
      pending_.erase(0, start);
    }
  }
  if (!pending_.empty()) {
    pending_.clear();
    Fail("prediction count mismatch: more than " + std::to_string(m) +
         " predictions");
  }
  return out;
}

}  // namespace gpx
