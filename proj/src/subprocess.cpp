/*
 * Copyright 2026 The explain Authors.
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

#include "explain/subprocess.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstring>
#include <utility>

#include <fmt/format.h>

namespace explain {

namespace {

class Fd {
 public:
  Fd() = default;
  explicit Fd(int fd) : fd_(fd) {}
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  Fd(Fd&& other) noexcept : fd_(other.release()) {}
  Fd& operator=(Fd&& other) noexcept {
    reset(other.release());
    return *this;
  }
  ~Fd() { reset(); }

  int get() const { return fd_; }
  int release() { return std::exchange(fd_, -1); }
  void reset(int fd = -1) {
    if (fd_ >= 0) ::close(fd_);
    fd_ = fd;
  }

 private:
  int fd_ = -1;
};

struct Pipe {
  Fd read;
  Fd write;
};

Pipe make_pipe() {
  int fds[2];
  if (::pipe2(fds, O_CLOEXEC) != 0)
    throw ScorerError(ScorerError::Kind::kSpawnFailure,
                      fmt::format("pipe() failed: {}", std::strerror(errno)), "");
  return Pipe{Fd(fds[0]), Fd(fds[1])};
}

std::string_view trim_line(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  return out + "\"";
}

}  // namespace

ProcessResult run_process(const std::vector<std::string>& command, const std::string& input) {
  if (command.empty())
    throw ScorerError(ScorerError::Kind::kSpawnFailure, "empty scorer command", "");

  // A scorer that exits without draining stdin must surface as an exit
  // status, not kill this process.
  static const bool sigpipe_ignored = [] {
    ::signal(SIGPIPE, SIG_IGN);
    return true;
  }();
  (void)sigpipe_ignored;

  Pipe in = make_pipe();
  Pipe out = make_pipe();
  Pipe err = make_pipe();
  // Reports exec failure from the child; closed on successful exec.
  Pipe status = make_pipe();

  std::vector<char*> argv;
  for (const auto& a : command) argv.push_back(const_cast<char*>(a.c_str()));
  argv.push_back(nullptr);

  const pid_t pid = ::fork();
  if (pid < 0)
    throw ScorerError(ScorerError::Kind::kSpawnFailure,
                      fmt::format("fork() failed: {}", std::strerror(errno)), "");
  if (pid == 0) {
    ::dup2(in.read.get(), STDIN_FILENO);
    ::dup2(out.write.get(), STDOUT_FILENO);
    ::dup2(err.write.get(), STDERR_FILENO);
    ::signal(SIGPIPE, SIG_DFL);
    ::execvp(argv[0], argv.data());
    const int code = errno;
    [[maybe_unused]] auto n = ::write(status.write.get(), &code, sizeof(code));
    ::_exit(127);
  }

  in.read.reset();
  out.write.reset();
  err.write.reset();
  status.write.reset();

  int exec_errno = 0;
  ssize_t got = 0;
  do {
    got = ::read(status.read.get(), &exec_errno, sizeof(exec_errno));
  } while (got < 0 && errno == EINTR);
  if (got == sizeof(exec_errno)) {
    int wstatus = 0;
    ::waitpid(pid, &wstatus, 0);
    throw ScorerError(ScorerError::Kind::kSpawnFailure,
                      fmt::format("cannot execute '{}': {}", command.front(), std::strerror(exec_errno)),
                      "");
  }

  ::fcntl(in.write.get(), F_SETFL, O_NONBLOCK);
  ProcessResult result;
  std::size_t written = 0;
  if (input.empty()) in.write.reset();
  char buffer[65536];
  while (out.read.get() >= 0 || err.read.get() >= 0) {
    pollfd fds[3];
    nfds_t count = 0;
    if (in.write.get() >= 0) fds[count++] = {in.write.get(), POLLOUT, 0};
    if (out.read.get() >= 0) fds[count++] = {out.read.get(), POLLIN, 0};
    if (err.read.get() >= 0) fds[count++] = {err.read.get(), POLLIN, 0};
    if (::poll(fds, count, -1) < 0) {
      if (errno == EINTR) continue;
      break;
    }
    for (nfds_t i = 0; i < count; ++i) {
      if (fds[i].revents == 0) continue;
      if (fds[i].fd == in.write.get()) {
        const ssize_t n = ::write(in.write.get(), input.data() + written, input.size() - written);
        if (n > 0) written += static_cast<std::size_t>(n);
        // EPIPE: the scorer stopped reading; its exit status tells the rest.
        if ((n < 0 && errno != EAGAIN && errno != EINTR) || written == input.size()) in.write.reset();
      } else {
        Fd& fd = fds[i].fd == out.read.get() ? out.read : err.read;
        std::string& sink = fds[i].fd == out.read.get() ? result.stdout_text : result.stderr_text;
        const ssize_t n = ::read(fd.get(), buffer, sizeof(buffer));
        if (n > 0)
          sink.append(buffer, static_cast<std::size_t>(n));
        else if (n == 0 || (errno != EAGAIN && errno != EINTR))
          fd.reset();
      }
    }
  }
  in.write.reset();

  int wstatus = 0;
  while (::waitpid(pid, &wstatus, 0) < 0 && errno == EINTR) {
  }
  if (WIFEXITED(wstatus))
    result.exit_status = WEXITSTATUS(wstatus);
  else if (WIFSIGNALED(wstatus))
    result.exit_status = 128 + WTERMSIG(wstatus);
  return result;
}

std::string encode_scoring_request(const FeatureSchema& schema, const Eigen::MatrixXd& rows) {
  std::string body;
  for (std::size_t j = 0; j < schema.size(); ++j) {
    if (j) body.push_back(',');
    body += quote_if_needed(schema.names[j]);
  }
  body.push_back('\n');
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    for (std::size_t j = 0; j < schema.size(); ++j) {
      if (j) body.push_back(',');
      const double cell = rows(i, static_cast<Eigen::Index>(j));
      if (schema.kinds[j] == ColumnKind::kCategorical)
        body += quote_if_needed(schema.format_cell(j, cell));
      else
        body += format_number(cell);
    }
    body.push_back('\n');
  }
  return body;
}

Eigen::VectorXd decode_scoring_response(const std::string& stdout_text, Eigen::Index expected_rows,
                                        const std::string& stderr_text) {
  std::vector<std::string_view> lines;
  std::string_view rest(stdout_text);
  while (!rest.empty()) {
    const auto eol = rest.find('\n');
    lines.push_back(rest.substr(0, eol));
    if (eol == std::string_view::npos) break;
    rest.remove_prefix(eol + 1);
  }
  if (static_cast<Eigen::Index>(lines.size()) != expected_rows)
    throw ScorerError(ScorerError::Kind::kWrongLineCount,
                      fmt::format("scorer returned {} lines for {} rows", lines.size(), expected_rows),
                      stderr_text);
  Eigen::VectorXd scores(expected_rows);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = trim_line(lines[i]);
    if (!line.empty() && line.front() == '+') line.remove_prefix(1);
    double value = 0.0;
    const char* end = line.data() + line.size();
    auto [ptr, ec] = std::from_chars(line.data(), end, value);
    if (line.empty() || ec != std::errc() || ptr != end || !std::isfinite(value))
      throw ScorerError(ScorerError::Kind::kUnparsableScore,
                        fmt::format("scorer line {} is not a finite decimal: '{}'", i + 1, lines[i]),
                        stderr_text);
    scores(static_cast<Eigen::Index>(i)) = value;
  }
  return scores;
}

}  // namespace explain
