#include "ifsc/external_scorer.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include <json.hpp>

#include "ifsc/errors.hpp"
#include "ifsc/log.hpp"
#include "ifsc/pairgen.hpp"

namespace ifsc {

using nlohmann::json;

struct ExternalScorer::Process {
  pid_t pid = -1;
  int to_child = -1;    // our write end
  int from_child = -1;  // our read end
  std::string buffer;   // bytes read but not yet consumed as a line

  ~Process() {
    if (to_child >= 0) ::close(to_child);
    if (from_child >= 0) ::close(from_child);
    if (pid > 0) {
      ::kill(pid, SIGTERM);
      int status = 0;
      ::waitpid(pid, &status, 0);
    }
  }
};

ExternalScorer::ExternalScorer(std::string command, std::chrono::milliseconds timeout)
    : command_(std::move(command)), timeout_(timeout) {}

ExternalScorer::~ExternalScorer() = default;

void ExternalScorer::ensure_started() {
  if (proc_) return;

  int in_pipe[2];   // parent -> child stdin
  int out_pipe[2];  // child stdout -> parent
  if (::pipe(in_pipe) != 0 || ::pipe(out_pipe) != 0)
    throw DataError("external scorer: pipe() failed: " + std::string(std::strerror(errno)));

  const pid_t pid = ::fork();
  if (pid < 0) throw DataError("external scorer: fork() failed");
  if (pid == 0) {
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    ::close(out_pipe[1]);
    ::execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }

  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  proc_ = std::make_unique<Process>();
  proc_->pid = pid;
  proc_->to_child = in_pipe[1];
  proc_->from_child = out_pipe[0];
  log_debug("spawned external scorer: " + command_);

  if (!pending_load_.empty()) {
    const std::string path = std::move(pending_load_);
    pending_load_.clear();
    request(json{{"op", "load"}, {"path", path}}.dump());
  }
}

std::string ExternalScorer::request(const std::string& line) {
  ensure_started();

  std::string msg = line;
  msg += '\n';
  size_t written = 0;
  while (written < msg.size()) {
    const ssize_t n = ::write(proc_->to_child, msg.data() + written, msg.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      proc_.reset();
      throw DataError("external scorer: write failed (child gone?)");
    }
    written += static_cast<size_t>(n);
  }

  const auto deadline = std::chrono::steady_clock::now() + timeout_;
  for (;;) {
    const size_t nl = proc_->buffer.find('\n');
    if (nl != std::string::npos) {
      std::string reply = proc_->buffer.substr(0, nl);
      proc_->buffer.erase(0, nl + 1);
      return reply;
    }

    const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (remaining.count() <= 0) {
      proc_.reset();  // kills the child
      throw DataError("external scorer timed out after " + std::to_string(timeout_.count()) +
                      " ms: " + command_);
    }

    struct pollfd pfd{proc_->from_child, POLLIN, 0};
    const int rc = ::poll(&pfd, 1, static_cast<int>(remaining.count()));
    if (rc < 0) {
      if (errno == EINTR) continue;
      proc_.reset();
      throw DataError("external scorer: poll failed");
    }
    if (rc == 0) continue;  // loop re-checks the deadline

    char chunk[4096];
    const ssize_t n = ::read(proc_->from_child, chunk, sizeof(chunk));
    if (n < 0) {
      if (errno == EINTR) continue;
      proc_.reset();
      throw DataError("external scorer: read failed");
    }
    if (n == 0) {
      int status = 0;
      ::waitpid(proc_->pid, &status, 0);
      proc_->pid = -1;
      proc_.reset();
      std::string detail = WIFEXITED(status)
                               ? "exit code " + std::to_string(WEXITSTATUS(status))
                               : "killed by signal " + std::to_string(WTERMSIG(status));
      throw DataError("external scorer exited mid-request (" + detail + "): " + command_);
    }
    proc_->buffer.append(chunk, static_cast<size_t>(n));
  }
}

namespace {

json parse_reply(const std::string& line, const std::string& command) {
  try {
    return json::parse(line);
  } catch (const json::exception& e) {
    throw DataError("external scorer sent malformed JSON (" + std::string(e.what()) + "): " +
                    command);
  }
}

void expect_ok(const json& reply, const std::string& command) {
  if (!reply.value("ok", false))
    throw DataError("external scorer refused request: " + reply.dump() + " (" + command + ")");
}

}  // namespace

double ExternalScorer::score(const std::string& premise, const std::string& hypothesis) {
  const long id = next_id_++;
  const json req{{"op", "score"}, {"id", id}, {"premise", premise}, {"hypothesis", hypothesis}};
  const json reply = parse_reply(request(req.dump()), command_);
  if (!reply.contains("id") || reply["id"].get<long>() != id)
    throw DataError("external scorer reply id mismatch: " + reply.dump());
  if (!reply.contains("score") || !reply["score"].is_number())
    throw DataError("external scorer reply lacks a numeric score: " + reply.dump());
  const double s = reply["score"].get<double>();
  if (!(s >= 0.0 && s <= 1.0))
    throw DataError("external scorer returned score outside [0,1]: " + reply.dump());
  return s;
}

void ExternalScorer::fit(const PairSet& /*pairs*/, const std::string& pairs_path,
                         const TrainSpec& /*spec*/, TrainPhase phase) {
  if (pairs_path.empty()) throw ConfigError("external scorer fit requires a pairs file");
  const json req{{"op", "fit"}, {"pairs_path", pairs_path}, {"mode", to_string(phase)}};
  expect_ok(parse_reply(request(req.dump()), command_), command_);
}

void ExternalScorer::save(const std::string& path) {
  const json req{{"op", "save"}, {"path", path}};
  expect_ok(parse_reply(request(req.dump()), command_), command_);
}

void ExternalScorer::load(const std::string& path) {
  if (proc_) {
    const json req{{"op", "load"}, {"path", path}};
    expect_ok(parse_reply(request(req.dump()), command_), command_);
  } else {
    pending_load_ = path;  // defer until the child is running
  }
}

std::shared_ptr<EntailmentScorer> ExternalScorer::snapshot(const std::string& checkpoint_hint) {
  if (checkpoint_hint.empty())
    throw ConfigError("external scorer snapshot needs a checkpoint path");
  save(checkpoint_hint);
  auto frozen = std::make_shared<ExternalScorer>(command_, timeout_);
  frozen->pending_load_ = checkpoint_hint;
  return frozen;
}

}  // namespace ifsc
