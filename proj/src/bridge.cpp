#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>
#include <json.hpp>

#include "ctrw/errors.hpp"
#include "ctrw/policy.hpp"

namespace ctrw {

using nlohmann::json;

std::string bridge_request(const GenState& state, TokenMask mask) {
  json req;
  req["m"] = state.num_vars();
  json reqs = json::array();
  for (const auto& r : state.requirements())
    reqs.push_back({{"care", r.care.to_hex()}, {"val", r.val.to_hex()}});
  req["requirements"] = std::move(reqs);
  json toks = json::array();
  for (const auto& t : state.tokens()) toks.push_back(t.id());
  req["tokens"] = std::move(toks);
  json ids = json::array();
  for (int id = 0; id < state.vocabulary(); ++id)
    if (mask_has(mask, id)) ids.push_back(id);
  req["mask"] = std::move(ids);
  return req.dump();
}

Distribution parse_bridge_response(const std::string& line, TokenMask mask, int num_vars) {
  json doc;
  try {
    doc = json::parse(line);
  } catch (const json::exception&) {
    throw BridgeError("malformed bridge response", line);
  }
  if (!doc.is_object() || !doc.contains("p") || !doc["p"].is_array())
    throw BridgeError("bridge response lacks a probability array", line);
  const auto& arr = doc["p"];
  const int vocab = vocabulary_size(num_vars);
  const int valid = mask_count(mask);
  std::vector<double> raw;
  for (const auto& x : arr) {
    if (!x.is_number()) throw BridgeError("non-numeric probability", line);
    double v = x.get<double>();
    if (!std::isfinite(v) || v < 0) throw BridgeError("probability out of range", line);
    raw.push_back(v);
  }
  Distribution p(vocab, 0.0);
  if (static_cast<int>(raw.size()) == valid) {
    int j = 0;
    for (int id = 0; id < vocab; ++id)
      if (mask_has(mask, id)) p[id] = raw[j++];
  } else if (static_cast<int>(raw.size()) == vocab) {
    // full-vocabulary vector: tolerated when invalid ids carry no mass
    double stray = 0;
    for (int id = 0; id < vocab; ++id) {
      if (mask_has(mask, id))
        p[id] = raw[id];
      else
        stray += raw[id];
    }
    if (stray > 1e-6) throw BridgeError("probability mass on invalid tokens", line);
  } else {
    throw BridgeError("probability array does not match the mask", line);
  }
  double total = 0;
  for (double v : p) total += v;
  if (!(total > 0)) throw BridgeError("bridge returned zero mass on valid tokens", line);
  for (double& v : p) v /= total;
  return p;
}

// ------------------------------------------------------------------ child

struct ExternalPrior::Child {
  std::string command;
  pid_t pid = -1;
  int fd = -1;
  std::string buffer;
  std::mutex mutex;

  void start() {
    int sv[2];
    if (socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, sv) != 0)
      throw BridgeError(std::string("socketpair failed: ") + std::strerror(errno));
    pid_t p = fork();
    if (p < 0) {
      close(sv[0]);
      close(sv[1]);
      throw BridgeError(std::string("fork failed: ") + std::strerror(errno));
    }
    if (p == 0) {
      dup2(sv[1], 0);
      dup2(sv[1], 1);
      execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
      _exit(127);
    }
    close(sv[1]);
    pid = p;
    fd = sv[0];
    buffer.clear();
  }

  void stop() {
    if (fd >= 0) close(fd);
    fd = -1;
    if (pid > 0) {
      int status = 0;
      for (int i = 0; i < 20; ++i) {
        if (waitpid(pid, &status, WNOHANG) == pid) {
          pid = -1;
          return;
        }
        usleep(5000);
      }
      kill(pid, SIGKILL);
      waitpid(pid, &status, 0);
    }
    pid = -1;
  }

  std::string roundtrip(const std::string& request, std::chrono::milliseconds timeout) {
    if (fd < 0) start();
    std::string out = request + "\n";
    std::size_t sent = 0;
    while (sent < out.size()) {
      ssize_t n = send(fd, out.data() + sent, out.size() - sent, MSG_NOSIGNAL);
      if (n < 0) {
        if (errno == EINTR) continue;
        stop();
        throw BridgeError("bridge process closed its input");
      }
      sent += static_cast<std::size_t>(n);
    }
    auto deadline = std::chrono::steady_clock::now() + timeout;
    for (;;) {
      if (auto nl = buffer.find('\n'); nl != std::string::npos) {
        std::string line = buffer.substr(0, nl);
        buffer.erase(0, nl + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
      }
      auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
          deadline - std::chrono::steady_clock::now());
      if (left.count() <= 0) {
        stop();
        throw BridgeError("bridge timed out after " + std::to_string(timeout.count()) + " ms");
      }
      pollfd pfd{fd, POLLIN, 0};
      int r = poll(&pfd, 1, static_cast<int>(left.count()));
      if (r < 0 && errno == EINTR) continue;
      if (r <= 0) continue;
      char chunk[4096];
      ssize_t n = recv(fd, chunk, sizeof chunk, 0);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) {
        std::string partial = buffer;
        stop();
        throw BridgeError("bridge process exited without a response", partial);
      }
      buffer.append(chunk, static_cast<std::size_t>(n));
    }
  }
};

ExternalPrior::ExternalPrior(std::string command, BridgeOptions opts)
    : command_(std::move(command)), opts_(opts) {
  if (opts_.pool_size < 1) throw ConfigError("bridge pool size must be at least 1");
  if (opts_.timeout.count() <= 0) throw ConfigError("bridge timeout must be positive");
  for (int i = 0; i < opts_.pool_size; ++i) {
    pool_.push_back(std::make_unique<Child>());
    pool_.back()->command = command_;
  }
}

ExternalPrior::~ExternalPrior() {
  for (auto& c : pool_) c->stop();
}

std::size_t ExternalPrior::fallbacks() const {
  std::lock_guard lock(stats_mutex_);
  return fallbacks_;
}

Distribution ExternalPrior::operator()(const GenState& s, TokenMask mask) const {
  if (mask == 0) throw DomainError("prior requested for an empty mask");
  std::size_t slot;
  {
    std::lock_guard lock(stats_mutex_);
    slot = next_++ % pool_.size();
  }
  Child& child = *pool_[slot];
  try {
    std::string line;
    {
      std::lock_guard lock(child.mutex);
      line = child.roundtrip(bridge_request(s, mask), opts_.timeout);
    }
    return parse_bridge_response(line, mask, s.num_vars());
  } catch (const BridgeError&) {
    if (!opts_.fallback_uniform) throw;
    std::lock_guard lock(stats_mutex_);
    ++fallbacks_;
  }
  return uniform_prior(s, mask);
}

}  // namespace ctrw
