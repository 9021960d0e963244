#pragma once

#include <chrono>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <vector>

#include "ctrw/synthgen.hpp"

namespace ctrw {

/// Probability vector over the vocabulary, zero outside the mask.
using Distribution = std::vector<double>;

class PolicyPrior {
 public:
  virtual ~PolicyPrior() = default;
  virtual Distribution operator()(const GenState& state, TokenMask mask) const = 0;
  virtual std::string name() const = 0;
};

Distribution uniform_prior(const GenState& state, TokenMask mask);

/// Boosts input tokens that merge or close an output root, and AND tokens
/// whose required-1 patterns a single literal can supply.
Distribution heuristic_prior(const GenState& state, TokenMask mask, double boost = 4.0);

/// Highest-probability valid token. Ties prefer input and EOS tokens over
/// AND tokens, then the lowest id.
Token greedy_token(const Distribution& p, TokenMask mask, int num_vars);

/// Samples a valid token proportionally to `p`.
Token sample_token(const Distribution& p, TokenMask mask, int num_vars, std::mt19937_64& rng);

class UniformPrior final : public PolicyPrior {
 public:
  Distribution operator()(const GenState& s, TokenMask m) const override { return uniform_prior(s, m); }
  std::string name() const override { return "uniform"; }
};

class HeuristicPrior final : public PolicyPrior {
 public:
  explicit HeuristicPrior(double boost = 4.0);
  Distribution operator()(const GenState& s, TokenMask m) const override {
    return heuristic_prior(s, m, boost_);
  }
  std::string name() const override { return "heuristic"; }

 private:
  double boost_;
};

struct BridgeOptions {
  std::chrono::milliseconds timeout{5000};
  bool fallback_uniform = false;
  int pool_size = 1;
};

/// Request line sent to an external policy process.
std::string bridge_request(const GenState& state, TokenMask mask);

/// Parses a response line into a distribution; rejects malformed payloads
/// and mass on invalid tokens.
Distribution parse_bridge_response(const std::string& line, TokenMask mask, int num_vars);

/// Prior served by child processes speaking one JSON line per request on
/// stdin/stdout. `command` runs through /bin/sh.
class ExternalPrior final : public PolicyPrior {
 public:
  explicit ExternalPrior(std::string command, BridgeOptions opts = {});
  ~ExternalPrior() override;
  ExternalPrior(const ExternalPrior&) = delete;
  ExternalPrior& operator=(const ExternalPrior&) = delete;

  Distribution operator()(const GenState& s, TokenMask m) const override;
  std::string name() const override { return "bridge:" + command_; }
  std::size_t fallbacks() const;

 private:
  struct Child;
  std::string command_;
  BridgeOptions opts_;
  std::vector<std::unique_ptr<Child>> pool_;
  mutable std::mutex stats_mutex_;
  mutable std::size_t fallbacks_ = 0;
  mutable std::size_t next_ = 0;
};

/// Builds a prior from a CLI-style spec: uniform, heuristic or bridge:<cmd>.
std::unique_ptr<PolicyPrior> make_prior(const std::string& spec, BridgeOptions opts = {});

}  // namespace ctrw
