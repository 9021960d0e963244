#include "ctrw/report.hpp"

#include <omp.h>

#include <cmath>
#include <json.hpp>

#include "ctrw/errors.hpp"

namespace ctrw {

using nlohmann::json;

std::string report_json(const RunReport& r) {
  const auto& s = r.stats;
  const auto& c = r.config;
  json windows = json::array();
  for (const auto& w : s.windows)
    windows.push_back({{"pass", w.pass},
                       {"inputs", w.inputs},
                       {"outputs", w.outputs},
                       {"internal", w.internal},
                       {"gain", w.gain},
                       {"accepted", w.accepted},
                       {"cycle_reverted", w.cycle_reverted},
                       {"synthesis_failed", w.synthesis_failed},
                       {"seconds", w.seconds}});
  json j;
  j["name"] = r.name;
  j["size"] = s.final_size;
  j["improvement"] = s.improvement;
  j["time-seconds"] = s.wall_seconds;
  j["initial-size"] = s.initial_size;
  j["passes"] = s.passes;
  j["accepted"] = s.accepted();
  j["cycle-reverts"] = s.cycle_reverts();
  j["windows"] = std::move(windows);
  j["config"] = {{"k", c.k},
                 {"max-len", c.max_len},
                 {"mstep", c.search.m_step},
                 {"mplayout", c.search.m_playout},
                 {"c-explore", c.search.c_explore},
                 {"dag-aware", c.search.dag_aware},
                 {"strict", c.search.mode == DeadEndMode::Strict},
                 {"accept-zero-gain", c.accept_zero_gain},
                 {"passes", c.max_passes},
                 {"policy", r.policy}};
  j["seed"] = r.seed;
  j["environment"] = {{"compiler", __VERSION__},
                      {"cxx", static_cast<long>(__cplusplus)},
                      {"omp-max-threads", omp_get_max_threads()}};
  return j.dump(2) + "\n";
}

ReportSummary parse_report(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(1, std::string("report: ") + e.what());
  }
  ReportSummary s;
  try {
    s.name = j.at("name").get<std::string>();
    s.size = j.at("size").get<std::size_t>();
    s.initial_size = j.at("initial-size").get<std::size_t>();
    s.improvement = j.at("improvement").get<double>();
    s.seconds = j.at("time-seconds").get<double>();
  } catch (const json::exception& e) {
    throw ParseError(1, std::string("report: ") + e.what());
  }
  double expect = s.initial_size == 0 ? 0.0
                                      : static_cast<double>(s.initial_size - s.size) /
                                            static_cast<double>(s.initial_size);
  if (std::abs(expect - s.improvement) > 1e-12)
    throw DomainError("report improvement does not match its sizes");
  return s;
}

}  // namespace ctrw
