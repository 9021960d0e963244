#pragma once

#include <cstdint>
#include <string>

#include "ctrw/rewrite.hpp"

namespace ctrw {

struct RunReport {
  std::string name;
  RewriteStats stats;
  RewriteConfig config;
  std::string policy;
  uint64_t seed = 0;
};

/// One JSON document per run. Table columns: name, size, improvement,
/// time-seconds.
std::string report_json(const RunReport& r);

struct ReportSummary {
  std::string name;
  std::size_t initial_size = 0;
  std::size_t size = 0;
  double improvement = 0;
  double seconds = 0;
};

/// Parses a report and checks that the improvement field agrees with the
/// sizes.
ReportSummary parse_report(const std::string& text);

}  // namespace ctrw
