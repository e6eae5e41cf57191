#pragma once

#include <cstdint>
#include <functional>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

namespace fincap::acceptance {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string summary;   // one line of the decisive numbers
  nlohmann::json values; // everything measured
  double seconds = 0.0;  // wall time, kept out of deterministic reports
};

struct SuiteOptions {
  int grid = 96;
  int coarse_grid = 48;
  std::uint64_t seed = 7;
  int newton_trials = 10000;
  int duality_samples = 1000;
  /// Leave wall-clock times out of the report so repeated runs compare byte
  /// for byte.
  bool deterministic = true;
  /// Full passes over criteria 1-11; the last criterion compares their
  /// reports and needs at least two.
  int repeats = 2;
  std::function<void(const std::string&)> log;
};

struct SuiteResult {
  std::vector<CriterionResult> criteria;  // 12 entries, first pass
  nlohmann::json report;                  // report of the first pass plus criterion 12
  bool pass() const;
};

SuiteResult run_suite(const SuiteOptions& opts = {});

/// "[PASS] 3  constant C ...: r1=... r2=..."
std::string format_line(const CriterionResult& c);

}  // namespace fincap::acceptance
