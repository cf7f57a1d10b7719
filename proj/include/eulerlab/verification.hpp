#pragma once

#include <functional>
#include <string>
#include <vector>

namespace eulerlab::verification {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::vector<std::string> details;
  double seconds = 0.0;
};

struct Report {
  std::vector<CriterionResult> results;
  double seconds = 0.0;
  bool all_pass() const;
};

inline constexpr int kCriteria = 12;
inline constexpr double kSuiteBudgetSeconds = 900.0;

std::string title(int id);

// Runs one of criteria 1..11; 12 is a property of a whole run.
CriterionResult run_criterion(int id);

// Runs criteria 1..11 in order, then derives 12 from the run. The callback
// sees each result as it completes.
Report run_all(const std::function<void(const CriterionResult&)>& on_result = {});

std::string format_line(const CriterionResult& r);

}  // namespace eulerlab::verification
