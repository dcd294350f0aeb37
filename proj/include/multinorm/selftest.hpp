#pragma once

#include "multinorm/rng.hpp"

#include <string>
#include <vector>

namespace multinorm {

struct SelfTestResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Quick closed-form and symmetry checks across all modules (a few seconds).
std::vector<SelfTestResult> run_selftest(const RngStream& rng);

}  // namespace multinorm
