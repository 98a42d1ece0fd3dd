#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qwalk {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;  // worst observed value vs the bound
};

/// Runs the cross-module invariant suites. tolerance_scale multiplies every
/// pass bound (1.0 is the contract; smaller values are a negative control
/// that must fail). Deterministic for a fixed seed.
std::vector<CheckResult> run_validation(double tolerance_scale, std::uint64_t seed);

}  // namespace qwalk
