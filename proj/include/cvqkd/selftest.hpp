#pragma once

// Self-verification property suite behind the `verify` CLI subcommand.

#include <cstdint>
#include <string>
#include <vector>

#include "cvqkd/oracle.hpp"

namespace cvqkd {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Runs every property check; deterministic for a fixed seed.
std::vector<CheckResult> run_selftests(std::uint64_t seed, std::int64_t mc_samples);

}  // namespace cvqkd
