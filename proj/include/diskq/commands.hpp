#pragma once

// Commands behind the diskq executable. Each command writes
// <command>.csv (plus companion tables) and <command>_manifest.txt into the
// configured output directory.

#include <string>
#include <vector>

#include "diskq/config.hpp"

namespace diskq {

inline constexpr const char* version = "0.1.0";

const std::vector<std::string>& command_names();

/// Runs cfg.command. Returns 0 on success and 3 when selftest finds a breach;
/// throws ConfigError for bad input and ValidationFailure when a command's
/// own numeric check fails.
int run(const RunConfig& cfg);

struct Check {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass() const { return value <= threshold; }
};

/// The invariant battery run by `selftest`; deterministic for a fixed seed.
std::vector<Check> selftest_checks(const RunConfig& cfg);

}  // namespace diskq
