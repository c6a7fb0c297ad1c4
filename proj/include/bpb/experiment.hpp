#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace bpb {

/// Raised for invalid configuration (unknown keys, bad values, cost-guard
/// violations); maps to the usage exit code.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct ExperimentConfig {
  std::string suite = "properties";
  int depth1 = 4, depth2 = 4;
  int dim1 = 1, dim2 = 1;
  std::uint64_t seed = 1;
  std::string weights = "random:0.5,2";
  std::string kernel = "product_hilbert";
  int r = 2;
  double delta = 1.0;
  int trials = 20;
  std::string out_dir = ".";
};

/// Applies one key=value setting; throws ConfigError on unknown keys or
/// malformed values. Valid keys: suite, depth, dims, seed, weights, kernel,
/// r, delta, trials, out.
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Parses a key=value config file ('#' starts a comment; blank lines
/// ignored).
ExperimentConfig parse_config(const std::string& path);

/// Renders the config as a parseable key=value document (round-trips
/// through parse_config).
std::string emit_config(const ExperimentConfig& cfg);

/// Rejects unknown suites/kernels, out-of-range depths (cost guard at 8 per
/// axis, 4 for the expansion suite), and weight-regime syntax errors.
void validate(const ExperimentConfig& cfg);

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumeric = 3;

/// Runs one suite, writing summary.json and per-suite CSV tables into the
/// output directory. Returns 0 iff all hard invariants pass.
int run_suite(const ExperimentConfig& cfg);

}  // namespace bpb
