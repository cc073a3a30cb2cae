#pragma once

// Command implementations behind the `qcorr` executable.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qcorr/io.hpp"

namespace qcorr::cli {

enum ExitCode : int {
  kSuccess = 0,
  kParseError = 2,
  kInvalidState = 3,
  kDimensionMismatch = 4,
};

// Relative --out paths resolve against this directory when it is set.
inline constexpr const char* kOutputDirEnv = "QCORR_OUTPUT_DIR";

struct CliConfig {
  double tol = io::kFileTolerance;
  std::uint64_t seed = 1;
  std::size_t samples = 1000;
  int grid = 64;
  std::optional<std::filesystem::path> out;

  void validate() const;
};

struct LhvSummary {
  bool built = false;
  std::string source;  // "cc", "separable" or empty
  std::optional<bool> tight_a;
  std::optional<bool> tight_b;
  std::optional<double> max_deviation;
  std::size_t samples = 0;
  std::string note;
};

struct ClassificationReport {
  Dims dims;
  Validity validity;
  PptResult ppt;
  std::optional<double> discord_ba;
  std::optional<double> discord_ab;
  bool classical_quantum_a = false;
  bool classical_quantum_b = false;
  bool zero_discord = false;
  std::optional<double> chsh_max;
  LhvSummary lhv;
  std::optional<double> negativity_sic;
  std::optional<double> min_weight_sic;

  io::json to_json() const;
};

// Full pipeline on a validated state. A separable decomposition, when given,
// is used for the LHV model if the state has no zero-discord certificate.
ClassificationReport classify(const BipartiteState<double>& state, const CliConfig& cfg,
                              const std::optional<SeparableDecomposition<double>>& decomposition = {});

// Entry point; args excludes the program name. The machine-readable document
// goes to `out` (or --out), the human-readable summary to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qcorr::cli
