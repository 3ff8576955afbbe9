#ifndef SAOL_IO_HPP
#define SAOL_IO_HPP

#include <optional>
#include <string>

#include "saol/objective.hpp"

namespace saol {

struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OperatorMetadata {
  double nu = 500.0;
  double kappa = 6500.0;
  double mu = 1e-4;
  std::uint64_t seed = 0;
  Eigen::Index iterations = 0;
  std::string created;  // ISO-8601, informational only
};

// JSON operator file, format tag "saol-operator-v1". Factor rows are
// re-normalized on load when within 1e-6 of unit norm; larger deviations are
// rejected.
void save_operator(const AnalysisOperator& op, const OperatorMetadata& meta,
                   const std::string& path);

struct LoadedOperator {
  AnalysisOperator op;
  OperatorMetadata meta;
  bool renormalized = false;  // some row needed a norm correction > 1e-8
};

LoadedOperator load_operator(const std::string& path);

// Binary dataset: magic "SAOLSIG1", u32 LE mode count, mode sizes, u64 LE
// sample count, then the samples as consecutive little-endian doubles.
void save_dataset(const SignalSet& signals, const std::string& path);
SignalSet load_dataset(const std::string& path);

}  // namespace saol

#endif
