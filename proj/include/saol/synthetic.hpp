#ifndef SAOL_SYNTHETIC_HPP
#define SAOL_SYNTHETIC_HPP

#include "saol/objective.hpp"

namespace saol {

struct CosparseSpec {
  Eigen::Index cosparsity = 15;  // number of zero filter responses per sample
  double noise_sigma = 0.05;
  Eigen::Index count = 1;
  std::uint64_t seed = 0;
};

// Draws signals from the null space of random row subsets of the ground-truth
// operator: for each sample a subset of `cosparsity` rows is chosen, an
// orthonormal null-space basis Q of that submatrix is computed, and the
// sample is Q z with z standard normal, normalized to unit length, then
// perturbed with Gaussian noise of the requested standard deviation.
SignalSet generate_cosparse(const AnalysisOperator& op_gt, const CosparseSpec& spec);

}  // namespace saol

#endif
