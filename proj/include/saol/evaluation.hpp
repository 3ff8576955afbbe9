#ifndef SAOL_EVALUATION_HPP
#define SAOL_EVALUATION_HPP

#include "saol/oblique.hpp"

namespace saol {

// Pairwise filter deviation c_ij = 1 - |w~_i . w_j| between the composed
// rows of the learned and ground-truth operators.
Matrix confusion_matrix(const AnalysisOperator& learned, const AnalysisOperator& gt);

struct Assignment {
  std::vector<Eigen::Index> permutation;  // permutation[i] = column matched to row i
  double cost = 0.0;
};

// Minimum-cost perfect assignment of a square nonnegative matrix via
// shortest augmenting paths; ties resolved toward the lexicographically
// smallest permutation.
Assignment hungarian_min_assignment(const Matrix& cost);

// H(C): assignment cost of the confusion matrix. Zero iff the learned rows
// equal the ground-truth rows up to sign and permutation.
double recovery_error(const AnalysisOperator& learned, const AnalysisOperator& gt);

struct BoundInputs {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> factor_dims;  // (m_i, p_i)
  double lipschitz = 1.0;  // lambda
  double samples = 1.0;    // N
  double delta = 0.05;     // failure probability
  bool separable = true;
};

struct BoundResult {
  double c_constant = 0.0;  // constraint-set constant
  double eta = 0.0;         // deviation bound
};

// Sample-complexity bound sqrt(2 pi) lambda C / sqrt(N)
//   + 3 sqrt(2 lambda^2 m ln(2/delta) / N),
// with C = m sqrt(p) for the full oblique manifold and C = sum_i m_i sqrt(p_i)
// for the product of factor manifolds.
BoundResult complexity_bound(const BoundInputs& b);

// Tight per-coordinate slope bound of the sparsity measure: max over alpha of
// |d/d alpha log(1 + nu alpha^2)| = sqrt(nu). A usable lambda input for the
// bound above.
double sparsity_slope_bound(double nu);

}  // namespace saol

#endif
