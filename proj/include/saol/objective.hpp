#ifndef SAOL_OBJECTIVE_HPP
#define SAOL_OBJECTIVE_HPP

#include <stdexcept>

#include "saol/oblique.hpp"

namespace saol {

// Thrown when the composed operator loses full column rank (log det penalty
// undefined).
struct RankDeficiencyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ObjectiveParams {
  double nu = 500.0;    // slope of the sparsity measure
  double kappa = 6500.0;  // full-rank penalty weight
  double mu = 1e-4;     // incoherence penalty weight
};

// N vectorized samples, one per column, plus the tensor shape of each sample.
struct SignalSet {
  std::vector<Eigen::Index> mode_sizes;
  Matrix samples;  // p x N

  Eigen::Index sample_length() const { return samples.rows(); }
  Eigen::Index count() const { return samples.cols(); }
};

// Smoothed l0 surrogate: sum_k log(1 + nu * alpha_k^2).
double sparsity_value(const Vector& alpha, double nu);
Vector sparsity_grad(const Vector& alpha, double nu);

// Full-rank penalty h(K) = -(1/(p ln p)) ln det((1/m) K^T K), m x p, m >= p.
double rank_penalty(const Matrix& k);
Matrix rank_penalty_grad(const Matrix& k);

// Incoherence penalty r(K) = -sum_{k<l} log(1 - (w_k . w_l)^2), with the
// squared correlation clamped to 1 - 1e-10 before the log.
// clamped_pairs, when given, receives the number of clamped row pairs.
double incoherence_penalty(const Matrix& k, int* clamped_pairs = nullptr);
Matrix incoherence_penalty_grad(const Matrix& k);

// Batch-mean cost of Eq-style objective:
//   (1/B) sum_j g(iota(op) s_j) + kappa h(iota(op)) + mu r(iota(op)).
// Batch columns are samples; the data term uses mode products, the penalties
// the composed matrix.
double sample_cost(const AnalysisOperator& op, const Eigen::Ref<const Matrix>& batch,
                   const ObjectiveParams& params);

// Chain rule through the Kronecker composition: given the gradient g_k of a
// scalar function with respect to iota(factors), returns its gradient with
// respect to factor i.
Matrix kron_factor_contract(const Matrix& g_k, const std::vector<Matrix>& factors, size_t i);

// Euclidean gradient of sample_cost with respect to each factor. The data
// term never materializes the composed operator.
std::vector<Matrix> euclidean_gradient(const AnalysisOperator& op,
                                       const Eigen::Ref<const Matrix>& batch,
                                       const ObjectiveParams& params);

}  // namespace saol

#endif
