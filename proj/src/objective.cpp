#include "saol/objective.hpp"

#include <cmath>

namespace saol {

double sparsity_value(const Vector& alpha, double nu) {
  if (nu <= 0) throw std::invalid_argument("sparsity_value: nu must be positive");
  double acc = 0.0;
  for (Eigen::Index k = 0; k < alpha.size(); ++k) acc += std::log1p(nu * alpha[k] * alpha[k]);
  return acc;
}

Vector sparsity_grad(const Vector& alpha, double nu) {
  if (nu <= 0) throw std::invalid_argument("sparsity_grad: nu must be positive");
  Vector out(alpha.size());
  for (Eigen::Index k = 0; k < alpha.size(); ++k)
    out[k] = 2.0 * nu * alpha[k] / (1.0 + nu * alpha[k] * alpha[k]);
  return out;
}

namespace {

// Eigendecomposition of K^T K with the rank precondition of the log det term.
Eigen::SelfAdjointEigenSolver<Matrix> gram_eigs(const Matrix& k) {
  const Eigen::Index m = k.rows(), p = k.cols();
  if (m < p) throw std::invalid_argument("rank_penalty: requires rows >= cols");
  if (p < 2) throw std::invalid_argument("rank_penalty: requires at least two columns");
  Eigen::SelfAdjointEigenSolver<Matrix> es(k.transpose() * k);
  const auto& ev = es.eigenvalues();
  if (ev[0] <= 1e-12 * ev[p - 1] || ev[p - 1] <= 0.0)
    throw RankDeficiencyError("operator is numerically rank deficient");
  return es;
}

}  // namespace

double rank_penalty(const Matrix& k) {
  auto es = gram_eigs(k);
  const double m = static_cast<double>(k.rows());
  const double p = static_cast<double>(k.cols());
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < k.cols(); ++i) logdet += std::log(es.eigenvalues()[i] / m);
  return -logdet / (p * std::log(p));
}

Matrix rank_penalty_grad(const Matrix& k) {
  auto es = gram_eigs(k);
  const double p = static_cast<double>(k.cols());
  Matrix gram_inv = es.eigenvectors() *
                    es.eigenvalues().cwiseInverse().asDiagonal() *
                    es.eigenvectors().transpose();
  return -(2.0 / (p * std::log(p))) * k * gram_inv;
}

namespace {
constexpr double kRhoSqCap = 1.0 - 1e-10;
}

double incoherence_penalty(const Matrix& k, int* clamped_pairs) {
  int clamped = 0;
  double acc = 0.0;
  for (Eigen::Index a = 0; a < k.rows(); ++a)
    for (Eigen::Index b = a + 1; b < k.rows(); ++b) {
      double rho2 = std::pow(k.row(a).dot(k.row(b)), 2);
      if (rho2 > kRhoSqCap) {
        rho2 = kRhoSqCap;
        ++clamped;
      }
      acc -= std::log(1.0 - rho2);
    }
  if (clamped_pairs) *clamped_pairs = clamped;
  return acc;
}

Matrix incoherence_penalty_grad(const Matrix& k) {
  Matrix out = Matrix::Zero(k.rows(), k.cols());
  for (Eigen::Index a = 0; a < k.rows(); ++a)
    for (Eigen::Index b = a + 1; b < k.rows(); ++b) {
      double rho = k.row(a).dot(k.row(b));
      double rho2 = rho * rho;
      if (rho2 > kRhoSqCap) rho2 = kRhoSqCap;
      double w = 2.0 * rho / (1.0 - rho2);
      out.row(a) += w * k.row(b);
      out.row(b) += w * k.row(a);
    }
  return out;
}

double sample_cost(const AnalysisOperator& op, const Eigen::Ref<const Matrix>& batch,
                   const ObjectiveParams& params) {
  if (batch.rows() != op.cols())
    throw std::invalid_argument("sample_cost: sample length does not match operator");
  if (batch.cols() < 1) throw std::invalid_argument("sample_cost: empty batch");
  double data = 0.0;
  for (Eigen::Index j = 0; j < batch.cols(); ++j)
    data += sparsity_value(op.apply(batch.col(j)), params.nu);
  data /= static_cast<double>(batch.cols());
  if (params.kappa != 0.0 || params.mu != 0.0) {
    Matrix composed = op.compose();
    if (params.kappa != 0.0) data += params.kappa * rank_penalty(composed);
    if (params.mu != 0.0) data += params.mu * incoherence_penalty(composed);
  }
  return data;
}

Matrix kron_factor_contract(const Matrix& g_k, const std::vector<Matrix>& factors, size_t i) {
  const size_t T = factors.size();
  if (i >= T) throw std::invalid_argument("kron_factor_contract: factor index out of range");
  if (T == 1) {
    if (g_k.rows() != factors[0].rows() || g_k.cols() != factors[0].cols())
      throw std::invalid_argument("kron_factor_contract: dimension mismatch");
    return g_k;
  }
  Eigen::Index m = 1, p = 1;
  for (const auto& f : factors) {
    m *= f.rows();
    p *= f.cols();
  }
  if (g_k.rows() != m || g_k.cols() != p)
    throw std::invalid_argument("kron_factor_contract: dimension mismatch");

  Matrix out = Matrix::Zero(factors[i].rows(), factors[i].cols());
  std::vector<Eigen::Index> a(T), b(T);
  for (Eigen::Index r = 0; r < m; ++r) {
    // decode the mixed-radix row index, last factor fastest
    Eigen::Index rr = r;
    for (size_t j = T; j-- > 0;) {
      a[j] = rr % factors[j].rows();
      rr /= factors[j].rows();
    }
    for (Eigen::Index c = 0; c < p; ++c) {
      Eigen::Index cc = c;
      for (size_t j = T; j-- > 0;) {
        b[j] = cc % factors[j].cols();
        cc /= factors[j].cols();
      }
      double w = 1.0;
      for (size_t j = 0; j < T; ++j)
        if (j != i) w *= factors[j](a[j], b[j]);
      out(a[i], b[i]) += g_k(r, c) * w;
    }
  }
  return out;
}

std::vector<Matrix> euclidean_gradient(const AnalysisOperator& op,
                                       const Eigen::Ref<const Matrix>& batch,
                                       const ObjectiveParams& params) {
  if (batch.rows() != op.cols())
    throw std::invalid_argument("euclidean_gradient: sample length does not match operator");
  if (batch.cols() < 1) throw std::invalid_argument("euclidean_gradient: empty batch");
  const size_t T = op.num_factors();
  const auto& factors = op.factors();

  std::vector<Matrix> grads;
  grads.reserve(T);
  for (const auto& f : factors) grads.push_back(Matrix::Zero(f.rows(), f.cols()));

  const double inv_b = 1.0 / static_cast<double>(batch.cols());
  if (T == 1) {
    const Matrix& k = factors[0];
    for (Eigen::Index j = 0; j < batch.cols(); ++j) {
      Vector alpha = k * batch.col(j);
      grads[0] += sparsity_grad(alpha, params.nu) * batch.col(j).transpose();
    }
    grads[0] *= inv_b;
  } else {
    const auto col_modes = op.col_mode_sizes();
    for (Eigen::Index j = 0; j < batch.cols(); ++j) {
      Tensor s = unvec(batch.col(j), col_modes);
      for (size_t i = 0; i < T; ++i) {
        // leave-one-out product: all modes except i contracted with their factor
        Tensor partial = s;
        for (size_t l = 0; l < T; ++l)
          if (l != i) partial = mode_product(partial, factors[l], static_cast<Eigen::Index>(l));
        Tensor analyzed = mode_product(partial, factors[i], static_cast<Eigen::Index>(i));
        Tensor slopes(analyzed.shape(), sparsity_grad(analyzed.data(), params.nu));
        grads[i] += mode_unfold(slopes, static_cast<Eigen::Index>(i)) *
                    mode_unfold(partial, static_cast<Eigen::Index>(i)).transpose();
      }
    }
    for (auto& g : grads) g *= inv_b;
  }

  if (params.kappa != 0.0 || params.mu != 0.0) {
    Matrix composed = op.compose();
    Matrix g_pen = Matrix::Zero(composed.rows(), composed.cols());
    if (params.kappa != 0.0) g_pen += params.kappa * rank_penalty_grad(composed);
    if (params.mu != 0.0) g_pen += params.mu * incoherence_penalty_grad(composed);
    for (size_t i = 0; i < T; ++i) grads[i] += kron_factor_contract(g_pen, factors, i);
  }
  return grads;
}

}  // namespace saol
