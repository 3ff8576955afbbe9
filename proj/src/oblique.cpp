#include "saol/oblique.hpp"

#include <cmath>
#include <stdexcept>

namespace saol {

Matrix random_oblique(Eigen::Index m, Eigen::Index p, Rng& rng) {
  if (m < 1 || p < 1) throw std::invalid_argument("random_oblique: dimensions must be positive");
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix out(m, p);
  for (Eigen::Index i = 0; i < m; ++i) {
    int tries = 0;
    for (;;) {
      for (Eigen::Index j = 0; j < p; ++j) out(i, j) = gauss(rng);
      double n = out.row(i).norm();
      if (n > 1e-12) {
        out.row(i) /= n;
        break;
      }
      if (++tries >= 100) throw std::runtime_error("random_oblique: degenerate zero row");
    }
  }
  return out;
}

Matrix project_to_tangent(const Matrix& omega, const Matrix& g) {
  if (omega.rows() != g.rows() || omega.cols() != g.cols())
    throw std::invalid_argument("project_to_tangent: dimension mismatch");
  Matrix out = g;
  for (Eigen::Index i = 0; i < omega.rows(); ++i)
    out.row(i) -= omega.row(i).dot(g.row(i)) * omega.row(i);
  return out;
}

Matrix geodesic_step(const Matrix& omega, const Matrix& h, double t) {
  Matrix out = omega;
  for (Eigen::Index i = 0; i < omega.rows(); ++i) {
    double hn = h.row(i).norm();
    if (hn < 1e-14) continue;
    out.row(i) = omega.row(i) * std::cos(t * hn) + (h.row(i) / hn) * std::sin(t * hn);
  }
  return out;
}

bool is_oblique(const Matrix& omega, double tol) {
  for (Eigen::Index i = 0; i < omega.rows(); ++i)
    if (std::abs(omega.row(i).norm() - 1.0) > tol) return false;
  return true;
}

AnalysisOperator::AnalysisOperator(std::vector<Matrix> factors) : factors_(std::move(factors)) {
  if (factors_.empty()) throw std::invalid_argument("AnalysisOperator: empty factor list");
}

AnalysisOperator AnalysisOperator::random(
    const std::vector<std::pair<Eigen::Index, Eigen::Index>>& dims, Rng& rng) {
  std::vector<Matrix> fs;
  fs.reserve(dims.size());
  for (auto [m, p] : dims) fs.push_back(random_oblique(m, p, rng));
  return AnalysisOperator(std::move(fs));
}

Eigen::Index AnalysisOperator::rows() const {
  Eigen::Index m = 1;
  for (const auto& f : factors_) m *= f.rows();
  return m;
}

Eigen::Index AnalysisOperator::cols() const {
  Eigen::Index p = 1;
  for (const auto& f : factors_) p *= f.cols();
  return p;
}

std::vector<Eigen::Index> AnalysisOperator::row_mode_sizes() const {
  std::vector<Eigen::Index> out;
  for (const auto& f : factors_) out.push_back(f.rows());
  return out;
}

std::vector<Eigen::Index> AnalysisOperator::col_mode_sizes() const {
  std::vector<Eigen::Index> out;
  for (const auto& f : factors_) out.push_back(f.cols());
  return out;
}

Matrix AnalysisOperator::compose() const { return kron_compose(factors_); }

Vector AnalysisOperator::apply(const Vector& s) const {
  if (factors_.size() == 1) return factors_[0] * s;
  Tensor t = unvec(s, col_mode_sizes());
  for (size_t k = 0; k < factors_.size(); ++k)
    t = mode_product(t, factors_[k], static_cast<Eigen::Index>(k));
  return vec(t);
}

double TangentDirection::squared_norm() const {
  double s = 0.0;
  for (const auto& part : parts) s += part.squaredNorm();
  return s;
}

AnalysisOperator geodesic_step(const AnalysisOperator& op, const TangentDirection& h, double t) {
  if (h.parts.size() != op.num_factors())
    throw std::invalid_argument("geodesic_step: factor count mismatch");
  std::vector<Matrix> fs;
  fs.reserve(op.num_factors());
  for (size_t k = 0; k < op.num_factors(); ++k)
    fs.push_back(geodesic_step(op.factors()[k], h.parts[k], t));
  return AnalysisOperator(std::move(fs));
}

}  // namespace saol
