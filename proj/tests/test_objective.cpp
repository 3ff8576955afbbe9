#include <doctest.h>

#include "saol/objective.hpp"
#include "test_helpers.hpp"

using namespace saol;
using namespace saol::testing;

namespace {

// Central finite differences with respect to every factor entry.
template <typename F>
std::vector<Matrix> fd_factor_grads(const AnalysisOperator& op, F cost, double step = 1e-6) {
  std::vector<Matrix> out;
  for (size_t i = 0; i < op.num_factors(); ++i) {
    const Matrix& f = op.factors()[i];
    Matrix g(f.rows(), f.cols());
    for (Eigen::Index r = 0; r < f.rows(); ++r)
      for (Eigen::Index c = 0; c < f.cols(); ++c) {
        AnalysisOperator plus = op, minus = op;
        plus.factors()[i](r, c) += step;
        minus.factors()[i](r, c) -= step;
        g(r, c) = (cost(plus) - cost(minus)) / (2 * step);
      }
    out.push_back(std::move(g));
  }
  return out;
}

double rel_error(const Matrix& a, const Matrix& b) {
  double scale = std::max(a.norm(), b.norm());
  if (scale == 0.0) return 0.0;
  return (a - b).norm() / scale;
}

}  // namespace

TEST_CASE("sparsity value closed forms") {
  CHECK(sparsity_value(Vector::Zero(4), 1.0) == 0.0);
  Vector a(2);
  a << 1, 0;
  CHECK(sparsity_value(a, 1.0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(sparsity_value(a, 0.0), std::invalid_argument);
}

TEST_CASE("sparsity value is sign and permutation invariant") {
  Rng rng(1);
  Vector a = random_matrix(6, 1, rng).col(0);
  Vector b = a;
  std::swap(b[0], b[5]);
  b[2] = -b[2];
  CHECK(sparsity_value(a, 500.0) == doctest::Approx(sparsity_value(b, 500.0)).epsilon(1e-14));
}

TEST_CASE("sparsity gradient closed forms and finite differences") {
  CHECK(sparsity_grad(Vector::Zero(3), 5.0).norm() == 0.0);

  // the slope peaks at alpha = 1/sqrt(nu) with value sqrt(nu)
  double nu = 500.0;
  Vector peak(1);
  peak << 1.0 / std::sqrt(nu);
  CHECK(sparsity_grad(peak, nu)[0] == doctest::Approx(std::sqrt(nu)).epsilon(1e-12));

  Rng rng(2);
  Vector a = random_matrix(5, 1, rng).col(0);
  Vector g = sparsity_grad(a, nu);
  const double eps = 1e-7;
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    Vector p = a, m = a;
    p[k] += eps;
    m[k] -= eps;
    double fd = (sparsity_value(p, nu) - sparsity_value(m, nu)) / (2 * eps);
    CHECK(std::abs(fd - g[k]) / std::max(1.0, std::abs(g[k])) < 1e-6);
  }
}

TEST_CASE("rank penalty closed forms") {
  // orthogonal columns of norm sqrt(m): K^T K = m I, penalty vanishes
  Matrix k = Matrix::Zero(4, 2);
  k(0, 0) = k(1, 0) = k(2, 1) = k(3, 1) = std::sqrt(2.0);
  CHECK(std::abs(rank_penalty(k)) < 1e-14);

  CHECK(rank_penalty(Matrix::Identity(2, 2)) == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(rank_penalty(Matrix::Zero(3, 2)), RankDeficiencyError);
  Matrix collinear(2, 2);
  collinear << 1, 1, 1, 1;
  CHECK_THROWS_AS(rank_penalty(collinear), RankDeficiencyError);
}

TEST_CASE("rank penalty grows as columns become collinear") {
  double prev = -1e300;
  for (double theta : {1.5, 1.0, 0.5, 0.25, 0.1}) {
    Matrix k(3, 2);
    k << 1, std::cos(theta), 0, std::sin(theta), 0, 0;
    double h = rank_penalty(k);
    CHECK(h > prev);
    prev = h;
  }
}

TEST_CASE("rank penalty gradient") {
  Rng rng(3);
  Matrix k = random_matrix(6, 4, rng);
  Matrix g = rank_penalty_grad(k);
  const double eps = 1e-6;
  Matrix fd(6, 4);
  for (Eigen::Index r = 0; r < 6; ++r)
    for (Eigen::Index c = 0; c < 4; ++c) {
      Matrix p = k, m = k;
      p(r, c) += eps;
      m(r, c) -= eps;
      fd(r, c) = (rank_penalty(p) - rank_penalty(m)) / (2 * eps);
    }
  CHECK(rel_error(fd, g) < 1e-6);

  // orthonormal columns: gradient reduces to a rescaling of K
  Matrix q = Eigen::HouseholderQR<Matrix>(random_matrix(5, 3, rng)).householderQ() *
             Matrix::Identity(5, 3);
  Matrix expected = -(2.0 / (3.0 * std::log(3.0))) * q;
  CHECK(rel_error(rank_penalty_grad(q), expected) < 1e-10);
}

TEST_CASE("gradient flow balances the singular values") {
  // following the negative gradient shrinks the penalty monotonically
  Rng rng(4);
  Matrix k(3, 2);
  k << 1, 0.9, 0, std::sqrt(1 - 0.81), 0, 0;
  double prev = rank_penalty(k);
  for (int it = 0; it < 20; ++it) {
    k -= 0.05 * rank_penalty_grad(k);
    double cur = rank_penalty(k);
    CHECK(cur < prev + 1e-12);
    prev = cur;
  }
}

TEST_CASE("incoherence penalty closed forms") {
  CHECK(incoherence_penalty(Matrix::Identity(3, 3)) == 0.0);
  CHECK(incoherence_penalty_grad(Matrix::Identity(3, 3)).norm() == 0.0);

  Matrix k(2, 2);
  k << 1, 0, 0.5, std::sqrt(3.0) / 2;  // rows at 60 degrees
  CHECK(incoherence_penalty(k) == doctest::Approx(-std::log(0.75)).epsilon(1e-12));

  // duplicate rows are clamped, not fatal
  Matrix dup(2, 2);
  dup << 1, 0, 1, 0;
  int clamped = 0;
  double v = incoherence_penalty(dup, &clamped);
  CHECK(clamped == 1);
  CHECK(std::isfinite(v));
}

TEST_CASE("incoherence gradient matches finite differences") {
  Rng rng(5);
  Matrix k = random_oblique(5, 4, rng);
  Matrix g = incoherence_penalty_grad(k);
  const double eps = 1e-6;
  Matrix fd(5, 4);
  for (Eigen::Index r = 0; r < 5; ++r)
    for (Eigen::Index c = 0; c < 4; ++c) {
      Matrix p = k, m = k;
      p(r, c) += eps;
      m(r, c) -= eps;
      fd(r, c) = (incoherence_penalty(p) - incoherence_penalty(m)) / (2 * eps);
    }
  CHECK(rel_error(fd, g) < 1e-6);
}

TEST_CASE("sample cost basics") {
  Rng rng(6);
  AnalysisOperator op = AnalysisOperator::random({{4, 3}}, rng);
  ObjectiveParams params{1.0, 0.0, 0.0};
  Matrix zero_batch = Matrix::Zero(3, 1);
  CHECK(sample_cost(op, zero_batch, params) == 0.0);
  CHECK_THROWS_AS(sample_cost(op, Matrix::Zero(5, 1), params), std::invalid_argument);
}

TEST_CASE("separable cost equals the composed single-factor cost") {
  Rng rng(7);
  AnalysisOperator sep = AnalysisOperator::random({{3, 3}, {2, 2}}, rng);
  AnalysisOperator dense(std::vector<Matrix>{sep.compose()});
  Matrix batch = random_matrix(6, 4, rng);
  ObjectiveParams params{500.0, 1.0, 0.01};
  CHECK(std::abs(sample_cost(sep, batch, params) - sample_cost(dense, batch, params)) < 1e-10);
}

TEST_CASE("kron_factor_contract passthrough cases") {
  Rng rng(8);
  Matrix g = random_matrix(4, 3, rng);
  CHECK((kron_factor_contract(g, {random_oblique(4, 3, rng)}, 0) - g).norm() == 0.0);

  // all scalar factors reduce to scalar products
  std::vector<Matrix> scalars{Matrix::Constant(1, 1, 2.0), Matrix::Constant(1, 1, 3.0)};
  Matrix gs = Matrix::Constant(1, 1, 5.0);
  CHECK(kron_factor_contract(gs, scalars, 0)(0, 0) == doctest::Approx(15.0));
  CHECK(kron_factor_contract(gs, scalars, 1)(0, 0) == doctest::Approx(10.0));
}

TEST_CASE("kron_factor_contract agrees with finite differences through iota") {
  Rng rng(9);
  AnalysisOperator op = AnalysisOperator::random({{3, 2}, {2, 2}}, rng);
  Matrix composed = op.compose();
  Matrix g_k = rank_penalty_grad(composed);
  auto cost = [](const AnalysisOperator& o) { return rank_penalty(o.compose()); };
  auto fd = fd_factor_grads(op, cost);
  for (size_t i = 0; i < op.num_factors(); ++i)
    CHECK(rel_error(kron_factor_contract(g_k, op.factors(), i), fd[i]) < 1e-5);
}

TEST_CASE("euclidean gradient trivial cases") {
  Rng rng(10);
  AnalysisOperator op = AnalysisOperator::random({{3, 2}, {2, 2}}, rng);
  ObjectiveParams params{500.0, 0.0, 0.0};
  auto grads = euclidean_gradient(op, Matrix::Zero(4, 2), params);
  for (const auto& g : grads) CHECK(g.norm() == 0.0);
}

TEST_CASE("single-factor gradient equals the direct formula") {
  Rng rng(11);
  AnalysisOperator op = AnalysisOperator::random({{5, 4}}, rng);
  Matrix batch = random_matrix(4, 3, rng);
  ObjectiveParams params{500.0, 0.0, 0.0};
  auto grads = euclidean_gradient(op, batch, params);
  Matrix direct = Matrix::Zero(5, 4);
  for (Eigen::Index j = 0; j < batch.cols(); ++j)
    direct += sparsity_grad(op.factors()[0] * batch.col(j), params.nu) *
              batch.col(j).transpose();
  direct /= static_cast<double>(batch.cols());
  CHECK(rel_error(grads[0], direct) < 1e-12);
}

TEST_CASE("full objective gradient matches central differences") {
  Rng rng(12);
  AnalysisOperator op = AnalysisOperator::random({{3, 3}, {2, 2}}, rng);
  Matrix batch = random_matrix(6, 5, rng);
  ObjectiveParams params{500.0, 1.0, 0.01};
  auto grads = euclidean_gradient(op, batch, params);
  auto fd = fd_factor_grads(op, [&](const AnalysisOperator& o) {
    return sample_cost(o, batch, params);
  });
  for (size_t i = 0; i < op.num_factors(); ++i) CHECK(rel_error(grads[i], fd[i]) < 1e-5);
}
