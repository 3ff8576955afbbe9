#include <doctest.h>

#include <algorithm>

#include "saol/synthetic.hpp"
#include "test_helpers.hpp"

using namespace saol;
using namespace saol::testing;

TEST_CASE("identity operator with cosparsity one zeroes a coordinate") {
  AnalysisOperator op(std::vector<Matrix>{Matrix::Identity(4, 4)});
  CosparseSpec spec{1, 0.0, 50, 3};
  SignalSet set = generate_cosparse(op, spec);
  for (Eigen::Index j = 0; j < set.count(); ++j) {
    Vector s = set.samples.col(j);
    CHECK(std::abs(s.norm() - 1.0) < 1e-12);
    Eigen::Index zeros = 0;
    for (Eigen::Index k = 0; k < s.size(); ++k)
      if (std::abs(s[k]) < 1e-10) ++zeros;
    CHECK(zeros >= 1);
  }
}

TEST_CASE("composed separable operator yields the requested cosparsity") {
  Rng rng(5);
  AnalysisOperator gt = AnalysisOperator::random({{4, 3}, {4, 3}}, rng);  // 16 x 9
  CosparseSpec spec{4, 0.0, 1000, 21};
  SignalSet set = generate_cosparse(gt, spec);
  // evaluate the responses through the independent Kronecker path
  Matrix composed = gt.compose();
  for (Eigen::Index j = 0; j < set.count(); ++j) {
    Vector s = set.samples.col(j);
    CHECK(std::abs(s.norm() - 1.0) < 1e-12);
    Vector responses = composed * s;
    Eigen::Index small = 0;
    for (Eigen::Index k = 0; k < responses.size(); ++k)
      if (std::abs(responses[k]) < 1e-10) ++small;
    CHECK(small >= spec.cosparsity);
    // mode-product application path agrees
    CHECK((gt.apply(s) - responses).lpNorm<Eigen::Infinity>() < 1e-12);
  }
}

TEST_CASE("generation is deterministic under the seed") {
  Rng rng(6);
  AnalysisOperator gt = AnalysisOperator::random({{6, 4}}, rng);
  CosparseSpec spec{2, 0.05, 20, 99};
  SignalSet a = generate_cosparse(gt, spec);
  SignalSet b = generate_cosparse(gt, spec);
  CHECK((a.samples - b.samples).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("noise perturbs the normalized samples") {
  Rng rng(7);
  AnalysisOperator gt = AnalysisOperator::random({{6, 4}}, rng);
  SignalSet noisy = generate_cosparse(gt, {2, 0.05, 200, 1});
  double max_dev = 0.0;
  for (Eigen::Index j = 0; j < noisy.count(); ++j)
    max_dev = std::max(max_dev, std::abs(noisy.samples.col(j).norm() - 1.0));
  CHECK(max_dev > 1e-6);  // noise applied after normalization, no re-normalization
  CHECK(max_dev < 1.0);
}

TEST_CASE("invalid cosparsity is rejected") {
  Rng rng(8);
  AnalysisOperator gt = AnalysisOperator::random({{6, 4}}, rng);
  CHECK_THROWS_AS(generate_cosparse(gt, {4, 0.0, 1, 0}), std::invalid_argument);
  CHECK_THROWS_AS(generate_cosparse(gt, {0, 0.0, 1, 0}), std::invalid_argument);
}
