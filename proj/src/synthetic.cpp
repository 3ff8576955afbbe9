#include "saol/synthetic.hpp"

#include <algorithm>
#include <numeric>

namespace saol {

SignalSet generate_cosparse(const AnalysisOperator& op_gt, const CosparseSpec& spec) {
  const Eigen::Index m = op_gt.rows();
  const Eigen::Index p = op_gt.cols();
  if (spec.cosparsity < 1 || spec.cosparsity >= p)
    throw std::invalid_argument("generate_cosparse: cosparsity must lie in [1, p)");
  if (spec.cosparsity > m)
    throw std::invalid_argument("generate_cosparse: cosparsity exceeds filter count");
  if (spec.count < 1) throw std::invalid_argument("generate_cosparse: count must be >= 1");
  if (spec.noise_sigma < 0) throw std::invalid_argument("generate_cosparse: negative sigma");

  const Matrix composed = op_gt.compose();
  Rng rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Eigen::Index> rows(m);
  std::iota(rows.begin(), rows.end(), 0);

  SignalSet out;
  out.mode_sizes = op_gt.col_mode_sizes();
  out.samples.resize(p, spec.count);

  for (Eigen::Index j = 0; j < spec.count; ++j) {
    Vector s;
    bool ok = false;
    for (int attempt = 0; attempt < 100 && !ok; ++attempt) {
      // uniform row subset of size cosparsity (partial Fisher-Yates)
      for (Eigen::Index k = 0; k < spec.cosparsity; ++k) {
        std::uniform_int_distribution<Eigen::Index> dist(k, m - 1);
        std::swap(rows[k], rows[dist(rng)]);
      }
      Matrix sub(spec.cosparsity, p);
      for (Eigen::Index k = 0; k < spec.cosparsity; ++k) sub.row(k) = composed.row(rows[k]);

      Eigen::JacobiSVD<Matrix> svd(sub, Eigen::ComputeFullV);
      const auto& sv = svd.singularValues();
      double tol = 1e-10 * sv[0];
      Eigen::Index rank = 0;
      for (Eigen::Index k = 0; k < sv.size(); ++k)
        if (sv[k] > tol) ++rank;
      if (rank < spec.cosparsity) continue;  // rank-deficient subset, resample

      Matrix q = svd.matrixV().rightCols(p - spec.cosparsity);
      Vector z(p - spec.cosparsity);
      for (Eigen::Index k = 0; k < z.size(); ++k) z[k] = gauss(rng);
      s = q * z;
      double n = s.norm();
      if (n < 1e-12) continue;
      s /= n;
      ok = true;
    }
    if (!ok) throw std::runtime_error("generate_cosparse: persistent rank failure");
    if (spec.noise_sigma > 0)
      for (Eigen::Index k = 0; k < p; ++k) s[k] += spec.noise_sigma * gauss(rng);
    out.samples.col(j) = s;
  }
  return out;
}

}  // namespace saol
