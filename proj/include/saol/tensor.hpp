#ifndef SAOL_TENSOR_HPP
#define SAOL_TENSOR_HPP

#include <Eigen/Dense>
#include <vector>

namespace saol {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Dense real tensor with up to four modes. Entries are stored flat with the
// LAST mode index varying fastest, so that
//   vec(S x_1 A x_2 B ... x_T Z) = (A (x) B (x) ... (x) Z) vec(S).
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::vector<Eigen::Index> shape, Vector data);
  static Tensor zeros(std::vector<Eigen::Index> shape);

  const std::vector<Eigen::Index>& shape() const { return shape_; }
  Eigen::Index order() const { return static_cast<Eigen::Index>(shape_.size()); }
  Eigen::Index size() const { return data_.size(); }
  const Vector& data() const { return data_; }
  Vector& data() { return data_; }

  // Multi-index access, indices zero-based.
  double operator()(const std::vector<Eigen::Index>& idx) const;
  double& operator()(const std::vector<Eigen::Index>& idx);

 private:
  std::vector<Eigen::Index> shape_;
  Vector data_;
};

// k-mode product: contracts mode k (zero-based) of t with the columns of m.
// Result shape replaces t.shape()[k] by m.rows().
Tensor mode_product(const Tensor& t, const Matrix& m, Eigen::Index k);

// Canonical vectorization (last mode fastest) and its inverse.
Vector vec(const Tensor& t);
Tensor unvec(const Vector& v, std::vector<Eigen::Index> shape);

// Kronecker composition of the factor list, in written order:
// factors[0] (x) factors[1] (x) ... (x) factors[T-1].
Matrix kron_compose(const std::vector<Matrix>& factors);

// Mode-k unfolding: rows indexed by mode k, columns by the remaining modes in
// original order with the canonical last-fastest layout. Satisfies
// mode_product(t, M, k) == mode_fold(M * mode_unfold(t, k), new_shape, k).
Matrix mode_unfold(const Tensor& t, Eigen::Index k);
Tensor mode_fold(const Matrix& m, std::vector<Eigen::Index> shape, Eigen::Index k);

}  // namespace saol

#endif
