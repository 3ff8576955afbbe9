#include "saol/tensor.hpp"

#include <numeric>
#include <stdexcept>

namespace saol {

namespace {

Eigen::Index shape_product(const std::vector<Eigen::Index>& shape) {
  Eigen::Index n = 1;
  for (Eigen::Index s : shape) {
    if (s <= 0) throw std::invalid_argument("tensor mode sizes must be positive");
    n *= s;
  }
  return n;
}

}  // namespace

Tensor::Tensor(std::vector<Eigen::Index> shape, Vector data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (data_.size() != shape_product(shape_))
    throw std::invalid_argument("tensor data length does not match shape");
}

Tensor Tensor::zeros(std::vector<Eigen::Index> shape) {
  Eigen::Index n = shape_product(shape);
  return Tensor(std::move(shape), Vector::Zero(n));
}

double Tensor::operator()(const std::vector<Eigen::Index>& idx) const {
  return const_cast<Tensor&>(*this)(idx);
}

double& Tensor::operator()(const std::vector<Eigen::Index>& idx) {
  if (idx.size() != shape_.size()) throw std::invalid_argument("index arity mismatch");
  Eigen::Index lin = 0;
  for (size_t k = 0; k < shape_.size(); ++k) {
    if (idx[k] < 0 || idx[k] >= shape_[k]) throw std::out_of_range("tensor index out of range");
    lin = lin * shape_[k] + idx[k];
  }
  return data_[lin];
}

Vector vec(const Tensor& t) { return t.data(); }

Tensor unvec(const Vector& v, std::vector<Eigen::Index> shape) {
  return Tensor(std::move(shape), v);
}

Matrix mode_unfold(const Tensor& t, Eigen::Index k) {
  const auto& shape = t.shape();
  const Eigen::Index T = t.order();
  if (k < 0 || k >= T) throw std::invalid_argument("mode index out of range");
  // inner: product of modes after k (contiguous blocks), outer: modes before k
  Eigen::Index inner = 1, outer = 1;
  for (Eigen::Index j = k + 1; j < T; ++j) inner *= shape[j];
  for (Eigen::Index j = 0; j < k; ++j) outer *= shape[j];
  const Eigen::Index rows = shape[k];
  Matrix out(rows, outer * inner);
  const Vector& d = t.data();
  for (Eigen::Index o = 0; o < outer; ++o)
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index i = 0; i < inner; ++i)
        out(r, o * inner + i) = d[(o * rows + r) * inner + i];
  return out;
}

Tensor mode_fold(const Matrix& m, std::vector<Eigen::Index> shape, Eigen::Index k) {
  const Eigen::Index T = static_cast<Eigen::Index>(shape.size());
  if (k < 0 || k >= T) throw std::invalid_argument("mode index out of range");
  Eigen::Index inner = 1, outer = 1;
  for (Eigen::Index j = k + 1; j < T; ++j) inner *= shape[j];
  for (Eigen::Index j = 0; j < k; ++j) outer *= shape[j];
  const Eigen::Index rows = shape[k];
  if (m.rows() != rows || m.cols() != outer * inner)
    throw std::invalid_argument("fold dimensions inconsistent with shape");
  Tensor t = Tensor::zeros(std::move(shape));
  Vector& d = t.data();
  for (Eigen::Index o = 0; o < outer; ++o)
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index i = 0; i < inner; ++i)
        d[(o * rows + r) * inner + i] = m(r, o * inner + i);
  return t;
}

Tensor mode_product(const Tensor& t, const Matrix& m, Eigen::Index k) {
  if (k < 0 || k >= t.order()) throw std::invalid_argument("mode index out of range");
  if (m.cols() != t.shape()[k])
    throw std::invalid_argument("matrix columns do not match tensor mode size");
  std::vector<Eigen::Index> new_shape = t.shape();
  new_shape[k] = m.rows();
  return mode_fold(m * mode_unfold(t, k), std::move(new_shape), k);
}

Matrix kron_compose(const std::vector<Matrix>& factors) {
  if (factors.empty()) throw std::invalid_argument("kron_compose: empty factor list");
  Matrix acc = factors[0];
  for (size_t f = 1; f < factors.size(); ++f) {
    const Matrix& b = factors[f];
    Matrix next(acc.rows() * b.rows(), acc.cols() * b.cols());
    for (Eigen::Index i = 0; i < acc.rows(); ++i)
      for (Eigen::Index j = 0; j < acc.cols(); ++j)
        next.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = acc(i, j) * b;
    acc = std::move(next);
  }
  return acc;
}

}  // namespace saol
