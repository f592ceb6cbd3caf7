#include "cascade_gnn/nn/tensor.hpp"

#include <algorithm>

#include "cascade_gnn/common.hpp"

namespace cascade_gnn::nn {

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, double fill) {
  Tensor t;
  t.shape_ = {rows, cols};
  t.data_.assign(rows * cols, fill);
  return t;
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, std::vector<double> values) {
  return with_shape({rows, cols}, std::move(values));
}

Tensor Tensor::vector(std::size_t n, double fill) {
  Tensor t;
  t.shape_ = {n};
  t.data_.assign(n, fill);
  return t;
}

Tensor Tensor::vector(std::vector<double> values) {
  Tensor t;
  t.shape_ = {values.size()};
  t.data_ = std::move(values);
  return t;
}

Tensor Tensor::with_shape(std::vector<std::size_t> shape, std::vector<double> values) {
  if (shape.empty() || shape.size() > 2) throw InvalidInput("tensor rank must be 1 or 2");
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  if (n != values.size()) throw InvalidInput("tensor data does not match shape");
  Tensor t;
  t.shape_ = std::move(shape);
  t.data_ = std::move(values);
  return t;
}

std::span<double> Tensor::grad() {
  if (grad_.size() != data_.size()) grad_.assign(data_.size(), 0.0);
  return grad_;
}

void Tensor::zero_grad() {
  if (!grad_.empty()) std::fill(grad_.begin(), grad_.end(), 0.0);
}

std::string Tensor::shape_string() const {
  std::string s = "(";
  for (std::size_t k = 0; k < shape_.size(); ++k) {
    if (k) s += "x";
    s += std::to_string(shape_[k]);
  }
  return s + ")";
}

}  // namespace cascade_gnn::nn
