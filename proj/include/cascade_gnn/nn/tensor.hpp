#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace cascade_gnn::nn {

/// Dense row-major float64 tensor of rank 1 or 2 with an optional gradient buffer.
class Tensor {
 public:
  Tensor() = default;

  static Tensor matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> values);
  static Tensor vector(std::size_t n, double fill = 0.0);
  static Tensor vector(std::vector<double> values);
  static Tensor scalar(double v) { return vector(std::vector<double>{v}); }
  /// Throws InvalidInput unless product(shape) == values.size() and rank is 1 or 2.
  static Tensor with_shape(std::vector<std::size_t> shape, std::vector<double> values);

  std::size_t rank() const { return shape_.size(); }
  const std::vector<std::size_t>& shape() const { return shape_; }
  /// Rank-1 tensors behave as a single row.
  std::size_t rows() const { return shape_.size() == 2 ? shape_[0] : 1; }
  std::size_t cols() const { return shape_.empty() ? 0 : shape_.back(); }
  std::size_t size() const { return data_.size(); }
  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  std::vector<double>& storage() { return data_; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols(), cols()}; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols(), cols()}; }

  bool has_grad() const { return !grad_.empty(); }
  /// Allocates a zeroed gradient buffer if absent.
  std::span<double> grad();
  std::span<const double> grad() const { return grad_; }
  void zero_grad();
  void drop_grad() { grad_.clear(); }

  std::string shape_string() const;

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
  std::vector<double> grad_;
};

}  // namespace cascade_gnn::nn
