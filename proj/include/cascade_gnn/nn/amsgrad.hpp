#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cascade_gnn/nn/tensor.hpp"

namespace cascade_gnn::nn {

struct NamedTensor {
  std::string name;
  Tensor tensor;
};

/// Ordered collection of trainable tensors.
using ParamSet = std::vector<NamedTensor>;

struct AmsGradSlot {
  std::vector<double> m;
  std::vector<double> v;
  std::vector<double> v_hat;
};

struct OptimizerState {
  double learning_rate = 5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t step = 0;
  std::vector<AmsGradSlot> slots;  // parallel to the ParamSet; sized lazily
};

/// One AMSGrad update without bias correction:
///   m <- b1 m + (1-b1) g;  v <- b2 v + (1-b2) g^2;  v_hat <- max(v_hat, v);
///   theta <- theta - lr m / (sqrt(v_hat) + eps)
/// m and v are flushed to zero once they fall below the smallest normal double.
/// Throws NumericError (leaving everything untouched) if any gradient is non-finite.
void amsgrad_update(std::span<double> theta, std::span<const double> grad, AmsGradSlot& slot,
                    const OptimizerState& state);

/// Applies one step to every tensor using its gradient buffer; tensors without a
/// gradient are treated as having zero gradient.
void amsgrad_step(ParamSet& params, OptimizerState& state);

}  // namespace cascade_gnn::nn
