#include "cascade_gnn/nn/amsgrad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "cascade_gnn/common.hpp"

namespace cascade_gnn::nn {

namespace {

void ensure_slot(AmsGradSlot& slot, std::size_t n) {
  if (slot.m.size() == n) return;
  slot.m.assign(n, 0.0);
  slot.v.assign(n, 0.0);
  slot.v_hat.assign(n, 0.0);
}

void check_finite(std::span<const double> grad) {
  for (double g : grad)
    if (!std::isfinite(g)) throw NumericError("non-finite gradient");
}

// Moments that decay below the smallest normal double are set to zero. Left alone they
// settle on the smallest subnormal (b1 times it rounds back to itself) and every later
// step on that entry runs at subnormal speed.
double flush(double x) { return std::abs(x) < std::numeric_limits<double>::min() ? 0.0 : x; }

void apply(std::span<double> theta, std::span<const double> grad, AmsGradSlot& slot, const OptimizerState& s) {
  for (std::size_t k = 0; k < theta.size(); ++k) {
    const double g = grad.empty() ? 0.0 : grad[k];
    slot.m[k] = flush(s.beta1 * slot.m[k] + (1.0 - s.beta1) * g);
    slot.v[k] = flush(s.beta2 * slot.v[k] + (1.0 - s.beta2) * g * g);
    slot.v_hat[k] = std::max(slot.v_hat[k], slot.v[k]);
    theta[k] -= s.learning_rate * slot.m[k] / (std::sqrt(slot.v_hat[k]) + s.epsilon);
  }
}

}  // namespace

void amsgrad_update(std::span<double> theta, std::span<const double> grad, AmsGradSlot& slot,
                    const OptimizerState& state) {
  if (grad.size() != theta.size()) throw InvalidInput("amsgrad: gradient shape differs from parameter");
  check_finite(grad);
  ensure_slot(slot, theta.size());
  apply(theta, grad, slot, state);
}

void amsgrad_step(ParamSet& params, OptimizerState& state) {
  for (const auto& p : params) check_finite(p.tensor.grad());
  state.slots.resize(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& t = params[i].tensor;
    ensure_slot(state.slots[i], t.size());
    apply(t.data(), std::as_const(t).grad(), state.slots[i], state);
  }
  ++state.step;
}

}  // namespace cascade_gnn::nn
