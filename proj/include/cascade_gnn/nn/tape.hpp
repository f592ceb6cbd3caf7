#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "cascade_gnn/nn/tensor.hpp"

namespace cascade_gnn::nn {

class Tape;

/// Handle to a value recorded on a Tape.
class Var {
 public:
  Var() = default;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  const Tensor& value() const;
  Tape& tape() const { return *tape_; }
  std::size_t id() const { return id_; }
  bool requires_grad() const;

 private:
  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

/// Reverse-mode recorder. Build one tape per forward pass; backward() may run once.
class Tape {
 public:
  /// Called with the tape and the id of the node being differentiated.
  using BackwardFn = std::function<void(Tape&, std::size_t)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Constant input; owned by the tape.
  Var constant(Tensor value);
  /// Trainable leaf that aliases `param`; backward() accumulates into param.grad().
  Var parameter(Tensor& param);
  /// Read-only alias of an external tensor; no gradient flows into it.
  Var view(const Tensor& t);
  /// Leaf owned by the tape whose gradient is read back with grad().
  Var variable(Tensor value);

  /// Records an op result. `backward` is dropped when no input requires a gradient.
  Var record(Tensor value, bool requires_grad, BackwardFn backward);

  const Tensor& value(std::size_t id) const;
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }
  /// Gradient accumulator for node `id`; allocated on first use.
  std::span<double> grad_buffer(std::size_t id);
  /// Accumulated gradient, empty when nothing flowed into `id`.
  std::span<const double> grad(std::size_t id) const { return nodes_[id].grad; }
  std::span<const double> grad(Var v) const { return grad(v.id()); }

  /// Seeds d(loss)/d(loss) = 1 and propagates. Throws InvalidInput when `loss` is not
  /// a single element or when called a second time on the same tape.
  void backward(Var loss);
  bool backward_done() const { return backward_done_; }
  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    Tensor* external = nullptr;
    std::vector<double> grad;
    bool requires_grad = false;
    BackwardFn backward;
  };
  std::vector<Node> nodes_;
  bool backward_done_ = false;
};

}  // namespace cascade_gnn::nn
