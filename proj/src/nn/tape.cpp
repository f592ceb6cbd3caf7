#include "cascade_gnn/nn/tape.hpp"

#include "cascade_gnn/common.hpp"

namespace cascade_gnn::nn {

const Tensor& Var::value() const { return tape_->value(id_); }

bool Var::requires_grad() const { return tape_->requires_grad(id_); }

Var Tape::constant(Tensor value) {
  nodes_.push_back(Node{std::move(value), nullptr, {}, false, {}});
  return {this, nodes_.size() - 1};
}

Var Tape::parameter(Tensor& param) {
  nodes_.push_back(Node{Tensor{}, &param, {}, true, {}});
  return {this, nodes_.size() - 1};
}

Var Tape::view(const Tensor& t) {
  // Never written through: requires_grad is false, so backward() skips it.
  nodes_.push_back(Node{Tensor{}, const_cast<Tensor*>(&t), {}, false, {}});
  return {this, nodes_.size() - 1};
}

Var Tape::variable(Tensor value) {
  nodes_.push_back(Node{std::move(value), nullptr, {}, true, {}});
  return {this, nodes_.size() - 1};
}

Var Tape::record(Tensor value, bool requires_grad, BackwardFn backward) {
  if (!requires_grad) backward = nullptr;
  nodes_.push_back(Node{std::move(value), nullptr, {}, requires_grad, std::move(backward)});
  return {this, nodes_.size() - 1};
}

const Tensor& Tape::value(std::size_t id) const {
  const auto& n = nodes_[id];
  return n.external ? *n.external : n.value;
}

std::span<double> Tape::grad_buffer(std::size_t id) {
  auto& n = nodes_[id];
  const auto size = value(id).size();
  if (n.grad.size() != size) n.grad.assign(size, 0.0);
  return n.grad;
}

void Tape::backward(Var loss) {
  if (backward_done_) throw InvalidInput("backward already ran on this tape; run a new forward pass");
  if (loss.value().size() != 1) throw InvalidInput("backward needs a scalar loss");
  backward_done_ = true;
  if (!nodes_[loss.id()].requires_grad) return;
  grad_buffer(loss.id())[0] = 1.0;
  for (std::size_t id = loss.id() + 1; id-- > 0;) {
    auto& n = nodes_[id];
    if (n.grad.empty()) continue;
    if (n.backward) n.backward(*this, id);
  }
  for (auto& n : nodes_) {
    if (!n.external || n.grad.empty()) continue;
    auto g = n.external->grad();
    for (std::size_t k = 0; k < g.size(); ++k) g[k] += n.grad[k];
  }
}

}  // namespace cascade_gnn::nn
