#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "cascade_gnn/data_model.hpp"
#include "cascade_gnn/nn/amsgrad.hpp"
#include "cascade_gnn/nn/ops.hpp"

namespace cascade_gnn {

struct ModelConfig {
  FeatureSchema schema = FeatureSchema::standard();
  std::size_t hidden = 64;
  std::size_t fc1 = 32;
  std::size_t out = 2;
  double learning_rate = 5e-4;
  std::size_t iterations = 25000;
  std::size_t validate_every = 500;
  std::uint64_t seed = 42;
  GroupSet active_groups = GroupSet::all();

  static ModelConfig url_wise_defaults();
  /// 50k iterations with the content group switched off.
  static ModelConfig cascade_wise_defaults();
  static ModelConfig defaults_for(Scope scope);
  /// Throws InvalidInput on empty group sets, zero iterations or odd hidden width.
  void validate() const;
};

/// Learnable weights of GC1 -> MP -> GC2 -> MP -> FC1 -> FC2.
class ModelParams {
 public:
  ModelParams() = default;
  /// Glorot-uniform weights, zero biases.
  static ModelParams initialize(std::size_t input_width, std::size_t hidden, std::size_t fc1, std::size_t out,
                                std::uint64_t seed);
  static ModelParams initialize(const ModelConfig& cfg);

  nn::ParamSet& tensors() { return params_; }
  const nn::ParamSet& tensors() const { return params_; }
  /// Throws InvalidInput when absent.
  nn::Tensor& get(std::string_view name);
  const nn::Tensor& get(std::string_view name) const;
  std::size_t input_width() const { return get("gc1.weight").rows(); }
  std::size_t hidden() const { return get("gc1.weight").cols(); }
  std::size_t parameter_count() const;
  void zero_grad();

 private:
  nn::ParamSet params_;
};

struct ForwardResult {
  std::array<double, 2> scores{};         // (s_true, s_fake), raw
  std::array<double, 2> probabilities{};  // softmax(scores)
  nn::Tensor node_embeddings;             // GC2 output, n x hidden

  /// s_fake - s_true; ranks samples for ROC with fake as the positive class.
  double fake_score() const { return scores[1] - scores[0]; }
};

/// Tape-level view of one forward pass, for training and gradient checks.
struct RecordedForward {
  nn::Var scores;
  nn::Var gc1;
  nn::Var gc2;
};

/// Records the network on `tape`. With `trainable` the parameters are tape leaves that
/// accumulate into their gradient buffers; otherwise they are read-only views.
RecordedForward record_forward(nn::Tape& tape, const FeatureMatrix& features, const nn::AttentionGraph& graph,
                               ModelParams& params, bool trainable);

/// Inference. Throws InvalidInput when the feature width differs from the model.
ForwardResult forward(const PropagationGraph& graph, const ModelParams& params);
ForwardResult forward(const PropagationGraph& graph, const nn::AttentionGraph& attention, const ModelParams& params);

/// Zeroes node-feature columns of inactive groups; topology and edge flags are kept.
PropagationGraph apply_feature_mask(const PropagationGraph& graph, GroupSet active, const FeatureSchema& schema);
void apply_feature_mask_in_place(PropagationGraph& graph, GroupSet active, const FeatureSchema& schema);

/// JSON checkpoint: named parameter arrays with shapes, optimizer state and seed.
/// Doubles are written in shortest round-trip form, so reloading is bit-exact.
void save_checkpoint(const std::filesystem::path& path, const ModelParams& params,
                     const nn::OptimizerState& optimizer, std::uint64_t seed);
struct Checkpoint {
  ModelParams params;
  nn::OptimizerState optimizer;
  std::uint64_t seed = 0;
};
/// Throws IoError for unreadable or malformed files.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace cascade_gnn
