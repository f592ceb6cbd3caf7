#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "cascade_gnn/model.hpp"

namespace cascade_gnn {

/// A masked propagation graph with its attention neighbourhoods precomputed.
struct Sample {
  PropagationGraph graph;
  nn::AttentionGraph attention;
};

/// Applies the group mask and builds attention neighbourhoods.
Sample make_sample(PropagationGraph graph, GroupSet active, const FeatureSchema& schema);
std::vector<Sample> make_samples(std::vector<PropagationGraph> graphs, GroupSet active, const FeatureSchema& schema);

struct ValidationPoint {
  std::size_t iteration;  // number of completed updates
  double auc;             // NaN when validation has a single class
  double loss;            // mean hinge loss on validation
};

struct TrainResult {
  ModelParams params;  // best by validation
  nn::OptimizerState optimizer;
  std::vector<double> loss_trace;  // per-iteration hinge loss
  std::vector<ValidationPoint> validation;
  std::size_t best_iteration = 0;
  double best_validation_auc = 0.0;  // NaN when selection fell back to loss
};

/// Single-graph AMSGrad training with uniform seeded sampling.
///
/// Validation runs every cfg.validate_every updates and after the last one; the
/// parameters with the highest validation AUC are returned (earliest on ties). When
/// the validation set holds one class only, the lowest validation loss decides; with
/// no validation set the final parameters are returned.
/// Throws InvalidInput for an empty training set and NumericError on a non-finite loss.
TrainResult train(std::span<const Sample* const> train_set, std::span<const Sample* const> validation_set,
                  const ModelConfig& cfg);
TrainResult train(std::span<const Sample> train_set, std::span<const Sample> validation_set, const ModelConfig& cfg);

std::vector<const Sample*> sample_refs(std::span<const Sample> samples);

/// s_fake - s_true for every sample.
std::vector<double> predict_scores(std::span<const Sample* const> samples, const ModelParams& params);
std::vector<double> predict_scores(std::span<const Sample> samples, const ModelParams& params);

/// Mean hinge loss over `samples`.
double mean_loss(std::span<const Sample> samples, const ModelParams& params);

/// One hinge-loss gradient on a single sample; gradients accumulate into params.
double accumulate_gradient(const Sample& sample, ModelParams& params);

std::vector<bool> fake_labels(std::span<const Sample* const> samples);
std::vector<bool> fake_labels(std::span<const Sample> samples);

}  // namespace cascade_gnn
