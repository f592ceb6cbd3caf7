#include "cascade_gnn/trainer.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "cascade_gnn/common.hpp"
#include "cascade_gnn/eval/roc.hpp"

namespace cascade_gnn {

Sample make_sample(PropagationGraph graph, GroupSet active, const FeatureSchema& schema) {
  apply_feature_mask_in_place(graph, active, schema);
  auto attention = nn::AttentionGraph::from_edges(graph.num_nodes(), graph.edges);
  return {std::move(graph), std::move(attention)};
}

std::vector<Sample> make_samples(std::vector<PropagationGraph> graphs, GroupSet active, const FeatureSchema& schema) {
  std::vector<Sample> out;
  out.reserve(graphs.size());
  for (auto& g : graphs) out.push_back(make_sample(std::move(g), active, schema));
  return out;
}

std::vector<const Sample*> sample_refs(std::span<const Sample> samples) {
  std::vector<const Sample*> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(&s);
  return out;
}

std::vector<bool> fake_labels(std::span<const Sample* const> samples) {
  std::vector<bool> y;
  y.reserve(samples.size());
  for (const auto* s : samples) y.push_back(s->graph.label == Label::fake_news);
  return y;
}

std::vector<bool> fake_labels(std::span<const Sample> samples) { return fake_labels(sample_refs(samples)); }

namespace {

std::size_t correct_index(Label l) { return l == Label::fake_news ? 1 : 0; }

double hinge(const ForwardResult& r, Label l) {
  const std::size_t c = correct_index(l);
  return std::max(0.0, 1.0 - (r.scores[c] - r.scores[1 - c]));
}

}  // namespace

std::vector<double> predict_scores(std::span<const Sample* const> samples, const ModelParams& params) {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto* s : samples) out.push_back(forward(s->graph, s->attention, params).fake_score());
  return out;
}

std::vector<double> predict_scores(std::span<const Sample> samples, const ModelParams& params) {
  return predict_scores(sample_refs(samples), params);
}

double mean_loss(std::span<const Sample> samples, const ModelParams& params) {
  if (samples.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& s : samples) sum += hinge(forward(s.graph, s.attention, params), s.graph.label);
  return sum / static_cast<double>(samples.size());
}

double accumulate_gradient(const Sample& sample, ModelParams& params) {
  nn::Tape tape;
  auto rec = record_forward(tape, sample.graph.node_features, sample.attention, params, true);
  auto loss = nn::hinge_loss(rec.scores, correct_index(sample.graph.label));
  const double value = loss.value()[0];
  if (!std::isfinite(value)) throw NumericError("non-finite training loss");
  tape.backward(loss);
  return value;
}

TrainResult train(std::span<const Sample> train_set, std::span<const Sample> validation_set, const ModelConfig& cfg) {
  return train(sample_refs(train_set), sample_refs(validation_set), cfg);
}

TrainResult train(std::span<const Sample* const> train_set, std::span<const Sample* const> validation_set,
                  const ModelConfig& cfg) {
  cfg.validate();
  if (train_set.empty()) throw InvalidInput("training set is empty");

  TrainResult result;
  result.params = ModelParams::initialize(cfg);
  result.optimizer.learning_rate = cfg.learning_rate;
  result.loss_trace.reserve(cfg.iterations);

  const auto val_labels = fake_labels(validation_set);
  std::size_t val_pos = 0;
  for (bool b : val_labels) val_pos += b ? 1 : 0;
  const bool val_by_auc = val_pos > 0 && val_pos < val_labels.size();

  ModelParams best = result.params;
  double best_key = -std::numeric_limits<double>::infinity();
  auto validate = [&](std::size_t iteration) {
    if (validation_set.empty()) return;
    ValidationPoint p{iteration, std::numeric_limits<double>::quiet_NaN(), 0.0};
    const auto scores = predict_scores(validation_set, result.params);
    double loss = 0.0;
    for (std::size_t k = 0; k < scores.size(); ++k) {
      const double margin = val_labels[k] ? scores[k] : -scores[k];
      loss += std::max(0.0, 1.0 - margin);
    }
    p.loss = loss / static_cast<double>(scores.size());
    if (val_by_auc) p.auc = eval::roc_auc(scores, val_labels).auc;
    result.validation.push_back(p);
    const double key = val_by_auc ? p.auc : -p.loss;
    if (key > best_key) {
      best_key = key;
      best = result.params;
      result.best_iteration = iteration;
      result.best_validation_auc = p.auc;
    }
  };

  std::mt19937_64 rng(derive_seed(cfg.seed, 0x5a3b1e));
  std::uniform_int_distribution<std::size_t> pick(0, train_set.size() - 1);
  for (std::size_t it = 1; it <= cfg.iterations; ++it) {
    const Sample& s = *train_set[pick(rng)];
    result.loss_trace.push_back(accumulate_gradient(s, result.params));
    nn::amsgrad_step(result.params.tensors(), result.optimizer);
    result.params.zero_grad();
    if (it % cfg.validate_every == 0 || it == cfg.iterations) validate(it);
  }

  if (!validation_set.empty()) {
    for (auto& t : best.tensors()) t.tensor.drop_grad();
    result.params = std::move(best);
  } else {
    result.best_iteration = cfg.iterations;
    result.best_validation_auc = std::numeric_limits<double>::quiet_NaN();
  }
  for (auto& t : result.params.tensors()) t.tensor.drop_grad();
  return result;
}

}  // namespace cascade_gnn
