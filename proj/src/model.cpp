#include "cascade_gnn/model.hpp"

#include <cmath>
#include <fstream>
#include <random>

#include <json.hpp>

#include "cascade_gnn/common.hpp"

namespace cascade_gnn {

using nlohmann::json;
using nn::Tensor;
using nn::Var;

ModelConfig ModelConfig::url_wise_defaults() { return ModelConfig{}; }

ModelConfig ModelConfig::cascade_wise_defaults() {
  ModelConfig c;
  c.iterations = 50000;
  c.active_groups = GroupSet::all().without(FeatureGroup::content);
  return c;
}

ModelConfig ModelConfig::defaults_for(Scope scope) {
  return scope == Scope::url_wise ? url_wise_defaults() : cascade_wise_defaults();
}

void ModelConfig::validate() const {
  if (active_groups.empty()) throw InvalidInput("at least one feature group must be active");
  if (iterations == 0) throw InvalidInput("iterations must be positive");
  if (hidden == 0 || hidden % 2 != 0) throw InvalidInput("hidden width must be even and positive");
  if (fc1 == 0 || out != 2) throw InvalidInput("classifier head must be fc1 > 0 and out = 2");
  if (!(learning_rate > 0.0)) throw InvalidInput("learning rate must be positive");
  if (validate_every == 0) throw InvalidInput("validate_every must be positive");
}

namespace {

Tensor glorot(std::size_t fan_in, std::size_t fan_out, std::vector<std::size_t> shape, std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> u(-limit, limit);
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return Tensor::with_shape(std::move(shape), std::move(v));
}

}  // namespace

ModelParams ModelParams::initialize(std::size_t input_width, std::size_t hidden, std::size_t fc1, std::size_t out,
                                    std::uint64_t seed) {
  if (input_width == 0 || hidden == 0 || hidden % 2 != 0 || fc1 == 0 || out == 0)
    throw InvalidInput("invalid layer widths");
  std::mt19937_64 rng(derive_seed(seed, 0x1417));
  const std::size_t pooled = hidden / 2;
  const std::size_t att = 2 * hidden + nn::kEdgeFlagCount;
  ModelParams p;
  auto add = [&](std::string name, Tensor t) { p.params_.push_back({std::move(name), std::move(t)}); };
  add("gc1.weight", glorot(input_width, hidden, {input_width, hidden}, rng));
  add("gc1.attention", glorot(att, 1, {att}, rng));
  add("gc1.bias", Tensor::vector(hidden));
  add("gc2.weight", glorot(pooled, hidden, {pooled, hidden}, rng));
  add("gc2.attention", glorot(att, 1, {att}, rng));
  add("gc2.bias", Tensor::vector(hidden));
  add("fc1.weight", glorot(hidden, fc1, {hidden, fc1}, rng));
  add("fc1.bias", Tensor::vector(fc1));
  add("fc2.weight", glorot(fc1, out, {fc1, out}, rng));
  add("fc2.bias", Tensor::vector(out));
  return p;
}

ModelParams ModelParams::initialize(const ModelConfig& cfg) {
  cfg.validate();
  return initialize(cfg.schema.width(), cfg.hidden, cfg.fc1, cfg.out, cfg.seed);
}

Tensor& ModelParams::get(std::string_view name) {
  for (auto& p : params_)
    if (p.name == name) return p.tensor;
  throw InvalidInput("model has no parameter " + std::string(name));
}

const Tensor& ModelParams::get(std::string_view name) const {
  return const_cast<ModelParams*>(this)->get(name);
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.tensor.size();
  return n;
}

void ModelParams::zero_grad() {
  for (auto& p : params_) p.tensor.zero_grad();
}

RecordedForward record_forward(nn::Tape& tape, const FeatureMatrix& features, const nn::AttentionGraph& graph,
                               ModelParams& params, bool trainable) {
  if (features.cols != params.input_width())
    throw InvalidInput("graph feature width " + std::to_string(features.cols) + " does not match model width " +
                       std::to_string(params.input_width()));
  if (features.rows != graph.num_nodes) throw InvalidInput("feature rows do not match graph nodes");
  auto p = [&](std::string_view name) {
    return trainable ? tape.parameter(params.get(name)) : tape.view(params.get(name));
  };
  Var x = tape.constant(Tensor::matrix(features.rows, features.cols, features.values));

  Var h1 = nn::add_row_bias(nn::gat_aggregate(nn::matmul(x, p("gc1.weight")), p("gc1.attention"), graph),
                            p("gc1.bias"));
  h1 = nn::selu(h1);
  Var pooled = nn::channel_mean_pool(h1, 2);
  Var h2 = nn::add_row_bias(nn::gat_aggregate(nn::matmul(pooled, p("gc2.weight")), p("gc2.attention"), graph),
                            p("gc2.bias"));
  h2 = nn::selu(h2);
  Var readout = nn::global_mean_pool(h2);
  Var f1 = nn::selu(nn::fc_forward(readout, p("fc1.weight"), p("fc1.bias")));
  Var scores = nn::fc_forward(f1, p("fc2.weight"), p("fc2.bias"));
  return {scores, h1, h2};
}

ForwardResult forward(const PropagationGraph& graph, const nn::AttentionGraph& attention, const ModelParams& params) {
  nn::Tape tape;
  auto rec = record_forward(tape, graph.node_features, attention, const_cast<ModelParams&>(params), false);
  ForwardResult r;
  const auto& s = rec.scores.value();
  r.scores = {s[0], s[1]};
  r.probabilities = nn::softmax2(s.data());
  r.node_embeddings = rec.gc2.value();
  return r;
}

ForwardResult forward(const PropagationGraph& graph, const ModelParams& params) {
  if (graph.num_nodes() == 0) throw InvalidInput("cannot classify an empty graph");
  return forward(graph, nn::AttentionGraph::from_edges(graph.num_nodes(), graph.edges), params);
}

void apply_feature_mask_in_place(PropagationGraph& graph, GroupSet active, const FeatureSchema& schema) {
  if (active == GroupSet::all()) return;
  if (graph.node_features.cols != schema.width()) throw InvalidInput("graph width does not match feature schema");
  for (const auto& s : schema.slices()) {
    if (active.contains(s.group)) continue;
    for (std::size_t r = 0; r < graph.node_features.rows; ++r) {
      auto row = graph.node_features.row(r);
      std::fill_n(row.begin() + static_cast<std::ptrdiff_t>(s.offset), s.width, 0.0);
    }
  }
}

PropagationGraph apply_feature_mask(const PropagationGraph& graph, GroupSet active, const FeatureSchema& schema) {
  PropagationGraph g = graph;
  apply_feature_mask_in_place(g, active, schema);
  return g;
}

void save_checkpoint(const std::filesystem::path& path, const ModelParams& params,
                     const nn::OptimizerState& optimizer, std::uint64_t seed) {
  json j;
  j["seed"] = seed;
  json ps = json::array();
  for (const auto& p : params.tensors()) {
    ps.push_back({{"name", p.name},
                  {"shape", p.tensor.shape()},
                  {"data", std::vector<double>(p.tensor.data().begin(), p.tensor.data().end())}});
  }
  j["params"] = std::move(ps);
  json slots = json::array();
  for (const auto& s : optimizer.slots) slots.push_back({{"m", s.m}, {"v", s.v}, {"v_hat", s.v_hat}});
  j["optimizer"] = {{"learning_rate", optimizer.learning_rate},
                    {"beta1", optimizer.beta1},
                    {"beta2", optimizer.beta2},
                    {"epsilon", optimizer.epsilon},
                    {"step", optimizer.step},
                    {"slots", std::move(slots)}};
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write checkpoint " + path.string());
  out << j.dump() << '\n';
  if (!out) throw IoError("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  Checkpoint c;
  try {
    const json j = json::parse(in);
    c.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& p : j.at("params")) {
      c.params.tensors().push_back(
          {p.at("name").get<std::string>(),
           Tensor::with_shape(p.at("shape").get<std::vector<std::size_t>>(), p.at("data").get<std::vector<double>>())});
    }
    const auto& o = j.at("optimizer");
    c.optimizer.learning_rate = o.at("learning_rate").get<double>();
    c.optimizer.beta1 = o.at("beta1").get<double>();
    c.optimizer.beta2 = o.at("beta2").get<double>();
    c.optimizer.epsilon = o.at("epsilon").get<double>();
    c.optimizer.step = o.at("step").get<std::uint64_t>();
    for (const auto& s : o.at("slots")) {
      c.optimizer.slots.push_back({s.at("m").get<std::vector<double>>(), s.at("v").get<std::vector<double>>(),
                                   s.at("v_hat").get<std::vector<double>>()});
    }
  } catch (const json::exception& e) {
    throw IoError("malformed checkpoint " + path.string() + ": " + e.what());
  } catch (const InvalidInput& e) {
    throw IoError("malformed checkpoint " + path.string() + ": " + e.what());
  }
  for (const char* name : {"gc1.weight", "gc1.attention", "gc1.bias", "gc2.weight", "gc2.attention", "gc2.bias",
                           "fc1.weight", "fc1.bias", "fc2.weight", "fc2.bias"}) {
    try {
      c.params.get(name);
    } catch (const InvalidInput&) {
      throw IoError("checkpoint lacks parameter " + std::string(name));
    }
  }
  return c;
}

}  // namespace cascade_gnn
