#pragma once

// Random fixtures and independent reference implementations shared by the unit and
// acceptance tests.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "cascade_gnn/common.hpp"
#include "cascade_gnn/data_model.hpp"
#include "cascade_gnn/model.hpp"
#include "cascade_gnn/nn/ops.hpp"
#include "cascade_gnn/nn/tape.hpp"

namespace test_support {

using namespace cascade_gnn;

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::size_t pick(std::mt19937_64& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

inline User make_user(const std::string& id, std::int64_t followers = 0) {
  User u;
  u.user_id = id;
  u.followers_count = followers;
  u.lang = "en";
  return u;
}

/// Users u0..u{n-1} with follower counts in [0, 3] (many ties) and each ordered pair
/// followed with probability p.
inline SocialGraph random_social(std::mt19937_64& rng, std::size_t n, double p) {
  std::vector<User> users;
  for (std::size_t i = 0; i < n; ++i) users.push_back(make_user("u" + std::to_string(i), static_cast<std::int64_t>(pick(rng, 4))));
  std::vector<std::pair<UserIndex, UserIndex>> follows;
  for (UserIndex a = 0; a < n; ++a)
    for (UserIndex b = 0; b < n; ++b)
      if (a != b && uniform(rng, 0.0, 1.0) < p) follows.emplace_back(a, b);
  return SocialGraph(std::move(users), follows);
}

inline Tweet make_tweet(const std::string& id, const std::string& author, Timestamp ts, const std::string& cascade_id,
                        bool source) {
  Tweet t;
  t.tweet_id = id;
  t.author = author;
  t.timestamp = ts;
  t.cascade_id = cascade_id;
  t.is_source = source;
  t.source_device = "web";
  return t;
}

/// `size` tweets by random users (repeats allowed), sorted offsets from `start` in
/// [0, max_offset] seconds; offsets may coincide.
inline CascadeRecord random_cascade(std::mt19937_64& rng, const SocialGraph& social, std::size_t size,
                                    const std::string& id, const std::string& url_id, Timestamp start,
                                    Timestamp max_offset) {
  std::vector<Timestamp> offsets(size, 0);
  for (std::size_t k = 1; k < size; ++k)
    offsets[k] = std::uniform_int_distribution<Timestamp>(0, max_offset)(rng);
  std::sort(offsets.begin(), offsets.end());
  CascadeRecord c{id, url_id, {}};
  for (std::size_t k = 0; k < size; ++k) {
    const auto& author = social.user(static_cast<UserIndex>(pick(rng, social.size()))).user_id;
    c.tweets.push_back(make_tweet(id + "_t" + std::to_string(k), author, start + offsets[k], id, k == 0));
  }
  return c;
}

/// Parent choice written directly from the two rules: collect every earlier tweet,
/// keep those whose author the retweeter follows, take the latest; otherwise order
/// all earlier tweets by (followers desc, position asc) and take the first.
inline std::vector<std::optional<std::size_t>> brute_force_parents(const CascadeRecord& c, const SocialGraph& social) {
  std::vector<std::optional<std::size_t>> parent(c.tweets.size());
  for (std::size_t t = 1; t < c.tweets.size(); ++t) {
    const auto me = social.index_of(c.tweets[t].author);
    std::vector<std::size_t> followed, all;
    for (std::size_t k = 0; k < t; ++k) {
      all.push_back(k);
      const auto other = social.index_of(c.tweets[k].author);
      const auto f = social.following(me);
      if (std::find(f.begin(), f.end(), other) != f.end()) followed.push_back(k);
    }
    if (!followed.empty()) {
      parent[t] = *std::max_element(followed.begin(), followed.end());
      continue;
    }
    std::stable_sort(all.begin(), all.end(), [&](std::size_t a, std::size_t b) {
      return social.user(social.index_of(c.tweets[a].author)).followers_count >
             social.user(social.index_of(c.tweets[b].author)).followers_count;
    });
    parent[t] = all.front();
  }
  return parent;
}

/// P(s+ > s-) + P(s+ = s-)/2 by enumerating every positive/negative pair.
inline double pairwise_auc(const std::vector<double>& scores, const std::vector<bool>& positive) {
  double wins = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!positive[i]) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (positive[j]) continue;
      pairs += 1.0;
      if (scores[i] > scores[j]) wins += 1.0;
      else if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  return wins / pairs;
}

inline nn::Tensor random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols, double scale = 1.0) {
  std::vector<double> v(rows * cols);
  for (auto& x : v) x = uniform(rng, -scale, scale);
  return nn::Tensor::matrix(rows, cols, std::move(v));
}

inline nn::Tensor random_vector(std::mt19937_64& rng, std::size_t n, double scale = 1.0) {
  std::vector<double> v(n);
  for (auto& x : v) x = uniform(rng, -scale, scale);
  return nn::Tensor::vector(std::move(v));
}

inline EdgeFlags random_flags(std::mt19937_64& rng) {
  EdgeFlags f;
  do {
    f.i_follows_j = pick(rng, 2);
    f.j_follows_i = pick(rng, 2);
    f.spread_i_to_j = pick(rng, 2);
    f.spread_j_to_i = pick(rng, 2);
  } while (!f.any());
  return f;
}

/// Undirected edges (i < j, sorted) each present with probability p.
inline std::vector<GraphEdge> random_edges(std::mt19937_64& rng, std::size_t n, double p) {
  std::vector<GraphEdge> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (uniform(rng, 0.0, 1.0) < p) edges.push_back({i, j, random_flags(rng)});
  return edges;
}

inline PropagationGraph random_graph(std::mt19937_64& rng, std::size_t n, std::size_t width, double edge_p) {
  PropagationGraph g;
  g.sample_id = g.url_id = "g";
  for (std::size_t i = 0; i < n; ++i) {
    g.nodes.push_back("n" + std::to_string(i));
    g.node_authors.push_back("a" + std::to_string(i));
  }
  g.node_features.rows = n;
  g.node_features.cols = width;
  g.node_features.values.resize(n * width);
  for (auto& x : g.node_features.values) x = uniform(rng, -1.0, 1.0);
  g.edges = random_edges(rng, n, edge_p);
  return g;
}

/// Node i of `g` becomes node perm[i]; flags are re-oriented so that stored pairs keep i < j.
inline PropagationGraph permute_graph(const PropagationGraph& g, const std::vector<std::size_t>& perm) {
  PropagationGraph out = g;
  const std::size_t n = g.num_nodes();
  for (std::size_t i = 0; i < n; ++i) {
    out.nodes[perm[i]] = g.nodes[i];
    out.node_authors[perm[i]] = g.node_authors[i];
    std::copy(g.node_features.row(i).begin(), g.node_features.row(i).end(), out.node_features.row(perm[i]).begin());
  }
  out.edges.clear();
  for (const auto& e : g.edges) {
    const std::size_t a = perm[e.i], b = perm[e.j];
    if (a < b) out.edges.push_back({a, b, e.flags});
    else out.edges.push_back({b, a, e.flags.reversed()});
  }
  std::sort(out.edges.begin(), out.edges.end(),
            [](const GraphEdge& x, const GraphEdge& y) { return std::pair(x.i, x.j) < std::pair(y.i, y.j); });
  return out;
}

inline std::vector<std::size_t> random_permutation(std::mt19937_64& rng, std::size_t n) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), 0);
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

/// Graph attention computed with plain loops over a dense adjacency; the self pair has
/// zero flags. z is n x F, attention holds [a_src | a_dst | a_edge].
inline std::vector<double> dense_gat(const nn::Tensor& z, const nn::Tensor& a, std::size_t n,
                                     const std::vector<GraphEdge>& edges) {
  const std::size_t F = z.cols();
  std::vector<std::vector<int>> adj(n, std::vector<int>(n, 0));
  std::vector<std::vector<std::array<double, 4>>> flag(n, std::vector<std::array<double, 4>>(n, {0, 0, 0, 0}));
  for (std::size_t i = 0; i < n; ++i) adj[i][i] = 1;
  for (const auto& e : edges) {
    adj[e.i][e.j] = adj[e.j][e.i] = 1;
    flag[e.i][e.j] = {double(e.flags.i_follows_j), double(e.flags.j_follows_i), double(e.flags.spread_i_to_j),
                      double(e.flags.spread_j_to_i)};
    flag[e.j][e.i] = {double(e.flags.j_follows_i), double(e.flags.i_follows_j), double(e.flags.spread_j_to_i),
                      double(e.flags.spread_i_to_j)};
  }
  std::vector<double> out(n * F, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> e(n, 0.0);
    double mx = -1e300;
    for (std::size_t j = 0; j < n; ++j) {
      if (!adj[i][j]) continue;
      double s = 0.0;
      for (std::size_t c = 0; c < F; ++c) s += a[c] * z(i, c) + a[F + c] * z(j, c);
      for (std::size_t c = 0; c < 4; ++c) s += a[2 * F + c] * flag[i][j][c];
      e[j] = s > 0 ? s : 0.2 * s;
      mx = std::max(mx, e[j]);
    }
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (adj[i][j]) total += std::exp(e[j] - mx);
    for (std::size_t j = 0; j < n; ++j) {
      if (!adj[i][j]) continue;
      const double alpha = std::exp(e[j] - mx) / total;
      for (std::size_t c = 0; c < F; ++c) out[i * F + c] += alpha * z(j, c);
    }
  }
  return out;
}

/// |a - n| / max(|a|, |n|, floor).
inline double relative_error(double analytic, double numeric, double floor) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

inline constexpr double kFdStep = 1e-5;
inline constexpr double kFdFloor = 1e-6;

/// Scalar function of tape leaves.
using TapeFn = std::function<nn::Var(nn::Tape&, const std::vector<nn::Var>&)>;

/// Largest relative error between reverse-mode gradients and central differences over
/// every element of every input.
inline double max_gradient_error(const TapeFn& f, const std::vector<nn::Tensor>& inputs, double h = kFdStep,
                                 double floor = kFdFloor) {
  nn::Tape tape;
  std::vector<nn::Var> leaves;
  for (const auto& x : inputs) leaves.push_back(tape.variable(x));
  tape.backward(f(tape, leaves));

  auto eval = [&](const std::vector<nn::Tensor>& xs) {
    nn::Tape t;
    std::vector<nn::Var> v;
    for (const auto& x : xs) v.push_back(t.constant(x));
    return f(t, v).value()[0];
  };
  double worst = 0.0;
  std::vector<nn::Tensor> probe = inputs;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    const auto g = tape.grad(leaves[k]);
    for (std::size_t e = 0; e < inputs[k].size(); ++e) {
      const double x0 = inputs[k][e];
      probe[k][e] = x0 + h;
      const double up = eval(probe);
      probe[k][e] = x0 - h;
      const double down = eval(probe);
      probe[k][e] = x0;
      const double numeric = (up - down) / (2.0 * h);
      const double analytic = g.empty() ? 0.0 : g[e];
      worst = std::max(worst, relative_error(analytic, numeric, floor));
    }
  }
  return worst;
}

/// Same check for the full network with hinge loss against `label`, over every parameter.
inline double max_network_gradient_error(const PropagationGraph& graph, ModelParams params, std::size_t label,
                                         double h = kFdStep, double floor = kFdFloor) {
  const auto attention = nn::AttentionGraph::from_edges(graph.num_nodes(), graph.edges);
  params.zero_grad();
  {
    nn::Tape tape;
    const auto r = record_forward(tape, graph.node_features, attention, params, true);
    tape.backward(nn::hinge_loss(r.scores, label));
  }
  auto loss = [&](ModelParams& p) {
    nn::Tape tape;
    const auto r = record_forward(tape, graph.node_features, attention, p, false);
    return nn::hinge_loss(r.scores, label).value()[0];
  };
  ModelParams probe = params;
  double worst = 0.0;
  for (std::size_t k = 0; k < params.tensors().size(); ++k) {
    const auto& t = params.tensors()[k].tensor;
    auto& q = probe.tensors()[k].tensor;
    for (std::size_t e = 0; e < t.size(); ++e) {
      const double x0 = t[e];
      q[e] = x0 + h;
      const double up = loss(probe);
      q[e] = x0 - h;
      const double down = loss(probe);
      q[e] = x0;
      const double analytic = t.has_grad() ? t.grad()[e] : 0.0;
      worst = std::max(worst, relative_error(analytic, (up - down) / (2.0 * h), floor));
    }
  }
  return worst;
}

}  // namespace test_support
