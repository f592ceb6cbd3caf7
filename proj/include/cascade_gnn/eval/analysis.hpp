#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cascade_gnn/dataset.hpp"
#include "cascade_gnn/trainer.hpp"

namespace cascade_gnn::eval {

/// Hop distances on the follow graph with edge direction ignored, from the nearest of
/// `sources`. Unreached users get SIZE_MAX.
std::vector<std::size_t> multi_source_hops(const SocialGraph& social, std::span<const UserIndex> sources);

/// Lower bound on the undirected diameter by repeated farthest-node sweeps from user 0.
std::size_t estimate_diameter(const SocialGraph& social);

struct MadMmd {
  double mad_mean = 0.0;
  double mad_std = 0.0;
  double mmd_mean = 0.0;
  double mmd_std = 0.0;
  std::size_t samples_used = 0;
  std::size_t samples_skipped = 0;  // empty samples
  std::size_t cap = 0;
};

/// For each sample t and user u in it, d_t^u is the hop distance from u to the nearest
/// user that appears in some other sample (0 if u itself does). MAD averages the
/// per-sample means, MMD the per-sample minima. Unreachable users count as `cap`;
/// cap = 0 selects estimate_diameter + 1. Throws InvalidInput for fewer than two non-empty samples.
MadMmd mad_mmd(std::span<const std::vector<UserIndex>> samples, const SocialGraph& social, std::size_t cap = 0);

/// Distinct users of every URL-wise or cascade-wise sample of `ds`.
std::vector<std::vector<UserIndex>> sample_users(const Dataset& ds, Scope scope, std::size_t min_cascade_size);

struct LayoutOptions {
  std::size_t iterations = 100;
  std::uint64_t seed = 42;
  double area = 1.0;
  double initial_temperature = 0.1;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Fruchterman-Reingold: repulsion k^2/d between all pairs, attraction d^2/k along
/// `edges`, displacement capped by a temperature cooling linearly to zero,
/// k = sqrt(area / n). Initial positions are uniform in the unit square.
std::vector<Point2> fr_layout(std::size_t num_nodes, std::span<const std::pair<std::size_t, std::size_t>> edges,
                              const LayoutOptions& opt);

/// Optimal distance k used by fr_layout.
double fr_optimal_distance(std::size_t num_nodes, double area);

/// Users with credibility, at most `max_users` (most stories first, then id), and the
/// undirected follow edges between them.
struct LayoutGraph {
  std::vector<UserIndex> users;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
};
LayoutGraph layout_subgraph(const Dataset& ds, std::size_t max_users);

/// Mean GC2 node embedding per author over all samples.
std::map<std::string, std::vector<double>> user_embeddings(std::span<const Sample> samples, const ModelParams& params);

}  // namespace cascade_gnn::eval
