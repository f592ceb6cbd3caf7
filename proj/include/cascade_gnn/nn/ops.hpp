#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "cascade_gnn/data_model.hpp"
#include "cascade_gnn/nn/tape.hpp"

namespace cascade_gnn::nn {

inline constexpr double kSeluLambda = 1.0507009873554805;
inline constexpr double kSeluAlpha = 1.6732632423543772;
inline constexpr double kLeakySlope = 0.2;
inline constexpr std::size_t kEdgeFlagCount = 4;

/// Undirected neighbourhoods in CSR form. Each node's list starts with itself
/// (all-zero flags) followed by its neighbours in increasing index order; flags are
/// oriented from the list owner towards the neighbour.
struct AttentionGraph {
  std::size_t num_nodes = 0;
  std::vector<std::size_t> offsets;  // num_nodes + 1
  std::vector<std::size_t> neighbor;
  std::vector<std::array<double, kEdgeFlagCount>> flags;

  /// Throws InvalidInput for out-of-range or self edges.
  static AttentionGraph from_edges(std::size_t num_nodes, std::span<const GraphEdge> edges);
};

/// a·b for rank-2 a (n×k) or rank-1 a (k) with b (k×m). Output keeps a's rank.
Var matmul(Var a, Var b);
/// Adds a length-m bias to every row.
Var add_row_bias(Var x, Var bias);
Var selu(Var x);
double selu(double x);
/// Averages consecutive groups of `window` channels. Throws InvalidInput if the width is indivisible.
Var channel_mean_pool(Var x, std::size_t window = 2);
/// Column means over rows; rank-1 result. Throws InvalidInput for zero rows.
Var global_mean_pool(Var x);
/// Single-head graph attention over projected features z (n×F) with attention
/// vector [a_src | a_dst | a_edge] of length 2F+4:
///   e_ij = leaky_relu(a_src·z_i + a_dst·z_j + a_edge·flags_ij), softmax over N(i)∪{i},
///   out_i = Σ_j α_ij z_j.
Var gat_aggregate(Var z, Var attention, const AttentionGraph& graph);
/// Per-node attention coefficients in AttentionGraph neighbour order (no tape).
std::vector<double> attention_coefficients(const Tensor& z, const Tensor& attention, const AttentionGraph& graph);
/// x·W + b on a single vector or on every row.
Var fc_forward(Var x, Var weight, Var bias);
/// Multi-class hinge on two raw scores: max(0, 1 - (s_correct - s_other)).
/// The subgradient at margin exactly 1 is 0. A NaN margin gives a NaN loss.
Var hinge_loss(Var scores, std::size_t correct);
/// Σ w_k x_k against a constant tensor of the same size.
Var weighted_sum(Var x, const Tensor& weights);

std::array<double, 2> softmax2(std::span<const double> scores);

}  // namespace cascade_gnn::nn
