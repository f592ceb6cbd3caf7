#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cascade_gnn/dataset.hpp"

namespace cascade_gnn {

struct GenConfig {
  std::uint64_t seed = 42;
  std::size_t num_users = 10000;
  std::size_t num_urls = 300;
  double fake_fraction = 0.1674;
  double mean_cascades_per_url = 20.0;
  double cascade_size_tail_exponent = 2.2;
  /// Exponent used for fake stories; unset means the same as true stories.
  std::optional<double> fake_size_tail_exponent;
  std::size_t max_cascade_size = 500;
  double homophily_strength = 0.8;
  double reliable_fraction = 0.7;
  double unreliable_fraction = 0.3;
  std::size_t follows_per_user = 10;
  double reciprocity = 0.2;
  double time_horizon_days = 730.0;
  std::int64_t start_time = 1367366400;  // 2013-05-01 UTC

  // Planted label signal.
  double source_alignment = 0.85;     // P(source from the label's community)
  double retweet_accept_aligned = 0.9;
  double retweet_accept_misaligned = 0.15;
  double retweet_delay_hours_true = 3.8;
  double retweet_delay_hours_fake = 2.3;
  double cascade_start_mean_hours = 8.0;
  double description_community_share = 0.35;

  EmbeddingMode embedding_mode = EmbeddingMode::seeded_random_unit;
  std::optional<std::uint64_t> embedding_seed;  // defaults to seed
  std::string embedding_file;                   // for load_file mode

  /// Throws InvalidInput for out-of-range values.
  void validate() const;
  /// Missing keys keep their defaults; unknown keys throw InvalidInput.
  static GenConfig from_json(const std::string& text);
  std::string to_json() const;
  std::uint64_t effective_embedding_seed() const { return embedding_seed.value_or(seed); }
};

/// Latent community per user: true = reliable.
struct SocialSample {
  SocialGraph graph;
  std::vector<bool> reliable;
};

/// Preferential-attachment follow graph with homophily between two latent communities,
/// plus profile and activity records.
SocialSample generate_social_graph(const GenConfig& cfg);

/// Stories and cascades spread over `social`. Text and descriptions are stored as tokens;
/// embeddings are left for embed_dataset.
Dataset generate_dataset(const GenConfig& cfg, const SocialSample& social);

/// generate_social_graph + generate_dataset + embed_dataset.
Dataset generate(const GenConfig& cfg, const WordVectors* vectors = nullptr);

/// Mean of per-sample ratios |tweets within h| / |tweets within 24 h| over samples
/// holding at least two tweets in their first 24 h. Each inner vector is one sample.
double coverage_fraction(const std::vector<std::vector<CascadeRecord>>& samples, double hours);

struct SummaryStats {
  std::size_t num_users = 0;
  std::size_t num_follows = 0;
  std::size_t num_urls = 0;
  std::size_t num_fake = 0;
  std::size_t num_cascades = 0;
  std::size_t num_tweets = 0;
  double edges_per_user = 0.0;
  double fake_fraction = 0.0;
  double mean_cascade_size = 0.0;
  std::map<std::size_t, std::size_t> cascade_size_histogram;
  std::vector<std::size_t> cascades_per_url;  // descending
  std::vector<double> cumulative_cascade_share;  // share held by the top-k URLs, k = 1..
  std::vector<double> coverage_cascade;  // hours 0..24
  std::vector<double> coverage_url;      // hours 0..24

  std::string to_json() const;
};

/// Throws InvalidInput for a dataset without cascades.
SummaryStats summary_stats(const Dataset& ds);

}  // namespace cascade_gnn
