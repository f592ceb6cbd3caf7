#pragma once

#include <array>
#include <span>
#include <vector>

#include "cascade_gnn/data_model.hpp"

namespace cascade_gnn {

/// Assigns each retweet its most plausible predecessor in the cascade.
///
/// A retweet whose author follows at least one earlier author is attached to the
/// latest such earlier tweet. Otherwise it is attached to the earlier tweet whose
/// author has the most followers (earliest tweet on ties).
/// Throws InvalidInput on empty or unordered cascades and unknown authors.
SpreadingTree estimate_spreading_tree(const CascadeRecord& cascade, const SocialGraph& social);

/// Flags in fixed order (i_follows_j, j_follows_i, spread_i_to_j, spread_j_to_i).
std::array<double, 4> encode_edge_features(const EdgeFlags& flags);

/// Node feature vector laid out per `schema` (which must carry the standard slice names).
/// `cascade_root_time` is the timestamp of the tweet's cascade source.
std::vector<double> encode_node_features(const Tweet& tweet, const User& user,
                                         Timestamp cascade_root_time, const FeatureSchema& schema);

/// Stable 8-way bucket for categorical strings.
std::size_t category_bucket(std::string_view value);

/// Tweet-level graph whose edges union follow relations and estimated spreading links.
///
/// url_wise uses every cascade passed in; cascade_wise requires exactly one.
/// Cascades are ordered by id first, so the result does not depend on input order.
PropagationGraph build_propagation_graph(const UrlStory& story,
                                         std::span<const CascadeRecord> cascades,
                                         const SocialGraph& social, Scope scope,
                                         const FeatureSchema& schema);

/// Keeps tweets with timestamp in [t, t + hours], t being the earliest tweet among
/// `cascades`. Cascades left empty are dropped; every kept cascade keeps its source.
std::vector<CascadeRecord> truncate(std::span<const CascadeRecord> cascades, double hours);

/// (true - fake) / (true + fake). Throws InvalidInput when both counts are zero.
double credibility_score(std::size_t true_stories, std::size_t fake_stories);

}  // namespace cascade_gnn
