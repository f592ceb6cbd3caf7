#include "cascade_gnn/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "cascade_gnn/common.hpp"

namespace cascade_gnn {

namespace {

double log_count(std::int64_t count, const char* what) {
  if (count < 0) throw InvalidInput(std::string("negative count: ") + what);
  return std::log1p(static_cast<double>(count));
}

void copy_embedding(const Embedding& e, std::span<double> dst, const char* what) {
  if (e.size() != dst.size()) throw InvalidInput(std::string("embedding has wrong width: ") + what);
  for (std::size_t k = 0; k < e.size(); ++k) {
    if (!std::isfinite(e[k])) throw InvalidInput(std::string("non-finite embedding component: ") + what);
    dst[k] = e[k];
  }
}

}  // namespace

SpreadingTree estimate_spreading_tree(const CascadeRecord& cascade, const SocialGraph& social) {
  validate_cascade(cascade);
  const auto n = cascade.tweets.size();
  std::vector<UserIndex> authors(n);
  for (std::size_t k = 0; k < n; ++k) authors[k] = social.index_of(cascade.tweets[k].author);

  SpreadingTree tree;
  tree.parent.assign(n, std::nullopt);
  for (std::size_t t = 1; t < n; ++t) {
    for (std::size_t k = t; k-- > 0;) {
      if (social.follows(authors[t], authors[k])) {
        tree.parent[t] = k;
        break;
      }
    }
    if (tree.parent[t]) continue;
    std::size_t best = 0;
    for (std::size_t k = 1; k < t; ++k) {
      if (social.user(authors[k]).followers_count > social.user(authors[best]).followers_count) best = k;
    }
    tree.parent[t] = best;
  }
  return tree;
}

std::array<double, 4> encode_edge_features(const EdgeFlags& flags) { return flags.as_vector(); }

std::size_t category_bucket(std::string_view value) { return fnv1a64(value) % 8; }

std::vector<double> encode_node_features(const Tweet& tweet, const User& user,
                                         Timestamp cascade_root_time, const FeatureSchema& schema) {
  std::vector<double> x(schema.width(), 0.0);
  auto put = [&](std::string_view name, double v) { x[schema.slice(name).offset] = v; };
  auto put_bucket = [&](std::string_view name, std::string_view value) {
    const auto& s = schema.slice(name);
    x[s.offset + category_bucket(value) % s.width] = 1.0;
  };
  auto span_of = [&](std::string_view name) {
    const auto& s = schema.slice(name);
    return std::span<double>(x.data() + s.offset, s.width);
  };

  put("geo_enabled", user.geo_enabled ? 1.0 : 0.0);
  put("background_picture", user.background_picture ? 1.0 : 0.0);
  put("default_profile", user.default_profile ? 1.0 : 0.0);
  put("default_profile_image", user.default_profile_image ? 1.0 : 0.0);
  put("verified", user.verified ? 1.0 : 0.0);
  put_bucket("lang", user.lang);
  copy_embedding(user.description_embedding, span_of("description"), "description");
  put("account_age", static_cast<double>(tweet.timestamp - user.created_at) / kSecondsPerDay / 365.0);

  put("statuses_count", log_count(user.statuses_count, "statuses_count"));
  put("favourites_count", log_count(user.favourites_count, "favourites_count"));
  put("listed_count", log_count(user.listed_count, "listed_count"));

  put("followers_count", log_count(user.followers_count, "followers_count"));
  put("friends_count", log_count(user.friends_count, "friends_count"));
  put("is_source", tweet.is_source ? 1.0 : 0.0);
  const auto delta = tweet.timestamp - cascade_root_time;
  if (delta < 0) throw InvalidInput("tweet precedes its cascade root: " + tweet.tweet_id);
  put("time_delta", std::log1p(static_cast<double>(delta) / kSecondsPerHour));
  put("retweeted_reply_count", log_count(tweet.retweeted_reply_count, "reply_count"));
  put("retweeted_quote_count", log_count(tweet.retweeted_quote_count, "quote_count"));
  put("retweeted_favorite_count", log_count(tweet.retweeted_favorite_count, "favorite_count"));
  put("retweeted_retweet_count", log_count(tweet.retweeted_retweet_count, "retweet_count"));
  put_bucket("source_device", tweet.source_device);

  copy_embedding(tweet.text_embedding, span_of("text"), "text");
  copy_embedding(tweet.hashtag_embedding, span_of("hashtags"), "hashtags");
  return x;
}

PropagationGraph build_propagation_graph(const UrlStory& story,
                                         std::span<const CascadeRecord> cascades,
                                         const SocialGraph& social, Scope scope,
                                         const FeatureSchema& schema) {
  if (cascades.empty()) throw InvalidInput("story has no cascades in scope: " + story.url_id);
  if (scope == Scope::cascade_wise && cascades.size() != 1)
    throw InvalidInput("cascade-wise graph needs exactly one cascade");

  std::vector<const CascadeRecord*> ordered;
  for (const auto& c : cascades) ordered.push_back(&c);
  std::sort(ordered.begin(), ordered.end(),
            [](const auto* a, const auto* b) { return a->cascade_id < b->cascade_id; });

  PropagationGraph g;
  g.sample_id = scope == Scope::url_wise ? story.url_id : ordered.front()->cascade_id;
  g.url_id = story.url_id;
  g.label = story.label;
  g.scope = scope;

  std::size_t total = 0;
  for (const auto* c : ordered) total += c->tweets.size();
  g.nodes.reserve(total);
  g.node_authors.reserve(total);
  g.node_features.rows = total;
  g.node_features.cols = schema.width();
  g.node_features.values.assign(total * schema.width(), 0.0);

  std::vector<UserIndex> authors;
  authors.reserve(total);
  std::map<std::pair<std::size_t, std::size_t>, EdgeFlags> edges;

  for (const auto* c : ordered) {
    const auto tree = estimate_spreading_tree(*c, social);
    const std::size_t base = g.nodes.size();
    for (std::size_t k = 0; k < c->tweets.size(); ++k) {
      const auto& tw = c->tweets[k];
      const auto a = social.index_of(tw.author);
      const auto row = encode_node_features(tw, social.user(a), c->root_time(), schema);
      std::copy(row.begin(), row.end(), g.node_features.row(g.nodes.size()).begin());
      g.nodes.push_back(tw.tweet_id);
      g.node_authors.push_back(tw.author);
      authors.push_back(a);
      if (const auto p = tree.parent[k]) edges[{base + *p, base + k}].spread_i_to_j = true;
    }
  }

  std::unordered_map<UserIndex, std::vector<std::size_t>> nodes_by_author;
  for (std::size_t i = 0; i < authors.size(); ++i) nodes_by_author[authors[i]].push_back(i);
  for (std::size_t i = 0; i < authors.size(); ++i) {
    for (UserIndex followee : social.following(authors[i])) {
      auto it = nodes_by_author.find(followee);
      if (it == nodes_by_author.end()) continue;
      for (std::size_t j : it->second) {
        if (i < j)
          edges[{i, j}].i_follows_j = true;
        else
          edges[{j, i}].j_follows_i = true;
      }
    }
  }

  g.edges.reserve(edges.size());
  for (const auto& [key, flags] : edges) g.edges.push_back({key.first, key.second, flags});
  return g;
}

std::vector<CascadeRecord> truncate(std::span<const CascadeRecord> cascades, double hours) {
  if (!(hours >= 0.0)) throw InvalidInput("diffusion window must be non-negative");
  std::vector<CascadeRecord> out;
  if (cascades.empty()) return out;
  Timestamp t0 = 0;
  bool any = false;
  for (const auto& c : cascades) {
    if (c.tweets.empty()) continue;
    t0 = any ? std::min(t0, c.root_time()) : c.root_time();
    any = true;
  }
  const double window = hours * static_cast<double>(kSecondsPerHour);
  for (const auto& c : cascades) {
    CascadeRecord kept{c.cascade_id, c.url_id, {}};
    for (const auto& tw : c.tweets) {
      if (static_cast<double>(tw.timestamp - t0) <= window && tw.timestamp >= t0) kept.tweets.push_back(tw);
    }
    if (!kept.tweets.empty()) out.push_back(std::move(kept));
  }
  return out;
}

double credibility_score(std::size_t true_stories, std::size_t fake_stories) {
  const auto total = true_stories + fake_stories;
  if (total == 0) throw InvalidInput("credibility needs at least one labeled story");
  return (static_cast<double>(true_stories) - static_cast<double>(fake_stories)) / static_cast<double>(total);
}

}  // namespace cascade_gnn
