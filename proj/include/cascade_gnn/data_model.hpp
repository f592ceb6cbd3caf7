#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace cascade_gnn {

inline constexpr std::size_t kEmbeddingDim = 200;

using Embedding = std::vector<double>;
using Timestamp = std::int64_t;  // UTC seconds
using UserIndex = std::uint32_t;

struct User {
  std::string user_id;
  bool geo_enabled = false;
  bool background_picture = false;
  bool default_profile = false;
  bool default_profile_image = false;
  bool verified = false;
  std::string lang;
  std::string description;  // raw tokens; embedded at load time
  Embedding description_embedding = Embedding(kEmbeddingDim, 0.0);
  std::int64_t statuses_count = 0;
  std::int64_t favourites_count = 0;
  std::int64_t listed_count = 0;
  std::int64_t followers_count = 0;
  std::int64_t friends_count = 0;
  Timestamp created_at = 0;
};

struct Tweet {
  std::string tweet_id;
  std::string author;  // user_id
  Timestamp timestamp = 0;
  std::string cascade_id;
  bool is_source = false;
  std::int64_t retweeted_reply_count = 0;
  std::int64_t retweeted_quote_count = 0;
  std::int64_t retweeted_favorite_count = 0;
  std::int64_t retweeted_retweet_count = 0;
  std::string source_device;
  std::string text;
  std::vector<std::string> hashtags;
  Embedding text_embedding = Embedding(kEmbeddingDim, 0.0);
  Embedding hashtag_embedding = Embedding(kEmbeddingDim, 0.0);
};

/// Users plus the directed follow relation; `follows(a, b)` means a follows b.
class SocialGraph {
 public:
  SocialGraph() = default;
  /// Throws InvalidInput on duplicate ids, self-follows or unknown endpoints.
  SocialGraph(std::vector<User> users,
              std::span<const std::pair<std::string, std::string>> follows);
  SocialGraph(std::vector<User> users,
              std::span<const std::pair<UserIndex, UserIndex>> follows);

  const std::vector<User>& users() const { return users_; }
  std::vector<User>& mutable_users() { return users_; }
  std::size_t size() const { return users_.size(); }
  std::size_t num_follows() const { return num_follows_; }

  std::optional<UserIndex> find(const std::string& user_id) const;
  /// Throws InvalidInput for unknown ids.
  UserIndex index_of(const std::string& user_id) const;
  const User& user(UserIndex i) const { return users_[i]; }

  bool follows(UserIndex a, UserIndex b) const;
  /// Sorted users that `a` follows.
  std::span<const UserIndex> following(UserIndex a) const { return following_[a]; }
  /// Sorted users following `b`.
  std::span<const UserIndex> followers(UserIndex b) const { return followers_[b]; }

 private:
  void index_users();
  void add_edges(std::span<const std::pair<UserIndex, UserIndex>> follows);

  std::vector<User> users_;
  std::unordered_map<std::string, UserIndex> index_;
  std::vector<std::vector<UserIndex>> following_;
  std::vector<std::vector<UserIndex>> followers_;
  std::size_t num_follows_ = 0;
};

struct CascadeRecord {
  std::string cascade_id;
  std::string url_id;
  std::vector<Tweet> tweets;  // time-ordered, source first

  Timestamp root_time() const { return tweets.front().timestamp; }
};

/// Throws InvalidInput unless the cascade is non-empty, sorted and has exactly one leading source.
void validate_cascade(const CascadeRecord& cascade);

enum class Label : std::uint8_t { true_news = 0, fake_news = 1 };

struct UrlStory {
  std::string url_id;
  Label label = Label::true_news;
  Timestamp first_seen = 0;
  std::vector<std::string> cascade_ids;
};

enum class Scope : std::uint8_t { url_wise, cascade_wise };

enum class FeatureGroup : std::uint8_t { user_profile = 0, user_activity = 1, network_spreading = 2, content = 3 };
inline constexpr std::array<FeatureGroup, 4> kAllGroups = {
    FeatureGroup::user_profile, FeatureGroup::user_activity, FeatureGroup::network_spreading,
    FeatureGroup::content};

/// Bit set over the four feature groups.
class GroupSet {
 public:
  constexpr GroupSet() = default;
  static constexpr GroupSet all() { return GroupSet(0b1111); }
  static constexpr GroupSet none() { return GroupSet(0); }
  static GroupSet of(std::initializer_list<FeatureGroup> groups);

  constexpr bool contains(FeatureGroup g) const { return bits_ & bit(g); }
  constexpr GroupSet with(FeatureGroup g) const { return GroupSet(bits_ | bit(g)); }
  constexpr GroupSet without(FeatureGroup g) const { return GroupSet(bits_ & ~bit(g)); }
  constexpr bool empty() const { return bits_ == 0; }
  std::size_t count() const;
  std::vector<FeatureGroup> groups() const;
  constexpr std::uint8_t bits() const { return bits_; }
  friend constexpr bool operator==(GroupSet, GroupSet) = default;

 private:
  constexpr explicit GroupSet(std::uint8_t bits) : bits_(bits) {}
  static constexpr std::uint8_t bit(FeatureGroup g) { return static_cast<std::uint8_t>(1u << static_cast<unsigned>(g)); }
  std::uint8_t bits_ = 0b1111;
};

std::string to_string(FeatureGroup g);
std::string to_string(Scope s);
std::string to_string(Label l);
FeatureGroup parse_feature_group(const std::string& s);
Scope parse_scope(const std::string& s);
Label parse_label(const std::string& s);

struct FeatureSlice {
  std::string name;
  FeatureGroup group;
  std::size_t offset;
  std::size_t width;
};

/// Ordered, disjoint, covering column layout of the node-feature matrix.
class FeatureSchema {
 public:
  /// Throws InvalidInput unless slices are contiguous from column 0.
  explicit FeatureSchema(std::vector<FeatureSlice> slices);
  /// The 633-column layout used for tweet nodes.
  static const FeatureSchema& standard();

  std::size_t width() const { return width_; }
  std::span<const FeatureSlice> slices() const { return slices_; }
  /// Throws InvalidInput when no slice has this name.
  const FeatureSlice& slice(std::string_view name) const;
  std::size_t group_width(FeatureGroup g) const;
  /// Per-column group tag, length width().
  std::vector<FeatureGroup> column_groups() const;

 private:
  std::vector<FeatureSlice> slices_;
  std::size_t width_ = 0;
};

/// Relation flags of an undirected tweet pair (i, j), stored with i < j.
struct EdgeFlags {
  bool i_follows_j = false;
  bool j_follows_i = false;
  bool spread_i_to_j = false;
  bool spread_j_to_i = false;

  bool any() const { return i_follows_j || j_follows_i || spread_i_to_j || spread_j_to_i; }
  /// Flags seen from the other endpoint.
  EdgeFlags reversed() const { return {j_follows_i, i_follows_j, spread_j_to_i, spread_i_to_j}; }
  std::array<double, 4> as_vector() const;
  friend bool operator==(const EdgeFlags&, const EdgeFlags&) = default;
};

struct GraphEdge {
  std::size_t i;
  std::size_t j;
  EdgeFlags flags;
  friend bool operator==(const GraphEdge&, const GraphEdge&) = default;
};

/// Dense row-major node-feature matrix.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  double& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  std::span<const double> row(std::size_t r) const { return {values.data() + r * cols, cols}; }
  std::span<double> row(std::size_t r) { return {values.data() + r * cols, cols}; }
};

struct PropagationGraph {
  std::string sample_id;  // url_id or cascade_id
  std::string url_id;
  std::vector<std::string> nodes;         // tweet ids
  std::vector<std::string> node_authors;  // user ids, parallel to nodes
  FeatureMatrix node_features;
  std::vector<GraphEdge> edges;  // i < j, sorted, unique
  Label label = Label::true_news;
  Scope scope = Scope::url_wise;
  double diffusion_window_hours = 24.0;

  std::size_t num_nodes() const { return nodes.size(); }
};

/// Estimated predecessor of every retweet, indexed by position in the cascade.
struct SpreadingTree {
  std::vector<std::optional<std::size_t>> parent;  // parent[0] is empty (source)
};

}  // namespace cascade_gnn
