#include "cascade_gnn/data_model.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>

#include "cascade_gnn/common.hpp"

namespace cascade_gnn {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

SocialGraph::SocialGraph(std::vector<User> users,
                         std::span<const std::pair<std::string, std::string>> follows)
    : users_(std::move(users)) {
  index_users();
  std::vector<std::pair<UserIndex, UserIndex>> edges;
  edges.reserve(follows.size());
  for (const auto& [a, b] : follows) {
    auto ia = find(a);
    auto ib = find(b);
    if (!ia || !ib) throw InvalidInput("follow pair references unknown user: " + a + " -> " + b);
    edges.emplace_back(*ia, *ib);
  }
  add_edges(edges);
}

SocialGraph::SocialGraph(std::vector<User> users,
                         std::span<const std::pair<UserIndex, UserIndex>> follows)
    : users_(std::move(users)) {
  index_users();
  add_edges(follows);
}

void SocialGraph::index_users() {
  index_.reserve(users_.size());
  for (std::size_t i = 0; i < users_.size(); ++i) {
    if (!index_.emplace(users_[i].user_id, static_cast<UserIndex>(i)).second)
      throw InvalidInput("duplicate user id: " + users_[i].user_id);
  }
  following_.assign(users_.size(), {});
  followers_.assign(users_.size(), {});
}

void SocialGraph::add_edges(std::span<const std::pair<UserIndex, UserIndex>> follows) {
  for (const auto& [a, b] : follows) {
    if (a >= users_.size() || b >= users_.size()) throw InvalidInput("follow pair out of range");
    if (a == b) throw InvalidInput("self-follow: " + users_[a].user_id);
    following_[a].push_back(b);
    followers_[b].push_back(a);
  }
  num_follows_ = 0;
  for (auto* lists : {&following_, &followers_}) {
    for (auto& l : *lists) {
      std::sort(l.begin(), l.end());
      l.erase(std::unique(l.begin(), l.end()), l.end());
    }
  }
  for (const auto& l : following_) num_follows_ += l.size();
}

std::optional<UserIndex> SocialGraph::find(const std::string& user_id) const {
  auto it = index_.find(user_id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

UserIndex SocialGraph::index_of(const std::string& user_id) const {
  auto i = find(user_id);
  if (!i) throw InvalidInput("unknown user: " + user_id);
  return *i;
}

bool SocialGraph::follows(UserIndex a, UserIndex b) const {
  const auto& l = following_[a];
  return std::binary_search(l.begin(), l.end(), b);
}

void validate_cascade(const CascadeRecord& cascade) {
  if (cascade.tweets.empty()) throw InvalidInput("empty cascade: " + cascade.cascade_id);
  if (!cascade.tweets.front().is_source)
    throw InvalidInput("cascade does not start with its source tweet: " + cascade.cascade_id);
  for (std::size_t k = 1; k < cascade.tweets.size(); ++k) {
    if (cascade.tweets[k].is_source)
      throw InvalidInput("cascade has more than one source: " + cascade.cascade_id);
    if (cascade.tweets[k].timestamp < cascade.tweets[k - 1].timestamp)
      throw InvalidInput("cascade tweets out of time order: " + cascade.cascade_id);
  }
}

GroupSet GroupSet::of(std::initializer_list<FeatureGroup> groups) {
  GroupSet s = none();
  for (auto g : groups) s = s.with(g);
  return s;
}

std::size_t GroupSet::count() const { return static_cast<std::size_t>(std::popcount(bits_)); }

std::vector<FeatureGroup> GroupSet::groups() const {
  std::vector<FeatureGroup> out;
  for (auto g : kAllGroups)
    if (contains(g)) out.push_back(g);
  return out;
}

std::string to_string(FeatureGroup g) {
  switch (g) {
    case FeatureGroup::user_profile: return "user_profile";
    case FeatureGroup::user_activity: return "user_activity";
    case FeatureGroup::network_spreading: return "network_spreading";
    case FeatureGroup::content: return "content";
  }
  return "?";
}

std::string to_string(Scope s) { return s == Scope::url_wise ? "url" : "cascade"; }

std::string to_string(Label l) { return l == Label::fake_news ? "fake" : "true"; }

FeatureGroup parse_feature_group(const std::string& s) {
  for (auto g : kAllGroups)
    if (to_string(g) == s) return g;
  throw InvalidInput("unknown feature group: " + s);
}

Scope parse_scope(const std::string& s) {
  if (s == "url" || s == "url_wise") return Scope::url_wise;
  if (s == "cascade" || s == "cascade_wise") return Scope::cascade_wise;
  throw InvalidInput("unknown scope: " + s);
}

Label parse_label(const std::string& s) {
  if (s == "true" || s == "true_news") return Label::true_news;
  if (s == "fake" || s == "fake_news") return Label::fake_news;
  throw InvalidInput("unknown label: " + s);
}

FeatureSchema::FeatureSchema(std::vector<FeatureSlice> slices) : slices_(std::move(slices)) {
  std::size_t next = 0;
  for (const auto& s : slices_) {
    if (s.offset != next || s.width == 0)
      throw InvalidInput("feature slices must be contiguous and non-empty: " + s.name);
    next += s.width;
  }
  width_ = next;
}

const FeatureSchema& FeatureSchema::standard() {
  static const FeatureSchema schema = [] {
    using G = FeatureGroup;
    const std::pair<const char*, std::pair<G, std::size_t>> layout[] = {
        {"geo_enabled", {G::user_profile, 1}},
        {"background_picture", {G::user_profile, 1}},
        {"default_profile", {G::user_profile, 1}},
        {"default_profile_image", {G::user_profile, 1}},
        {"verified", {G::user_profile, 1}},
        {"lang", {G::user_profile, 8}},
        {"description", {G::user_profile, kEmbeddingDim}},
        {"account_age", {G::user_profile, 1}},
        {"statuses_count", {G::user_activity, 1}},
        {"favourites_count", {G::user_activity, 1}},
        {"listed_count", {G::user_activity, 1}},
        {"followers_count", {G::network_spreading, 1}},
        {"friends_count", {G::network_spreading, 1}},
        {"is_source", {G::network_spreading, 1}},
        {"time_delta", {G::network_spreading, 1}},
        {"retweeted_reply_count", {G::network_spreading, 1}},
        {"retweeted_quote_count", {G::network_spreading, 1}},
        {"retweeted_favorite_count", {G::network_spreading, 1}},
        {"retweeted_retweet_count", {G::network_spreading, 1}},
        {"source_device", {G::network_spreading, 8}},
        {"text", {G::content, kEmbeddingDim}},
        {"hashtags", {G::content, kEmbeddingDim}},
    };
    std::vector<FeatureSlice> slices;
    std::size_t offset = 0;
    for (const auto& [name, spec] : layout) {
      slices.push_back({name, spec.first, offset, spec.second});
      offset += spec.second;
    }
    return FeatureSchema(std::move(slices));
  }();
  return schema;
}

const FeatureSlice& FeatureSchema::slice(std::string_view name) const {
  for (const auto& s : slices_)
    if (s.name == name) return s;
  throw InvalidInput("feature schema has no slice named " + std::string(name));
}

std::size_t FeatureSchema::group_width(FeatureGroup g) const {
  std::size_t w = 0;
  for (const auto& s : slices_)
    if (s.group == g) w += s.width;
  return w;
}

std::vector<FeatureGroup> FeatureSchema::column_groups() const {
  std::vector<FeatureGroup> cols(width_);
  for (const auto& s : slices_) std::fill_n(cols.begin() + static_cast<std::ptrdiff_t>(s.offset), s.width, s.group);
  return cols;
}

std::array<double, 4> EdgeFlags::as_vector() const {
  return {i_follows_j ? 1.0 : 0.0, j_follows_i ? 1.0 : 0.0, spread_i_to_j ? 1.0 : 0.0,
          spread_j_to_i ? 1.0 : 0.0};
}

}  // namespace cascade_gnn
