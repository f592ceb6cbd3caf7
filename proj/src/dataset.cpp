#include "cascade_gnn/dataset.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cascade_gnn/common.hpp"
#include "cascade_gnn/propagation.hpp"

namespace cascade_gnn {

using nlohmann::json;
namespace fs = std::filesystem;

Embedding seeded_unit_vector(const std::string& token, std::uint64_t seed) {
  std::mt19937_64 rng(derive_seed(seed, fnv1a64(token)));
  std::normal_distribution<double> normal(0.0, 1.0);
  Embedding v(kEmbeddingDim);
  double norm2 = 0.0;
  for (auto& x : v) {
    x = normal(rng);
    norm2 += x * x;
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (auto& x : v) x *= inv;
  return v;
}

WordVectors WordVectors::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open embedding file: " + path.string());
  WordVectors wv;
  wv.mode_ = EmbeddingMode::load_file;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string token;
    if (!(ls >> token)) continue;
    Embedding v;
    v.reserve(kEmbeddingDim);
    double x;
    while (ls >> x) v.push_back(x);
    if (v.size() == 1 && lineno == 1) continue;  // "count dim" header
    if (v.size() != kEmbeddingDim)
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                    std::to_string(kEmbeddingDim) + " components");
    wv.table_.emplace(std::move(token), std::move(v));
  }
  return wv;
}

WordVectors WordVectors::seeded(std::uint64_t seed) {
  WordVectors wv;
  wv.mode_ = EmbeddingMode::seeded_random_unit;
  wv.seed_ = seed;
  return wv;
}

std::optional<Embedding> WordVectors::lookup(const std::string& token) const {
  if (mode_ == EmbeddingMode::seeded_random_unit) return seeded_unit_vector(token, seed_);
  auto it = table_.find(token);
  if (it == table_.end()) return std::nullopt;
  return it->second;
}

Embedding WordVectors::average(std::span<const std::string> tokens) const {
  Embedding acc(kEmbeddingDim, 0.0);
  std::size_t known = 0;
  for (const auto& t : tokens) {
    auto v = lookup(t);
    if (!v) continue;
    for (std::size_t k = 0; k < kEmbeddingDim; ++k) acc[k] += (*v)[k];
    ++known;
  }
  if (known > 0)
    for (auto& x : acc) x /= static_cast<double>(known);
  return acc;
}

Embedding WordVectors::embed_text(const std::string& text) const {
  std::istringstream in(text);
  std::vector<std::string> tokens;
  std::string t;
  while (in >> t) tokens.push_back(t);
  return average(tokens);
}

const CascadeRecord& Dataset::cascade(const std::string& cascade_id) const {
  auto it = cascade_index_.find(cascade_id);
  if (it == cascade_index_.end()) throw InvalidInput("unknown cascade: " + cascade_id);
  return cascades[it->second];
}

std::vector<CascadeRecord> Dataset::cascades_of(const UrlStory& story) const {
  std::vector<CascadeRecord> out;
  out.reserve(story.cascade_ids.size());
  for (const auto& id : story.cascade_ids) out.push_back(cascade(id));
  return out;
}

void Dataset::reindex() {
  cascade_index_.clear();
  for (std::size_t i = 0; i < cascades.size(); ++i) {
    if (!cascade_index_.emplace(cascades[i].cascade_id, i).second)
      throw InvalidInput("duplicate cascade id: " + cascades[i].cascade_id);
  }
}

std::string join_tokens(std::span<const std::string> tokens) {
  std::string joined;
  for (const auto& t : tokens) {
    if (!joined.empty()) joined += ' ';
    joined += t;
  }
  return joined;
}

TextEmbedder::TextEmbedder(const WordVectors& vectors) : vectors_(vectors) {}

const Embedding& TextEmbedder::operator()(const std::string& text) {
  auto it = cache_.find(text);
  if (it != cache_.end()) return it->second;
  return cache_.emplace(text, vectors_.embed_text(text)).first->second;
}

void embed_dataset(Dataset& ds, const WordVectors& vectors) {
  TextEmbedder embed(vectors);
  for (auto& u : ds.social.mutable_users()) u.description_embedding = embed(u.description);
  for (auto& c : ds.cascades) {
    for (auto& t : c.tweets) {
      t.text_embedding = embed(t.text);
      t.hashtag_embedding = embed(join_tokens(t.hashtags));
    }
  }
}

namespace {

std::ifstream open_in(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw IoError("cannot open " + p.string());
  return in;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + p.string());
  return out;
}

template <typename F>
void for_each_jsonl(const fs::path& p, F&& f) {
  auto in = open_in(p);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      f(json::parse(line));
    } catch (const json::exception& e) {
      throw IoError(p.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

Embedding read_embedding(const json& j) {
  auto v = j.get<Embedding>();
  if (v.size() != kEmbeddingDim) throw InvalidInput("inline embedding must have 200 components");
  return v;
}

json user_to_json(const User& u) {
  return json{{"user_id", u.user_id},
              {"geo_enabled", u.geo_enabled},
              {"background_picture", u.background_picture},
              {"default_profile", u.default_profile},
              {"default_profile_image", u.default_profile_image},
              {"verified", u.verified},
              {"lang", u.lang},
              {"description", u.description},
              {"statuses_count", u.statuses_count},
              {"favourites_count", u.favourites_count},
              {"listed_count", u.listed_count},
              {"followers_count", u.followers_count},
              {"friends_count", u.friends_count},
              {"created_at", u.created_at}};
}

User user_from_json(const json& j) {
  User u;
  u.user_id = j.at("user_id").get<std::string>();
  u.geo_enabled = j.value("geo_enabled", false);
  u.background_picture = j.value("background_picture", false);
  u.default_profile = j.value("default_profile", false);
  u.default_profile_image = j.value("default_profile_image", false);
  u.verified = j.value("verified", false);
  u.lang = j.value("lang", std::string{});
  u.description = j.value("description", std::string{});
  u.statuses_count = j.value("statuses_count", std::int64_t{0});
  u.favourites_count = j.value("favourites_count", std::int64_t{0});
  u.listed_count = j.value("listed_count", std::int64_t{0});
  u.followers_count = j.value("followers_count", std::int64_t{0});
  u.friends_count = j.value("friends_count", std::int64_t{0});
  u.created_at = j.value("created_at", Timestamp{0});
  for (auto c : {u.statuses_count, u.favourites_count, u.listed_count, u.followers_count, u.friends_count})
    if (c < 0) throw InvalidInput("negative count for user " + u.user_id);
  if (j.contains("description_embedding")) u.description_embedding = read_embedding(j["description_embedding"]);
  return u;
}

json tweet_to_json(const Tweet& t) {
  return json{{"tweet_id", t.tweet_id},
              {"author", t.author},
              {"timestamp", t.timestamp},
              {"is_source", t.is_source},
              {"retweeted_reply_count", t.retweeted_reply_count},
              {"retweeted_quote_count", t.retweeted_quote_count},
              {"retweeted_favorite_count", t.retweeted_favorite_count},
              {"retweeted_retweet_count", t.retweeted_retweet_count},
              {"source_device", t.source_device},
              {"text", t.text},
              {"hashtags", t.hashtags}};
}

Tweet tweet_from_json(const json& j, const std::string& cascade_id) {
  Tweet t;
  t.tweet_id = j.at("tweet_id").get<std::string>();
  t.author = j.at("author").get<std::string>();
  t.timestamp = j.at("timestamp").get<Timestamp>();
  t.cascade_id = cascade_id;
  t.is_source = j.value("is_source", false);
  t.retweeted_reply_count = j.value("retweeted_reply_count", std::int64_t{0});
  t.retweeted_quote_count = j.value("retweeted_quote_count", std::int64_t{0});
  t.retweeted_favorite_count = j.value("retweeted_favorite_count", std::int64_t{0});
  t.retweeted_retweet_count = j.value("retweeted_retweet_count", std::int64_t{0});
  t.source_device = j.value("source_device", std::string{});
  t.text = j.value("text", std::string{});
  t.hashtags = j.value("hashtags", std::vector<std::string>{});
  if (j.contains("text_embedding")) t.text_embedding = read_embedding(j["text_embedding"]);
  if (j.contains("hashtag_embedding")) t.hashtag_embedding = read_embedding(j["hashtag_embedding"]);
  return t;
}

}  // namespace

Dataset load_dataset(const fs::path& dir, const WordVectors* vectors) {
  if (!fs::is_directory(dir)) throw IoError("dataset directory not found: " + dir.string());
  Dataset ds;

  json meta = json::object();
  if (fs::exists(dir / "meta.json")) {
    auto in = open_in(dir / "meta.json");
    try {
      meta = json::parse(in);
    } catch (const json::exception& e) {
      throw IoError("meta.json: " + std::string(e.what()));
    }
  }
  ds.meta_json = meta.dump();

  std::optional<WordVectors> owned;
  if (!vectors) {
    const auto mode = meta.value("embedding_mode", std::string("seeded_random_unit"));
    if (mode == "load_file") {
      const auto file = meta.value("embedding_file", std::string{});
      if (file.empty()) throw IoError("meta.json requests load_file embeddings but names no file");
      owned = WordVectors::load(fs::path(file).is_absolute() ? fs::path(file) : dir / file);
    } else {
      owned = WordVectors::seeded(meta.value("embedding_seed", std::uint64_t{0}));
    }
    vectors = &*owned;
  }
  TextEmbedder embed(*vectors);

  // Inline embeddings in the files win over token averages.
  std::vector<User> users;
  for_each_jsonl(dir / "users.jsonl", [&](const json& j) {
    auto u = user_from_json(j);
    if (!j.contains("description_embedding")) u.description_embedding = embed(u.description);
    users.push_back(std::move(u));
  });

  std::vector<std::pair<std::string, std::string>> follows;
  {
    auto in = open_in(dir / "follows.csv");
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      if (header) {
        header = false;
        if (line.rfind("follower_id", 0) == 0) continue;
      }
      const auto comma = line.find(',');
      if (comma == std::string::npos) throw IoError("malformed follows.csv line: " + line);
      follows.emplace_back(line.substr(0, comma), line.substr(comma + 1));
    }
  }
  ds.social = SocialGraph(std::move(users), follows);

  for_each_jsonl(dir / "cascades.jsonl", [&](const json& j) {
    CascadeRecord c;
    c.cascade_id = j.at("cascade_id").get<std::string>();
    c.url_id = j.at("url_id").get<std::string>();
    for (const auto& tj : j.at("tweets")) {
      auto t = tweet_from_json(tj, c.cascade_id);
      if (!tj.contains("text_embedding")) t.text_embedding = embed(t.text);
      if (!tj.contains("hashtag_embedding")) t.hashtag_embedding = embed(join_tokens(t.hashtags));
      c.tweets.push_back(std::move(t));
    }
    validate_cascade(c);
    for (const auto& t : c.tweets) ds.social.index_of(t.author);
    ds.cascades.push_back(std::move(c));
  });
  for_each_jsonl(dir / "urls.jsonl", [&](const json& j) {
    UrlStory s;
    s.url_id = j.at("url_id").get<std::string>();
    s.label = parse_label(j.at("label").get<std::string>());
    s.first_seen = j.at("first_seen").get<Timestamp>();
    s.cascade_ids = j.at("cascade_ids").get<std::vector<std::string>>();
    ds.stories.push_back(std::move(s));
  });
  ds.reindex();
  for (const auto& s : ds.stories)
    for (const auto& id : s.cascade_ids)
      if (ds.cascade(id).url_id != s.url_id) throw InvalidInput("cascade " + id + " listed under wrong url");
  return ds;
}

void save_dataset(const Dataset& ds, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  {
    auto out = open_out(dir / "users.jsonl");
    for (const auto& u : ds.social.users()) out << user_to_json(u).dump() << '\n';
  }
  {
    auto out = open_out(dir / "follows.csv");
    out << "follower_id,followee_id\n";
    const auto& users = ds.social.users();
    for (UserIndex a = 0; a < users.size(); ++a)
      for (UserIndex b : ds.social.following(a)) out << users[a].user_id << ',' << users[b].user_id << '\n';
  }
  {
    auto out = open_out(dir / "cascades.jsonl");
    for (const auto& c : ds.cascades) {
      json tweets = json::array();
      for (const auto& t : c.tweets) tweets.push_back(tweet_to_json(t));
      out << json{{"cascade_id", c.cascade_id}, {"url_id", c.url_id}, {"tweets", std::move(tweets)}}.dump()
          << '\n';
    }
  }
  {
    auto out = open_out(dir / "urls.jsonl");
    for (const auto& s : ds.stories)
      out << json{{"url_id", s.url_id},
                  {"label", to_string(s.label)},
                  {"first_seen", s.first_seen},
                  {"cascade_ids", s.cascade_ids}}
                 .dump()
          << '\n';
  }
  {
    auto out = open_out(dir / "meta.json");
    out << json::parse(ds.meta_json).dump(2) << '\n';
  }
  for (const char* f : {"users.jsonl", "follows.csv", "cascades.jsonl", "urls.jsonl", "meta.json"})
    if (!fs::exists(dir / f)) throw IoError(std::string("failed writing ") + f);
}

std::map<std::string, double> compute_credibility(const Dataset& ds) {
  std::map<std::string, std::pair<std::set<std::string>, std::set<std::string>>> seen;
  std::unordered_map<std::string, Label> url_label;
  for (const auto& s : ds.stories) url_label[s.url_id] = s.label;
  for (const auto& c : ds.cascades) {
    auto it = url_label.find(c.url_id);
    if (it == url_label.end()) continue;
    for (const auto& t : c.tweets) {
      auto& entry = seen[t.author];
      (it->second == Label::true_news ? entry.first : entry.second).insert(c.url_id);
    }
  }
  std::map<std::string, double> out;
  for (const auto& [user, sets] : seen) out[user] = credibility_score(sets.first.size(), sets.second.size());
  return out;
}

}  // namespace cascade_gnn
