#include "cascade_gnn/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <unordered_set>

#include <json.hpp>

#include "cascade_gnn/common.hpp"
#include "cascade_gnn/propagation.hpp"

namespace cascade_gnn {

using nlohmann::json;

namespace {

constexpr std::uint64_t kStreamGraph = 1;
constexpr std::uint64_t kStreamProfiles = 2;
constexpr std::uint64_t kStreamLabels = 3;
constexpr std::uint64_t kStreamUrlBase = 1000;

const std::vector<std::string> kLangs = {"en", "en", "en", "en", "es", "fr", "de", "it", "pt"};
const std::vector<std::string> kDevices = {"Twitter for iPhone", "Twitter for Android", "Twitter Web Client",
                                           "TweetDeck", "Twitter for iPad", "IFTTT", "Buffer", "Hootsuite"};

std::string pad(std::size_t v, int width) {
  std::string s = std::to_string(v);
  if (static_cast<int>(s.size()) < width) s.insert(0, static_cast<std::size_t>(width) - s.size(), '0');
  return s;
}

std::string user_id(std::size_t i) { return "u" + pad(i, 6); }
std::string url_id(std::size_t i) { return "url" + pad(i, 4); }

bool coin(std::mt19937_64& rng, double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p; }

std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

double lognormal(std::mt19937_64& rng, double mean_log, double sigma) {
  return std::lognormal_distribution<double>(mean_log, sigma)(rng);
}

std::vector<double> power_law_weights(double exponent, std::size_t max_size) {
  std::vector<double> w(max_size);
  for (std::size_t s = 1; s <= max_size; ++s) w[s - 1] = std::pow(static_cast<double>(s), -exponent);
  return w;
}

}  // namespace

void GenConfig::validate() const {
  if (num_users == 0) throw InvalidInput("num_users must be positive");
  if (num_urls == 0) throw InvalidInput("num_urls must be positive");
  if (!(fake_fraction > 0.0 && fake_fraction < 1.0)) throw InvalidInput("fake_fraction must lie in (0, 1)");
  if (!(mean_cascades_per_url >= 1.0)) throw InvalidInput("mean_cascades_per_url must be at least 1");
  if (!(cascade_size_tail_exponent > 1.0)) throw InvalidInput("cascade_size_tail_exponent must exceed 1");
  if (fake_size_tail_exponent && !(*fake_size_tail_exponent > 1.0))
    throw InvalidInput("fake_size_tail_exponent must exceed 1");
  if (max_cascade_size == 0) throw InvalidInput("max_cascade_size must be positive");
  if (!(homophily_strength >= 0.0 && homophily_strength <= 1.0))
    throw InvalidInput("homophily_strength must lie in [0, 1]");
  if (!(reliable_fraction > 0.0 && unreliable_fraction > 0.0) ||
      std::abs(reliable_fraction + unreliable_fraction - 1.0) > 1e-9)
    throw InvalidInput("community fractions must be positive and sum to 1");
  if (!(reciprocity >= 0.0 && reciprocity <= 1.0)) throw InvalidInput("reciprocity must lie in [0, 1]");
  if (!(time_horizon_days > 0.0)) throw InvalidInput("time_horizon_days must be positive");
  for (double p : {source_alignment, retweet_accept_aligned, retweet_accept_misaligned, description_community_share})
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("probabilities must lie in [0, 1]");
  if (!(retweet_accept_aligned > 0.0)) throw InvalidInput("retweet_accept_aligned must be positive");
  if (!(retweet_delay_hours_true > 0.0 && retweet_delay_hours_fake > 0.0 && cascade_start_mean_hours > 0.0))
    throw InvalidInput("time scales must be positive");
  if (embedding_mode == EmbeddingMode::load_file && embedding_file.empty())
    throw InvalidInput("load_file embedding mode needs embedding_file");
}

std::string GenConfig::to_json() const {
  json j;
  j["seed"] = seed;
  j["num_users"] = num_users;
  j["num_urls"] = num_urls;
  j["fake_fraction"] = fake_fraction;
  j["mean_cascades_per_url"] = mean_cascades_per_url;
  j["cascade_size_tail_exponent"] = cascade_size_tail_exponent;
  j["fake_size_tail_exponent"] = fake_size_tail_exponent ? json(*fake_size_tail_exponent) : json(nullptr);
  j["max_cascade_size"] = max_cascade_size;
  j["homophily_strength"] = homophily_strength;
  j["reliable_fraction"] = reliable_fraction;
  j["unreliable_fraction"] = unreliable_fraction;
  j["follows_per_user"] = follows_per_user;
  j["reciprocity"] = reciprocity;
  j["time_horizon_days"] = time_horizon_days;
  j["start_time"] = start_time;
  j["source_alignment"] = source_alignment;
  j["retweet_accept_aligned"] = retweet_accept_aligned;
  j["retweet_accept_misaligned"] = retweet_accept_misaligned;
  j["retweet_delay_hours_true"] = retweet_delay_hours_true;
  j["retweet_delay_hours_fake"] = retweet_delay_hours_fake;
  j["cascade_start_mean_hours"] = cascade_start_mean_hours;
  j["description_community_share"] = description_community_share;
  j["embedding_mode"] = embedding_mode == EmbeddingMode::load_file ? "load_file" : "seeded_random_unit";
  j["embedding_seed"] = effective_embedding_seed();
  j["embedding_file"] = embedding_file;
  return j.dump();
}

GenConfig GenConfig::from_json(const std::string& text) {
  GenConfig c;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("generator config: ") + e.what());
  }
  if (!j.is_object()) throw InvalidInput("generator config must be a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "num_users") c.num_users = v.get<std::size_t>();
      else if (key == "num_urls") c.num_urls = v.get<std::size_t>();
      else if (key == "fake_fraction") c.fake_fraction = v.get<double>();
      else if (key == "mean_cascades_per_url") c.mean_cascades_per_url = v.get<double>();
      else if (key == "cascade_size_tail_exponent") c.cascade_size_tail_exponent = v.get<double>();
      else if (key == "fake_size_tail_exponent") {
        if (v.is_null()) c.fake_size_tail_exponent.reset();
        else c.fake_size_tail_exponent = v.get<double>();
      } else if (key == "max_cascade_size") c.max_cascade_size = v.get<std::size_t>();
      else if (key == "homophily_strength") c.homophily_strength = v.get<double>();
      else if (key == "reliable_fraction") c.reliable_fraction = v.get<double>();
      else if (key == "unreliable_fraction") c.unreliable_fraction = v.get<double>();
      else if (key == "follows_per_user") c.follows_per_user = v.get<std::size_t>();
      else if (key == "reciprocity") c.reciprocity = v.get<double>();
      else if (key == "time_horizon_days") c.time_horizon_days = v.get<double>();
      else if (key == "start_time") c.start_time = v.get<std::int64_t>();
      else if (key == "source_alignment") c.source_alignment = v.get<double>();
      else if (key == "retweet_accept_aligned") c.retweet_accept_aligned = v.get<double>();
      else if (key == "retweet_accept_misaligned") c.retweet_accept_misaligned = v.get<double>();
      else if (key == "retweet_delay_hours_true") c.retweet_delay_hours_true = v.get<double>();
      else if (key == "retweet_delay_hours_fake") c.retweet_delay_hours_fake = v.get<double>();
      else if (key == "cascade_start_mean_hours") c.cascade_start_mean_hours = v.get<double>();
      else if (key == "description_community_share") c.description_community_share = v.get<double>();
      else if (key == "embedding_mode") {
        const auto m = v.get<std::string>();
        if (m == "load_file") c.embedding_mode = EmbeddingMode::load_file;
        else if (m == "seeded_random_unit") c.embedding_mode = EmbeddingMode::seeded_random_unit;
        else throw InvalidInput("unknown embedding_mode " + m);
      } else if (key == "embedding_seed") {
        if (v.is_null()) c.embedding_seed.reset();
        else c.embedding_seed = v.get<std::uint64_t>();
      } else if (key == "embedding_file") c.embedding_file = v.get<std::string>();
      else throw InvalidInput("unknown generator config key " + key);
    }
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("generator config: ") + e.what());
  }
  c.validate();
  return c;
}

SocialSample generate_social_graph(const GenConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.num_users;
  std::mt19937_64 rng(derive_seed(cfg.seed, kStreamGraph));

  std::vector<bool> reliable(n);
  for (std::size_t i = 0; i < n; ++i) reliable[i] = coin(rng, cfg.reliable_fraction);

  // Each user appears once plus once per follower, so a uniform ticket draw is
  // proportional to in-degree + 1.
  std::vector<UserIndex> tickets;
  tickets.reserve(n * (cfg.follows_per_user + 2));
  std::set<std::pair<UserIndex, UserIndex>> edges;
  for (std::size_t i = 0; i < n; ++i) {
    const auto me = static_cast<UserIndex>(i);
    const std::size_t want = std::min(cfg.follows_per_user, i);
    std::unordered_set<UserIndex> chosen;
    if (want == i) {
      for (UserIndex t = 0; t < me; ++t) chosen.insert(t);
    } else {
      std::size_t guard = 0;
      while (chosen.size() < want && guard++ < 100 * want) {
        const UserIndex t = tickets[uniform_index(rng, tickets.size())];
        if (t == me || chosen.count(t)) continue;
        if (reliable[t] != reliable[i] && coin(rng, cfg.homophily_strength)) continue;
        chosen.insert(t);
      }
    }
    std::vector<UserIndex> targets(chosen.begin(), chosen.end());
    std::sort(targets.begin(), targets.end());
    tickets.push_back(me);
    for (UserIndex t : targets) {
      edges.insert({me, t});
      tickets.push_back(t);
      if (coin(rng, cfg.reciprocity) && edges.insert({t, me}).second) tickets.push_back(me);
    }
  }

  std::vector<std::size_t> indeg(n, 0), outdeg(n, 0);
  for (const auto& [a, b] : edges) {
    ++outdeg[a];
    ++indeg[b];
  }

  std::mt19937_64 prof(derive_seed(cfg.seed, kStreamProfiles));
  std::vector<User> users(n);
  const std::int64_t year = 365 * kSecondsPerDay;
  for (std::size_t i = 0; i < n; ++i) {
    User& u = users[i];
    const bool rel = reliable[i];
    u.user_id = user_id(i);
    u.geo_enabled = coin(prof, rel ? 0.45 : 0.25);
    u.background_picture = coin(prof, rel ? 0.75 : 0.55);
    u.default_profile = coin(prof, rel ? 0.30 : 0.55);
    u.default_profile_image = coin(prof, rel ? 0.02 : 0.08);
    u.verified = coin(prof, rel ? 0.10 : 0.02);
    u.lang = rel ? kLangs[uniform_index(prof, kLangs.size())] : (coin(prof, 0.9) ? "en" : "es");
    const std::size_t words = uniform_index(prof, 13);
    std::string desc;
    for (std::size_t w = 0; w < words; ++w) {
      if (!desc.empty()) desc += ' ';
      if (coin(prof, cfg.description_community_share))
        desc += (rel ? "rel" : "unr") + std::to_string(uniform_index(prof, 40));
      else
        desc += "w" + std::to_string(uniform_index(prof, 2000));
    }
    u.description = std::move(desc);
    u.statuses_count = static_cast<std::int64_t>(lognormal(prof, 8.0, 1.5));
    u.favourites_count = static_cast<std::int64_t>(lognormal(prof, 7.0, 1.8));
    u.listed_count = static_cast<std::int64_t>(lognormal(prof, 2.0, 1.5));
    const double scale = lognormal(prof, std::log(20.0), 0.5);
    u.followers_count = static_cast<std::int64_t>(std::llround(static_cast<double>(indeg[i]) * scale));
    u.friends_count =
        static_cast<std::int64_t>(std::llround(static_cast<double>(outdeg[i]) * lognormal(prof, std::log(20.0), 0.5)));
    const double age_years = rel ? 2.0 + 6.0 * std::uniform_real_distribution<double>(0, 1)(prof)
                                 : 0.2 + 4.0 * std::uniform_real_distribution<double>(0, 1)(prof);
    u.created_at = cfg.start_time - static_cast<std::int64_t>(age_years * static_cast<double>(year));
  }

  std::vector<std::pair<UserIndex, UserIndex>> edge_list(edges.begin(), edges.end());
  return {SocialGraph(std::move(users), edge_list), std::move(reliable)};
}

namespace {

struct UrlPlan {
  std::size_t index;
  Label label;
  Timestamp first_seen;
};

std::string make_text(std::mt19937_64& rng, std::size_t url) {
  const std::size_t words = 6 + uniform_index(rng, 7);
  std::string t;
  for (std::size_t w = 0; w < words; ++w) {
    if (!t.empty()) t += ' ';
    if (coin(rng, 0.5))
      t += "topic" + std::to_string(url) + "_" + std::to_string(uniform_index(rng, 6));
    else
      t += "w" + std::to_string(uniform_index(rng, 2000));
  }
  return t;
}

std::vector<std::string> make_hashtags(std::mt19937_64& rng, std::size_t url) {
  std::vector<std::string> tags;
  if (!coin(rng, 0.4)) return tags;
  const std::size_t k = 1 + uniform_index(rng, 2);
  for (std::size_t i = 0; i < k; ++i) {
    if (coin(rng, 0.6))
      tags.push_back("#tag" + std::to_string(url) + "_" + std::to_string(uniform_index(rng, 3)));
    else
      tags.push_back("#h" + std::to_string(uniform_index(rng, 300)));
  }
  return tags;
}

std::string pick_device(std::mt19937_64& rng, Label label) {
  // Mild skew: fake stories lean on automation tools.
  static const std::vector<double> w_true = {30, 28, 20, 8, 6, 2, 3, 3};
  static const std::vector<double> w_fake = {26, 24, 20, 10, 5, 5, 5, 5};
  const auto& w = label == Label::fake_news ? w_fake : w_true;
  return kDevices[std::discrete_distribution<std::size_t>(w.begin(), w.end())(rng)];
}

/// Grows one cascade over follow edges; returns the participating users in activation order.
std::vector<UserIndex> grow_cascade(std::mt19937_64& rng, const GenConfig& cfg, const SocialSample& social,
                                    const std::vector<UserIndex>& aligned_pool,
                                    const std::vector<UserIndex>& other_pool, bool want_reliable,
                                    std::size_t size) {
  std::vector<UserIndex> members;
  std::unordered_set<UserIndex> in;
  const auto& pool = coin(rng, cfg.source_alignment) ? aligned_pool : other_pool;
  const auto& src_pool = pool.empty() ? (aligned_pool.empty() ? other_pool : aligned_pool) : pool;
  const UserIndex src = src_pool[uniform_index(rng, src_pool.size())];
  members.push_back(src);
  in.insert(src);
  const std::size_t total = social.graph.size();
  size = std::min(size, total);
  std::size_t failures = 0;
  while (members.size() < size) {
    const UserIndex from = members[uniform_index(rng, members.size())];
    const auto fol = social.graph.followers(from);
    bool added = false;
    if (!fol.empty()) {
      const UserIndex c = fol[uniform_index(rng, fol.size())];
      if (!in.count(c)) {
        const bool aligned = social.reliable[c] == want_reliable;
        if (coin(rng, aligned ? cfg.retweet_accept_aligned : cfg.retweet_accept_misaligned)) {
          members.push_back(c);
          in.insert(c);
          added = true;
        }
      }
    }
    if (added) {
      failures = 0;
      continue;
    }
    if (++failures < 50) continue;
    failures = 0;
    // Fallback: an aligned user outside the follow neighbourhood, else anyone left.
    const auto& fb = aligned_pool.empty() ? other_pool : aligned_pool;
    std::optional<UserIndex> pick;
    for (int tries = 0; tries < 100 && !pick; ++tries) {
      const UserIndex c = fb[uniform_index(rng, fb.size())];
      if (!in.count(c)) pick = c;
    }
    for (UserIndex c = 0; c < total && !pick; ++c)
      if (!in.count(c)) pick = c;
    members.push_back(*pick);
    in.insert(*pick);
  }
  return members;
}

double truncated_exponential_hours(std::mt19937_64& rng, double mean, double upper) {
  std::exponential_distribution<double> d(1.0 / mean);
  for (;;) {
    const double x = d(rng);
    if (x < upper) return x;
  }
}

}  // namespace

Dataset generate_dataset(const GenConfig& cfg, const SocialSample& social) {
  cfg.validate();
  if (social.reliable.size() != social.graph.size()) throw InvalidInput("community labels do not match users");
  Dataset ds;
  ds.social = social.graph;

  std::vector<UserIndex> rel_pool, unr_pool;
  for (UserIndex u = 0; u < social.graph.size(); ++u) (social.reliable[u] ? rel_pool : unr_pool).push_back(u);

  // Exact fake count, assigned by a seeded permutation.
  std::mt19937_64 lab(derive_seed(cfg.seed, kStreamLabels));
  const auto num_fake = static_cast<std::size_t>(
      std::clamp<double>(std::round(cfg.fake_fraction * static_cast<double>(cfg.num_urls)), 0.0,
                         static_cast<double>(cfg.num_urls)));
  std::vector<std::size_t> perm(cfg.num_urls);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), lab);
  std::vector<Label> labels(cfg.num_urls, Label::true_news);
  for (std::size_t k = 0; k < num_fake; ++k) labels[perm[k]] = Label::fake_news;

  const auto w_true = power_law_weights(cfg.cascade_size_tail_exponent, cfg.max_cascade_size);
  const auto w_fake =
      power_law_weights(cfg.fake_size_tail_exponent.value_or(cfg.cascade_size_tail_exponent), cfg.max_cascade_size);
  const double horizon_s = cfg.time_horizon_days * static_cast<double>(kSecondsPerDay);

  for (std::size_t u = 0; u < cfg.num_urls; ++u) {
    std::mt19937_64 rng(derive_seed(cfg.seed, kStreamUrlBase + u));
    const Label label = labels[u];
    const bool fake = label == Label::fake_news;
    UrlStory story;
    story.url_id = url_id(u);
    story.label = label;
    story.first_seen =
        cfg.start_time + static_cast<Timestamp>(std::uniform_real_distribution<double>(0.0, horizon_s)(rng));

    const double sigma = 1.0;
    const double mult = lognormal(rng, -0.5 * sigma * sigma, sigma);
    const auto num_cascades =
        1 + static_cast<std::size_t>(std::llround((cfg.mean_cascades_per_url - 1.0) * mult));

    std::discrete_distribution<std::size_t> size_dist(fake ? w_fake.begin() : w_true.begin(),
                                                      fake ? w_fake.end() : w_true.end());
    const auto& aligned = fake ? unr_pool : rel_pool;
    const auto& other = fake ? rel_pool : unr_pool;
    const double delay_mean = fake ? cfg.retweet_delay_hours_fake : cfg.retweet_delay_hours_true;

    for (std::size_t c = 0; c < num_cascades; ++c) {
      CascadeRecord rec;
      rec.cascade_id = story.url_id + "-c" + pad(c, 4);
      rec.url_id = story.url_id;
      const std::size_t size = size_dist(rng) + 1;
      const auto members = grow_cascade(rng, cfg, social, aligned, other, !fake, size);

      Timestamp t0 = story.first_seen;
      if (c > 0) {
        const double h = std::exponential_distribution<double>(1.0 / cfg.cascade_start_mean_hours)(rng);
        t0 += std::max<Timestamp>(1, static_cast<Timestamp>(h * static_cast<double>(kSecondsPerHour)));
      }
      std::vector<Timestamp> offsets;
      for (std::size_t k = 1; k < members.size(); ++k) {
        const double h = truncated_exponential_hours(rng, delay_mean, 24.0);
        offsets.push_back(std::clamp<Timestamp>(static_cast<Timestamp>(h * static_cast<double>(kSecondsPerHour)), 1,
                                                24 * kSecondsPerHour - 1));
      }
      std::sort(offsets.begin(), offsets.end());

      const std::string text = make_text(rng, u);
      const auto tags = make_hashtags(rng, u);
      const auto n = static_cast<std::int64_t>(members.size());
      const auto favorites = static_cast<std::int64_t>(static_cast<double>(n) * lognormal(rng, 0.5, 0.7));
      const auto replies = static_cast<std::int64_t>(std::poisson_distribution<int>(0.3 * static_cast<double>(n))(rng));
      const auto quotes = static_cast<std::int64_t>(std::poisson_distribution<int>(0.1 * static_cast<double>(n))(rng));
      for (std::size_t k = 0; k < members.size(); ++k) {
        Tweet t;
        t.tweet_id = rec.cascade_id + "-t" + pad(k, 4);
        t.author = social.graph.user(members[k]).user_id;
        t.timestamp = t0 + (k == 0 ? 0 : offsets[k - 1]);
        t.cascade_id = rec.cascade_id;
        t.is_source = k == 0;
        t.retweeted_retweet_count = n - 1;
        t.retweeted_favorite_count = favorites;
        t.retweeted_reply_count = replies;
        t.retweeted_quote_count = quotes;
        t.source_device = pick_device(rng, label);
        t.text = text;
        t.hashtags = tags;
        rec.tweets.push_back(std::move(t));
      }
      story.cascade_ids.push_back(rec.cascade_id);
      ds.cascades.push_back(std::move(rec));
    }
    ds.stories.push_back(std::move(story));
  }

  json meta;
  meta["embedding_mode"] = cfg.embedding_mode == EmbeddingMode::load_file ? "load_file" : "seeded_random_unit";
  meta["embedding_seed"] = cfg.effective_embedding_seed();
  if (!cfg.embedding_file.empty()) meta["embedding_file"] = cfg.embedding_file;
  meta["generator"] = json::parse(cfg.to_json());
  ds.meta_json = meta.dump();
  ds.reindex();
  return ds;
}

Dataset generate(const GenConfig& cfg, const WordVectors* vectors) {
  const auto social = generate_social_graph(cfg);
  Dataset ds = generate_dataset(cfg, social);
  if (vectors) {
    embed_dataset(ds, *vectors);
  } else if (cfg.embedding_mode == EmbeddingMode::load_file) {
    embed_dataset(ds, WordVectors::load(cfg.embedding_file));
  } else {
    embed_dataset(ds, WordVectors::seeded(cfg.effective_embedding_seed()));
  }
  return ds;
}

double coverage_fraction(const std::vector<std::vector<CascadeRecord>>& samples, double hours) {
  double sum = 0.0;
  std::size_t count = 0;
  auto tweets = [](const std::vector<CascadeRecord>& cs) {
    std::size_t n = 0;
    for (const auto& c : cs) n += c.tweets.size();
    return n;
  };
  for (const auto& s : samples) {
    if (s.empty()) continue;
    const std::size_t day = tweets(truncate(s, 24.0));
    if (day < 2) continue;
    sum += static_cast<double>(tweets(truncate(s, hours))) / static_cast<double>(day);
    ++count;
  }
  return count == 0 ? 1.0 : sum / static_cast<double>(count);
}

SummaryStats summary_stats(const Dataset& ds) {
  if (ds.cascades.empty()) throw InvalidInput("dataset has no cascades");
  SummaryStats s;
  s.num_users = ds.social.size();
  s.num_follows = ds.social.num_follows();
  s.edges_per_user = s.num_users == 0 ? 0.0 : static_cast<double>(s.num_follows) / static_cast<double>(s.num_users);
  s.num_urls = ds.stories.size();
  for (const auto& st : ds.stories) s.num_fake += st.label == Label::fake_news ? 1 : 0;
  s.fake_fraction = s.num_urls == 0 ? 0.0 : static_cast<double>(s.num_fake) / static_cast<double>(s.num_urls);
  s.num_cascades = ds.cascades.size();
  for (const auto& c : ds.cascades) {
    s.num_tweets += c.tweets.size();
    ++s.cascade_size_histogram[c.tweets.size()];
  }
  s.mean_cascade_size = static_cast<double>(s.num_tweets) / static_cast<double>(s.num_cascades);

  for (const auto& st : ds.stories) s.cascades_per_url.push_back(st.cascade_ids.size());
  std::sort(s.cascades_per_url.rbegin(), s.cascades_per_url.rend());
  std::size_t run = 0;
  for (auto k : s.cascades_per_url) {
    run += k;
    s.cumulative_cascade_share.push_back(static_cast<double>(run) / static_cast<double>(s.num_cascades));
  }

  std::vector<std::vector<CascadeRecord>> cascade_view, url_view;
  for (const auto& c : ds.cascades) cascade_view.push_back({c});
  for (const auto& st : ds.stories) url_view.push_back(ds.cascades_of(st));
  for (int h = 0; h <= 24; ++h) {
    s.coverage_cascade.push_back(coverage_fraction(cascade_view, h));
    s.coverage_url.push_back(coverage_fraction(url_view, h));
  }
  return s;
}

std::string SummaryStats::to_json() const {
  json j;
  j["num_users"] = num_users;
  j["num_follows"] = num_follows;
  j["edges_per_user"] = edges_per_user;
  j["num_urls"] = num_urls;
  j["num_fake"] = num_fake;
  j["fake_fraction"] = fake_fraction;
  j["num_cascades"] = num_cascades;
  j["num_tweets"] = num_tweets;
  j["mean_cascade_size"] = mean_cascade_size;
  json hist = json::object();
  for (const auto& [k, v] : cascade_size_histogram) hist[std::to_string(k)] = v;
  j["cascade_size_histogram"] = hist;
  j["cascades_per_url"] = cascades_per_url;
  j["cumulative_cascade_share"] = cumulative_cascade_share;
  j["coverage_cascade"] = coverage_cascade;
  j["coverage_url"] = coverage_url;
  return j.dump(2);
}

}  // namespace cascade_gnn
