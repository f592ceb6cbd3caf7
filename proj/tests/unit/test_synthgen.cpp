#include <doctest.h>

#include <cmath>
#include <set>

#include "cascade_gnn/synthgen.hpp"
#include "support.hpp"

using namespace cascade_gnn;
using namespace test_support;

namespace {

GenConfig small(std::uint64_t seed = 1) {
  GenConfig g;
  g.seed = seed;
  g.num_users = 2000;
  g.num_urls = 80;
  return g;
}

double cross_fraction(const SocialSample& s) {
  std::size_t cross = 0, total = 0;
  for (UserIndex i = 0; i < s.graph.size(); ++i)
    for (UserIndex j : s.graph.following(i)) {
      ++total;
      cross += s.reliable[i] != s.reliable[j] ? 1 : 0;
    }
  return static_cast<double>(cross) / static_cast<double>(total);
}

Dataset one_cascade_per_url(std::size_t urls) {
  Dataset ds;
  ds.social = SocialGraph({make_user("a")}, std::vector<std::pair<std::string, std::string>>{});
  for (std::size_t k = 0; k < urls; ++k) {
    const auto id = std::to_string(k);
    UrlStory s;
    s.url_id = "u" + id;
    s.cascade_ids = {"c" + id};
    ds.stories.push_back(s);
    ds.cascades.push_back({"c" + id, "u" + id, {make_tweet("t" + id, "a", 0, "c" + id, true)}});
  }
  ds.reindex();
  return ds;
}

}  // namespace

TEST_SUITE("synthgen") {
  TEST_CASE("generation is deterministic in the seed") {
    const auto a = generate(small(3)), b = generate(small(3)), c = generate(small(4));
    CHECK(a.cascades.size() == b.cascades.size());
    CHECK(a.social.num_follows() == b.social.num_follows());
    for (std::size_t k = 0; k < a.cascades.size(); ++k) {
      CHECK(a.cascades[k].tweets.size() == b.cascades[k].tweets.size());
      CHECK(a.cascades[k].tweets.back().timestamp == b.cascades[k].tweets.back().timestamp);
    }
    CHECK(a.cascades[0].tweets.front().text_embedding == b.cascades[0].tweets.front().text_embedding);
    CHECK(a.social.num_follows() != c.social.num_follows());
  }

  TEST_CASE("a single user follows nobody") {
    GenConfig g;
    g.num_users = 1;
    const auto s = generate_social_graph(g);
    CHECK(s.graph.size() == 1);
    CHECK(s.graph.num_follows() == 0);
  }

  TEST_CASE("without homophily follows cross communities at the mixing rate") {
    std::vector<double> xs;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      auto g = small(seed);
      g.homophily_strength = 0.0;
      xs.push_back(cross_fraction(generate_social_graph(g)));
    }
    double mean = 0.0, var = 0.0;
    for (double x : xs) mean += x / 10.0;
    for (double x : xs) var += (x - mean) * (x - mean) / 9.0;
    const double expected = 2 * 0.7 * 0.3;
    CHECK(std::abs(mean - expected) <= 3 * std::sqrt(var / 10.0) + 0.01);
    auto h = small(0);
    CHECK(cross_fraction(generate_social_graph(h)) < expected - 0.1);
  }

  TEST_CASE("follow density matches the target") {
    const auto s = generate_social_graph(small(5));
    const double per_user = static_cast<double>(s.graph.num_follows()) / static_cast<double>(s.graph.size());
    CHECK(std::abs(per_user - 12.08) <= 0.25 * 12.08);
  }

  TEST_CASE("one URL with one cascade") {
    GenConfig g = small(6);
    g.num_urls = 1;
    g.mean_cascades_per_url = 1.0;
    const auto ds = generate(g);
    CHECK(ds.stories.size() == 1);
    CHECK(ds.cascades.size() == 1);
    CHECK(ds.stories[0].cascade_ids.size() == 1);
  }

  TEST_CASE("cascades are well formed") {
    const auto ds = generate(small(7));
    std::set<std::string> ids;
    for (const auto& c : ds.cascades) {
      CHECK_NOTHROW(validate_cascade(c));
      CHECK(c.tweets.front().is_source);
      CHECK(ids.insert(c.cascade_id).second);
      std::set<std::string> authors;
      for (const auto& t : c.tweets) {
        CHECK(ds.social.find(t.author).has_value());
        CHECK(t.cascade_id == c.cascade_id);
        authors.insert(t.author);
      }
      CHECK(authors.size() == c.tweets.size());
    }
    for (const auto& s : ds.stories) {
      CHECK_FALSE(s.cascade_ids.empty());
      for (const auto& c : ds.cascades_of(s)) CHECK(c.url_id == s.url_id);
    }
  }

  TEST_CASE("summary statistics land near their targets") {
    GenConfig g = small(8);
    g.num_urls = 300;
    const auto st = summary_stats(generate(g));
    CHECK(std::abs(st.fake_fraction - 0.1674) <= 0.03);
    CHECK(std::abs(st.mean_cascade_size - 2.79) <= 0.2 * 2.79);
    CHECK(st.num_urls == 300);
    CHECK(std::is_sorted(st.cascades_per_url.rbegin(), st.cascades_per_url.rend()));
    CHECK(st.cumulative_cascade_share.back() == doctest::Approx(1.0));
    CHECK(st.coverage_cascade.size() == 25);
    CHECK(st.coverage_url.at(24) == 1.0);
    for (std::size_t h = 1; h < 25; ++h) CHECK(st.coverage_cascade[h] >= st.coverage_cascade[h - 1]);
  }

  TEST_CASE("summary statistics of hand-built datasets") {
    const auto one = summary_stats(one_cascade_per_url(1));
    CHECK(one.cascade_size_histogram == std::map<std::size_t, std::size_t>{{1, 1}});
    CHECK(one.mean_cascade_size == 1.0);
    const auto many = summary_stats(one_cascade_per_url(75));
    CHECK(many.cumulative_cascade_share.at(14) == doctest::Approx(0.20));
    CHECK_THROWS_AS(summary_stats(Dataset{}), InvalidInput);
  }

  TEST_CASE("coverage fraction") {
    const auto h = kSecondsPerHour;
    auto cascade = [](std::vector<Timestamp> ts) {
      CascadeRecord c{"c", "u", {}};
      for (std::size_t k = 0; k < ts.size(); ++k)
        c.tweets.push_back(make_tweet("t" + std::to_string(k), "a" + std::to_string(k), ts[k], "c", k == 0));
      return c;
    };
    const std::vector<std::vector<CascadeRecord>> samples{{cascade({0, h, 5 * h, 30 * h})}, {cascade({0})},
                                                          {cascade({0, 2 * h})}};
    CHECK(coverage_fraction(samples, 0) == doctest::Approx((1.0 / 3.0 + 0.5) / 2.0));
    CHECK(coverage_fraction(samples, 2) == doctest::Approx((2.0 / 3.0 + 1.0) / 2.0));
    CHECK(coverage_fraction(samples, 24) == 1.0);
    CHECK(coverage_fraction({}, 5) == 1.0);
  }

  TEST_CASE("configuration json") {
    auto g = GenConfig::from_json(R"({"num_users": 50, "homophily_strength": 0.1})");
    CHECK(g.num_users == 50);
    CHECK(g.homophily_strength == 0.1);
    CHECK(g.num_urls == GenConfig{}.num_urls);
    CHECK_THROWS_AS(GenConfig::from_json(R"({"nmu_users": 50})"), InvalidInput);
    const auto back = GenConfig::from_json(g.to_json());
    CHECK(back.to_json() == g.to_json());
  }

  TEST_CASE("configuration validation") {
    auto bad = [](auto edit) {
      GenConfig g;
      edit(g);
      return g;
    };
    CHECK_NOTHROW(GenConfig{}.validate());
    CHECK_THROWS_AS(bad([](GenConfig& g) { g.num_users = 0; }).validate(), InvalidInput);
    CHECK_THROWS_AS(bad([](GenConfig& g) { g.fake_fraction = 1.0; }).validate(), InvalidInput);
    CHECK_THROWS_AS(bad([](GenConfig& g) { g.homophily_strength = 1.5; }).validate(), InvalidInput);
    CHECK_THROWS_AS(bad([](GenConfig& g) { g.reliable_fraction = 0.5; }).validate(), InvalidInput);
    CHECK_THROWS_AS(bad([](GenConfig& g) { g.mean_cascades_per_url = 0.5; }).validate(), InvalidInput);
    CHECK_THROWS_AS(bad([](GenConfig& g) { g.embedding_mode = EmbeddingMode::load_file; }).validate(), InvalidInput);
  }
}
