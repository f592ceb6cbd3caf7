#include <doctest.h>

#include <atomic>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "cascade_gnn/eval/harness.hpp"
#include "cascade_gnn/synthgen.hpp"
#include "support.hpp"

using namespace cascade_gnn;
using namespace cascade_gnn::eval;
using namespace test_support;

namespace {

std::vector<UrlStory> labeled_stories(std::size_t n, std::size_t fake) {
  std::vector<UrlStory> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    out[k].url_id = "u" + std::to_string(k);
    out[k].label = k < fake ? Label::fake_news : Label::true_news;
  }
  return out;
}

const Dataset& small_dataset() {
  static const Dataset ds = [] {
    GenConfig g;
    g.seed = 11;
    g.num_users = 400;
    g.num_urls = 30;
    g.mean_cascades_per_url = 5;
    return generate(g);
  }();
  return ds;
}

ExperimentConfig quick_experiment() {
  ExperimentConfig c;
  c.model.iterations = 40;
  c.model.validate_every = 20;
  c.model.hidden = 8;
  c.model.fc1 = 4;
  c.jobs = 1;
  return c;
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("five folds over 1129 URLs") {
    const auto stories = labeled_stories(1129, 189);
    const auto plan = make_folds(stories, 5, 42);
    std::map<std::string, std::size_t> tested;
    for (std::size_t r = 0; r < 5; ++r) {
      const auto s = plan.round(r);
      CHECK((s.train.size() == 677 || s.train.size() == 678));
      CHECK((s.validation.size() == 225 || s.validation.size() == 226));
      CHECK((s.test.size() == 225 || s.test.size() == 226));
      CHECK(s.train.size() + s.validation.size() + s.test.size() == 1129);
      std::set<std::string> seen;
      for (const auto* part : {&s.train, &s.validation, &s.test})
        for (const auto& id : *part) CHECK(seen.insert(id).second);
      for (const auto& id : s.test) ++tested[id];
      for (const auto& id : s.test) CHECK(plan.fold_of(id) == r);
      for (const auto& id : s.validation) CHECK(plan.fold_of(id) == (r + 1) % 5);
    }
    CHECK(tested.size() == 1129);
    for (const auto& [id, n] : tested) CHECK(n == 1);
    CHECK_THROWS_AS(plan.round(5), InvalidInput);
    CHECK_THROWS_AS(plan.fold_of("missing"), InvalidInput);
  }

  TEST_CASE("folds are stratified and deterministic") {
    const auto stories = labeled_stories(103, 17);
    const auto plan = make_folds(stories, 5, 7);
    std::vector<std::size_t> fake(5, 0);
    for (std::size_t f = 0; f < 5; ++f)
      for (const auto& id : plan.folds[f]) fake[f] += std::stoul(id.substr(1)) < 17 ? 1 : 0;
    CHECK(*std::max_element(fake.begin(), fake.end()) - *std::min_element(fake.begin(), fake.end()) <= 1);
    CHECK(make_folds(stories, 5, 7).folds == plan.folds);
    CHECK(make_folds(stories, 5, 8).folds != plan.folds);
    CHECK_THROWS_AS(make_folds(labeled_stories(4, 1), 5, 1), InvalidInput);
    CHECK_THROWS_AS(make_folds(stories, 2, 1), InvalidInput);
  }

  TEST_CASE("minimum cascade size filter") {
    std::vector<CascadeRecord> cs;
    for (std::size_t size : {1u, 5u, 6u, 9u}) {
      CascadeRecord c{"c" + std::to_string(size), "u", {}};
      for (std::size_t k = 0; k < size; ++k)
        c.tweets.push_back(make_tweet(c.cascade_id + std::to_string(k), "a", static_cast<Timestamp>(k), c.cascade_id, k == 0));
      cs.push_back(c);
    }
    const auto kept = filter_min_cascade_size(cs, 6);
    REQUIRE(kept.size() == 2);
    CHECK(kept[0].cascade_id == "c6");
    CHECK(kept[1].cascade_id == "c9");
    CHECK(filter_min_cascade_size(cs, 1).size() == 4);
  }

  TEST_CASE("sample sources per scope") {
    const auto& ds = small_dataset();
    const auto url = sample_sources(ds, Scope::url_wise, 6);
    CHECK(url.size() == ds.stories.size());
    const auto cas = sample_sources(ds, Scope::cascade_wise, 2);
    std::size_t expected = 0;
    for (const auto& c : ds.cascades) expected += c.tweets.size() >= 2 ? 1 : 0;
    CHECK(cas.size() == expected);
    for (const auto& s : cas) {
      CHECK(s.cascades.size() == 1);
      CHECK(s.sample_id == s.cascades[0].cascade_id);
      CHECK(s.story->url_id == s.cascades[0].url_id);
    }
    const auto samples = build_samples(ds, url, 0.0, GroupSet::all(), FeatureSchema::standard());
    for (std::size_t k = 0; k < samples.size(); ++k) {
      CHECK(samples[k].graph.diffusion_window_hours == 0.0);
      CHECK(samples[k].graph.sample_id == url[k].sample_id);
    }
    CHECK(sample_coverage(url, 24.0) == 1.0);
    CHECK(sample_coverage(url, 0.0) <= sample_coverage(url, 6.0));
  }

  TEST_CASE("aging windows") {
    const double day = kSecondsPerDay;
    std::vector<double> t;
    for (int k = 0; k < 100; ++k) t.push_back(k * day);
    const auto w = aging_windows(t, 0.24, 14 * day);
    REQUIRE(w.size() >= 2);
    double last = -1e300;
    for (const auto& [b, e] : w) {
      CHECK(e - b == 24);
      CHECK(static_cast<double>(e - b) >= 0.2 * 100);
      double mean = 0.0;
      for (std::size_t i = b; i < e; ++i) mean += t[i] / 24.0;
      CHECK(mean >= last + 14 * day - 1e-6);
      last = mean;
    }
    CHECK(w.front().first == 0);
    CHECK(w[1].first == 14);
    CHECK(aging_windows(t, 1.0, 14 * day) == std::vector<std::pair<std::size_t, std::size_t>>{{0, 100}});
    const std::vector<double> short_span{0.0, day, 2 * day};
    CHECK_THROWS_AS(aging_windows(short_span, 0.5, 14 * day), InvalidInput);
    CHECK_THROWS_AS(aging_windows(std::vector<double>{}, 0.5, day), InvalidInput);
  }

  TEST_CASE("window overlap") {
    CHECK(window_iou({0, 10}, {0, 10}) == 1.0);
    CHECK(window_iou({0, 10}, {5, 15}) == doctest::Approx(5.0 / 15.0));
    CHECK(window_iou({0, 10}, {10, 20}) == 0.0);
    CHECK(window_iou({0, 4}, {1, 3}) == 0.5);
  }

  TEST_CASE("parallel_for runs every index and rethrows the lowest failure") {
    for (std::size_t jobs : {1u, 3u}) {
      std::vector<std::atomic<int>> hits(20);
      parallel_for(20, jobs, [&](std::size_t i) { ++hits[i]; });
      for (auto& h : hits) CHECK(h.load() == 1);
      try {
        parallel_for(20, jobs, [](std::size_t i) {
          if (i == 13 || i == 4) throw std::runtime_error(std::to_string(i));
        });
        FAIL("expected an exception");
      } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()) == "4");
      }
    }
    parallel_for(0, 4, [](std::size_t) { FAIL("no work expected"); });
  }

  TEST_CASE("cross-validation keeps roles apart and is reproducible across job counts") {
    const auto& ds = small_dataset();
    auto cfg = quick_experiment();
    const auto sources = sample_sources(ds, Scope::url_wise, 6);
    const auto samples = build_samples(ds, sources, 24.0, GroupSet::all(), cfg.model.schema);
    const auto plan = make_folds(ds.stories, 5, 42);
    const auto a = run_cv(samples, plan, cfg.model, 1);
    const auto b = run_cv(samples, plan, cfg.model, 3);
    REQUIRE(a.folds.size() == 5);
    std::size_t tested = 0;
    for (std::size_t r = 0; r < 5; ++r) {
      CHECK(a.folds[r].scores == b.folds[r].scores);
      CHECK(a.folds[r].train_size + a.folds[r].validation_size + a.folds[r].test_ids.size() == samples.size());
      for (const auto& id : a.folds[r].test_ids) CHECK(plan.fold_of(id) == r);
      tested += a.folds[r].test_ids.size();
    }
    CHECK(tested == samples.size());
    CHECK(a.mean_auc == b.mean_auc);
  }

  TEST_CASE("a 24 hour sweep point equals the plain cross-validation") {
    const auto& ds = small_dataset();
    const auto cfg = quick_experiment();
    const std::vector<double> hours{24.0};
    const auto sweep = diffusion_sweep(ds, cfg, hours);
    REQUIRE(sweep.size() == 1);
    CHECK(sweep[0].coverage == 1.0);
    const auto cv = run_cv_with_groups(ds, cfg, cfg.model.active_groups);
    CHECK(sweep[0].cv.mean_auc == cv.mean_auc);
    for (std::size_t r = 0; r < 5; ++r) CHECK(sweep[0].cv.folds[r].scores == cv.folds[r].scores);
    CHECK_THROWS_AS(diffusion_sweep(ds, cfg, std::vector<double>{-1.0}), InvalidInput);
  }

  TEST_CASE("aging with one window reproduces the holdout") {
    const auto& ds = small_dataset();
    auto cfg = quick_experiment();
    AgingOptions opt;
    opt.window_fraction = 1.0;
    opt.cv_reference = false;
    opt.test_fraction = 0.3;
    const auto res = aging_protocol(ds, cfg, opt);
    std::set<std::string> all;
    for (const auto* part : {&res.train_ids, &res.validation_ids, &res.test_ids})
      for (const auto& id : *part) CHECK(all.insert(id).second);
    CHECK(all.size() == ds.stories.size());
    CHECK(res.test_ids.size() == 9);
    REQUIRE(res.windows.size() == 1);
    const auto same = [](double x, double y) { return (std::isnan(x) && std::isnan(y)) || x == y; };
    CHECK(same(res.windows[0].auc_24h, res.holdout_auc_24h));
    CHECK(same(res.windows[0].auc_0h, res.holdout_auc_0h));
    CHECK(std::isnan(res.cv_reference_auc));
    CHECK(std::isnan(res.mean_iou));
    std::map<std::string, Timestamp> first;
    for (const auto& s : ds.stories) first[s.url_id] = s.first_seen;
    Timestamp latest_past = 0;
    for (const auto* part : {&res.train_ids, &res.validation_ids})
      for (const auto& id : *part) latest_past = std::max(latest_past, first[id]);
    for (const auto& id : res.test_ids) CHECK(first[id] >= latest_past);
  }

  TEST_CASE("aging rejects a test period shorter than the gap") {
    const auto& ds = small_dataset();
    auto cfg = quick_experiment();
    AgingOptions opt;
    opt.cv_reference = false;
    opt.min_gap_days = 1e6;
    CHECK_THROWS_AS(aging_protocol(ds, cfg, opt), InvalidInput);
  }

  TEST_CASE("backward selection walks down to one group") {
    const auto& ds = small_dataset();
    const auto cfg = quick_experiment();
    const auto res = backward_feature_selection(ds, cfg);
    REQUIRE(res.levels.size() == 4);
    for (std::size_t k = 0; k < 4; ++k) CHECK(res.levels[k].active.count() == 4 - k);
    CHECK_FALSE(res.levels[0].removed.has_value());
    for (std::size_t k = 1; k < 4; ++k) {
      REQUIRE(res.levels[k].removed.has_value());
      CHECK(res.levels[k - 1].active.contains(*res.levels[k].removed));
      CHECK_FALSE(res.levels[k].active.contains(*res.levels[k].removed));
    }
    CHECK(res.importance.size() == 4);
    CHECK(std::set<FeatureGroup>(res.importance.begin(), res.importance.end()).size() == 4);
    CHECK(res.importance.back() == *res.levels[1].removed);
    CHECK(res.levels[3].active.contains(res.importance.front()));
  }
}
