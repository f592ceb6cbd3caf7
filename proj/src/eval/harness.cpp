#include "cascade_gnn/eval/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>
#include <unordered_map>

#include "cascade_gnn/common.hpp"
#include "cascade_gnn/propagation.hpp"
#include "cascade_gnn/synthgen.hpp"

namespace cascade_gnn::eval {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::pair<double, double> mean_std(const std::vector<double>& xs) {
  std::vector<double> v;
  for (double x : xs)
    if (std::isfinite(x)) v.push_back(x);
  if (v.empty()) return {kNaN, kNaN};
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  if (v.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(v.size() - 1))};
}

bool has_both_classes(const std::vector<bool>& y) {
  const auto pos = std::count(y.begin(), y.end(), true);
  return pos > 0 && static_cast<std::size_t>(pos) < y.size();
}

double safe_auc(const std::vector<double>& scores, const std::vector<bool>& labels) {
  return has_both_classes(labels) ? roc_auc(scores, labels).auc : kNaN;
}

Timestamp sample_time(const SampleSource& s) {
  Timestamp t = std::numeric_limits<Timestamp>::max();
  for (const auto& c : s.cascades) t = std::min(t, c.root_time());
  return t;
}

std::vector<Sample> masked_copy(std::span<const Sample> base, GroupSet active, const FeatureSchema& schema) {
  std::vector<Sample> out;
  out.reserve(base.size());
  for (const auto& s : base) {
    Sample c = s;
    apply_feature_mask_in_place(c.graph, active, schema);
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace

void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, n));
  std::vector<std::exception_ptr> errors(n);
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < jobs; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

FoldSplit FoldPlan::round(std::size_t r) const {
  if (r >= k) throw InvalidInput("fold round out of range");
  FoldSplit s;
  const std::size_t val = (r + 1) % k;
  for (std::size_t f = 0; f < k; ++f) {
    auto& dst = f == r ? s.test : f == val ? s.validation : s.train;
    dst.insert(dst.end(), folds[f].begin(), folds[f].end());
  }
  return s;
}

std::size_t FoldPlan::fold_of(const std::string& url_id) const {
  for (std::size_t f = 0; f < folds.size(); ++f)
    if (std::find(folds[f].begin(), folds[f].end(), url_id) != folds[f].end()) return f;
  throw InvalidInput("URL " + url_id + " is not in the fold plan");
}

FoldPlan make_folds(std::span<const UrlStory> stories, std::size_t k, std::uint64_t seed) {
  if (k < 3) throw InvalidInput("need at least 3 folds (test, validation and training)");
  if (stories.size() < k) throw InvalidInput("fewer URLs than folds");
  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.folds.resize(k);
  std::vector<std::string> by_label[2];
  for (const auto& s : stories) by_label[s.label == Label::fake_news ? 1 : 0].push_back(s.url_id);
  std::mt19937_64 rng(derive_seed(seed, 0xf01d));
  std::size_t slot = 0;
  for (auto& ids : by_label) {
    std::sort(ids.begin(), ids.end());
    std::shuffle(ids.begin(), ids.end(), rng);
    for (auto& id : ids) plan.folds[slot++ % k].push_back(id);
  }
  return plan;
}

std::vector<CascadeRecord> filter_min_cascade_size(std::span<const CascadeRecord> cascades, std::size_t min_tweets) {
  std::vector<CascadeRecord> out;
  for (const auto& c : cascades)
    if (c.tweets.size() >= min_tweets) out.push_back(c);
  return out;
}

std::vector<SampleSource> sample_sources(const Dataset& ds, Scope scope, std::size_t min_cascade_size) {
  std::vector<SampleSource> out;
  for (const auto& story : ds.stories) {
    auto cascades = ds.cascades_of(story);
    if (scope == Scope::url_wise) {
      if (!cascades.empty()) out.push_back({story.url_id, scope, &story, std::move(cascades)});
    } else {
      for (auto& c : filter_min_cascade_size(cascades, min_cascade_size)) {
        std::string id = c.cascade_id;
        out.push_back({std::move(id), scope, &story, {std::move(c)}});
      }
    }
  }
  return out;
}

std::vector<Sample> build_samples(const Dataset& ds, std::span<const SampleSource> sources, double hours,
                                  GroupSet active, const FeatureSchema& schema) {
  std::vector<Sample> out;
  out.reserve(sources.size());
  for (const auto& src : sources) {
    const auto kept = truncate(src.cascades, hours);
    auto g = build_propagation_graph(*src.story, kept, ds.social, src.scope, schema);
    g.sample_id = src.sample_id;
    g.diffusion_window_hours = hours;
    out.push_back(make_sample(std::move(g), active, schema));
  }
  return out;
}

double sample_coverage(std::span<const SampleSource> sources, double hours) {
  std::vector<std::vector<CascadeRecord>> sets;
  sets.reserve(sources.size());
  for (const auto& s : sources) sets.push_back(s.cascades);
  return coverage_fraction(sets, hours);
}

CvResult run_cv(std::span<const Sample> samples, const FoldPlan& plan, const ModelConfig& cfg, std::size_t jobs) {
  std::unordered_map<std::string, std::size_t> fold_of;
  for (std::size_t f = 0; f < plan.folds.size(); ++f)
    for (const auto& id : plan.folds[f]) fold_of[id] = f;

  CvResult out;
  out.num_samples = samples.size();
  out.folds.resize(plan.k);
  parallel_for(plan.k, jobs, [&](std::size_t r) {
    const std::size_t val_fold = (r + 1) % plan.k;
    std::vector<const Sample*> tr, va, te;
    for (const auto& s : samples) {
      const auto it = fold_of.find(s.graph.url_id);
      if (it == fold_of.end()) throw InvalidInput("sample URL " + s.graph.url_id + " missing from fold plan");
      (it->second == r ? te : it->second == val_fold ? va : tr).push_back(&s);
    }
    ModelConfig mc = cfg;
    mc.seed = derive_seed(cfg.seed, r);
    const auto trained = train(tr, va, mc);
    FoldResult fr;
    fr.fold = r;
    fr.train_size = tr.size();
    fr.validation_size = va.size();
    fr.best_iteration = trained.best_iteration;
    fr.best_validation_auc = trained.best_validation_auc;
    fr.scores = predict_scores(te, trained.params);
    fr.labels = fake_labels(te);
    for (const auto* s : te) fr.test_ids.push_back(s->graph.sample_id);
    if (has_both_classes(fr.labels)) {
      fr.roc = roc_auc(fr.scores, fr.labels);
      fr.auc = fr.roc.auc;
    } else {
      fr.auc = kNaN;
    }
    out.folds[r] = std::move(fr);
  });

  std::vector<double> aucs, vals;
  std::vector<RocCurve> curves;
  for (const auto& f : out.folds) {
    aucs.push_back(f.auc);
    vals.push_back(f.best_validation_auc);
    if (std::isfinite(f.auc)) curves.push_back(f.roc);
  }
  std::tie(out.mean_auc, out.std_auc) = mean_std(aucs);
  out.mean_validation_auc = mean_std(vals).first;
  out.mean_roc = average_roc(curves);
  return out;
}

std::vector<SweepPoint> diffusion_sweep(const Dataset& ds, const ExperimentConfig& cfg, std::span<const double> hours) {
  const auto plan = make_folds(ds.stories, cfg.folds, cfg.seed);
  const auto sources = sample_sources(ds, cfg.scope, cfg.min_cascade_size);
  if (sources.empty()) throw InvalidInput("no samples for the requested scope");
  std::vector<SweepPoint> out;
  for (double h : hours) {
    if (!(h >= 0.0)) throw InvalidInput("diffusion hours must be non-negative");
    const auto samples = build_samples(ds, sources, h, cfg.model.active_groups, cfg.model.schema);
    SweepPoint p;
    p.hours = h;
    p.coverage = sample_coverage(sources, h);
    p.cv = run_cv(samples, plan, cfg.model, cfg.jobs);
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> aging_windows(std::span<const double> t, double window_fraction,
                                                                double min_gap_seconds) {
  const std::size_t n = t.size();
  if (n == 0) throw InvalidInput("aging: empty test set");
  if (!(window_fraction > 0.0)) throw InvalidInput("aging: window fraction must be positive");
  if (window_fraction >= 1.0) return {{0, n}};
  if (t.back() - t.front() < min_gap_seconds) throw InvalidInput("aging: test period shorter than the window gap");
  const auto w = std::min<std::size_t>(n, static_cast<std::size_t>(std::ceil(window_fraction * static_cast<double>(n))));
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + t[i];
  auto mean = [&](std::size_t b) { return (prefix[b + w] - prefix[b]) / static_cast<double>(w); };

  std::vector<std::pair<std::size_t, std::size_t>> out{{0, w}};
  double last = mean(0);
  for (std::size_t b = 1; b + w <= n; ++b) {
    if (mean(b) >= last + min_gap_seconds) {
      out.push_back({b, b + w});
      last = mean(b);
    }
  }
  return out;
}

double window_iou(std::pair<std::size_t, std::size_t> a, std::pair<std::size_t, std::size_t> b) {
  const std::size_t lo = std::max(a.first, b.first), hi = std::min(a.second, b.second);
  const double inter = hi > lo ? static_cast<double>(hi - lo) : 0.0;
  const double uni = static_cast<double>(a.second - a.first + b.second - b.first) - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

AgingResult aging_protocol(const Dataset& ds, const ExperimentConfig& cfg, const AgingOptions& opt) {
  if (!(opt.test_fraction > 0.0 && opt.test_fraction < 1.0)) throw InvalidInput("aging: test fraction must be in (0,1)");
  std::vector<const UrlStory*> stories;
  for (const auto& s : ds.stories) stories.push_back(&s);
  std::stable_sort(stories.begin(), stories.end(), [](auto a, auto b) {
    return a->first_seen != b->first_seen ? a->first_seen < b->first_seen : a->url_id < b->url_id;
  });
  const auto n_test = static_cast<std::size_t>(std::llround(opt.test_fraction * static_cast<double>(stories.size())));
  if (n_test == 0) throw InvalidInput("aging: empty test set");
  const std::size_t n_past = stories.size() - n_test;
  if (n_past < 2) throw InvalidInput("aging: too few earlier URLs to train on");

  AgingResult res;
  std::vector<std::string> past;
  for (std::size_t i = 0; i < n_past; ++i) past.push_back(stories[i]->url_id);
  std::mt19937_64 rng(derive_seed(cfg.seed, 0xa9e));
  std::shuffle(past.begin(), past.end(), rng);
  const auto n_val = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(opt.validation_fraction * static_cast<double>(n_past))));
  res.validation_ids.assign(past.begin(), past.begin() + static_cast<std::ptrdiff_t>(n_val));
  res.train_ids.assign(past.begin() + static_cast<std::ptrdiff_t>(n_val), past.end());
  for (std::size_t i = n_past; i < stories.size(); ++i) res.test_ids.push_back(stories[i]->url_id);

  std::map<std::string, int> role;  // 0 train, 1 validation, 2 test
  for (const auto& id : res.train_ids) role[id] = 0;
  for (const auto& id : res.validation_ids) role[id] = 1;
  for (const auto& id : res.test_ids) role[id] = 2;

  auto sources = sample_sources(ds, cfg.scope, cfg.min_cascade_size);
  std::stable_sort(sources.begin(), sources.end(), [](const SampleSource& a, const SampleSource& b) {
    const auto ta = sample_time(a), tb = sample_time(b);
    return ta != tb ? ta < tb : a.sample_id < b.sample_id;
  });
  std::vector<double> test_times;
  for (const auto& s : sources)
    if (role.at(s.story->url_id) == 2) test_times.push_back(static_cast<double>(sample_time(s)));
  if (test_times.empty()) throw InvalidInput("aging: empty test set");
  const auto spans =
      aging_windows(test_times, opt.window_fraction, opt.min_gap_days * static_cast<double>(kSecondsPerDay));

  struct Series {
    std::vector<double> scores;
    std::vector<bool> labels;
  };
  auto run_series = [&](double hours) {
    const auto samples = build_samples(ds, sources, hours, cfg.model.active_groups, cfg.model.schema);
    std::vector<const Sample*> tr, va, te;
    for (const auto& s : samples) {
      const int r = role.at(s.graph.url_id);
      (r == 0 ? tr : r == 1 ? va : te).push_back(&s);
    }
    const auto trained = train(tr, va, cfg.model);
    return Series{predict_scores(te, trained.params), fake_labels(te)};
  };
  Series s24, s0;
  parallel_for(2, cfg.jobs, [&](std::size_t i) { (i == 0 ? s24 : s0) = run_series(i == 0 ? cfg.hours : 0.0); });

  res.holdout_auc_24h = safe_auc(s24.scores, s24.labels);
  res.holdout_auc_0h = safe_auc(s0.scores, s0.labels);
  for (const auto& [b, e] : spans) {
    AgingWindow w;
    w.begin = b;
    w.end = e;
    w.mean_time = std::accumulate(test_times.begin() + static_cast<std::ptrdiff_t>(b),
                                  test_times.begin() + static_cast<std::ptrdiff_t>(e), 0.0) /
                  static_cast<double>(e - b);
    std::vector<double> sc24(s24.scores.begin() + static_cast<std::ptrdiff_t>(b),
                             s24.scores.begin() + static_cast<std::ptrdiff_t>(e));
    std::vector<double> sc0(s0.scores.begin() + static_cast<std::ptrdiff_t>(b),
                            s0.scores.begin() + static_cast<std::ptrdiff_t>(e));
    std::vector<bool> y(s24.labels.begin() + static_cast<std::ptrdiff_t>(b),
                        s24.labels.begin() + static_cast<std::ptrdiff_t>(e));
    w.num_fake = static_cast<std::size_t>(std::count(y.begin(), y.end(), true));
    w.auc_24h = safe_auc(sc24, y);
    w.auc_0h = safe_auc(sc0, y);
    res.windows.push_back(w);
  }
  std::vector<double> ious;
  for (std::size_t i = 1; i < spans.size(); ++i) ious.push_back(window_iou(spans[i - 1], spans[i]));
  std::tie(res.mean_iou, res.std_iou) = ious.empty() ? std::pair{kNaN, kNaN} : mean_std(ious);

  res.cv_reference_auc = kNaN;
  res.cv_reference_std = kNaN;
  if (opt.cv_reference) {
    const auto samples = build_samples(ds, sources, cfg.hours, cfg.model.active_groups, cfg.model.schema);
    const auto cv = run_cv(samples, make_folds(ds.stories, cfg.folds, cfg.seed), cfg.model, cfg.jobs);
    res.cv_reference_auc = cv.mean_auc;
    res.cv_reference_std = cv.std_auc;
  }
  return res;
}

CvResult run_cv_with_groups(const Dataset& ds, const ExperimentConfig& cfg, GroupSet active) {
  const auto sources = sample_sources(ds, cfg.scope, cfg.min_cascade_size);
  if (sources.empty()) throw InvalidInput("no samples for the requested scope");
  const auto samples = build_samples(ds, sources, cfg.hours, active, cfg.model.schema);
  ModelConfig mc = cfg.model;
  mc.active_groups = active;
  return run_cv(samples, make_folds(ds.stories, cfg.folds, cfg.seed), mc, cfg.jobs);
}

AblationResult backward_feature_selection(const Dataset& ds, const ExperimentConfig& cfg) {
  const auto sources = sample_sources(ds, cfg.scope, cfg.min_cascade_size);
  if (sources.empty()) throw InvalidInput("no samples for the requested scope");
  const auto base = build_samples(ds, sources, cfg.hours, GroupSet::all(), cfg.model.schema);
  const auto plan = make_folds(ds.stories, cfg.folds, cfg.seed);

  auto evaluate = [&](GroupSet active) {
    ModelConfig mc = cfg.model;
    mc.active_groups = active;
    return run_cv(masked_copy(base, active, cfg.model.schema), plan, mc, cfg.jobs);
  };

  AblationResult res;
  GroupSet active = GroupSet::all();
  auto cv = evaluate(active);
  res.levels.push_back({active, std::nullopt, cv.mean_validation_auc, cv.mean_auc, cv.std_auc});
  std::vector<FeatureGroup> removed;
  while (active.count() > 1) {
    std::optional<FeatureGroup> best_group;
    CvResult best_cv;
    double best_val = -std::numeric_limits<double>::infinity();
    for (FeatureGroup g : active.groups()) {
      auto c = evaluate(active.without(g));
      const double v = std::isfinite(c.mean_validation_auc) ? c.mean_validation_auc : -1.0;
      if (v > best_val) {
        best_val = v;
        best_group = g;
        best_cv = std::move(c);
      }
    }
    active = active.without(*best_group);
    removed.push_back(*best_group);
    res.levels.push_back({active, best_group, best_cv.mean_validation_auc, best_cv.mean_auc, best_cv.std_auc});
  }
  res.importance = active.groups();
  for (auto it = removed.rbegin(); it != removed.rend(); ++it) res.importance.push_back(*it);
  return res;
}

}  // namespace cascade_gnn::eval
