#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cascade_gnn/dataset.hpp"
#include "cascade_gnn/eval/roc.hpp"
#include "cascade_gnn/trainer.hpp"

namespace cascade_gnn::eval {

/// Runs fn(0..n-1) on up to `jobs` threads. The exception of the lowest failing index is rethrown.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn);

struct FoldSplit {
  std::vector<std::string> train;
  std::vector<std::string> validation;
  std::vector<std::string> test;
};

/// URL ids dealt into k folds. Round r tests on fold r, validates on fold r+1 (mod k)
/// and trains on the rest.
struct FoldPlan {
  std::size_t k = 5;
  std::uint64_t seed = 0;
  std::vector<std::vector<std::string>> folds;

  FoldSplit round(std::size_t r) const;
  /// Fold index of every URL id.
  std::size_t fold_of(const std::string& url_id) const;
};

/// Shuffles each label class with `seed` and deals it round-robin, so every fold gets
/// a near-equal share of both classes. Throws InvalidInput for k < 3 or fewer than k URLs.
FoldPlan make_folds(std::span<const UrlStory> stories, std::size_t k, std::uint64_t seed);

/// Cascades with at least `min_tweets` tweets.
std::vector<CascadeRecord> filter_min_cascade_size(std::span<const CascadeRecord> cascades, std::size_t min_tweets);

/// The cascades forming each classification sample, before truncation.
/// url_wise: one entry per story. cascade_wise: one entry per cascade of at least
/// `min_cascade_size` tweets (counted on the full cascade).
struct SampleSource {
  std::string sample_id;
  Scope scope;
  const UrlStory* story;
  std::vector<CascadeRecord> cascades;
};
std::vector<SampleSource> sample_sources(const Dataset& ds, Scope scope, std::size_t min_cascade_size);

/// Truncated propagation graphs of every source, masked to `active`.
std::vector<Sample> build_samples(const Dataset& ds, std::span<const SampleSource> sources, double hours,
                                  GroupSet active, const FeatureSchema& schema);

/// Fraction of first-day tweets retained at `hours`, averaged over sources.
double sample_coverage(std::span<const SampleSource> sources, double hours);

struct FoldResult {
  std::size_t fold = 0;
  std::vector<std::string> test_ids;
  std::vector<double> scores;
  std::vector<bool> labels;
  RocCurve roc;
  double auc = 0.0;  // NaN for a single-class test fold
  std::size_t best_iteration = 0;
  double best_validation_auc = 0.0;
  std::size_t train_size = 0;
  std::size_t validation_size = 0;
};

struct CvResult {
  std::vector<FoldResult> folds;
  double mean_auc = 0.0;
  double std_auc = 0.0;
  double mean_validation_auc = 0.0;
  MeanRoc mean_roc;
  std::size_t num_samples = 0;
};

/// Trains one fresh model per round; the seed of round r is derive_seed(cfg.seed, r).
CvResult run_cv(std::span<const Sample> samples, const FoldPlan& plan, const ModelConfig& cfg, std::size_t jobs);

struct ExperimentConfig {
  Scope scope = Scope::url_wise;
  double hours = 24.0;
  std::size_t min_cascade_size = 6;
  std::size_t folds = 5;
  std::uint64_t seed = 42;
  std::size_t jobs = 1;
  ModelConfig model;
};

struct SweepPoint {
  double hours = 0.0;
  double coverage = 0.0;
  CvResult cv;
};

/// One cross-validation per entry of `hours`, all on the same fold plan.
std::vector<SweepPoint> diffusion_sweep(const Dataset& ds, const ExperimentConfig& cfg, std::span<const double> hours);

struct AgingWindow {
  std::size_t begin = 0;  // into the time-sorted test samples
  std::size_t end = 0;
  double mean_time = 0.0;
  double auc_24h = 0.0;  // NaN when the window holds one class
  double auc_0h = 0.0;
  std::size_t num_fake = 0;
};

struct AgingOptions {
  double test_fraction = 0.2;
  double validation_fraction = 0.2;  // of the earlier URLs
  double window_fraction = 0.24;
  double min_gap_days = 14.0;
  bool cv_reference = true;
};

struct AgingResult {
  std::vector<std::string> train_ids, validation_ids, test_ids;
  std::vector<AgingWindow> windows;
  double mean_iou = 0.0;
  double std_iou = 0.0;
  double holdout_auc_24h = 0.0;
  double holdout_auc_0h = 0.0;
  double cv_reference_auc = 0.0;  // NaN when disabled
  double cv_reference_std = 0.0;
};

/// Window layout over time-sorted sample timestamps: each window spans
/// ceil(fraction * n) samples and the next one starts at the first position whose mean
/// time is at least `min_gap` seconds past the previous window's. fraction >= 1 gives one window.
std::vector<std::pair<std::size_t, std::size_t>> aging_windows(std::span<const double> sorted_times,
                                                                double window_fraction, double min_gap_seconds);
double window_iou(std::pair<std::size_t, std::size_t> a, std::pair<std::size_t, std::size_t> b);

/// Trains on the earlier URLs (24 h and 0 h models) and evaluates each later window.
/// Throws InvalidInput for an empty test set or one whose span is shorter than the gap.
AgingResult aging_protocol(const Dataset& ds, const ExperimentConfig& cfg, const AgingOptions& opt = {});

struct AblationLevel {
  GroupSet active;
  std::optional<FeatureGroup> removed;  // group dropped to reach this level
  double validation_auc = 0.0;
  double test_auc = 0.0;
  double test_std = 0.0;
};

struct AblationResult {
  std::vector<AblationLevel> levels;          // 4, 3, 2, 1 active groups
  std::vector<FeatureGroup> importance;       // most important first
};

/// Backward elimination over the four groups: at each level the group whose removal
/// keeps the highest mean validation AUC is dropped (lowest group index on ties).
AblationResult backward_feature_selection(const Dataset& ds, const ExperimentConfig& cfg);

/// Cross-validation with a fixed active group set.
CvResult run_cv_with_groups(const Dataset& ds, const ExperimentConfig& cfg, GroupSet active);

}  // namespace cascade_gnn::eval
