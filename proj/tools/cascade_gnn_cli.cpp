// Command-line front end: dataset generation, training and every evaluation protocol.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cascade_gnn/common.hpp"
#include "cascade_gnn/dataset.hpp"
#include "cascade_gnn/eval/analysis.hpp"
#include "cascade_gnn/eval/harness.hpp"
#include "cascade_gnn/eval/report.hpp"
#include "cascade_gnn/model.hpp"
#include "cascade_gnn/synthgen.hpp"
#include "cascade_gnn/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cascade_gnn;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitNumeric = 3;

/// Usage problems detected after parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raw flag values; only flags that were given end up in the overlay.
struct Flags {
  std::string config_file;
  std::string data;
  std::string out;
  std::string embeddings;
  std::string checkpoint;
  std::uint64_t seed = 0;
  std::string scope;
  std::string hours;
  std::size_t min_cascade_size = 0;
  std::size_t iterations = 0;
  std::size_t jobs = 0;
  std::size_t folds = 0;
  std::size_t fold = 0;
  std::string groups;
  std::size_t users = 0;
  std::size_t urls = 0;
  double mean_cascades = 0.0;
  double fake_fraction = 0.0;
  double homophily = 0.0;
  double window_fraction = 0.0;
  double gap_days = 0.0;
  bool no_cv_reference = false;
  std::size_t layout_iterations = 0;
  std::size_t max_users = 0;
};

const std::vector<std::string> kConfigKeys = {
    "data",        "out",       "embeddings",      "checkpoint",  "seed",      "scope",           "hours",
    "min_cascade_size", "iterations", "jobs",      "folds",       "fold",      "groups",          "generator",
    "window_fraction",  "gap_days",   "cv_reference", "layout_iterations", "max_users"};

json read_config_file(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError("config file " + path + ": " + e.what());
  }
  if (!j.is_object()) throw UsageError("config file must hold a JSON object");
  for (const auto& [k, v] : j.items())
    if (std::find(kConfigKeys.begin(), kConfigKeys.end(), k) == kConfigKeys.end())
      throw UsageError("unknown config key '" + k + "'");
  return j;
}

/// Parses "24", "0..24", "0..24:2" or "0,6,12".
std::vector<double> parse_hours(const std::string& spec) {
  std::vector<double> out;
  auto num = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw UsageError("bad hours value '" + s + "'");
    }
    if (used != s.size() || !(v >= 0.0)) throw UsageError("bad hours value '" + s + "'");
    return v;
  };
  const auto dots = spec.find("..");
  if (dots != std::string::npos) {
    std::string rest = spec.substr(dots + 2);
    double step = 1.0;
    if (const auto colon = rest.find(':'); colon != std::string::npos) {
      step = num(rest.substr(colon + 1));
      rest = rest.substr(0, colon);
    }
    const double lo = num(spec.substr(0, dots)), hi = num(rest);
    if (!(step > 0.0) || hi < lo) throw UsageError("bad hours range '" + spec + "'");
    for (std::size_t i = 0;; ++i) {
      const double h = lo + step * static_cast<double>(i);
      if (h > hi + 1e-9) break;
      out.push_back(h);
    }
    return out;
  }
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(num(item));
  if (out.empty()) throw UsageError("empty hours specification");
  return out;
}

GroupSet parse_groups(const std::string& spec) {
  GroupSet g = GroupSet::none();
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      g = g.with(parse_feature_group(item));
    } catch (const InvalidInput& e) {
      throw UsageError(e.what());
    }
  }
  if (g.empty()) throw UsageError("--groups needs at least one group");
  return g;
}

std::string hours_string(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

/// Effective settings after layering flags over the config file over the environment.
struct Settings {
  json merged;
  std::uint64_t seed = 42;
  Scope scope = Scope::url_wise;
  std::vector<double> hours;
  std::size_t min_cascade_size = 6;
  std::size_t jobs = 1;
  ModelConfig model;
  eval::ExperimentConfig experiment;

  template <class T>
  T get(const char* key, T fallback) const {
    if (!merged.contains(key)) return fallback;
    try {
      return merged.at(key).get<T>();
    } catch (const json::exception& e) {
      throw UsageError(std::string("setting '") + key + "': " + e.what());
    }
  }
  std::string data_dir() const {
    const auto d = get<std::string>("data", "");
    if (d.empty()) throw UsageError("--data is required");
    return d;
  }
  fs::path out_dir() const { return get<std::string>("out", "."); }
};

Settings resolve(const json& overlay, const std::string& config_file, const std::string& default_hours) {
  Settings s;
  s.merged = read_config_file(config_file);
  for (const auto& [k, v] : overlay.items()) {
    if (k == "generator") {
      for (const auto& [gk, gv] : v.items()) s.merged["generator"][gk] = gv;
    } else {
      s.merged[k] = v;
    }
  }
  if (!s.merged.contains("seed")) {
    if (const char* env = std::getenv("CASCADE_GNN_SEED")) {
      try {
        std::size_t used = 0;
        const auto v = std::stoull(env, &used);
        if (used != std::string(env).size()) throw std::invalid_argument("trailing characters");
        s.merged["seed"] = v;
      } catch (const std::exception&) {
        throw UsageError("CASCADE_GNN_SEED is not an unsigned integer");
      }
    }
  }
  s.seed = s.get<std::uint64_t>("seed", 42);
  try {
    s.scope = parse_scope(s.get<std::string>("scope", "url"));
  } catch (const InvalidInput& e) {
    throw UsageError(e.what());
  }
  if (s.scope == Scope::url_wise && s.merged.contains("min_cascade_size"))
    throw UsageError("--min-cascade-size applies to --scope cascade only");
  s.min_cascade_size = s.get<std::size_t>("min_cascade_size", 6);
  if (s.min_cascade_size == 0) throw UsageError("--min-cascade-size must be at least 1");
  s.hours = parse_hours(s.merged.contains("hours") ? hours_string(s.merged["hours"]) : default_hours);
  s.jobs = s.get<std::size_t>("jobs", std::max(1u, std::thread::hardware_concurrency()));
  if (s.jobs == 0) throw UsageError("--jobs must be positive");

  s.model = ModelConfig::defaults_for(s.scope);
  s.model.seed = s.seed;
  if (s.merged.contains("iterations")) s.model.iterations = s.get<std::size_t>("iterations", 0);
  if (s.merged.contains("groups")) s.model.active_groups = parse_groups(s.get<std::string>("groups", ""));
  try {
    s.model.validate();
  } catch (const InvalidInput& e) {
    throw UsageError(e.what());
  }

  s.experiment.scope = s.scope;
  s.experiment.hours = s.hours.front();
  s.experiment.min_cascade_size = s.scope == Scope::cascade_wise ? s.min_cascade_size : 1;
  s.experiment.folds = s.get<std::size_t>("folds", 5);
  if (s.experiment.folds < 3) throw UsageError("--folds must be at least 3");
  s.experiment.seed = s.seed;
  s.experiment.jobs = s.jobs;
  s.experiment.model = s.model;
  return s;
}

std::string groups_list(GroupSet g) {
  std::string s;
  for (auto x : g.groups()) s += (s.empty() ? "" : ",") + to_string(x);
  return s;
}

/// Canonical identity of an experiment; paths and worker count are left out.
eval::RunStamp experiment_stamp(const std::string& command, const Settings& s, const Dataset* ds, json extra = {}) {
  json c;
  c["command"] = command;
  c["seed"] = s.seed;
  c["scope"] = to_string(s.scope);
  c["hours"] = s.hours;
  c["min_cascade_size"] = s.experiment.min_cascade_size;
  c["iterations"] = s.model.iterations;
  c["groups"] = groups_list(s.model.active_groups);
  c["folds"] = s.experiment.folds;
  c["learning_rate"] = s.model.learning_rate;
  c["hidden"] = s.model.hidden;
  c["fc1"] = s.model.fc1;
  c["validate_every"] = s.model.validate_every;
  if (ds) {
    c["dataset"] = hex64(fnv1a64(ds->meta_json)) + ":" + std::to_string(ds->stories.size()) + ":" +
                   std::to_string(ds->cascades.size());
  }
  if (!extra.is_null())
    for (const auto& [k, v] : extra.items()) c[k] = v;
  return {c.dump(), s.seed};
}

Dataset load(const Settings& s) {
  const fs::path dir = s.data_dir();
  if (!fs::is_directory(dir)) throw IoError("dataset directory " + dir.string() + " does not exist");
  const auto emb = s.get<std::string>("embeddings", "");
  try {
    if (!emb.empty()) {
      const auto vectors = WordVectors::load(emb);
      return load_dataset(dir, &vectors);
    }
    return load_dataset(dir);
  } catch (const InvalidInput& e) {
    throw IoError(std::string("dataset ") + dir.string() + ": " + e.what());
  }
}

void note(const std::string& msg) { std::cout << msg << std::endl; }

std::string pct(double v) { return eval::format_number(std::round(v * 10000.0) / 10000.0); }

GenConfig generator_config(const Settings& s) {
  GenConfig g;
  if (s.merged.contains("generator")) {
    try {
      g = GenConfig::from_json(s.merged["generator"].dump());
    } catch (const InvalidInput& e) {
      throw UsageError(e.what());
    }
  }
  g.seed = s.seed;
  if (s.merged.contains("generator") && s.merged["generator"].contains("seed") && !s.merged.contains("seed"))
    g.seed = s.merged["generator"]["seed"].get<std::uint64_t>();
  try {
    g.validate();
  } catch (const InvalidInput& e) {
    throw UsageError(e.what());
  }
  return g;
}

int cmd_generate(const Settings& s) {
  const GenConfig g = generator_config(s);
  const auto social = generate_social_graph(g);
  const Dataset ds = generate_dataset(g, social);
  const fs::path out = s.get<std::string>("out", "data");
  save_dataset(ds, out);
  const auto stats = summary_stats(ds);
  const eval::RunStamp stamp{json{{"command", "generate"}, {"generator", json::parse(g.to_json())}}.dump(), g.seed};
  eval::write_text(out / "stats.json", eval::stats_report(stats, nullptr, nullptr, stamp));
  note("generate: " + std::to_string(stats.num_urls) + " URLs (" + pct(stats.fake_fraction) + " fake), " +
       std::to_string(stats.num_cascades) + " cascades, mean size " + pct(stats.mean_cascade_size) + " -> " +
       out.string());
  return 0;
}

struct RoundData {
  std::vector<eval::SampleSource> sources;
  std::vector<Sample> samples;
  eval::FoldPlan plan;
};

RoundData prepare(const Dataset& ds, const Settings& s, double hours) {
  RoundData r;
  r.sources = eval::sample_sources(ds, s.scope, s.experiment.min_cascade_size);
  if (r.sources.empty()) throw InvalidInput("no samples for the requested scope");
  r.samples = eval::build_samples(ds, r.sources, hours, s.model.active_groups, s.model.schema);
  r.plan = eval::make_folds(ds.stories, s.experiment.folds, s.seed);
  return r;
}

TrainResult train_round(const RoundData& r, const Settings& s, std::size_t round, std::vector<const Sample*>* test) {
  const auto split = r.plan.round(round);
  const std::set<std::string> tr(split.train.begin(), split.train.end());
  const std::set<std::string> va(split.validation.begin(), split.validation.end());
  std::vector<const Sample*> a, b, c;
  for (const auto& x : r.samples) (tr.count(x.graph.url_id) ? a : va.count(x.graph.url_id) ? b : c).push_back(&x);
  if (test) *test = c;
  ModelConfig mc = s.model;
  mc.seed = derive_seed(s.seed, round);
  return train(a, b, mc);
}

int cmd_train(const Settings& s) {
  if (s.hours.size() != 1) throw UsageError("train takes a single --hours value");
  const Dataset ds = load(s);
  const auto r = prepare(ds, s, s.hours.front());
  const auto round = s.get<std::size_t>("fold", 0);
  if (round >= s.experiment.folds) throw UsageError("--fold must be below --folds");
  std::vector<const Sample*> test;
  const auto result = train_round(r, s, round, &test);
  const auto scores = predict_scores(test, result.params);
  const auto labels = fake_labels(test);
  const bool both = std::count(labels.begin(), labels.end(), true) > 0 &&
                    std::count(labels.begin(), labels.end(), false) > 0;
  const double auc = both ? eval::roc_auc(scores, labels).auc : std::nan("");
  const auto stamp = experiment_stamp("train", s, &ds, json{{"fold", round}});
  const fs::path out = s.out_dir();
  fs::create_directories(out);
  save_checkpoint(out / "model.json", result.params, result.optimizer, s.seed);
  eval::write_text(out / "report.json", eval::train_report(result, auc, test.size(), stamp));
  note("train: best validation AUC " + pct(result.best_validation_auc) + " at iteration " +
       std::to_string(result.best_iteration) + ", test AUC " + pct(auc));
  return 0;
}

int cmd_cv(const Settings& s) {
  if (s.hours.size() != 1) throw UsageError("cv takes a single --hours value");
  const Dataset ds = load(s);
  const auto r = prepare(ds, s, s.hours.front());
  const auto cv = eval::run_cv(r.samples, r.plan, s.model, s.jobs);
  const auto stamp = experiment_stamp("cv", s, &ds);
  const fs::path out = s.out_dir();
  eval::write_text(out / "roc.csv", eval::roc_csv(cv, stamp));
  eval::write_text(out / "report.json",
                   eval::cv_report(cv, stamp, eval::sample_coverage(r.sources, s.hours.front())));
  note("cv: mean AUC " + pct(cv.mean_auc) + " +/- " + pct(cv.std_auc) + " over " + std::to_string(cv.folds.size()) +
       " folds, " + std::to_string(cv.num_samples) + " samples");
  return 0;
}

int cmd_sweep(const Settings& s) {
  const Dataset ds = load(s);
  const auto sweep = eval::diffusion_sweep(ds, s.experiment, s.hours);
  const auto stamp = experiment_stamp("sweep", s, &ds);
  const fs::path out = s.out_dir();
  eval::write_text(out / "auc_vs_hours.csv", eval::sweep_csv(sweep, stamp));
  eval::write_text(out / "report.json", eval::sweep_report(sweep, stamp));
  for (const auto& p : sweep)
    note("sweep: " + eval::format_number(p.hours) + " h, coverage " + pct(p.coverage) + ", AUC " +
         pct(p.cv.mean_auc) + " +/- " + pct(p.cv.std_auc));
  return 0;
}

int cmd_aging(const Settings& s) {
  if (s.hours.size() != 1) throw UsageError("aging takes a single --hours value");
  const Dataset ds = load(s);
  eval::AgingOptions opt;
  opt.window_fraction = s.get<double>("window_fraction", opt.window_fraction);
  opt.min_gap_days = s.get<double>("gap_days", opt.min_gap_days);
  opt.cv_reference = s.get<bool>("cv_reference", true);
  const auto res = eval::aging_protocol(ds, s.experiment, opt);
  const auto stamp = experiment_stamp(
      "aging", s, &ds,
      json{{"window_fraction", opt.window_fraction}, {"gap_days", opt.min_gap_days}, {"cv_reference", opt.cv_reference}});
  const fs::path out = s.out_dir();
  eval::write_text(out / "aging.csv", eval::aging_csv(res, stamp));
  eval::write_text(out / "report.json", eval::aging_report(res, stamp));
  note("aging: " + std::to_string(res.windows.size()) + " windows, hold-out AUC " + pct(res.holdout_auc_24h) +
       " (24 h) / " + pct(res.holdout_auc_0h) + " (0 h)");
  return 0;
}

int cmd_ablate(const Settings& s) {
  if (s.hours.size() != 1) throw UsageError("ablate takes a single --hours value");
  const Dataset ds = load(s);
  const auto res = eval::backward_feature_selection(ds, s.experiment);
  const auto stamp = experiment_stamp("ablate", s, &ds);
  const fs::path out = s.out_dir();
  eval::write_text(out / "ablation.csv", eval::ablation_csv(res, stamp));
  eval::write_text(out / "report.json", eval::ablation_report(res, stamp));
  std::string order;
  for (auto g : res.importance) order += (order.empty() ? "" : " > ") + to_string(g);
  note("ablate: importance " + order);
  return 0;
}

int cmd_export_embeddings(const Settings& s) {
  if (s.hours.size() != 1) throw UsageError("export-embeddings takes a single --hours value");
  const Dataset ds = load(s);
  const auto r = prepare(ds, s, s.hours.front());
  ModelParams params;
  const auto ckpt = s.get<std::string>("checkpoint", "");
  if (!ckpt.empty()) {
    params = load_checkpoint(ckpt).params;
  } else {
    params = train_round(r, s, 0, nullptr).params;
  }
  const auto emb = eval::user_embeddings(r.samples, params);
  const auto stamp = experiment_stamp("export-embeddings", s, &ds,
                                      json{{"checkpoint", ckpt.empty() ? json(nullptr) : json(hex64(fnv1a64(ckpt)))}});
  eval::write_text(s.out_dir() / "embeddings.csv", eval::embeddings_csv(emb, compute_credibility(ds), stamp));
  note("export-embeddings: " + std::to_string(emb.size()) + " users");
  return 0;
}

int cmd_layout(const Settings& s) {
  const Dataset ds = load(s);
  eval::LayoutOptions opt;
  opt.iterations = s.get<std::size_t>("layout_iterations", opt.iterations);
  opt.seed = s.seed;
  const auto max_users = s.get<std::size_t>("max_users", 2000);
  const auto g = eval::layout_subgraph(ds, max_users);
  const auto pos = eval::fr_layout(g.users.size(), g.edges, opt);
  std::vector<std::string> ids;
  for (auto u : g.users) ids.push_back(ds.social.user(u).user_id);
  const auto stamp =
      experiment_stamp("layout", s, &ds, json{{"layout_iterations", opt.iterations}, {"max_users", max_users}});
  const fs::path out = s.out_dir();
  eval::write_text(out / "layout.csv", eval::layout_csv(ids, pos, compute_credibility(ds), stamp));
  eval::write_text(out / "report.json",
                   eval::layout_report(g.users.size(), g.edges.size(),
                                       eval::fr_optimal_distance(g.users.size(), opt.area), stamp));
  note("layout: " + std::to_string(g.users.size()) + " users, " + std::to_string(g.edges.size()) + " edges");
  return 0;
}

int cmd_stats(const Settings& s) {
  const Dataset ds = load(s);
  const auto stats = summary_stats(ds);
  std::optional<eval::MadMmd> url_view, cascade_view;
  const auto url_users = eval::sample_users(ds, Scope::url_wise, 1);
  if (url_users.size() >= 2) url_view = eval::mad_mmd(url_users, ds.social);
  const auto cascade_users = eval::sample_users(ds, Scope::cascade_wise, s.min_cascade_size);
  if (cascade_users.size() >= 2) cascade_view = eval::mad_mmd(cascade_users, ds.social);
  const auto stamp = experiment_stamp("stats", s, &ds);
  eval::write_text(s.out_dir() / "stats.json",
                   eval::stats_report(stats, url_view ? &*url_view : nullptr,
                                      cascade_view ? &*cascade_view : nullptr, stamp));
  note("stats: " + std::to_string(stats.num_urls) + " URLs, fake fraction " + pct(stats.fake_fraction) +
       ", mean cascade size " + pct(stats.mean_cascade_size) + ", 7 h coverage " + pct(stats.coverage_cascade[7]));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fake-news detection on propagation graphs"};
  app.require_subcommand(1);
  Flags f;
  json overlay = json::object();

  struct Sub {
    CLI::App* app;
    int (*run)(const Settings&);
    std::string default_hours;
  };
  std::vector<Sub> subs;
  auto add = [&](const char* name, const char* help, int (*run)(const Settings&), std::string hours = "24") {
    subs.push_back({app.add_subcommand(name, help), run, std::move(hours)});
    return subs.back().app;
  };

  auto common = [&](CLI::App* c, bool data) {
    c->add_option("--config", f.config_file, "JSON config file; flags override its keys")->check(CLI::ExistingFile);
    c->add_option("--seed", f.seed, "Global seed (falls back to CASCADE_GNN_SEED, then 42)");
    c->add_option("--out", f.out, "Output directory");
    if (data) {
      c->add_option("--data", f.data, "Dataset directory");
      c->add_option("--embeddings", f.embeddings, "Word-vector file (token v1 ... v200 per line)");
    }
  };
  auto experiment = [&](CLI::App* c) {
    c->add_option("--scope", f.scope, "url or cascade")->check(CLI::IsMember({"url", "cascade"}));
    c->add_option("--hours", f.hours, "Diffusion window in hours");
    c->add_option("--min-cascade-size", f.min_cascade_size, "Smallest cascade kept in cascade scope (default 6)");
    c->add_option("--iterations", f.iterations, "Training iterations (default 25000 url / 50000 cascade)");
    c->add_option("--groups", f.groups,
                  "Active feature groups: user_profile,user_activity,network_spreading,content");
    c->add_option("--folds", f.folds, "Number of folds (default 5)");
    c->add_option("--jobs", f.jobs, "Parallel workers (default: available cores)");
  };

  auto* gen = add("generate", "Write a synthetic dataset", cmd_generate);
  common(gen, false);
  gen->add_option("--users", f.users, "Number of users");
  gen->add_option("--urls", f.urls, "Number of URL stories");
  gen->add_option("--mean-cascades", f.mean_cascades, "Mean cascades per URL");
  gen->add_option("--fake-fraction", f.fake_fraction, "Fraction of fake URLs");
  gen->add_option("--homophily", f.homophily, "Homophily strength in [0, 1]");

  auto* tr = add("train", "Train on one fold split and save a checkpoint", cmd_train);
  common(tr, true);
  experiment(tr);
  tr->add_option("--fold", f.fold, "Fold round to train on (default 0)");

  auto* cv = add("cv", "Cross-validated ROC AUC", cmd_cv);
  common(cv, true);
  experiment(cv);

  auto* sw = add("sweep", "AUC against diffusion time", cmd_sweep, "0..24");
  common(sw, true);
  experiment(sw);

  auto* ag = add("aging", "Train on earlier URLs, test on later time windows", cmd_aging);
  common(ag, true);
  experiment(ag);
  ag->add_option("--window-fraction", f.window_fraction, "Window size as a fraction of the test set (default 0.24)");
  ag->add_option("--gap-days", f.gap_days, "Minimum gap between window mean dates (default 14)");
  ag->add_flag("--no-cv-reference", f.no_cv_reference, "Skip the cross-validation reference series");

  auto* ab = add("ablate", "Backward feature-group selection", cmd_ablate);
  common(ab, true);
  experiment(ab);

  auto* ex = add("export-embeddings", "Per-user mean GC2 embeddings with credibility", cmd_export_embeddings);
  common(ex, true);
  experiment(ex);
  ex->add_option("--checkpoint", f.checkpoint, "Model checkpoint (trains on fold 0 when absent)");

  auto* la = add("layout", "Force-directed layout of active users", cmd_layout);
  common(la, true);
  la->add_option("--iterations", f.layout_iterations, "Layout iterations (default 100)");
  la->add_option("--max-users", f.max_users, "Most active users to lay out (default 2000)");

  auto* st = add("stats", "Dataset statistics and MAD/MMD", cmd_stats);
  common(st, true);
  st->add_option("--min-cascade-size", f.min_cascade_size, "Smallest cascade in the cascade view (default 6)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  for (const auto& sub : subs) {
    if (!sub.app->parsed()) continue;
    auto given = [&](const char* flag) {
      try {
        return sub.app->get_option(flag)->count() > 0;
      } catch (const CLI::OptionNotFound&) {
        return false;
      }
    };
    const bool layout = sub.app == la;
    if (given("--data")) overlay["data"] = f.data;
    if (given("--out")) overlay["out"] = f.out;
    if (given("--embeddings")) overlay["embeddings"] = f.embeddings;
    if (given("--checkpoint")) overlay["checkpoint"] = f.checkpoint;
    if (given("--seed")) overlay["seed"] = f.seed;
    if (given("--scope")) overlay["scope"] = f.scope;
    if (given("--hours")) overlay["hours"] = f.hours;
    if (given("--min-cascade-size")) overlay["min_cascade_size"] = f.min_cascade_size;
    if (given("--iterations")) overlay[layout ? "layout_iterations" : "iterations"] =
        layout ? f.layout_iterations : f.iterations;
    if (given("--jobs")) overlay["jobs"] = f.jobs;
    if (given("--folds")) overlay["folds"] = f.folds;
    if (given("--fold")) overlay["fold"] = f.fold;
    if (given("--groups")) overlay["groups"] = f.groups;
    if (given("--window-fraction")) overlay["window_fraction"] = f.window_fraction;
    if (given("--gap-days")) overlay["gap_days"] = f.gap_days;
    if (given("--no-cv-reference")) overlay["cv_reference"] = false;
    if (given("--max-users")) overlay["max_users"] = f.max_users;
    if (given("--users")) overlay["generator"]["num_users"] = f.users;
    if (given("--urls")) overlay["generator"]["num_urls"] = f.urls;
    if (given("--mean-cascades")) overlay["generator"]["mean_cascades_per_url"] = f.mean_cascades;
    if (given("--fake-fraction")) overlay["generator"]["fake_fraction"] = f.fake_fraction;
    if (given("--homophily")) overlay["generator"]["homophily_strength"] = f.homophily;

    try {
      // Stats accepts --min-cascade-size for its cascade view regardless of scope.
      json ov = overlay;
      if (sub.app == st && ov.contains("min_cascade_size")) {
        ov["scope"] = "cascade";
      }
      const Settings settings = resolve(ov, f.config_file, sub.default_hours);
      return sub.run(settings);
    } catch (const UsageError& e) {
      std::cerr << "error: " << e.what() << "\nRun with --help for usage.\n";
      return kExitUsage;
    } catch (const IoError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitIo;
    } catch (const NumericError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitNumeric;
    } catch (const InvalidInput& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitUsage;
    } catch (const std::filesystem::filesystem_error& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitIo;
    }
  }
  return kExitUsage;
}
