// Acceptance checks, one per criterion. `acceptance --criterion N` runs a single one;
// without arguments all of them run. Each prints one PASS/FAIL line.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

#include <CLI11.hpp>

#include "cascade_gnn/common.hpp"
#include "cascade_gnn/eval/harness.hpp"
#include "cascade_gnn/eval/roc.hpp"
#include "cascade_gnn/nn/amsgrad.hpp"
#include "cascade_gnn/propagation.hpp"
#include "cascade_gnn/synthgen.hpp"
#include "support.hpp"

#ifndef CASCADE_GNN_CLI
#define CASCADE_GNN_CLI "cascade-gnn"
#endif

namespace fs = std::filesystem;
using namespace cascade_gnn;
using namespace test_support;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int precision = 4) {
  std::ostringstream s;
  s.precision(precision);
  s << v;
  return s.str();
}

const Dataset& default_dataset() {
  static const Dataset ds = generate(GenConfig{});
  return ds;
}

std::size_t workers() { return std::max(1u, std::thread::hardware_concurrency()); }

// 1. Gradients of every op and of the full network against central differences.
Outcome gradient_check() {
  double worst = 0.0;
  std::string worst_case;
  auto note = [&](const std::string& name, double err) {
    if (err > worst) {
      worst = err;
      worst_case = name;
    }
  };
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::mt19937_64 rng(seed);
    const std::size_t n = 5, F = 4, G = 3;
    auto reduce = [&](nn::Var v, std::mt19937_64& r) {
      nn::Tensor w = random_vector(r, v.value().size());
      return nn::weighted_sum(v, w);
    };
    const std::uint64_t wseed = seed + 1000;
    auto with_weights = [&](std::function<nn::Var(nn::Tape&, const std::vector<nn::Var>&)> body) -> TapeFn {
      return [=](nn::Tape& t, const std::vector<nn::Var>& v) {
        std::mt19937_64 r(wseed);
        return reduce(body(t, v), r);
      };
    };

    note("matmul", max_gradient_error(with_weights([](nn::Tape&, const auto& v) { return nn::matmul(v[0], v[1]); }),
                                      {random_matrix(rng, n, F), random_matrix(rng, F, G)}));
    note("matmul(vector)",
         max_gradient_error(with_weights([](nn::Tape&, const auto& v) { return nn::matmul(v[0], v[1]); }),
                            {random_vector(rng, F), random_matrix(rng, F, G)}));
    note("add_row_bias",
         max_gradient_error(with_weights([](nn::Tape&, const auto& v) { return nn::add_row_bias(v[0], v[1]); }),
                            {random_matrix(rng, n, G), random_vector(rng, G)}));
    note("selu", max_gradient_error(with_weights([](nn::Tape&, const auto& v) { return nn::selu(v[0]); }),
                                    {random_matrix(rng, n, F, 2.0)}));
    note("channel_mean_pool",
         max_gradient_error(with_weights([](nn::Tape&, const auto& v) { return nn::channel_mean_pool(v[0], 2); }),
                            {random_matrix(rng, n, F)}));
    note("global_mean_pool",
         max_gradient_error(with_weights([](nn::Tape&, const auto& v) { return nn::global_mean_pool(v[0]); }),
                            {random_matrix(rng, n, F)}));
    const auto edges = random_edges(rng, n, 0.5);
    const auto graph = nn::AttentionGraph::from_edges(n, edges);
    note("gat_aggregate", max_gradient_error(with_weights([graph](nn::Tape&, const auto& v) {
                                               return nn::gat_aggregate(v[0], v[1], graph);
                                             }),
                                             {random_matrix(rng, n, F), random_vector(rng, 2 * F + 4)}));
    note("fc_forward", max_gradient_error(with_weights([](nn::Tape&, const auto& v) {
                                            return nn::fc_forward(v[0], v[1], v[2]);
                                          }),
                                          {random_vector(rng, F), random_matrix(rng, F, G), random_vector(rng, G)}));
    note("fc_forward(matrix)", max_gradient_error(with_weights([](nn::Tape&, const auto& v) {
                                                    return nn::fc_forward(v[0], v[1], v[2]);
                                                  }),
                                                  {random_matrix(rng, n, F), random_matrix(rng, F, G),
                                                   random_vector(rng, G)}));
    for (std::size_t label : {0u, 1u})
      note("hinge_loss", max_gradient_error([label](nn::Tape&, const auto& v) { return nn::hinge_loss(v[0], label); },
                                            {random_vector(rng, 2, 0.4)}));
    note("weighted_sum", max_gradient_error(with_weights([](nn::Tape&, const auto& v) { return v[0]; }),
                                            {random_matrix(rng, n, F)}));

    const auto g = random_graph(rng, 5, 12, 0.5);
    auto params = ModelParams::initialize(12, 6, 4, 2, derive_seed(seed, 7));
    for (std::size_t label : {0u, 1u}) note("network", max_network_gradient_error(g, params, label));
  }
  return {worst <= 1e-4, "max relative error " + fmt(worst, 3) + " (" + worst_case + "), 10 seeds"};
}

// 2. Spreading tree against the brute-force rules.
Outcome spreading_tree_oracle() {
  std::mt19937_64 rng(2);
  std::size_t mismatches = 0, links = 0;
  for (int c = 0; c < 200; ++c) {
    const auto social = random_social(rng, 2 + pick(rng, 7), uniform(rng, 0.0, 0.6));
    const auto cascade = random_cascade(rng, social, 1 + pick(rng, 6), "c" + std::to_string(c), "url", 1000, 7200);
    const auto tree = estimate_spreading_tree(cascade, social);
    const auto expect = brute_force_parents(cascade, social);
    if (tree.parent != expect) ++mismatches;
    for (const auto& p : tree.parent) links += p.has_value();
  }
  return {mismatches == 0, std::to_string(mismatches) + " of 200 cascades differ (" + std::to_string(links) +
                               " parent links compared)"};
}

// 3. Trapezoid AUC against pairwise counting.
Outcome roc_oracle() {
  std::mt19937_64 rng(3);
  double worst = 0.0;
  auto check = [&](const std::vector<double>& s, const std::vector<bool>& y) {
    worst = std::max(worst, std::abs(eval::roc_auc(s, y).auc - pairwise_auc(s, y)));
  };
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 2 + pick(rng, 49);
    std::vector<double> s(n);
    std::vector<bool> y(n);
    const int mode = t % 4;
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = uniform(rng, 0.0, 1.0) < 0.4;
      s[i] = mode == 0 ? uniform(rng, -1.0, 1.0) : static_cast<double>(pick(rng, mode == 1 ? 3 : 8));
    }
    y[0] = true;
    y[1] = false;
    if (mode == 3) std::fill(s.begin(), s.end(), 0.25);
    check(s, y);
    if (mode == 2) {
      for (std::size_t i = 0; i < n; ++i) s[i] = y[i] ? 1.0 + uniform(rng, 0.0, 1.0) : uniform(rng, -1.0, 0.0);
      check(s, y);
    }
  }
  const double all_ties = eval::roc_auc(std::vector<double>(10, 3.0), {true, false, true, false, false, false,
                                                                      true, false, false, false}).auc;
  const double separated = eval::roc_auc(std::vector<double>{0.1, 0.2, 0.8, 0.9}, {false, false, true, true}).auc;
  const bool edges = all_ties == 0.5 && separated == 1.0;
  return {worst <= 1e-12 && edges, "max deviation " + fmt(worst, 3) + " over 1000+ instances; all ties " +
                                       fmt(all_ties) + ", separated " + fmt(separated)};
}

// 4. GC layers equivariant and scores invariant under node relabeling.
Outcome permutation_invariance() {
  std::mt19937_64 rng(4);
  const auto& schema = FeatureSchema::standard();
  double worst = 0.0;
  for (int g = 0; g < 100; ++g) {
    const auto graph = random_graph(rng, 1 + pick(rng, 20), schema.width(), uniform(rng, 0.05, 0.6));
    ModelParams params = ModelParams::initialize(schema.width(), 64, 32, 2, static_cast<std::uint64_t>(g));
    const auto att = nn::AttentionGraph::from_edges(graph.num_nodes(), graph.edges);
    nn::Tape tape;
    const auto base = record_forward(tape, graph.node_features, att, params, false);
    for (int p = 0; p < 10; ++p) {
      const auto perm = random_permutation(rng, graph.num_nodes());
      const auto pg = permute_graph(graph, perm);
      const auto patt = nn::AttentionGraph::from_edges(pg.num_nodes(), pg.edges);
      nn::Tape t2;
      const auto r = record_forward(t2, pg.node_features, patt, params, false);
      for (std::size_t k = 0; k < 2; ++k)
        worst = std::max(worst, std::abs(r.scores.value()[k] - base.scores.value()[k]));
      for (const auto& [a, b] : {std::pair(base.gc1, r.gc1), std::pair(base.gc2, r.gc2)}) {
        const auto& x = a.value();
        const auto& y = b.value();
        for (std::size_t i = 0; i < graph.num_nodes(); ++i)
          for (std::size_t c = 0; c < x.cols(); ++c) worst = std::max(worst, std::abs(x(i, c) - y(perm[i], c)));
      }
    }
  }
  return {worst <= 1e-9, "max deviation " + fmt(worst, 3) + " over 100 graphs x 10 relabelings"};
}

// 5. Truncated node sets nest across 0..24 h.
Outcome truncation_nesting() {
  const auto& ds = default_dataset();
  std::size_t violations = 0, checked = 0, full_mismatch = 0, full_eligible = 0;
  auto ids = [](const std::vector<CascadeRecord>& cs) {
    std::set<std::string> s;
    for (const auto& c : cs)
      for (const auto& t : c.tweets) s.insert(t.tweet_id);
    return s;
  };
  const std::size_t n = std::min<std::size_t>(1000, ds.cascades.size());
  for (std::size_t k = 0; k < n; ++k) {
    const std::span<const CascadeRecord> one(&ds.cascades[k], 1);
    std::vector<std::set<std::string>> sets;
    for (int d = 0; d <= 24; ++d) sets.push_back(ids(truncate(one, d)));
    for (int a = 0; a <= 24; ++a)
      for (int b = a; b <= 24; ++b) {
        ++checked;
        if (!std::includes(sets[b].begin(), sets[b].end(), sets[a].begin(), sets[a].end())) ++violations;
      }
    const auto& c = ds.cascades[k];
    if (c.tweets.back().timestamp - c.root_time() < 24 * kSecondsPerHour) {
      ++full_eligible;
      if (sets[24] != ids({c})) ++full_mismatch;
    }
    if (sets[0].count(c.tweets.front().tweet_id) == 0) ++violations;
  }
  return {n == 1000 && violations == 0 && full_mismatch == 0,
          std::to_string(checked) + " pairs over " + std::to_string(n) + " cascades, " + std::to_string(violations) +
              " violations; 24 h full on " + std::to_string(full_eligible - full_mismatch) + "/" +
              std::to_string(full_eligible)};
}

// 6. AMSGrad single step, v_hat monotonicity, convergence on a quadratic bowl.
Outcome amsgrad_behavior() {
  nn::OptimizerState st;
  st.learning_rate = 0.1;
  nn::AmsGradSlot slot;
  std::vector<double> theta{1.0};
  const std::vector<double> g{1.0};
  nn::amsgrad_update(theta, g, slot, st);
  const double expect = 1.0 - 0.1 * 0.1 / (std::sqrt(0.001) + 1e-8);
  const bool step_ok = std::abs(theta[0] - expect) <= 1e-6 && std::abs(theta[0] - 0.68377) <= 1e-5;

  std::mt19937_64 rng(6);
  nn::AmsGradSlot s2;
  std::vector<double> p(8, 0.0), grad(8);
  bool monotone = true;
  std::vector<double> prev(8, 0.0);
  for (int t = 0; t < 10000; ++t) {
    const double scale = std::exp(uniform(rng, -6.0, 3.0));
    for (auto& x : grad) x = scale * uniform(rng, -1.0, 1.0);
    nn::amsgrad_update(p, grad, s2, nn::OptimizerState{});
    for (std::size_t i = 0; i < 8; ++i) {
      if (s2.v_hat[i] < prev[i] || s2.v_hat[i] < s2.v[i] || s2.v[i] < 0.0) monotone = false;
      prev[i] = s2.v_hat[i];
    }
  }

  nn::AmsGradSlot s3;
  std::vector<double> x{0.0};
  for (int t = 0; t < 5000; ++t) {
    const std::vector<double> gx{2.0 * (x[0] - 3.0)};
    nn::amsgrad_update(x, gx, s3, st);
  }
  const bool converged = std::abs(x[0] - 3.0) < 1e-2;
  return {step_ok && monotone && converged, "step " + fmt(theta[0], 8) + " (expect " + fmt(expect, 8) +
                                                "), v_hat monotone " + (monotone ? "yes" : "no") + ", bowl |x-3| " +
                                                fmt(std::abs(x[0] - 3.0), 3)};
}

// 7. End-to-end AUC at 24 h and 0 h in both scopes on the default generator.
Outcome end_to_end() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto& ds = default_dataset();
  std::string detail;
  bool pass = true;
  for (Scope scope : {Scope::url_wise, Scope::cascade_wise}) {
    eval::ExperimentConfig cfg;
    cfg.scope = scope;
    cfg.min_cascade_size = scope == Scope::cascade_wise ? 6 : 1;
    cfg.jobs = workers();
    cfg.model = ModelConfig::defaults_for(scope);
    const std::vector<double> hours{24.0, 0.0};
    const auto sweep = eval::diffusion_sweep(ds, cfg, hours);
    const double a24 = sweep[0].cv.mean_auc, a0 = sweep[1].cv.mean_auc;
    const double floor = scope == Scope::url_wise ? 0.85 : 0.80;
    pass = pass && a24 >= floor && a24 >= a0 + 0.05;
    detail += to_string(scope) + ": AUC24 " + fmt(a24) + " +/- " + fmt(sweep[0].cv.std_auc) + ", AUC0 " + fmt(a0) +
              " (" + std::to_string(sweep[0].cv.num_samples) + " samples); ";
  }
  const double minutes = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / 60.0;
  pass = pass && minutes <= 30.0;
  return {pass, detail + "total " + fmt(minutes, 3) + " min"};
}

// 8. Generator calibration against the published dataset statistics.
Outcome calibration() {
  const auto st = summary_stats(default_dataset());
  const double size = st.mean_cascade_size, fake = st.fake_fraction, cov7 = st.coverage_cascade.at(7);
  const bool pass = std::abs(size - 2.79) <= 0.2 * 2.79 && std::abs(fake - 0.1674) <= 0.02 && std::abs(cov7 - 0.91) <= 0.05;
  return {pass, "mean cascade size " + fmt(size) + ", fake fraction " + fmt(fake) + ", 7 h coverage " + fmt(cov7)};
}

// 9. No-signal CV lands near chance; backward selection is structured and repeatable.
Outcome ablation_sanity() {
  const auto& ds = default_dataset();
  eval::ExperimentConfig cfg;
  cfg.jobs = workers();
  cfg.model = ModelConfig::url_wise_defaults();
  const auto null_cv =
      eval::run_cv_with_groups(ds, cfg, GroupSet::of({FeatureGroup::user_activity, FeatureGroup::content}));
  const bool chance = null_cv.mean_auc >= 0.4 && null_cv.mean_auc <= 0.6;

  eval::ExperimentConfig quick = cfg;
  quick.model.iterations = 1000;
  const auto a = eval::backward_feature_selection(ds, quick);
  quick.jobs = 1;
  const auto b = eval::backward_feature_selection(ds, quick);
  bool structure = a.levels.size() == 4 && a.importance.size() == 4;
  for (std::size_t i = 0; structure && i < 4; ++i) structure = a.levels[i].active.count() == 4 - i;
  std::set<FeatureGroup> distinct(a.importance.begin(), a.importance.end());
  structure = structure && distinct.size() == 4;
  bool same = a.importance == b.importance && a.levels.size() == b.levels.size();
  for (std::size_t i = 0; same && i < a.levels.size(); ++i)
    same = a.levels[i].active == b.levels[i].active && a.levels[i].test_auc == b.levels[i].test_auc &&
           a.levels[i].validation_auc == b.levels[i].validation_auc;
  std::string order;
  for (auto g : a.importance) order += (order.empty() ? "" : " > ") + to_string(g);
  return {chance && structure && same, "null-signal AUC " + fmt(null_cv.mean_auc) + " +/- " + fmt(null_cv.std_auc) +
                                           "; " + std::to_string(a.levels.size()) + " levels, order " + order +
                                           (same ? ", repeatable" : ", NOT repeatable")};
}

// 10. Every CLI command reproduces byte-identical reports.
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::map<std::string, std::string> tree_contents(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = slurp(e.path());
  return out;
}

Outcome cli_determinism() {
  const fs::path work = fs::temp_directory_path() / ("cascade_gnn_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(work);
  fs::create_directories(work);
  const std::string cli = CASCADE_GNN_CLI;
  auto run = [&](const std::string& args) {
    const std::string cmd = "\"" + cli + "\" " + args + " > /dev/null 2>&1";
    return std::system(cmd.c_str());
  };
  const std::string gen = " --users 1500 --urls 60 --seed 7";
  std::vector<std::string> failed;
  std::size_t compared = 0;
  // The second run may use a different worker count; reports must not depend on it.
  auto twice = [&](const std::string& name, const std::string& args, bool vary_jobs) {
    const auto a = work / (name + "_a"), b = work / (name + "_b");
    const std::string second_extra = vary_jobs ? " --jobs 2" : "";
    const int ra = run(args + (vary_jobs ? " --jobs 1" : "") + " --out " + a.string());
    const int rb = run(args + second_extra + " --out " + b.string());
    if (ra != 0 || rb != 0 || !fs::exists(a) || !fs::exists(b)) {
      failed.push_back(name + " (exit " + std::to_string(ra) + "/" + std::to_string(rb) + ")");
      return;
    }
    const auto x = tree_contents(a), y = tree_contents(b);
    compared += x.size();
    if (x.empty() || x != y) failed.push_back(name);
  };
  twice("generate", "generate" + gen, false);
  const std::string data = " --data " + (work / "generate_a").string();
  const std::string it = " --iterations 300";
  twice("train", "train" + data + it, true);
  twice("cv", "cv" + data + it, true);
  twice("cv-cascade", "cv --scope cascade --min-cascade-size 3" + data + it, true);
  twice("sweep", "sweep --hours 0..24:6" + data + " --iterations 200", true);
  twice("aging", "aging" + data + it, true);
  twice("ablate", "ablate" + data + " --iterations 100", true);
  twice("export-embeddings", "export-embeddings" + data + it, false);
  twice("export-embeddings-checkpoint",
        "export-embeddings" + data + " --checkpoint " + (work / "train_a" / "model.json").string(), false);
  twice("layout", "layout" + data + " --max-users 400", false);
  twice("stats", "stats" + data, false);
  fs::remove_all(work);
  std::string detail = std::to_string(compared) + " files compared";
  for (const auto& f : failed) detail += "; differs: " + f;
  return {failed.empty() && compared > 0, detail};
}

struct Criterion {
  int id;
  const char* name;
  Outcome (*run)();
};

const std::vector<Criterion> kCriteria = {
    {1, "gradient correctness", gradient_check},
    {2, "spreading-tree oracle", spreading_tree_oracle},
    {3, "ROC AUC oracle", roc_oracle},
    {4, "permutation invariance", permutation_invariance},
    {5, "truncation nesting", truncation_nesting},
    {6, "AMSGrad behavior", amsgrad_behavior},
    {7, "end-to-end AUC trends", end_to_end},
    {8, "generator calibration", calibration},
    {9, "ablation sanity", ablation_sanity},
    {10, "CLI determinism", cli_determinism},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  int which = 0;
  app.add_option("--criterion", which, "Run one criterion (1-10); all when omitted")->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);

  int failures = 0;
  for (const auto& c : kCriteria) {
    if (which != 0 && c.id != which) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << "): " << o.detail << " ["
              << fmt(secs, 3) << " s]" << std::endl;
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
