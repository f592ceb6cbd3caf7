#include "cascade_gnn/eval/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "cascade_gnn/common.hpp"

namespace cascade_gnn::eval {

using nlohmann::json;

namespace {

json stamp_json(const RunStamp& s) {
  json j;
  j["config"] = json::parse(s.config_json);
  j["config_hash"] = s.hash_hex();
  j["seed"] = s.seed;
  return j;
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json fold_json(const FoldResult& f) {
  json j;
  j["fold"] = f.fold;
  j["auc"] = number(f.auc);
  j["best_iteration"] = f.best_iteration;
  j["best_validation_auc"] = number(f.best_validation_auc);
  j["train_size"] = f.train_size;
  j["validation_size"] = f.validation_size;
  j["test_size"] = f.test_ids.size();
  j["test_fake"] = std::count(f.labels.begin(), f.labels.end(), true);
  return j;
}

json cv_json(const CvResult& cv) {
  json j;
  j["mean_auc"] = number(cv.mean_auc);
  j["std_auc"] = number(cv.std_auc);
  j["mean_validation_auc"] = number(cv.mean_validation_auc);
  j["num_samples"] = cv.num_samples;
  json folds = json::array();
  for (const auto& f : cv.folds) folds.push_back(fold_json(f));
  j["folds"] = folds;
  return j;
}

std::string groups_string(GroupSet g) {
  std::string s;
  for (auto x : g.groups()) s += (s.empty() ? "" : "+") + to_string(x);
  return s;
}

}  // namespace

std::string RunStamp::csv_header() const {
  return "# config_hash=" + hash_hex() + " seed=" + std::to_string(seed) + "\n";
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

std::string roc_csv(const CvResult& cv, const RunStamp& stamp) {
  std::string s = stamp.csv_header() + "curve,fpr,tpr,tpr_std\n";
  for (const auto& f : cv.folds)
    for (const auto& p : f.roc.points)
      s += "fold" + std::to_string(f.fold) + "," + format_number(p.fpr) + "," + format_number(p.tpr) + ",\n";
  for (std::size_t i = 0; i < cv.mean_roc.fpr.size(); ++i)
    s += "mean," + format_number(cv.mean_roc.fpr[i]) + "," + format_number(cv.mean_roc.tpr_mean[i]) + "," +
         format_number(cv.mean_roc.tpr_std[i]) + "\n";
  return s;
}

std::string sweep_csv(const std::vector<SweepPoint>& sweep, const RunStamp& stamp) {
  std::size_t k = sweep.empty() ? 0 : sweep.front().cv.folds.size();
  std::string s = stamp.csv_header() + "hours,coverage,mean_auc,std_auc";
  for (std::size_t f = 0; f < k; ++f) s += ",fold" + std::to_string(f) + "_auc";
  s += "\n";
  for (const auto& p : sweep) {
    s += format_number(p.hours) + "," + format_number(p.coverage) + "," + format_number(p.cv.mean_auc) + "," +
         format_number(p.cv.std_auc);
    for (const auto& f : p.cv.folds) s += "," + format_number(f.auc);
    s += "\n";
  }
  return s;
}

std::string aging_csv(const AgingResult& a, const RunStamp& stamp) {
  std::string s = stamp.csv_header() + "window,begin,end,size,mean_time,num_fake,auc_24h,auc_0h,auc_cv_reference\n";
  for (std::size_t i = 0; i < a.windows.size(); ++i) {
    const auto& w = a.windows[i];
    s += std::to_string(i) + "," + std::to_string(w.begin) + "," + std::to_string(w.end) + "," +
         std::to_string(w.end - w.begin) + "," + format_number(w.mean_time) + "," + std::to_string(w.num_fake) + "," +
         format_number(w.auc_24h) + "," + format_number(w.auc_0h) + "," + format_number(a.cv_reference_auc) + "\n";
  }
  return s;
}

std::string ablation_csv(const AblationResult& r, const RunStamp& stamp) {
  std::string s = stamp.csv_header() + "level,num_groups,active,removed,validation_auc,test_auc,test_std\n";
  for (std::size_t i = 0; i < r.levels.size(); ++i) {
    const auto& l = r.levels[i];
    s += std::to_string(i) + "," + std::to_string(l.active.count()) + "," + groups_string(l.active) + "," +
         (l.removed ? to_string(*l.removed) : std::string{}) + "," + format_number(l.validation_auc) + "," +
         format_number(l.test_auc) + "," + format_number(l.test_std) + "\n";
  }
  return s;
}

std::string layout_csv(const std::vector<std::string>& user_ids, const std::vector<Point2>& pos,
                       const std::map<std::string, double>& credibility, const RunStamp& stamp) {
  std::string s = stamp.csv_header() + "user_id,x,y,credibility\n";
  for (std::size_t i = 0; i < user_ids.size(); ++i) {
    const auto it = credibility.find(user_ids[i]);
    s += user_ids[i] + "," + format_number(pos[i].x) + "," + format_number(pos[i].y) + "," +
         (it == credibility.end() ? std::string{} : format_number(it->second)) + "\n";
  }
  return s;
}

std::string embeddings_csv(const std::map<std::string, std::vector<double>>& embeddings,
                           const std::map<std::string, double>& credibility, const RunStamp& stamp) {
  std::string s = stamp.csv_header() + "user_id,credibility";
  const std::size_t dim = embeddings.empty() ? 0 : embeddings.begin()->second.size();
  for (std::size_t c = 0; c < dim; ++c) s += ",e" + std::to_string(c);
  s += "\n";
  for (const auto& [uid, v] : embeddings) {
    const auto it = credibility.find(uid);
    s += uid + "," + (it == credibility.end() ? std::string{} : format_number(it->second));
    for (double x : v) s += "," + format_number(x);
    s += "\n";
  }
  return s;
}

std::string cv_report(const CvResult& cv, const RunStamp& stamp, double coverage) {
  json j = stamp_json(stamp);
  j["cv"] = cv_json(cv);
  j["coverage"] = number(coverage);
  return j.dump(2) + "\n";
}

std::string sweep_report(const std::vector<SweepPoint>& sweep, const RunStamp& stamp) {
  json j = stamp_json(stamp);
  json pts = json::array();
  for (const auto& p : sweep) {
    json x = cv_json(p.cv);
    x["hours"] = p.hours;
    x["coverage"] = number(p.coverage);
    pts.push_back(x);
  }
  j["sweep"] = pts;
  return j.dump(2) + "\n";
}

std::string aging_report(const AgingResult& a, const RunStamp& stamp) {
  json j = stamp_json(stamp);
  j["train_urls"] = a.train_ids.size();
  j["validation_urls"] = a.validation_ids.size();
  j["test_urls"] = a.test_ids.size();
  j["mean_window_iou"] = number(a.mean_iou);
  j["std_window_iou"] = number(a.std_iou);
  j["holdout_auc_24h"] = number(a.holdout_auc_24h);
  j["holdout_auc_0h"] = number(a.holdout_auc_0h);
  j["cv_reference_auc"] = number(a.cv_reference_auc);
  j["cv_reference_std"] = number(a.cv_reference_std);
  json ws = json::array();
  for (const auto& w : a.windows)
    ws.push_back({{"begin", w.begin},
                  {"end", w.end},
                  {"mean_time", w.mean_time},
                  {"num_fake", w.num_fake},
                  {"auc_24h", number(w.auc_24h)},
                  {"auc_0h", number(w.auc_0h)}});
  j["windows"] = ws;
  return j.dump(2) + "\n";
}

std::string ablation_report(const AblationResult& r, const RunStamp& stamp) {
  json j = stamp_json(stamp);
  json levels = json::array();
  for (const auto& l : r.levels) {
    json g = json::array();
    for (auto x : l.active.groups()) g.push_back(to_string(x));
    levels.push_back({{"active", g},
                      {"removed", l.removed ? json(to_string(*l.removed)) : json(nullptr)},
                      {"validation_auc", number(l.validation_auc)},
                      {"test_auc", number(l.test_auc)},
                      {"test_std", number(l.test_std)}});
  }
  j["levels"] = levels;
  json imp = json::array();
  for (auto g : r.importance) imp.push_back(to_string(g));
  j["importance"] = imp;
  return j.dump(2) + "\n";
}

std::string train_report(const TrainResult& r, double test_auc, std::size_t test_size, const RunStamp& stamp) {
  json j = stamp_json(stamp);
  j["best_iteration"] = r.best_iteration;
  j["best_validation_auc"] = number(r.best_validation_auc);
  j["test_auc"] = number(test_auc);
  j["test_size"] = test_size;
  j["iterations"] = r.loss_trace.size();
  double tail = 0.0;
  const std::size_t n = std::min<std::size_t>(500, r.loss_trace.size());
  for (std::size_t i = r.loss_trace.size() - n; i < r.loss_trace.size(); ++i) tail += r.loss_trace[i];
  j["final_mean_loss"] = n == 0 ? json(nullptr) : json(tail / static_cast<double>(n));
  json val = json::array();
  for (const auto& p : r.validation)
    val.push_back({{"iteration", p.iteration}, {"auc", number(p.auc)}, {"loss", number(p.loss)}});
  j["validation"] = val;
  return j.dump(2) + "\n";
}

std::string stats_report(const SummaryStats& stats, const MadMmd* url_view, const MadMmd* cascade_view,
                         const RunStamp& stamp) {
  json j = stamp_json(stamp);
  j["stats"] = json::parse(stats.to_json());
  auto mm = [](const MadMmd& m) {
    return json{{"mad_mean", m.mad_mean}, {"mad_std", m.mad_std},         {"mmd_mean", m.mmd_mean},
                {"mmd_std", m.mmd_std},   {"samples_used", m.samples_used}, {"samples_skipped", m.samples_skipped},
                {"distance_cap", m.cap}};
  };
  if (url_view) j["mad_mmd"]["url"] = mm(*url_view);
  if (cascade_view) j["mad_mmd"]["cascade"] = mm(*cascade_view);
  return j.dump(2) + "\n";
}

std::string layout_report(std::size_t num_users, std::size_t num_edges, double k, const RunStamp& stamp) {
  json j = stamp_json(stamp);
  j["num_users"] = num_users;
  j["num_edges"] = num_edges;
  j["optimal_distance"] = k;
  return j.dump(2) + "\n";
}

}  // namespace cascade_gnn::eval
