#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "cascade_gnn/common.hpp"
#include "cascade_gnn/eval/analysis.hpp"
#include "cascade_gnn/eval/harness.hpp"
#include "cascade_gnn/synthgen.hpp"

namespace cascade_gnn::eval {

/// Identity of a run: canonical config JSON (sorted keys) and the global seed.
struct RunStamp {
  std::string config_json = "{}";
  std::uint64_t seed = 0;

  std::uint64_t hash() const { return fnv1a64(config_json); }
  std::string hash_hex() const { return hex64(hash()); }
  /// "# config_hash=<hex> seed=<n>\n"
  std::string csv_header() const;
};

/// Shortest round-trip decimal; "nan" for NaN.
std::string format_number(double v);

/// Throws IoError when the file cannot be written.
void write_text(const std::filesystem::path& path, const std::string& text);

std::string roc_csv(const CvResult& cv, const RunStamp& stamp);
std::string sweep_csv(const std::vector<SweepPoint>& sweep, const RunStamp& stamp);
std::string aging_csv(const AgingResult& aging, const RunStamp& stamp);
std::string ablation_csv(const AblationResult& ablation, const RunStamp& stamp);
std::string layout_csv(const std::vector<std::string>& user_ids, const std::vector<Point2>& pos,
                       const std::map<std::string, double>& credibility, const RunStamp& stamp);
std::string embeddings_csv(const std::map<std::string, std::vector<double>>& embeddings,
                           const std::map<std::string, double>& credibility, const RunStamp& stamp);

/// JSON documents (2-space indent, sorted keys) with "config", "config_hash" and "seed".
std::string cv_report(const CvResult& cv, const RunStamp& stamp, double coverage);
std::string sweep_report(const std::vector<SweepPoint>& sweep, const RunStamp& stamp);
std::string aging_report(const AgingResult& aging, const RunStamp& stamp);
std::string ablation_report(const AblationResult& ablation, const RunStamp& stamp);
std::string train_report(const TrainResult& result, double test_auc, std::size_t test_size, const RunStamp& stamp);
/// MAD/MMD entries are omitted when null.
std::string stats_report(const SummaryStats& stats, const MadMmd* url_view, const MadMmd* cascade_view,
                         const RunStamp& stamp);
std::string layout_report(std::size_t num_users, std::size_t num_edges, double k, const RunStamp& stamp);

}  // namespace cascade_gnn::eval
