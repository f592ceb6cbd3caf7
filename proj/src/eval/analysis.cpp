#include "cascade_gnn/eval/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <random>
#include <set>
#include <unordered_map>

#include "cascade_gnn/common.hpp"
#include "cascade_gnn/eval/harness.hpp"

namespace cascade_gnn::eval {

namespace {

constexpr std::size_t kUnreached = std::numeric_limits<std::size_t>::max();

std::pair<double, double> mean_std(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return {m, std::sqrt(ss / static_cast<double>(v.size()))};
}

}  // namespace

std::vector<std::size_t> multi_source_hops(const SocialGraph& social, std::span<const UserIndex> sources) {
  std::vector<std::size_t> dist(social.size(), kUnreached);
  std::deque<UserIndex> queue;
  for (UserIndex s : sources) {
    if (s >= social.size()) throw InvalidInput("hop source out of range");
    if (dist[s] != 0) {
      dist[s] = 0;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    const UserIndex u = queue.front();
    queue.pop_front();
    auto visit = [&](UserIndex v) {
      if (dist[v] == kUnreached) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    };
    for (UserIndex v : social.following(u)) visit(v);
    for (UserIndex v : social.followers(u)) visit(v);
  }
  return dist;
}

std::size_t estimate_diameter(const SocialGraph& social) {
  if (social.size() == 0) return 0;
  std::size_t best = 0;
  UserIndex start = 0;
  for (int sweep = 0; sweep < 4; ++sweep) {
    const UserIndex src[] = {start};
    const auto d = multi_source_hops(social, src);
    std::size_t far = 0;
    UserIndex arg = start;
    for (UserIndex u = 0; u < d.size(); ++u) {
      if (d[u] != kUnreached && d[u] > far) {
        far = d[u];
        arg = u;
      }
    }
    if (far <= best && sweep > 0) break;
    best = std::max(best, far);
    start = arg;
  }
  return best;
}

MadMmd mad_mmd(std::span<const std::vector<UserIndex>> samples, const SocialGraph& social, std::size_t cap) {
  MadMmd out;
  out.cap = cap == 0 ? estimate_diameter(social) + 1 : cap;
  std::vector<std::size_t> nonempty;
  for (std::size_t t = 0; t < samples.size(); ++t) {
    if (samples[t].empty()) ++out.samples_skipped;
    else nonempty.push_back(t);
  }
  if (nonempty.size() < 2) throw InvalidInput("mad_mmd needs at least two non-empty samples");

  // Number of samples each user appears in.
  std::vector<std::uint32_t> count(social.size(), 0);
  std::vector<std::vector<UserIndex>> distinct(samples.size());
  for (std::size_t t : nonempty) {
    std::set<UserIndex> s(samples[t].begin(), samples[t].end());
    distinct[t].assign(s.begin(), s.end());
    for (UserIndex u : distinct[t]) {
      if (u >= social.size()) throw InvalidInput("sample user out of range");
      ++count[u];
    }
  }

  std::vector<double> mads, mmds;
  std::vector<bool> mine(social.size(), false);
  for (std::size_t t : nonempty) {
    for (UserIndex u : distinct[t]) mine[u] = true;
    std::vector<UserIndex> others;
    for (UserIndex u = 0; u < social.size(); ++u)
      if (count[u] > (mine[u] ? 1u : 0u)) others.push_back(u);
    for (UserIndex u : distinct[t]) mine[u] = false;

    std::vector<double> d;
    if (others.empty()) {
      d.assign(distinct[t].size(), static_cast<double>(out.cap));
    } else {
      const auto hops = multi_source_hops(social, others);
      for (UserIndex u : distinct[t])
        d.push_back(static_cast<double>(hops[u] == kUnreached ? out.cap : std::min(hops[u], out.cap)));
    }
    double sum = 0.0, mn = std::numeric_limits<double>::infinity();
    for (double x : d) {
      sum += x;
      mn = std::min(mn, x);
    }
    mads.push_back(sum / static_cast<double>(d.size()));
    mmds.push_back(mn);
  }
  out.samples_used = nonempty.size();
  std::tie(out.mad_mean, out.mad_std) = mean_std(mads);
  std::tie(out.mmd_mean, out.mmd_std) = mean_std(mmds);
  return out;
}

std::vector<std::vector<UserIndex>> sample_users(const Dataset& ds, Scope scope, std::size_t min_cascade_size) {
  std::vector<std::vector<UserIndex>> out;
  for (const auto& src : sample_sources(ds, scope, min_cascade_size)) {
    std::set<UserIndex> users;
    for (const auto& c : src.cascades)
      for (const auto& t : c.tweets) users.insert(ds.social.index_of(t.author));
    out.emplace_back(users.begin(), users.end());
  }
  return out;
}

double fr_optimal_distance(std::size_t num_nodes, double area) {
  return num_nodes == 0 ? 0.0 : std::sqrt(area / static_cast<double>(num_nodes));
}

std::vector<Point2> fr_layout(std::size_t n, std::span<const std::pair<std::size_t, std::size_t>> edges,
                              const LayoutOptions& opt) {
  std::mt19937_64 rng(derive_seed(opt.seed, 0xf7));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Point2> pos(n);
  for (auto& p : pos) {
    p.x = u(rng);
    p.y = u(rng);
  }
  for (const auto& [a, b] : edges)
    if (a >= n || b >= n) throw InvalidInput("layout edge out of range");
  if (n < 2) return pos;

  const double k = fr_optimal_distance(n, opt.area);
  const double k2 = k * k;
  std::vector<Point2> disp(n);
  for (std::size_t it = 0; it < opt.iterations; ++it) {
    const double temp =
        opt.initial_temperature * (1.0 - static_cast<double>(it) / static_cast<double>(opt.iterations));
    std::fill(disp.begin(), disp.end(), Point2{});
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        double dx = pos[i].x - pos[j].x, dy = pos[i].y - pos[j].y;
        double d2 = dx * dx + dy * dy;
        if (d2 < 1e-18) {
          dx = 1e-9 * static_cast<double>(i + 1);
          dy = 0.0;
          d2 = dx * dx;
        }
        // (dx/d) * k^2/d
        const double f = k2 / d2;
        disp[i].x += dx * f;
        disp[i].y += dy * f;
        disp[j].x -= dx * f;
        disp[j].y -= dy * f;
      }
    }
    for (const auto& [a, b] : edges) {
      if (a == b) continue;
      const double dx = pos[a].x - pos[b].x, dy = pos[a].y - pos[b].y;
      const double d = std::sqrt(dx * dx + dy * dy);
      // (dx/d) * d^2/k
      const double f = d / k;
      disp[a].x -= dx * f;
      disp[a].y -= dy * f;
      disp[b].x += dx * f;
      disp[b].y += dy * f;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double len = std::sqrt(disp[i].x * disp[i].x + disp[i].y * disp[i].y);
      if (len <= 0.0) continue;
      const double step = std::min(len, temp) / len;
      pos[i].x += disp[i].x * step;
      pos[i].y += disp[i].y * step;
    }
  }
  return pos;
}

LayoutGraph layout_subgraph(const Dataset& ds, std::size_t max_users) {
  std::unordered_map<std::string, std::set<std::string>> stories_of;
  for (const auto& c : ds.cascades)
    for (const auto& t : c.tweets) stories_of[t.author].insert(c.url_id);
  std::vector<std::pair<std::size_t, UserIndex>> ranked;
  for (const auto& [uid, urls] : stories_of) ranked.push_back({urls.size(), ds.social.index_of(uid)});
  std::sort(ranked.begin(), ranked.end(), [&](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : ds.social.user(a.second).user_id < ds.social.user(b.second).user_id;
  });
  if (ranked.size() > max_users) ranked.resize(max_users);

  LayoutGraph g;
  for (const auto& r : ranked) g.users.push_back(r.second);
  std::sort(g.users.begin(), g.users.end(),
            [&](UserIndex a, UserIndex b) { return ds.social.user(a).user_id < ds.social.user(b).user_id; });
  std::unordered_map<UserIndex, std::size_t> local;
  for (std::size_t i = 0; i < g.users.size(); ++i) local[g.users[i]] = i;
  std::set<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < g.users.size(); ++i) {
    for (UserIndex v : ds.social.following(g.users[i])) {
      const auto it = local.find(v);
      if (it != local.end()) edges.insert({std::min(i, it->second), std::max(i, it->second)});
    }
  }
  g.edges.assign(edges.begin(), edges.end());
  return g;
}

std::map<std::string, std::vector<double>> user_embeddings(std::span<const Sample> samples, const ModelParams& params) {
  std::map<std::string, std::vector<double>> sum;
  std::map<std::string, std::size_t> count;
  for (const auto& s : samples) {
    const auto r = forward(s.graph, s.attention, params);
    for (std::size_t i = 0; i < s.graph.num_nodes(); ++i) {
      auto& acc = sum[s.graph.node_authors[i]];
      const auto row = r.node_embeddings.row(i);
      if (acc.empty()) acc.assign(row.size(), 0.0);
      for (std::size_t c = 0; c < row.size(); ++c) acc[c] += row[c];
      ++count[s.graph.node_authors[i]];
    }
  }
  for (auto& [uid, v] : sum)
    for (double& x : v) x /= static_cast<double>(count[uid]);
  return sum;
}

}  // namespace cascade_gnn::eval
