#include "cascade_gnn/nn/ops.hpp"

#include <algorithm>
#include <cmath>

#include "cascade_gnn/common.hpp"

namespace cascade_gnn::nn {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw InvalidInput(msg);
}

bool any_grad(std::initializer_list<Var> vs) {
  for (const auto& v : vs)
    if (v.requires_grad()) return true;
  return false;
}

double leaky(double s) { return s > 0.0 ? s : kLeakySlope * s; }

}  // namespace

AttentionGraph AttentionGraph::from_edges(std::size_t num_nodes, std::span<const GraphEdge> edges) {
  std::vector<std::vector<std::pair<std::size_t, std::array<double, kEdgeFlagCount>>>> adj(num_nodes);
  for (const auto& e : edges) {
    if (e.i >= num_nodes || e.j >= num_nodes) throw InvalidInput("edge references a missing node");
    if (e.i == e.j) throw InvalidInput("self edges are implicit");
    adj[e.i].emplace_back(e.j, e.flags.as_vector());
    adj[e.j].emplace_back(e.i, e.flags.reversed().as_vector());
  }
  AttentionGraph g;
  g.num_nodes = num_nodes;
  g.offsets.reserve(num_nodes + 1);
  g.offsets.push_back(0);
  for (std::size_t i = 0; i < num_nodes; ++i) {
    auto& l = adj[i];
    std::sort(l.begin(), l.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    g.neighbor.push_back(i);
    g.flags.push_back({0.0, 0.0, 0.0, 0.0});
    for (std::size_t k = 0; k < l.size(); ++k) {
      if (k > 0 && l[k].first == l[k - 1].first) throw InvalidInput("duplicate edge in propagation graph");
      g.neighbor.push_back(l[k].first);
      g.flags.push_back(l[k].second);
    }
    g.offsets.push_back(g.neighbor.size());
  }
  return g;
}

Var matmul(Var a, Var b) {
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  require(B.rank() == 2, "matmul: right operand must be a matrix");
  require(A.cols() == B.rows(), "matmul: inner dimensions differ");
  const std::size_t n = A.rows(), k = A.cols(), m = B.cols();
  Tensor out = A.rank() == 1 ? Tensor::vector(m) : Tensor::matrix(n, m);
  const double* bd = B.data().data();
  for (std::size_t i = 0; i < n; ++i) {
    double* o = out.data().data() + i * m;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = A[i * k + p];
      if (av == 0.0) continue;  // one-hot and masked columns are mostly zero
      const double* br = bd + p * m;
      for (std::size_t j = 0; j < m; ++j) o[j] += av * br[j];
    }
  }
  const auto ia = a.id(), ib = b.id();
  return a.tape().record(std::move(out), any_grad({a, b}), [ia, ib](Tape& t, std::size_t self) {
    const Tensor& A = t.value(ia);
    const Tensor& B = t.value(ib);
    const auto g = t.grad(self);
    const std::size_t n = A.rows(), k = A.cols(), m = B.cols();
    if (t.requires_grad(ib)) {
      auto gb = t.grad_buffer(ib);
      for (std::size_t i = 0; i < n; ++i) {
        const double* gr = g.data() + i * m;
        for (std::size_t p = 0; p < k; ++p) {
          const double av = A[i * k + p];
          if (av == 0.0) continue;
          double* dst = gb.data() + p * m;
          for (std::size_t j = 0; j < m; ++j) dst[j] += av * gr[j];
        }
      }
    }
    if (t.requires_grad(ia)) {
      auto ga = t.grad_buffer(ia);
      const double* bd = B.data().data();
      for (std::size_t i = 0; i < n; ++i) {
        const double* gr = g.data() + i * m;
        for (std::size_t p = 0; p < k; ++p) {
          const double* br = bd + p * m;
          double acc = 0.0;
          for (std::size_t j = 0; j < m; ++j) acc += gr[j] * br[j];
          ga[i * k + p] += acc;
        }
      }
    }
  });
}

Var add_row_bias(Var x, Var bias) {
  const Tensor& X = x.value();
  const Tensor& b = bias.value();
  require(b.rank() == 1 && b.size() == X.cols(), "add_row_bias: bias width mismatch");
  Tensor out = X;
  out.drop_grad();
  const std::size_t m = X.cols();
  for (std::size_t i = 0; i < X.rows(); ++i)
    for (std::size_t j = 0; j < m; ++j) out[i * m + j] += b[j];
  const auto ix = x.id(), ibias = bias.id();
  return x.tape().record(std::move(out), any_grad({x, bias}), [ix, ibias](Tape& t, std::size_t self) {
    const auto g = t.grad(self);
    const std::size_t m = t.value(ibias).size();
    const std::size_t rows = g.size() / m;
    if (t.requires_grad(ix)) {
      auto gx = t.grad_buffer(ix);
      for (std::size_t k = 0; k < g.size(); ++k) gx[k] += g[k];
    }
    if (t.requires_grad(ibias)) {
      auto gb = t.grad_buffer(ibias);
      for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < m; ++j) gb[j] += g[i * m + j];
    }
  });
}

double selu(double x) { return x > 0.0 ? kSeluLambda * x : kSeluLambda * kSeluAlpha * std::expm1(x); }

Var selu(Var x) {
  Tensor out = x.value();
  out.drop_grad();
  for (auto& v : out.data()) v = selu(v);
  const auto ix = x.id();
  return x.tape().record(std::move(out), x.requires_grad(), [ix](Tape& t, std::size_t self) {
    const Tensor& X = t.value(ix);
    const auto g = t.grad(self);
    auto gx = t.grad_buffer(ix);
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double v = X[k];
      gx[k] += g[k] * (v > 0.0 ? kSeluLambda : kSeluLambda * kSeluAlpha * std::exp(v));
    }
  });
}

Var channel_mean_pool(Var x, std::size_t window) {
  const Tensor& X = x.value();
  require(window > 0 && X.cols() % window == 0, "channel_mean_pool: width not divisible by window");
  const std::size_t c = X.cols(), w = c / window, n = X.rows();
  Tensor out = X.rank() == 1 ? Tensor::vector(w) : Tensor::matrix(n, w);
  const double inv = 1.0 / static_cast<double>(window);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t q = 0; q < w; ++q) {
      double s = 0.0;
      for (std::size_t r = 0; r < window; ++r) s += X[i * c + q * window + r];
      out[i * w + q] = s * inv;
    }
  const auto ix = x.id();
  return x.tape().record(std::move(out), x.requires_grad(), [ix, window](Tape& t, std::size_t self) {
    const auto g = t.grad(self);
    auto gx = t.grad_buffer(ix);
    const double inv = 1.0 / static_cast<double>(window);
    for (std::size_t k = 0; k < gx.size(); ++k) gx[k] += g[k / window] * inv;
  });
}

Var global_mean_pool(Var x) {
  const Tensor& X = x.value();
  require(X.rank() == 2 && X.rows() > 0, "global_mean_pool: need at least one node");
  const std::size_t n = X.rows(), c = X.cols();
  Tensor out = Tensor::vector(c);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < c; ++j) out[j] += X[i * c + j];
  const double inv = 1.0 / static_cast<double>(n);
  for (auto& v : out.data()) v *= inv;
  const auto ix = x.id();
  return x.tape().record(std::move(out), x.requires_grad(), [ix](Tape& t, std::size_t self) {
    const auto g = t.grad(self);
    auto gx = t.grad_buffer(ix);
    const std::size_t c = g.size(), n = gx.size() / c;
    const double inv = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < c; ++j) gx[i * c + j] += g[j] * inv;
  });
}

namespace {

struct AttentionForward {
  std::vector<double> pre;    // pre-activation per CSR slot
  std::vector<double> alpha;  // softmax per CSR slot
};

AttentionForward attention_forward(const Tensor& Z, const Tensor& a, const AttentionGraph& g) {
  const std::size_t n = Z.rows(), f = Z.cols();
  std::vector<double> src(n, 0.0), dst(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < f; ++k) {
      src[i] += a[k] * Z[i * f + k];
      dst[i] += a[f + k] * Z[i * f + k];
    }
  }
  AttentionForward fw;
  fw.pre.resize(g.neighbor.size());
  fw.alpha.resize(g.neighbor.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto lo = g.offsets[i], hi = g.offsets[i + 1];
    double mx = -INFINITY;
    for (auto p = lo; p < hi; ++p) {
      double s = src[i] + dst[g.neighbor[p]];
      for (std::size_t q = 0; q < kEdgeFlagCount; ++q) s += a[2 * f + q] * g.flags[p][q];
      fw.pre[p] = s;
      mx = std::max(mx, leaky(s));
    }
    double denom = 0.0;
    for (auto p = lo; p < hi; ++p) {
      fw.alpha[p] = std::exp(leaky(fw.pre[p]) - mx);
      denom += fw.alpha[p];
    }
    for (auto p = lo; p < hi; ++p) fw.alpha[p] /= denom;
  }
  return fw;
}

}  // namespace

std::vector<double> attention_coefficients(const Tensor& z, const Tensor& attention, const AttentionGraph& graph) {
  return attention_forward(z, attention, graph).alpha;
}

Var gat_aggregate(Var z, Var attention, const AttentionGraph& graph) {
  const Tensor& Z = z.value();
  const Tensor& a = attention.value();
  require(Z.rank() == 2 && Z.rows() == graph.num_nodes, "gat: node count does not match graph");
  require(a.rank() == 1 && a.size() == 2 * Z.cols() + kEdgeFlagCount, "gat: attention vector has wrong length");
  const std::size_t n = Z.rows(), f = Z.cols();
  auto fw = attention_forward(Z, a, graph);
  Tensor out = Tensor::matrix(n, f);
  for (std::size_t i = 0; i < n; ++i) {
    double* o = out.data().data() + i * f;
    for (auto p = graph.offsets[i]; p < graph.offsets[i + 1]; ++p) {
      const double al = fw.alpha[p];
      const double* zj = Z.data().data() + graph.neighbor[p] * f;
      for (std::size_t k = 0; k < f; ++k) o[k] += al * zj[k];
    }
  }
  const auto iz = z.id(), ia = attention.id();
  // The graph must outlive the tape; callers keep it alongside the forward pass.
  const AttentionGraph* gp = &graph;
  return z.tape().record(
      std::move(out), any_grad({z, attention}),
      [iz, ia, gp, fw = std::move(fw)](Tape& t, std::size_t self) {
        const AttentionGraph& g = *gp;
        const Tensor& Z = t.value(iz);
        const Tensor& a = t.value(ia);
        const auto go = t.grad(self);
        const std::size_t n = Z.rows(), f = Z.cols();
        std::vector<double> gz(n * f, 0.0), gsrc(n, 0.0), gdst(n, 0.0), gedge(kEdgeFlagCount, 0.0);
        std::vector<double> dalpha;
        for (std::size_t i = 0; i < n; ++i) {
          const auto lo = g.offsets[i], hi = g.offsets[i + 1];
          const double* gi = go.data() + i * f;
          dalpha.assign(hi - lo, 0.0);
          double weighted = 0.0;
          for (auto p = lo; p < hi; ++p) {
            const std::size_t j = g.neighbor[p];
            const double* zj = Z.data().data() + j * f;
            double* gzj = gz.data() + j * f;
            double d = 0.0;
            for (std::size_t k = 0; k < f; ++k) {
              d += gi[k] * zj[k];
              gzj[k] += fw.alpha[p] * gi[k];
            }
            dalpha[p - lo] = d;
            weighted += fw.alpha[p] * d;
          }
          for (auto p = lo; p < hi; ++p) {
            const double de = fw.alpha[p] * (dalpha[p - lo] - weighted);
            const double ds = de * (fw.pre[p] > 0.0 ? 1.0 : kLeakySlope);
            gsrc[i] += ds;
            gdst[g.neighbor[p]] += ds;
            for (std::size_t q = 0; q < kEdgeFlagCount; ++q) gedge[q] += ds * g.flags[p][q];
          }
        }
        if (t.requires_grad(iz)) {
          auto gZ = t.grad_buffer(iz);
          for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < f; ++k)
              gZ[i * f + k] += gz[i * f + k] + gsrc[i] * a[k] + gdst[i] * a[f + k];
        }
        if (t.requires_grad(ia)) {
          auto gA = t.grad_buffer(ia);
          for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < f; ++k) {
              gA[k] += gsrc[i] * Z[i * f + k];
              gA[f + k] += gdst[i] * Z[i * f + k];
            }
          for (std::size_t q = 0; q < kEdgeFlagCount; ++q) gA[2 * f + q] += gedge[q];
        }
      });
}

Var fc_forward(Var x, Var weight, Var bias) { return add_row_bias(matmul(x, weight), bias); }

Var hinge_loss(Var scores, std::size_t correct) {
  const Tensor& s = scores.value();
  require(s.size() == 2 && correct < 2, "hinge_loss: expects two scores and a class index 0/1");
  const double margin = s[correct] - s[1 - correct];
  const double loss = std::isnan(margin) ? margin : std::max(0.0, 1.0 - margin);
  const auto is = scores.id();
  return scores.tape().record(Tensor::scalar(loss), scores.requires_grad(),
                              [is, correct, margin](Tape& t, std::size_t self) {
                                if (margin >= 1.0) return;
                                const double g = t.grad(self)[0];
                                auto gs = t.grad_buffer(is);
                                gs[correct] -= g;
                                gs[1 - correct] += g;
                              });
}

Var weighted_sum(Var x, const Tensor& weights) {
  const Tensor& X = x.value();
  require(X.size() == weights.size(), "weighted_sum: size mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < X.size(); ++k) s += weights[k] * X[k];
  const auto ix = x.id();
  return x.tape().record(Tensor::scalar(s), x.requires_grad(), [ix, weights](Tape& t, std::size_t self) {
    const double g = t.grad(self)[0];
    auto gx = t.grad_buffer(ix);
    for (std::size_t k = 0; k < gx.size(); ++k) gx[k] += g * weights[k];
  });
}

std::array<double, 2> softmax2(std::span<const double> scores) {
  const double m = std::max(scores[0], scores[1]);
  const double e0 = std::exp(scores[0] - m), e1 = std::exp(scores[1] - m);
  return {e0 / (e0 + e1), e1 / (e0 + e1)};
}

}  // namespace cascade_gnn::nn
