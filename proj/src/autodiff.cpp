#include "autodiff.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace bgs::ad {

namespace {

using RowMat =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<RowMat>;
using CMapMat = Eigen::Map<const RowMat>;

CMapMat map_of(const Tensor& t) { return CMapMat(t.data.data(), t.rows, t.cols); }
MapMat map_of(Tensor& t) { return MapMat(t.data.data(), t.rows, t.cols); }

void check_finite(const Tensor& t, const char* op) {
  for (double v : t.data) {
    if (!std::isfinite(v)) throw_numeric(std::string(op) + ": non-finite value in forward result");
  }
}

void require(bool cond, const char* msg) {
  if (!cond) throw_data(msg);
}

}  // namespace

Var Graph::push(Tensor value, bool requires_grad, std::function<void(Graph&)> bp) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = requires_grad;
  n.backprop = requires_grad ? std::move(bp) : nullptr;
  nodes_.push_back(std::move(n));
  int id = static_cast<int>(nodes_.size()) - 1;
  return Var{id, nodes_.back().value.rows, nodes_.back().value.cols};
}

Tensor& Graph::grad_buffer(int id) {
  Node& n = node(id);
  if (n.grad.size() == 0) n.grad = Tensor::zeros(n.value.rows, n.value.cols);
  return n.grad;
}

void Graph::accumulate(int id, const Tensor& contribution) {
  Node& n = node(id);
  if (!n.requires_grad) return;
  Tensor& g = grad_buffer(id);
  for (int i = 0; i < g.size(); ++i) g.data[i] += contribution.data[i];
  n.grad_touched = true;
}

Var Graph::leaf(const Tensor& value, bool requires_grad) {
  check_finite(value, "leaf");
  return push(value, requires_grad, nullptr);
}

Var Graph::constant(Tensor value) {
  check_finite(value, "constant");
  return push(std::move(value), false, nullptr);
}

Var Graph::add(Var a, Var b) {
  require(value(a).same_shape(value(b)), "add: shape mismatch");
  Tensor out = value(a);
  const Tensor& vb = value(b);
  for (int i = 0; i < out.size(); ++i) out.data[i] += vb.data[i];
  check_finite(out, "add");
  bool rg = wants_grad(a) || wants_grad(b);
  int oid = static_cast<int>(nodes_.size());
  return push(std::move(out), rg, [a, b, oid](Graph& g) {
    const Tensor& go = g.node(oid).grad;
    g.accumulate(a.id, go);
    g.accumulate(b.id, go);
  });
}

Var Graph::sub(Var a, Var b) {
  require(value(a).same_shape(value(b)), "sub: shape mismatch");
  Tensor out = value(a);
  const Tensor& vb = value(b);
  for (int i = 0; i < out.size(); ++i) out.data[i] -= vb.data[i];
  check_finite(out, "sub");
  bool rg = wants_grad(a) || wants_grad(b);
  int oid = static_cast<int>(nodes_.size());
  return push(std::move(out), rg, [a, b, oid](Graph& g) {
    const Tensor& go = g.node(oid).grad;
    g.accumulate(a.id, go);
    if (g.node(b.id).requires_grad) {
      Tensor neg = go;
      for (double& v : neg.data) v = -v;
      g.accumulate(b.id, neg);
    }
  });
}

Var Graph::mul(Var a, Var b) {
  require(value(a).same_shape(value(b)), "mul: shape mismatch");
  Tensor out = value(a);
  const Tensor& vb = value(b);
  for (int i = 0; i < out.size(); ++i) out.data[i] *= vb.data[i];
  check_finite(out, "mul");
  bool rg = wants_grad(a) || wants_grad(b);
  int oid = static_cast<int>(nodes_.size());
  return push(std::move(out), rg, [a, b, oid](Graph& g) {
    const Tensor& go = g.node(oid).grad;
    if (g.node(a.id).requires_grad) {
      Tensor ga = go;
      const Tensor& vb2 = g.value(b);
      for (int i = 0; i < ga.size(); ++i) ga.data[i] *= vb2.data[i];
      g.accumulate(a.id, ga);
    }
    if (g.node(b.id).requires_grad) {
      Tensor gb = go;
      const Tensor& va2 = g.value(a);
      for (int i = 0; i < gb.size(); ++i) gb.data[i] *= va2.data[i];
      g.accumulate(b.id, gb);
    }
  });
}

Var Graph::scale(Var a, double s) {
  Tensor out = value(a);
  for (double& v : out.data) v *= s;
  check_finite(out, "scale");
  int oid = static_cast<int>(nodes_.size());
  return push(std::move(out), wants_grad(a), [a, s, oid](Graph& g) {
    Tensor ga = g.node(oid).grad;
    for (double& v : ga.data) v *= s;
    g.accumulate(a.id, ga);
  });
}

Var Graph::add_scalar(Var a, double s) {
  Tensor out = value(a);
  for (double& v : out.data) v += s;
  check_finite(out, "add_scalar");
  int oid = static_cast<int>(nodes_.size());
  return push(std::move(out), wants_grad(a), [a, oid](Graph& g) {
    g.accumulate(a.id, g.node(oid).grad);
  });
}

Var Graph::linear(Var x, Var w, Var bias) {
  const Tensor& vx = value(x);
  const Tensor& vw = value(w);
  require(vx.cols == vw.rows, "linear: inner dimension mismatch");
  if (bias.valid())
    require(value(bias).rows == 1 && value(bias).cols == vw.cols,
            "linear: bias shape mismatch");
  Tensor out(vx.rows, vw.cols);
  map_of(out).noalias() = map_of(vx) * map_of(vw);
  if (bias.valid()) {
    const Tensor& vb = value(bias);
    map_of(out).rowwise() += Eigen::Map<const Eigen::RowVectorXd>(vb.data.data(), vb.cols);
  }
  check_finite(out, "linear");
  bool rg = wants_grad(x) || wants_grad(w) || (bias.valid() && wants_grad(bias));
  int oid = static_cast<int>(nodes_.size());
  return push(std::move(out), rg, [x, w, bias, oid](Graph& g) {
    const Tensor& go = g.node(oid).grad;
    CMapMat gmap(go.data.data(), go.rows, go.cols);
    if (g.node(x.id).requires_grad) {
      Tensor gx(g.value(x).rows, g.value(x).cols);
      map_of(gx).noalias() = gmap * map_of(g.value(w)).transpose();
      g.accumulate(x.id, gx);
    }
    if (g.node(w.id).requires_grad) {
      Tensor gw(g.value(w).rows, g.value(w).cols);
      map_of(gw).noalias() = map_of(g.value(x)).transpose() * gmap;
      g.accumulate(w.id, gw);
    }
    if (bias.valid() && g.node(bias.id).requires_grad) {
      Tensor gb(1, go.cols);
      Eigen::Map<Eigen::RowVectorXd>(gb.data.data(), gb.cols) = gmap.colwise().sum();
      g.accumulate(bias.id, gb);
    }
  });
}

Var Graph::relu(Var x) {
  Tensor out = value(x);
  for (double& v : out.data) v = v > 0 ? v : 0.0;
  check_finite(out, "relu");
  int oid = static_cast<int>(nodes_.size());
  return push(std::move(out), wants_grad(x), [x, oid](Graph& g) {
    Tensor gx = g.node(oid).grad;
    const Tensor& vx = g.value(x);
    for (int i = 0; i < gx.size(); ++i)
      if (vx.data[i] <= 0) gx.data[i] = 0;
    g.accumulate(x.id, gx);
  });
}

Var Graph::sigmoid(Var x) {
  Tensor out = value(x);
  for (double& v : out.data) {
    if (v >= 0) {
      v = 1.0 / (1.0 + std::exp(-v));
    } else {
      double e = std::exp(v);
      v = e / (1.0 + e);
    }
  }
  check_finite(out, "sigmoid");
  int oid = static_cast<int>(nodes_.size());
  return push(std::move(out), wants_grad(x), [x, oid](Graph& g) {
    Tensor gx = g.node(oid).grad;
    const Tensor& y = g.node(oid).value;
    for (int i = 0; i < gx.size(); ++i) gx.data[i] *= y.data[i] * (1.0 - y.data[i]);
    g.accumulate(x.id, gx);
  });
}

Var Graph::tanh(Var x) {
  Tensor out = value(x);
  for (double& v : out.data) v = std::tanh(v);
  check_finite(out, "tanh");
  int oid = static_cast<int>(nodes_.size());
  return push(std::move(out), wants_grad(x), [x, oid](Graph& g) {
    Tensor gx = g.node(oid).grad;
    const Tensor& y = g.node(oid).value;
    for (int i = 0; i < gx.size(); ++i) gx.data[i] *= 1.0 - y.data[i] * y.data[i];
    g.accumulate(x.id, gx);
  });
}

Var Graph::clamp01(Var x) {
  Tensor out = value(x);
  for (double& v : out.data) v = std::clamp(v, 0.0, 1.0);
  check_finite(out, "clamp01");
  int oid = static_cast<int>(nodes_.size());
  return push(std::move(out), wants_grad(x), [x, oid](Graph& g) {
    Tensor gx = g.node(oid).grad;
    const Tensor& vx = g.value(x);
    for (int i = 0; i < gx.size(); ++i)
      if (vx.data[i] < 0.0 || vx.data[i] > 1.0) gx.data[i] = 0;
    g.accumulate(x.id, gx);
  });
}

Var Graph::max_pool_rows(Var x) {
  const Tensor& vx = value(x);
  require(vx.rows >= 1, "max_pool_rows: empty input");
  Tensor out(1, vx.cols);
  std::vector<int> argmax(static_cast<size_t>(vx.cols), 0);
  for (int j = 0; j < vx.cols; ++j) {
    double best = vx.at(0, j);
    int bi = 0;
    for (int i = 1; i < vx.rows; ++i) {
      if (vx.at(i, j) > best) {
        best = vx.at(i, j);
        bi = i;
      }
    }
    out.at(0, j) = best;
    argmax[static_cast<size_t>(j)] = bi;
  }
  check_finite(out, "max_pool_rows");
  int oid = static_cast<int>(nodes_.size());
  return push(std::move(out), wants_grad(x),
              [x, oid, argmax = std::move(argmax)](Graph& g) {
                const Tensor& go = g.node(oid).grad;
                Tensor gx = Tensor::zeros(g.value(x).rows, g.value(x).cols);
                for (int j = 0; j < go.cols; ++j)
                  gx.at(argmax[static_cast<size_t>(j)], j) = go.at(0, j);
                g.accumulate(x.id, gx);
              });
}

Var Graph::concat_cols(Var a, Var b) {
  const Tensor& va = value(a);
  const Tensor& vb = value(b);
  require(va.rows == vb.rows, "concat_cols: row count mismatch");
  Tensor out(va.rows, va.cols + vb.cols);
  for (int i = 0; i < va.rows; ++i) {
    for (int j = 0; j < va.cols; ++j) out.at(i, j) = va.at(i, j);
    for (int j = 0; j < vb.cols; ++j) out.at(i, va.cols + j) = vb.at(i, j);
  }
  bool rg = wants_grad(a) || wants_grad(b);
  int oid = static_cast<int>(nodes_.size());
  return push(std::move(out), rg, [a, b, oid](Graph& g) {
    const Tensor& go = g.node(oid).grad;
    int ca = g.value(a).cols, cb = g.value(b).cols;
    if (g.node(a.id).requires_grad) {
      Tensor ga(go.rows, ca);
      for (int i = 0; i < go.rows; ++i)
        for (int j = 0; j < ca; ++j) ga.at(i, j) = go.at(i, j);
      g.accumulate(a.id, ga);
    }
    if (g.node(b.id).requires_grad) {
      Tensor gb(go.rows, cb);
      for (int i = 0; i < go.rows; ++i)
        for (int j = 0; j < cb; ++j) gb.at(i, j) = go.at(i, ca + j);
      g.accumulate(b.id, gb);
    }
  });
}

Var Graph::repeat_row(Var row, int n) {
  const Tensor& vr = value(row);
  require(vr.rows == 1, "repeat_row: input must be a single row");
  Tensor out(n, vr.cols);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < vr.cols; ++j) out.at(i, j) = vr.at(0, j);
  int oid = static_cast<int>(nodes_.size());
  return push(std::move(out), wants_grad(row), [row, oid](Graph& g) {
    const Tensor& go = g.node(oid).grad;
    Tensor gr(1, go.cols);
    for (int i = 0; i < go.rows; ++i)
      for (int j = 0; j < go.cols; ++j) gr.at(0, j) += go.at(i, j);
    g.accumulate(row.id, gr);
  });
}

Var Graph::scale_rows(Var x, Var s) {
  const Tensor& vx = value(x);
  const Tensor& vs = value(s);
  require(vs.cols == 1 && vs.rows == vx.rows, "scale_rows: scale must be [N x 1]");
  Tensor out = vx;
  for (int i = 0; i < vx.rows; ++i)
    for (int j = 0; j < vx.cols; ++j) out.at(i, j) *= vs.at(i, 0);
  check_finite(out, "scale_rows");
  bool rg = wants_grad(x) || wants_grad(s);
  int oid = static_cast<int>(nodes_.size());
  return push(std::move(out), rg, [x, s, oid](Graph& g) {
    const Tensor& go = g.node(oid).grad;
    const Tensor& vx2 = g.value(x);
    const Tensor& vs2 = g.value(s);
    if (g.node(x.id).requires_grad) {
      Tensor gx = go;
      for (int i = 0; i < gx.rows; ++i)
        for (int j = 0; j < gx.cols; ++j) gx.at(i, j) *= vs2.at(i, 0);
      g.accumulate(x.id, gx);
    }
    if (g.node(s.id).requires_grad) {
      Tensor gs(vs2.rows, 1);
      for (int i = 0; i < go.rows; ++i) {
        double acc = 0;
        for (int j = 0; j < go.cols; ++j) acc += go.at(i, j) * vx2.at(i, j);
        gs.at(i, 0) = acc;
      }
      g.accumulate(s.id, gs);
    }
  });
}

Var Graph::sum(Var x) {
  const Tensor& vx = value(x);
  double acc = 0;
  for (double v : vx.data) acc += v;
  Tensor out = Tensor::scalar(acc);
  check_finite(out, "sum");
  int oid = static_cast<int>(nodes_.size());
  return push(std::move(out), wants_grad(x), [x, oid](Graph& g) {
    double go = g.node(oid).grad.data[0];
    Tensor gx = Tensor::full(g.value(x).rows, g.value(x).cols, go);
    g.accumulate(x.id, gx);
  });
}

Var Graph::cross_entropy_mean(Var logits, const std::vector<uint8_t>& labels) {
  const Tensor& vl = value(logits);
  require(static_cast<int>(labels.size()) == vl.rows,
          "cross_entropy_mean: label count mismatch");
  for (uint8_t l : labels)
    require(l < vl.cols, "cross_entropy_mean: label out of range");
  const int n = vl.rows, c = vl.cols;
  double total = 0;
  for (int i = 0; i < n; ++i) {
    double m = vl.at(i, 0);
    for (int j = 1; j < c; ++j) m = std::max(m, vl.at(i, j));
    double lse = 0;
    for (int j = 0; j < c; ++j) lse += std::exp(vl.at(i, j) - m);
    lse = m + std::log(lse);
    total += lse - vl.at(i, labels[static_cast<size_t>(i)]);
  }
  Tensor out = Tensor::scalar(total / n);
  check_finite(out, "cross_entropy_mean");
  int oid = static_cast<int>(nodes_.size());
  return push(std::move(out), wants_grad(logits), [logits, labels, oid](Graph& g) {
    double go = g.node(oid).grad.data[0];
    const Tensor& vl2 = g.value(logits);
    const int n2 = vl2.rows, c2 = vl2.cols;
    Tensor gl(n2, c2);
    for (int i = 0; i < n2; ++i) {
      double m = vl2.at(i, 0);
      for (int j = 1; j < c2; ++j) m = std::max(m, vl2.at(i, j));
      double denom = 0;
      for (int j = 0; j < c2; ++j) denom += std::exp(vl2.at(i, j) - m);
      for (int j = 0; j < c2; ++j) {
        double p = std::exp(vl2.at(i, j) - m) / denom;
        double indicator = (j == labels[static_cast<size_t>(i)]) ? 1.0 : 0.0;
        gl.at(i, j) = go * (p - indicator) / n2;
      }
    }
    g.accumulate(logits.id, gl);
  });
}

Var Graph::interp_field(Var field, Var disp, const PointCloud& cloud,
                        const std::vector<int>& support, int k, double eps) {
  const Tensor& vf = value(field);
  const Tensor& vd = value(disp);
  const int n = cloud.size();
  require(vf.rows == n && vf.cols == 1, "interp_field: field must be [N x 1]");
  require(vd.rows == n && vd.cols == 3, "interp_field: disp must be [N x 3]");
  require(k >= 1 && k <= n, "interp_field: k out of range");

  struct RowInfo {
    int row;
    std::vector<int> idx;
    std::vector<double> w;     // 1/(dist+eps)
    std::vector<double> dist;
    std::vector<Vec3> pos;     // neighbor positions
    Vec3 q;
    double out;
  };
  auto infos = std::make_shared<std::vector<RowInfo>>();
  infos->reserve(support.size());

  Tensor out(n, 1);
  for (int row : support) {
    require(row >= 0 && row < n, "interp_field: support index out of range");
    Vec3 q = cloud.points[static_cast<size_t>(row)] +
             Vec3{vd.at(row, 0), vd.at(row, 1), vd.at(row, 2)};
    auto nbrs = knn(cloud, q, k);
    RowInfo info;
    info.row = row;
    info.q = q;
    double wsum = 0, acc = 0;
    for (const Neighbor& nb : nbrs) {
      double w = 1.0 / (nb.distance + eps);
      info.idx.push_back(nb.index);
      info.dist.push_back(nb.distance);
      info.pos.push_back(cloud.points[static_cast<size_t>(nb.index)]);
      info.w.push_back(w);
      wsum += w;
      acc += w * vf.at(nb.index, 0);
    }
    info.out = acc / wsum;
    out.at(row, 0) = info.out;
    infos->push_back(std::move(info));
  }
  check_finite(out, "interp_field");
  bool rg = wants_grad(field) || wants_grad(disp);
  int oid = static_cast<int>(nodes_.size());
  return push(std::move(out), rg, [field, disp, infos, oid](Graph& g) {
    const Tensor& go = g.node(oid).grad;
    const Tensor& vf2 = g.value(field);
    bool want_f = g.node(field.id).requires_grad;
    bool want_d = g.node(disp.id).requires_grad;
    Tensor gf = Tensor::zeros(vf2.rows, 1);
    Tensor gd = Tensor::zeros(vf2.rows, 3);
    for (const auto& info : *infos) {
      double gout = go.at(info.row, 0);
      if (gout == 0) continue;
      double wsum = 0;
      for (double w : info.w) wsum += w;
      Vec3 dq{};
      for (size_t m = 0; m < info.idx.size(); ++m) {
        int j = info.idx[m];
        double w = info.w[m];
        if (want_f) gf.at(j, 0) += gout * w / wsum;
        if (want_d) {
          double bj = vf2.at(j, 0);
          double coef = -(bj - info.out) / wsum * w * w;
          double d = std::max(info.dist[m], 1e-12);
          Vec3 dir = (info.q - info.pos[m]) * (1.0 / d);
          dq += coef * dir;
        }
      }
      if (want_d) {
        gd.at(info.row, 0) += gout * dq.x;
        gd.at(info.row, 1) += gout * dq.y;
        gd.at(info.row, 2) += gout * dq.z;
      }
    }
    if (want_f) g.accumulate(field.id, gf);
    if (want_d) g.accumulate(disp.id, gd);
  });
}

Var Graph::soft_select(Var field, const std::vector<int>& side,
                       const PointCloud& cloud, double temp) {
  const Tensor& vf = value(field);
  require(vf.cols == 1 && vf.rows == cloud.size(),
          "soft_select: field must be [N x 1] matching cloud");
  require(!side.empty(), "soft_select: side index set is empty");
  require(temp > 0, "soft_select: temperature must be positive");

  double m = -std::numeric_limits<double>::infinity();
  for (int i : side) {
    require(i >= 0 && i < vf.rows, "soft_select: index out of range");
    m = std::max(m, vf.at(i, 0) / temp);
  }
  double denom = 0;
  std::vector<double> alpha(side.size());
  for (size_t s = 0; s < side.size(); ++s) {
    alpha[s] = std::exp(vf.at(side[s], 0) / temp - m);
    denom += alpha[s];
  }
  Vec3 sel{};
  for (size_t s = 0; s < side.size(); ++s) {
    alpha[s] /= denom;
    sel += alpha[s] * cloud.points[static_cast<size_t>(side[s])];
  }
  Tensor out(1, 3);
  out.at(0, 0) = sel.x;
  out.at(0, 1) = sel.y;
  out.at(0, 2) = sel.z;
  check_finite(out, "soft_select");

  auto positions = std::make_shared<std::vector<Vec3>>();
  positions->reserve(side.size());
  for (int i : side) positions->push_back(cloud.points[static_cast<size_t>(i)]);
  auto side_copy = std::make_shared<std::vector<int>>(side);
  auto alpha_copy = std::make_shared<std::vector<double>>(std::move(alpha));

  int oid = static_cast<int>(nodes_.size());
  return push(std::move(out), wants_grad(field),
              [field, side_copy, positions, alpha_copy, temp, sel, oid](Graph& g) {
                const Tensor& go = g.node(oid).grad;
                Vec3 gv{go.at(0, 0), go.at(0, 1), go.at(0, 2)};
                Tensor gf = Tensor::zeros(g.value(field).rows, 1);
                for (size_t s = 0; s < side_copy->size(); ++s) {
                  Vec3 diff = (*positions)[s] - sel;
                  double contrib = (*alpha_copy)[s] / temp * diff.dot(gv);
                  gf.at((*side_copy)[s], 0) += contrib;
                }
                g.accumulate(field.id, gf);
              });
}

Var Graph::line_distance(Var p, const GravityLine& line) {
  const Tensor& vp = value(p);
  require(vp.rows == 1 && vp.cols == 3, "line_distance: input must be [1 x 3]");
  Vec3 pos{vp.at(0, 0), vp.at(0, 1), vp.at(0, 2)};
  Vec3 r = pos - line.origin;
  Vec3 d = line.direction;
  Vec3 perp = r - r.dot(d) * d;
  double dist = perp.norm();
  Tensor out = Tensor::scalar(dist);
  check_finite(out, "line_distance");
  int oid = static_cast<int>(nodes_.size());
  return push(std::move(out), wants_grad(p), [p, perp, dist, oid](Graph& g) {
    double go = g.node(oid).grad.data[0];
    Tensor gp(1, 3);
    if (dist > 1e-12) {
      gp.at(0, 0) = go * perp.x / dist;
      gp.at(0, 1) = go * perp.y / dist;
      gp.at(0, 2) = go * perp.z / dist;
    }
    g.accumulate(p.id, gp);
  });
}

void Graph::backward(Var scalar_root) {
  const Tensor& root = value(scalar_root);
  if (root.rows != 1 || root.cols != 1)
    throw_data("backward: root must be a scalar");
  if (!node(scalar_root.id).requires_grad)
    throw_data("backward: root does not depend on any trainable leaf");
  grad_buffer(scalar_root.id).data[0] = 1.0;
  node(scalar_root.id).grad_touched = true;
  for (int id = scalar_root.id; id >= 0; --id) {
    Node& n = node(id);
    if (!n.requires_grad || !n.grad_touched || !n.backprop) continue;
    n.backprop(*this);
  }
}

const Tensor& Graph::value(Var v) const { return node(v.id).value; }

const Tensor& Graph::grad(Var v) {
  Node& n = node(v.id);
  if (n.grad.size() == 0) n.grad = Tensor::zeros(n.value.rows, n.value.cols);
  return n.grad;
}

double grad_check(const std::function<Var(Graph&, Bindings&)>& build,
                  double eps) {
  Graph g;
  Bindings binds;
  Var loss = build(g, binds);
  g.backward(loss);

  std::vector<Tensor> analytic;
  analytic.reserve(binds.entries.size());
  for (auto& [tensor, var] : binds.entries) analytic.push_back(g.grad(var));

  auto eval = [&build]() {
    Graph g2;
    Bindings b2;
    Var l = build(g2, b2);
    return g2.value(l).data[0];
  };

  double max_rel = 0;
  for (size_t e = 0; e < binds.entries.size(); ++e) {
    Tensor* t = binds.entries[e].first;
    for (int i = 0; i < t->size(); ++i) {
      double saved = t->data[i];
      t->data[i] = saved + eps;
      double fp = eval();
      t->data[i] = saved - eps;
      double fm = eval();
      t->data[i] = saved;
      double numeric = (fp - fm) / (2 * eps);
      double rel = std::abs(analytic[e].data[i] - numeric) /
                   (std::abs(numeric) + 1e-8);
      max_rel = std::max(max_rel, rel);
    }
  }
  return max_rel;
}

Tensor softmax_rows(const Tensor& logits) {
  Tensor out = logits;
  for (int i = 0; i < out.rows; ++i) {
    double m = out.at(i, 0);
    for (int j = 1; j < out.cols; ++j) m = std::max(m, out.at(i, j));
    double denom = 0;
    for (int j = 0; j < out.cols; ++j) {
      out.at(i, j) = std::exp(out.at(i, j) - m);
      denom += out.at(i, j);
    }
    for (int j = 0; j < out.cols; ++j) out.at(i, j) /= denom;
  }
  return out;
}

}  // namespace bgs::ad
