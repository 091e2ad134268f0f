#include "losses.hpp"

#include <cmath>
#include <limits>

namespace bgs {

void LossWeights::validate() const {
  for (double v : {lambda1, lambda2, w1, w2, w3, w4})
    if (!(v >= 0)) throw_config("loss weights must be nonnegative");
  if (!(softsel_temp > 0)) throw_config("soft-selection temperature must be positive");
}

namespace {

ad::Tensor mask_column(const ContactLabels& labels,
                       std::initializer_list<uint8_t> classes) {
  ad::Tensor m(static_cast<int>(labels.size()), 1);
  for (size_t i = 0; i < labels.size(); ++i) {
    for (uint8_t c : classes) {
      if (labels[i] == c) {
        m.at(static_cast<int>(i), 0) = 1.0;
        break;
      }
    }
  }
  return m;
}

}  // namespace

namespace losses {

ad::Var correct(ad::Graph& g, ad::Var s, const ContactLabels& labels) {
  const int n = g.value(s).rows;
  validate_labels(labels, n);
  ad::Var grasp_mask = g.constant(mask_column(labels, {1}));
  ad::Var rest_mask = g.constant(mask_column(labels, {0, 2}));
  ad::Var deficit = g.add_scalar(s, -1.0);
  ad::Var grasp_term = g.scale_rows(g.mul(deficit, deficit), grasp_mask);
  ad::Var rest_term = g.scale_rows(g.mul(s, s), rest_mask);
  return g.scale(g.sum(g.add(grasp_term, rest_term)), 1.0 / n);
}

ad::Var correspondence(ad::Graph& g, ad::Var v_pred, const VectorGT& gt,
                       const ContactLabels& labels) {
  const int n = g.value(v_pred).rows;
  validate_labels(labels, n);
  if (static_cast<int>(gt.candidates.size()) != n)
    throw_data("correspondence: candidate table length mismatch");

  // Set-to-nearest: the regression target for each labeled point is the
  // candidate closest to the current prediction.
  const ad::Tensor& vp = g.value(v_pred);
  ad::Tensor target(n, 3);
  for (int i = 0; i < n; ++i) {
    if (labels[static_cast<size_t>(i)] == 0) continue;
    const auto& cands = gt.candidates[static_cast<size_t>(i)];
    if (cands.empty()) throw_data("correspondence: labeled point has no candidate vector");
    Vec3 cur{vp.at(i, 0), vp.at(i, 1), vp.at(i, 2)};
    double best = std::numeric_limits<double>::infinity();
    Vec3 pick{};
    for (const Vec3& c : cands) {
      double d = (c - cur).norm();
      if (d < best) {
        best = d;
        pick = c;
      }
    }
    target.at(i, 0) = pick.x;
    target.at(i, 1) = pick.y;
    target.at(i, 2) = pick.z;
  }
  ad::Var mask = g.constant(mask_column(labels, {1, 2}));
  ad::Var diff = g.sub(v_pred, g.constant(std::move(target)));
  ad::Var sq = g.mul(diff, diff);
  return g.scale(g.sum(g.scale_rows(sq, mask)), 1.0 / n);
}

ad::Var pair_consistency(ad::Graph& g, ad::Var b, ad::Var v_pred,
                         const PointCloud& cloud, const ContactLabels& labels,
                         int k, double eps) {
  const int n = cloud.size();
  validate_labels(labels, n);
  std::vector<int> support = label_indices(labels, {1, 2});
  if (support.empty()) return g.constant_scalar(0.0);
  ad::Var partner = g.interp_field(b, v_pred, cloud, support,
                                   std::min(k, n), eps);
  ad::Var mask = g.constant(mask_column(labels, {1, 2}));
  ad::Var diff = g.scale_rows(g.sub(b, partner), mask);
  return g.scale(g.sum(g.mul(diff, diff)), 1.0 / n);
}

ad::Var anchor_consistency(ad::Graph& g, ad::Var b, const SaliencyMap& s,
                           const ContactLabels& labels, Phase phase) {
  const int n = g.value(b).rows;
  validate_labels(labels, n);
  validate_saliency(s, n);
  ad::Tensor mask = phase == Phase::PreIteration ? mask_column(labels, {0, 1})
                                                 : mask_column(labels, {0});
  ad::Var diff = g.sub(b, g.constant(ad::Tensor::column(s)));
  ad::Var masked = g.scale_rows(diff, g.constant(std::move(mask)));
  return g.scale(g.sum(g.mul(masked, masked)), 1.0 / n);
}

ad::Var adjustment(ad::Graph& g, ad::Var b, ad::Var v_pred,
                   const PointCloud& cloud, const SaliencyMap& s,
                   const ContactLabels& labels, const LossWeights& w,
                   Phase phase) {
  ad::Var a1 = pair_consistency(g, b, v_pred, cloud, labels);
  ad::Var a2 = anchor_consistency(g, b, s, labels, phase);
  return g.add(g.scale(a1, w.lambda1), g.scale(a2, w.lambda2));
}

ad::Var soft_select_contact(ad::Graph& g, ad::Var b, const PointCloud& cloud,
                            const ContactLabels& labels, uint8_t side_label,
                            double temp) {
  std::vector<int> side = label_indices(labels, {side_label});
  if (side.empty()) throw_data("soft_select_contact: no points carry the requested label");
  return g.soft_select(b, side, cloud, temp);
}

ad::Var balance(ad::Graph& g, ad::Var b, const PointCloud& cloud,
                const ContactLabels& labels, const GravityLine& gravity,
                double temp) {
  ad::Var right = soft_select_contact(g, b, cloud, labels, 1, temp);
  ad::Var left = soft_select_contact(g, b, cloud, labels, 2, temp);
  ad::Var mid = g.scale(g.add(left, right), 0.5);
  return g.line_distance(mid, gravity);
}

TotalParts total(ad::Graph& g, ad::Var b, ad::Var v_pred,
                 const PointCloud& cloud, const SaliencyMap& s,
                 const ContactLabels& labels, const VectorGT& gt,
                 const GravityLine& gravity, const LossWeights& w,
                 Phase phase) {
  w.validate();
  TotalParts parts;
  parts.correspondence = correspondence(g, v_pred, gt, labels);
  parts.pair = pair_consistency(g, b, v_pred, cloud, labels);
  parts.anchor = anchor_consistency(g, b, s, labels, phase);
  parts.adjustment = g.add(g.scale(parts.pair, w.lambda1),
                           g.scale(parts.anchor, w.lambda2));
  parts.balance = balance(g, b, cloud, labels, gravity, w.softsel_temp);
  parts.total = g.add(g.add(g.scale(parts.correspondence, w.w1),
                            g.scale(parts.adjustment, w.w2)),
                      g.scale(parts.balance, w.w3));
  return parts;
}

ad::Var classify(ad::Graph& g, ad::Var logits, const ContactLabels& gt,
                 ad::Var total, double w4) {
  ad::Var ce = g.cross_entropy_mean(logits, gt);
  return g.add(g.scale(ce, w4), total);
}

}  // namespace losses

int hard_argmax(const SaliencyMap& b, const std::vector<int>& side) {
  if (side.empty()) throw_data("hard_argmax: empty side");
  int best = side[0];
  for (int i : side) {
    if (b[static_cast<size_t>(i)] > b[static_cast<size_t>(best)]) best = i;
  }
  return best;
}

double hard_balance_distance(const PointCloud& cloud, const SaliencyMap& b,
                             const std::vector<int>& left,
                             const std::vector<int>& right,
                             const GravityLine& gravity) {
  int li = hard_argmax(b, left);
  int ri = hard_argmax(b, right);
  Vec3 mid = 0.5 * (cloud.points[static_cast<size_t>(li)] +
                    cloud.points[static_cast<size_t>(ri)]);
  return point_line_distance(mid, gravity);
}

double mean_labeled_saliency(const SaliencyMap& b, const ContactLabels& labels) {
  double acc = 0;
  int count = 0;
  for (size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == 1 || labels[i] == 2) {
      acc += b[i];
      ++count;
    }
  }
  if (count == 0) throw_data("mean_labeled_saliency: no labeled points");
  return acc / count;
}

}  // namespace bgs
