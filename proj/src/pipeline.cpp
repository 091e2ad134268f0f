#include "pipeline.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>

#include "json.hpp"
#include "kmeans.hpp"

namespace bgs {

using nlohmann::json;

Prediction predict(const ModelWeights& model, const PointCloud& cloud,
                   const SaliencyMap& s) {
  validate_cloud(cloud);
  validate_saliency(s, cloud.size());
  Prediction p;
  p.bimanual = saliency_apply(model.saliency, cloud, s);
  ad::Tensor logits = contact_logits_apply(model.contact, cloud, p.bimanual);
  p.labels.resize(static_cast<size_t>(cloud.size()));
  for (int i = 0; i < logits.rows; ++i) {
    double best = logits.at(i, 0);
    int arg = 0, ties = 1;
    for (int j = 1; j < logits.cols; ++j) {
      if (logits.at(i, j) > best) {
        best = logits.at(i, j);
        arg = j;
        ties = 1;
      } else if (logits.at(i, j) == best) {
        ++ties;
      }
    }
    p.labels[static_cast<size_t>(i)] = ties > 1 ? 0 : static_cast<uint8_t>(arg);
  }
  return p;
}

ContactLabels mask_labels(const SaliencyMap& b, const ContactLabels& labels,
                          double tau) {
  if (b.size() != labels.size()) throw_data("mask_labels: length mismatch");
  ContactLabels out = labels;
  for (size_t i = 0; i < out.size(); ++i)
    if (b[i] < tau) out[i] = 0;
  return out;
}

void RefineConfig::validate() const {
  if (!(w_r > 0)) throw_config("refine: w_r must be positive");
  if (max_iters < 1) throw_config("refine: max_iters must be >= 1");
  if (!(lr > 0)) throw_config("refine: lr must be positive");
  if (!(temp > 0)) throw_config("refine: temperature must be positive");
  if (mu < 0) throw_config("refine: mu must be nonnegative");
}

namespace {

struct RefineEval {
  double objective = 0;
  double hard_distance = 0;
  SaliencyMap refined;
};

RefineEval refine_eval(ad::Graph& g, ad::Bindings& binds, const RefineNet& net,
                       const PointCloud& cloud, const SaliencyMap& b,
                       const ContactLabels& labels,
                       const std::vector<int>& right,
                       const std::vector<int>& other,
                       const RefineConfig& config, const GravityLine& gravity,
                       ad::Var* objective_out) {
  RefineForward fwd = refine_forward(g, binds, net, cloud, b, labels);
  ad::Var xr = g.soft_select(fwd.refined, right, cloud, config.temp);
  ad::Var xo = g.soft_select(fwd.refined, other, cloud, config.temp);
  ad::Var mid = g.scale(g.add(xr, xo), 0.5);
  ad::Var dist = g.line_distance(mid, gravity);
  ad::Var penalty = g.scale(g.sum(g.mul(fwd.adjustment, fwd.adjustment)),
                            config.mu / cloud.size());
  ad::Var objective = g.add(dist, penalty);

  RefineEval ev;
  ev.objective = g.value(objective).data[0];
  const ad::Tensor& rt = g.value(fwd.refined);
  ev.refined.resize(static_cast<size_t>(rt.rows));
  for (int i = 0; i < rt.rows; ++i) ev.refined[static_cast<size_t>(i)] = rt.at(i, 0);
  ev.hard_distance = hard_balance_distance(cloud, ev.refined, other, right, gravity);
  if (objective_out) *objective_out = objective;
  return ev;
}

}  // namespace

RefineResult physics_refine(const ModelWeights& model, const PointCloud& cloud,
                            const SaliencyMap& b, const ContactLabels& labels,
                            const RefineConfig& config,
                            const GravityLine& gravity) {
  config.validate();
  validate_saliency(b, cloud.size());
  validate_labels(labels, cloud.size());
  std::vector<int> right = label_indices(labels, {1});
  std::vector<int> other = label_indices(labels, {0, 2});
  if (right.empty()) throw_data("physics_refine: no predicted right-hand points");
  if (other.empty()) throw_data("physics_refine: no points outside the right-hand set");

  RefineResult result;
  result.initial_distance = hard_balance_distance(cloud, b, other, right, gravity);
  if (result.initial_distance < config.w_r) {
    result.refined = b;
    result.final_distance = result.initial_distance;
    return result;
  }

  RefineNet net = model.refine;  // private copy optimized for this object
  auto params = tensors_of(net.mlp);
  double lr = config.lr;
  const double lr_floor = 1e-7;

  double best_distance = result.initial_distance;
  SaliencyMap best_map = b;
  double accepted_objective = std::numeric_limits<double>::infinity();

  std::vector<ad::Tensor> saved;  // last accepted parameter values
  auto snapshot = [&]() {
    saved.clear();
    for (ad::Tensor* t : params) saved.push_back(*t);
  };
  auto restore = [&]() {
    for (size_t i = 0; i < saved.size(); ++i) *params[i] = saved[i];
  };

  for (int iter = 1; iter <= config.max_iters; ++iter) {
    result.iterations = iter;
    ad::Graph g;
    ad::Bindings binds;
    ad::Var objective;
    RefineEval ev = refine_eval(g, binds, net, cloud, b, labels, right, other,
                                config, gravity, &objective);

    if (ev.objective > accepted_objective) {
      // Worse than the last accepted iterate: back off and retry.
      restore();
      lr *= 0.5;
      if (lr < lr_floor) break;
      continue;
    }

    accepted_objective = ev.objective;
    result.objective_trace.push_back(ev.objective);
    snapshot();
    if (ev.hard_distance < best_distance) {
      best_distance = ev.hard_distance;
      best_map = ev.refined;
    }
    if (ev.hard_distance < config.w_r) {
      result.refined = std::move(ev.refined);
      result.final_distance = ev.hard_distance;
      return result;
    }

    g.backward(objective);
    for (auto& [tensor, var] : binds.entries) {
      const ad::Tensor& grad = g.grad(var);
      for (int i = 0; i < tensor->size(); ++i) {
        if (!std::isfinite(grad.data[static_cast<size_t>(i)]))
          throw_numeric("physics_refine: non-finite gradient");
        tensor->data[static_cast<size_t>(i)] -= lr * grad.data[static_cast<size_t>(i)];
      }
    }
  }

  result.refined = std::move(best_map);
  result.final_distance = best_distance;
  result.warned = true;
  return result;
}

ContactClusters cluster_contacts(const PointCloud& cloud, const SaliencyMap& b,
                                 const ContactLabels& labels_pred,
                                 uint64_t seed) {
  const int n = cloud.size();
  if (n < 3) throw_data("cluster_contacts: need at least 3 points");
  validate_saliency(b, n);
  validate_labels(labels_pred, n);

  std::vector<double> rows(static_cast<size_t>(n) * 4);
  for (int i = 0; i < n; ++i) {
    const Vec3& p = cloud.points[static_cast<size_t>(i)];
    rows[static_cast<size_t>(i) * 4 + 0] = p.x;
    rows[static_cast<size_t>(i) * 4 + 1] = p.y;
    rows[static_cast<size_t>(i) * 4 + 2] = p.z;
    rows[static_cast<size_t>(i) * 4 + 3] = b[static_cast<size_t>(i)];
  }
  KMeansResult km = kmeans(rows, n, 4, 3, seed);

  std::array<double, 3> mean_b{};
  std::array<int, 3> count{};
  std::array<int, 3> right_overlap{};
  for (int i = 0; i < n; ++i) {
    int c = km.assignment[static_cast<size_t>(i)];
    mean_b[static_cast<size_t>(c)] += b[static_cast<size_t>(i)];
    ++count[static_cast<size_t>(c)];
    if (labels_pred[static_cast<size_t>(i)] == 1) ++right_overlap[static_cast<size_t>(c)];
  }
  for (int c = 0; c < 3; ++c)
    if (count[static_cast<size_t>(c)] > 0) mean_b[static_cast<size_t>(c)] /= count[static_cast<size_t>(c)];

  // Two clusters with the highest mean saliency are the contact clusters.
  std::array<int, 3> ids{0, 1, 2};
  std::sort(ids.begin(), ids.end(), [&](int a, int c) {
    if (mean_b[static_cast<size_t>(a)] != mean_b[static_cast<size_t>(c)])
      return mean_b[static_cast<size_t>(a)] > mean_b[static_cast<size_t>(c)];
    return a < c;
  });
  int ca = ids[0], cb = ids[1];
  int right_cluster, left_cluster;
  if (right_overlap[static_cast<size_t>(ca)] != right_overlap[static_cast<size_t>(cb)]) {
    right_cluster = right_overlap[static_cast<size_t>(ca)] > right_overlap[static_cast<size_t>(cb)] ? ca : cb;
  } else {
    right_cluster = ca;  // equal overlap: higher mean saliency side is right
  }
  left_cluster = right_cluster == ca ? cb : ca;

  ContactClusters out;
  for (int i = 0; i < n; ++i) {
    int c = km.assignment[static_cast<size_t>(i)];
    if (c == right_cluster) out.right.push_back(i);
    else if (c == left_cluster) out.left.push_back(i);
  }
  return out;
}

double bcacr(const SaliencyMap& b, const ContactLabels& labels_gt, double tau_c) {
  if (b.size() != labels_gt.size()) throw_data("bcacr: length mismatch");
  int annotated = 0, covered = 0;
  for (size_t i = 0; i < b.size(); ++i) {
    if (labels_gt[i] == 1 || labels_gt[i] == 2) {
      ++annotated;
      if (b[i] >= tau_c) ++covered;
    }
  }
  if (annotated == 0) throw_data("bcacr: no annotated contact points");
  return 100.0 * covered / annotated;
}

double grasp_coverage(const std::vector<int>& single_contacts,
                      const std::vector<int>& bimanual_contacts) {
  if (single_contacts.empty()) throw_data("grasp_coverage: empty single-handed set");
  std::vector<int> bim = bimanual_contacts;
  std::sort(bim.begin(), bim.end());
  int covered = 0;
  for (int i : single_contacts)
    if (std::binary_search(bim.begin(), bim.end(), i)) ++covered;
  return 100.0 * covered / static_cast<double>(single_contacts.size());
}

double balance_distance(const PointCloud& cloud, const std::vector<int>& left,
                        const std::vector<int>& right,
                        const GravityLine& gravity, BalanceMode mode,
                        const SaliencyMap* b) {
  if (left.empty() || right.empty()) throw_data("balance_distance: empty side");
  auto representative = [&](const std::vector<int>& side) {
    if (mode == BalanceMode::HighestSaliency) {
      if (!b) throw_data("balance_distance: saliency map required");
      return cloud.points[static_cast<size_t>(hard_argmax(*b, side))];
    }
    Vec3 c{};
    for (int i : side) c += cloud.points[static_cast<size_t>(i)];
    return c * (1.0 / static_cast<double>(side.size()));
  };
  Vec3 mid = 0.5 * (representative(left) + representative(right));
  return point_line_distance(mid, gravity);
}

std::vector<EvalRecord> evaluate(const ModelWeights& model,
                                 const Dataset& objects,
                                 const RefineConfig& refine_config,
                                 double tau_c, double tau) {
  std::vector<EvalRecord> records;
  for (const TrainObject& obj : objects) {
    EvalRecord rec;
    rec.object_id = obj.id;
    Prediction pred = predict(model, obj.cloud, obj.saliency);
    rec.bcacr = bcacr(pred.bimanual, obj.labels, tau_c);

    std::vector<int> single;
    for (size_t i = 0; i < obj.saliency.size(); ++i)
      if (obj.saliency[i] >= tau) single.push_back(static_cast<int>(i));
    std::vector<int> bimanual;
    for (size_t i = 0; i < pred.bimanual.size(); ++i)
      if (pred.bimanual[i] >= tau) bimanual.push_back(static_cast<int>(i));
    if (!single.empty()) rec.coverage = grasp_coverage(single, bimanual);

    std::vector<int> right = label_indices(pred.labels, {1});
    std::vector<int> other = label_indices(pred.labels, {0, 2});
    if (!right.empty() && !other.empty()) {
      rec.balance_pre = hard_balance_distance(obj.cloud, pred.bimanual, other,
                                              right, obj.gravity);
      RefineResult refined = physics_refine(model, obj.cloud, pred.bimanual,
                                            pred.labels, refine_config,
                                            obj.gravity);
      rec.balance_post = refined.final_distance;
      rec.refine_iterations = refined.iterations;
      rec.warned = refined.warned;
    } else {
      rec.warned = true;
    }
    records.push_back(std::move(rec));
  }
  return records;
}

void save_eval_report(const std::string& path,
                      const std::vector<EvalRecord>& records) {
  std::ofstream f(path);
  if (!f) throw_data("cannot open report file for writing: " + path);
  for (const EvalRecord& r : records) {
    json j{{"object_id", r.object_id},
           {"bcacr", r.bcacr},
           {"coverage", r.coverage},
           {"balance_pre", r.balance_pre},
           {"balance_post", r.balance_post},
           {"refine_iterations", r.refine_iterations},
           {"warned", r.warned}};
    f << j.dump() << "\n";
  }
}

}  // namespace bgs
