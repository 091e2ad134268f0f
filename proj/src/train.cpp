#include "train.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "json.hpp"
#include "rng.hpp"

namespace bgs {

using nlohmann::json;

void TrainConfig::validate() const {
  if (epochs < 1) throw_config("train: epochs must be >= 1");
  if (!(lr > 0)) throw_config("train: learning rate must be positive");
  if (first_update_epoch < 1) throw_config("train: K must be >= 1");
  if (update_period < 1) throw_config("train: M must be >= 1");
  if (max_updates < 0) throw_config("train: max updates must be >= 0");
  if (!(sigma_s > 0 && sigma_s <= 1)) throw_config("train: sigma_s must be in (0,1]");
  if (!(sigma_p > 0)) throw_config("train: sigma_p must be positive");
  if (!(temp_anneal > 0 && temp_anneal <= 1))
    throw_config("train: temperature anneal factor must be in (0,1]");
  if (temp_anneal_every < 1) throw_config("train: anneal period must be >= 1");
  if (!(temp_floor > 0)) throw_config("train: temperature floor must be positive");
  if (stop_loss_fraction < 0 || stop_loss_fraction >= 1)
    throw_config("train: stop_loss_fraction must be in [0,1)");
  loss.validate();
}

GradientOptimizer::GradientOptimizer(TrainConfig::Optimizer kind, double lr)
    : kind_(kind), lr_(lr) {}

void GradientOptimizer::step(
    const std::vector<std::pair<ad::Tensor*, const ad::Tensor*>>& grads) {
  for (auto& [param, grad] : grads) {
    for (double v : grad->data)
      if (!std::isfinite(v)) throw_numeric("optimizer: non-finite gradient");
  }
  if (kind_ == TrainConfig::Optimizer::Sgd) {
    for (auto& [param, grad] : grads)
      for (int i = 0; i < param->size(); ++i)
        param->data[static_cast<size_t>(i)] -= lr_ * grad->data[static_cast<size_t>(i)];
    return;
  }
  ++t_;
  double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (auto& [param, grad] : grads) {
    Moments& mo = state_[param];
    if (mo.m.size() == 0) {
      mo.m = ad::Tensor::zeros(param->rows, param->cols);
      mo.v = ad::Tensor::zeros(param->rows, param->cols);
    }
    for (int i = 0; i < param->size(); ++i) {
      size_t s = static_cast<size_t>(i);
      double g = grad->data[s];
      mo.m.data[s] = beta1_ * mo.m.data[s] + (1 - beta1_) * g;
      mo.v.data[s] = beta2_ * mo.v.data[s] + (1 - beta2_) * g * g;
      double mhat = mo.m.data[s] / bc1;
      double vhat = mo.v.data[s] / bc2;
      param->data[s] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
    }
  }
}

void apply_saliency_update(TrainState& state, const SaliencyMap& bimanual,
                           int epoch, const TrainConfig& config) {
  if (epoch < config.first_update_epoch ||
      (epoch - config.first_update_epoch) % config.update_period != 0)
    throw_config("apply_saliency_update: called off schedule");
  if (state.updates >= config.max_updates)
    throw_config("apply_saliency_update: update cap reached");
  validate_saliency(bimanual, static_cast<int>(bimanual.size()));
  state.working = bimanual;
  ++state.updates;
}

bool check_stop(const SaliencyMap& b, const ContactLabels& labels,
                const PointCloud& cloud, const GravityLine& gravity,
                double sigma_s, double sigma_p) {
  std::vector<int> right = label_indices(labels, {1});
  std::vector<int> left = label_indices(labels, {2});
  if (right.empty() || left.empty())
    throw_data("check_stop: both label classes must be present");
  double mean = mean_labeled_saliency(b, labels);
  double dist = hard_balance_distance(cloud, b, left, right, gravity);
  return mean >= sigma_s && dist < sigma_p;
}

double effective_temperature(const TrainConfig& config, int epoch) {
  int halvings = (epoch - 1) / config.temp_anneal_every;
  double t = config.loss.softsel_temp *
             std::pow(config.temp_anneal, static_cast<double>(halvings));
  return std::max(t, config.temp_floor);
}

namespace {

std::vector<std::pair<ad::Tensor*, const ad::Tensor*>> gradient_pairs(
    ad::Graph& g, const ad::Bindings& binds) {
  std::vector<std::pair<ad::Tensor*, const ad::Tensor*>> out;
  out.reserve(binds.entries.size());
  for (auto& [tensor, var] : binds.entries) out.emplace_back(tensor, &g.grad(var));
  return out;
}

std::vector<size_t> visit_order(size_t n, uint64_t seed) {
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  Rng rng(Rng::mix(seed, 0x6f72646572ULL));
  rng.shuffle(order);
  return order;
}

void maybe_checkpoint(const ModelWeights& model, const TrainConfig& config,
                      int epoch) {
  if (config.checkpoint_every <= 0 || config.checkpoint_dir.empty()) return;
  if (epoch % config.checkpoint_every != 0) return;
  namespace fs = std::filesystem;
  fs::create_directories(config.checkpoint_dir);
  save_model(model, (fs::path(config.checkpoint_dir) /
                     ("checkpoint_" + std::to_string(epoch) + ".bgsw"))
                        .string());
}

}  // namespace

CmTrainResult train_cm(const Dataset& dataset, ModelWeights& model,
                       const TrainConfig& config) {
  config.validate();
  if (dataset.empty()) throw_data("train_cm: empty dataset");
  for (const TrainObject& obj : dataset) {
    if (label_indices(obj.labels, {1}).empty())
      throw_data("train_cm: object without right-hand labels: " + obj.id);
  }

  GradientOptimizer opt(config.optimizer, config.lr);
  std::vector<size_t> order = visit_order(dataset.size(), config.seed);

  CmTrainResult result;
  double initial = -1;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    double epoch_loss = 0;
    for (size_t oi : order) {
      const TrainObject& obj = dataset[oi];
      ad::Graph g;
      ad::Bindings binds;
      ad::Var s = correction_forward(g, binds, model.correction, obj.cloud,
                                     obj.saliency);
      ad::Var loss = losses::correct(g, s, obj.labels);
      epoch_loss += g.value(loss).data[0];
      g.backward(loss);
      opt.step(gradient_pairs(g, binds));
    }
    result.trace.push_back({epoch, epoch_loss});
    if (initial < 0) initial = epoch_loss;
    maybe_checkpoint(model, config, epoch);
    if (config.stop_loss_fraction > 0 &&
        epoch_loss <= config.stop_loss_fraction * initial)
      break;
  }
  return result;
}

JointTrainResult train_joint(const Dataset& dataset, ModelWeights& model,
                             const TrainConfig& config) {
  config.validate();
  if (dataset.empty()) throw_data("train_joint: empty dataset");
  for (const TrainObject& obj : dataset) {
    if (label_indices(obj.labels, {1}).empty() ||
        label_indices(obj.labels, {2}).empty())
      throw_data("train_joint: object missing a label class: " + obj.id);
    if (static_cast<int>(obj.vectors.candidates.size()) != obj.cloud.size())
      throw_data("train_joint: candidate vectors missing: " + obj.id);
  }

  GradientOptimizer opt(config.optimizer, config.lr);
  std::vector<size_t> order = visit_order(dataset.size(), config.seed);

  std::vector<TrainState> states(dataset.size());
  for (size_t i = 0; i < dataset.size(); ++i)
    states[i].working = dataset[i].saliency;

  Phase phase = Phase::PreIteration;
  JointTrainResult result;
  double initial = -1;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    JointEpochRecord rec;
    rec.epoch = epoch;
    rec.phase = phase;
    rec.temperature = effective_temperature(config, epoch);
    LossWeights weights = config.loss;
    weights.softsel_temp = rec.temperature;

    for (size_t oi : order) {
      const TrainObject& obj = dataset[oi];
      ad::Graph g;
      ad::Bindings binds;
      SaliencyForward fwd = saliency_forward(g, binds, model.saliency,
                                             obj.cloud, states[oi].working, true);
      ad::Var logits = contact_forward(g, binds, model.contact, obj.cloud,
                                       fwd.bimanual);
      losses::TotalParts parts =
          losses::total(g, fwd.bimanual, fwd.vectors, obj.cloud,
                        states[oi].working, obj.labels, obj.vectors,
                        obj.gravity, weights, phase);
      ad::Var ce = g.cross_entropy_mean(logits, obj.labels);
      ad::Var objective = g.add(g.scale(ce, weights.w4), parts.total);

      rec.classify += g.value(objective).data[0];
      rec.total += g.value(parts.total).data[0];
      rec.correspondence += g.value(parts.correspondence).data[0];
      rec.pair += g.value(parts.pair).data[0];
      rec.anchor += g.value(parts.anchor).data[0];
      rec.balance += g.value(parts.balance).data[0];
      rec.cross_entropy += g.value(ce).data[0];

      g.backward(objective);
      opt.step(gradient_pairs(g, binds));
    }

    // Saliency-update schedule, evaluated at epoch end.
    bool scheduled = epoch >= config.first_update_epoch &&
                     (epoch - config.first_update_epoch) % config.update_period == 0;
    if (scheduled) {
      for (size_t oi = 0; oi < dataset.size(); ++oi) {
        TrainState& st = states[oi];
        if (st.stopped || st.updates >= config.max_updates) continue;
        SaliencyMap b = saliency_apply(model.saliency, dataset[oi].cloud,
                                       st.working);
        apply_saliency_update(st, b, epoch, config);
        rec.updated = true;
        st.stopped = check_stop(st.working, dataset[oi].labels,
                                dataset[oi].cloud, dataset[oi].gravity,
                                config.sigma_s, config.sigma_p);
      }
      if (rec.updated && phase == Phase::PreIteration) phase = Phase::Iteration;
    }

    rec.stopped.resize(dataset.size());
    bool all = true;
    int max_updates_seen = 0;
    for (size_t oi = 0; oi < dataset.size(); ++oi) {
      rec.stopped[oi] = states[oi].stopped;
      all = all && states[oi].stopped;
      max_updates_seen = std::max(max_updates_seen, states[oi].updates);
    }
    rec.updates = max_updates_seen;
    rec.all_stopped = all;
    result.trace.push_back(rec);
    if (initial < 0) initial = rec.classify;
    maybe_checkpoint(model, config, epoch);

    if (all) {
      result.stop_epoch = epoch;
      break;
    }
    if (config.stop_loss_fraction > 0 &&
        rec.classify <= config.stop_loss_fraction * initial)
      break;
  }

  result.working_maps.reserve(states.size());
  for (TrainState& st : states) result.working_maps.push_back(std::move(st.working));
  return result;
}

Dataset with_corrected_saliency(const ModelWeights& model, Dataset dataset) {
  for (TrainObject& obj : dataset)
    obj.saliency = correction_apply(model.correction, obj.cloud, obj.saliency);
  return dataset;
}

void save_cm_trace(const std::string& path, const CmTrainResult& result) {
  std::ofstream f(path);
  if (!f) throw_data("cannot open trace file for writing: " + path);
  for (const CmEpochRecord& r : result.trace) {
    json j{{"epoch", r.epoch}, {"loss", r.loss}};
    f << j.dump() << "\n";
  }
}

void save_joint_trace(const std::string& path, const JointTrainResult& result) {
  std::ofstream f(path);
  if (!f) throw_data("cannot open trace file for writing: " + path);
  for (const JointEpochRecord& r : result.trace) {
    json j{{"epoch", r.epoch},
           {"classify", r.classify},
           {"total", r.total},
           {"correspondence", r.correspondence},
           {"pair", r.pair},
           {"anchor", r.anchor},
           {"balance", r.balance},
           {"cross_entropy", r.cross_entropy},
           {"temperature", r.temperature},
           {"updates", r.updates},
           {"updated", r.updated},
           {"phase", r.phase == Phase::PreIteration ? "pre" : "iteration"},
           {"all_stopped", r.all_stopped}};
    j["stopped"] = json::array();
    for (bool s : r.stopped) j["stopped"].push_back(s);
    f << j.dump() << "\n";
  }
}

}  // namespace bgs
