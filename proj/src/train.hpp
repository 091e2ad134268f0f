#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "data.hpp"
#include "losses.hpp"
#include "nets.hpp"

namespace bgs {

struct TrainConfig {
  int epochs = 3000;
  double lr = 1e-3;
  enum class Optimizer { Sgd, Adam } optimizer = Optimizer::Adam;

  // Iterative learning schedule: the working single-handed map is replaced by
  // the current bimanual prediction at epochs K, K+M, K+2M, ... up to
  // max_updates times or until the stop rule holds on every object.
  int first_update_epoch = 2000;  // K
  int update_period = 200;        // M
  int max_updates = 10;           // m
  double sigma_s = 0.8;           // labeled-saliency stop threshold
  double sigma_p = 0.12;          // balance-distance stop threshold

  uint64_t seed = 0;
  LossWeights loss;

  // Soft-selection temperature anneal: x0.5 every 500 epochs, floored.
  double temp_anneal = 0.5;
  int temp_anneal_every = 500;
  double temp_floor = 1e-3;

  // Optional early exit once the epoch loss drops to this fraction of the
  // first epoch's. 0 disables.
  double stop_loss_fraction = 0.0;

  int checkpoint_every = 0;  // epochs; 0 disables
  std::string checkpoint_dir;

  void validate() const;
};

// Adam (default) or plain gradient descent over an arbitrary tensor set.
class GradientOptimizer {
 public:
  GradientOptimizer(TrainConfig::Optimizer kind, double lr);

  // One update over all (parameter, gradient) pairs. Throws on non-finite
  // gradients.
  void step(const std::vector<std::pair<ad::Tensor*, const ad::Tensor*>>& grads);

  void set_lr(double lr) { lr_ = lr; }
  double lr() const { return lr_; }

 private:
  struct Moments {
    ad::Tensor m, v;
  };
  TrainConfig::Optimizer kind_;
  double lr_;
  double beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
  int64_t t_ = 0;
  std::unordered_map<ad::Tensor*, Moments> state_;
};

// Per-object mutable training state for the iterative schedule.
struct TrainState {
  SaliencyMap working;  // current single-handed map S
  int updates = 0;      // t
  bool stopped = false;
};

// Replaces the working map with the detached bimanual prediction. Throws if
// called off-schedule or past the update cap.
void apply_saliency_update(TrainState& state, const SaliencyMap& bimanual,
                           int epoch, const TrainConfig& config);

// True iff mean labeled saliency >= sigma_s AND hard-argmax balance distance
// < sigma_p.
bool check_stop(const SaliencyMap& b, const ContactLabels& labels,
                const PointCloud& cloud, const GravityLine& gravity,
                double sigma_s, double sigma_p);

// Effective soft-selection temperature for a 1-based epoch.
double effective_temperature(const TrainConfig& config, int epoch);

struct CmEpochRecord {
  int epoch = 0;
  double loss = 0;
};

struct CmTrainResult {
  std::vector<CmEpochRecord> trace;
};

struct JointEpochRecord {
  int epoch = 0;
  double classify = 0;  // full objective (w4*CE + total), summed over objects
  double total = 0;
  double correspondence = 0;
  double pair = 0;
  double anchor = 0;
  double balance = 0;
  double cross_entropy = 0;
  double temperature = 0;
  int updates = 0;       // max update count across objects after this epoch
  bool updated = false;  // a saliency update ran at this epoch
  Phase phase = Phase::PreIteration;  // phase in effect during this epoch
  std::vector<bool> stopped;          // per-object stop flags
  bool all_stopped = false;
};

struct JointTrainResult {
  std::vector<JointEpochRecord> trace;
  std::vector<SaliencyMap> working_maps;  // final per-object S
  int stop_epoch = -1;                    // epoch the stop rule halted training
};

// Minimizes the correction objective over the dataset; mutates
// model.correction. Every object must carry at least one right-hand label.
CmTrainResult train_cm(const Dataset& dataset, ModelWeights& model,
                       const TrainConfig& config);

// Joint optimization of the saliency and contact nets with the iterative
// saliency-update schedule. Dataset saliency maps are expected to be the
// corrected (post-CM) ones.
JointTrainResult train_joint(const Dataset& dataset, ModelWeights& model,
                             const TrainConfig& config);

// Corrected single-handed maps for downstream training/inference.
Dataset with_corrected_saliency(const ModelWeights& model, Dataset dataset);

void save_cm_trace(const std::string& path, const CmTrainResult& result);
void save_joint_trace(const std::string& path, const JointTrainResult& result);

}  // namespace bgs
