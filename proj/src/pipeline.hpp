#pragma once

#include <string>
#include <vector>

#include "data.hpp"
#include "losses.hpp"
#include "nets.hpp"

namespace bgs {

struct Prediction {
  SaliencyMap bimanual;
  ContactLabels labels;  // argmax of contact logits; any tie falls to class 0
};

// Inference: bimanual map via the adjustment branch only, then per-point
// 3-class labels.
Prediction predict(const ModelWeights& model, const PointCloud& cloud,
                   const SaliencyMap& s);

// Keeps a predicted label only where the map clears the threshold.
ContactLabels mask_labels(const SaliencyMap& b, const ContactLabels& labels,
                          double tau);

struct RefineConfig {
  double w_r = 0.12;    // stop threshold on the hard-argmax balance distance
  int max_iters = 500;
  double lr = 0.05;     // inner gradient step, halved on rejected steps
  double temp = 0.1;    // soft-selection temperature of the objective
  double mu = 0.1;      // proximity penalty weight on mean squared adjustment

  void validate() const;
};

struct RefineResult {
  SaliencyMap refined;
  double initial_distance = 0;
  double final_distance = 0;
  int iterations = 0;
  bool warned = false;  // cap reached without passing the threshold
  std::vector<double> objective_trace;  // accepted iterates, non-increasing
};

// Test-time optimization of the refinement stack so the selected
// right/not-right contact pair balances about the gravity line. Returns at
// the first iterate whose hard-argmax distance drops below w_r, otherwise the
// best iterate seen, flagged.
RefineResult physics_refine(const ModelWeights& model, const PointCloud& cloud,
                            const SaliencyMap& b, const ContactLabels& labels,
                            const RefineConfig& config,
                            const GravityLine& gravity);

struct ContactClusters {
  std::vector<int> left;
  std::vector<int> right;
};

// K-means (K=3) over [xyz, saliency] rows; the two clusters with the highest
// mean saliency are the contact clusters, sided by overlap with predicted
// right-hand labels.
ContactClusters cluster_contacts(const PointCloud& cloud, const SaliencyMap& b,
                                 const ContactLabels& labels_pred,
                                 uint64_t seed);

// Percentage of annotated contact points whose map value clears tau_c.
double bcacr(const SaliencyMap& b, const ContactLabels& labels_gt,
             double tau_c = 0.7);

// Percentage of single-handed contact indices covered by the bimanual set.
double grasp_coverage(const std::vector<int>& single_contacts,
                      const std::vector<int>& bimanual_contacts);

enum class BalanceMode { HighestSaliency, Centroid };

// Distance of the left/right representative midpoint from the gravity line.
// HighestSaliency picks each side's top-map point (requires b); Centroid uses
// set centroids.
double balance_distance(const PointCloud& cloud, const std::vector<int>& left,
                        const std::vector<int>& right,
                        const GravityLine& gravity,
                        BalanceMode mode = BalanceMode::Centroid,
                        const SaliencyMap* b = nullptr);

struct EvalRecord {
  std::string object_id;
  double bcacr = 0;
  double coverage = -1;      // -1 when the single-handed set is empty
  double balance_pre = -1;   // -1 when a predicted side is empty
  double balance_post = -1;
  int refine_iterations = 0;
  bool warned = false;
};

// Per-object metrics over a dataset whose saliency maps are already
// corrected. tau masks the single/bimanual contact sets for coverage.
std::vector<EvalRecord> evaluate(const ModelWeights& model,
                                 const Dataset& objects,
                                 const RefineConfig& refine_config,
                                 double tau_c = 0.7, double tau = 0.5);

void save_eval_report(const std::string& path,
                      const std::vector<EvalRecord>& records);

}  // namespace bgs
