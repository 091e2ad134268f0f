#pragma once

#include <vector>

#include "autodiff.hpp"
#include "geom.hpp"

namespace bgs {

struct LossWeights {
  double lambda1 = 1.0;  // pair-consistency weight
  double lambda2 = 1.5;  // anchor-consistency weight
  double w1 = 1.0;       // correspondence
  double w2 = 1.0;       // adjustment
  double w3 = 2.0;       // balance
  double w4 = 1.5;       // classification
  double softsel_temp = 0.1;

  void validate() const;
};

// Anchor-consistency support: before the first saliency update the unlabeled
// and right-hand points are anchored to the working map; afterwards only the
// unlabeled points are.
enum class Phase { PreIteration, Iteration };

namespace losses {

// Pushes annotated right-hand points toward saliency 1 and everything else
// toward 0: (1/N) [ sum_{l=1} (s-1)^2 + sum_{l in {0,2}} s^2 ].
ad::Var correct(ad::Graph& g, ad::Var s, const ContactLabels& labels);

// Squared error of predicted displacement vectors against the nearest
// ground-truth candidate, over labeled points. Selection is re-evaluated per
// forward pass from the current prediction and treated as constant.
ad::Var correspondence(ad::Graph& g, ad::Var v_pred, const VectorGT& gt,
                       const ContactLabels& labels);

// Saliency agreement between each labeled point and the interpolated map
// value at its displaced partner location.
ad::Var pair_consistency(ad::Graph& g, ad::Var b, ad::Var v_pred,
                         const PointCloud& cloud, const ContactLabels& labels,
                         int k = 4, double eps = 1e-6);

// Keeps the bimanual map tied to the working single-handed map on the
// phase-dependent support.
ad::Var anchor_consistency(ad::Graph& g, ad::Var b, const SaliencyMap& s,
                           const ContactLabels& labels, Phase phase);

ad::Var adjustment(ad::Graph& g, ad::Var b, ad::Var v_pred,
                   const PointCloud& cloud, const SaliencyMap& s,
                   const ContactLabels& labels, const LossWeights& w,
                   Phase phase);

// Softmax-relaxed selection of the side's highest-saliency contact point;
// converges to the argmax position as temp -> 0.
ad::Var soft_select_contact(ad::Graph& g, ad::Var b, const PointCloud& cloud,
                            const ContactLabels& labels, uint8_t side_label,
                            double temp);

// Distance of the soft-selected left/right midpoint from the gravity line.
ad::Var balance(ad::Graph& g, ad::Var b, const PointCloud& cloud,
                const ContactLabels& labels, const GravityLine& gravity,
                double temp);

struct TotalParts {
  ad::Var correspondence;
  ad::Var pair;
  ad::Var anchor;
  ad::Var adjustment;
  ad::Var balance;
  ad::Var total;
};

TotalParts total(ad::Graph& g, ad::Var b, ad::Var v_pred,
                 const PointCloud& cloud, const SaliencyMap& s,
                 const ContactLabels& labels, const VectorGT& gt,
                 const GravityLine& gravity, const LossWeights& w, Phase phase);

// w4 * cross-entropy(logits, gt) + total.
ad::Var classify(ad::Graph& g, ad::Var logits, const ContactLabels& gt,
                 ad::Var total, double w4);

}  // namespace losses

// ---- hard (non-differentiable) counterparts ----

// Index of the maximum map value within `side`; ties broken by lower index.
int hard_argmax(const SaliencyMap& b, const std::vector<int>& side);

// Balance distance with hard argmax selection per side.
double hard_balance_distance(const PointCloud& cloud, const SaliencyMap& b,
                             const std::vector<int>& left,
                             const std::vector<int>& right,
                             const GravityLine& gravity);

// Mean map value over all labeled (1 or 2) points.
double mean_labeled_saliency(const SaliencyMap& b, const ContactLabels& labels);

}  // namespace bgs
