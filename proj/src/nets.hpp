#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "autodiff.hpp"
#include "geom.hpp"

namespace bgs {

enum class Act { Relu, Tanh, Sigmoid, Linear };

std::string act_name(Act a);
Act act_from_name(const std::string& name);

struct Dense {
  ad::Tensor w;  // [in x out]
  ad::Tensor b;  // [1 x out]
};

// Shared per-point stack; `hidden` applies to all but the last layer, `head`
// to the last.
struct Mlp {
  std::vector<Dense> layers;
  Act hidden = Act::Relu;
  Act head = Act::Linear;
};

// Architecture knobs. Defaults pin the reference architecture: per-point
// encoder 64-128-256-512-1024 with the 64-wide first-layer feature reused as
// a skip connection, decoders 1088-512-256-128-m.
struct NetConfig {
  std::vector<int> encoder_widths{64, 128, 256, 512, 1024};
  std::vector<int> decoder_widths{512, 256, 128};
  std::vector<int> refine_widths{64, 64};
  Act hidden_act = Act::Relu;
};

struct Encoder {
  Mlp mlp;
  int input_channels() const { return mlp.layers.front().w.rows; }
  int first_width() const { return mlp.layers.front().w.cols; }
  int global_width() const { return mlp.layers.back().w.cols; }
};

struct Decoder {
  Mlp mlp;
  int input_width() const { return mlp.layers.front().w.rows; }
  int output_width() const { return mlp.layers.back().w.cols; }
};

// Corrects the single-handed saliency map so annotated right-hand regions
// become salient: s = clamp(s_in + correction, 0, 1).
struct CorrectionNet {
  Encoder enc;
  Decoder dec;  // m = 1, tanh head
};

// Two encoder-decoder pairs: one regresses per-point displacement vectors to
// the opposite hand, the other the additive saliency adjustment.
struct SaliencyNet {
  Encoder enc_vec;
  Decoder dec_vec;  // m = 3, linear head
  Encoder enc_adj;
  Decoder dec_adj;  // m = 1, tanh head
};

// Per-point 3-class segmentation head over [xyz, bimanual saliency].
struct ContactNet {
  Encoder enc;
  Decoder dec;  // m = 3, linear logits
};

// Small per-point stack over [xyz, saliency, one-hot label]; optimized at
// inference time per object.
struct RefineNet {
  Mlp mlp;  // 7 -> ... -> 1, tanh head
};

struct ModelWeights {
  uint32_t version = 1;
  NetConfig config;
  CorrectionNet correction;
  SaliencyNet saliency;
  ContactNet contact;
  RefineNet refine;
};

ModelWeights init_model(const NetConfig& config, uint64_t seed);
RefineNet init_refine(const NetConfig& config, uint64_t seed);

// ---- forward passes (tape) ----

ad::Var mlp_forward(ad::Graph& g, ad::Bindings& binds, const Mlp& mlp,
                    ad::Var input);

struct EncodeResult {
  ad::Var first;     // [N x first_width]
  ad::Var global;    // [1 x global_width]
  ad::Var combined;  // [N x (first + global)]
};
EncodeResult encode(ad::Graph& g, ad::Bindings& binds, const Encoder& enc,
                    ad::Var input);

ad::Var decode(ad::Graph& g, ad::Bindings& binds, const Decoder& dec,
               ad::Var combined);

// Input assembly: [xyz | extra channels...] as a constant tensor.
ad::Tensor cloud_matrix(const PointCloud& cloud);
ad::Tensor cloud_with_channel(const PointCloud& cloud,
                              const std::vector<double>& channel);

// Corrected map clamp(s_in + correction).
ad::Var correction_forward(ad::Graph& g, ad::Bindings& binds,
                           const CorrectionNet& net, const PointCloud& cloud,
                           const SaliencyMap& s_in);

struct SaliencyForward {
  ad::Var vectors;   // [N x 3]; invalid when the vector branch is skipped
  ad::Var delta;     // [N x 1]
  ad::Var bimanual;  // [N x 1], clamp(s + delta)
};
// with_vectors=false is the inference path: only the adjustment pair runs.
SaliencyForward saliency_forward(ad::Graph& g, ad::Bindings& binds,
                                 const SaliencyNet& net,
                                 const PointCloud& cloud, const SaliencyMap& s,
                                 bool with_vectors);

// 3-class logits; `bimanual` may be a tape var (training) or constant.
ad::Var contact_forward(ad::Graph& g, ad::Bindings& binds,
                        const ContactNet& net, const PointCloud& cloud,
                        ad::Var bimanual);

struct RefineForward {
  ad::Var adjustment;  // [N x 1] in (-1, 1)
  ad::Var refined;     // clamp(b + adjustment)
};
RefineForward refine_forward(ad::Graph& g, ad::Bindings& binds,
                             const RefineNet& net, const PointCloud& cloud,
                             const SaliencyMap& b, const ContactLabels& labels);

// ---- plain (tape-free) inference wrappers ----

SaliencyMap correction_apply(const CorrectionNet& net, const PointCloud& cloud,
                             const SaliencyMap& s_in);
SaliencyMap saliency_apply(const SaliencyNet& net, const PointCloud& cloud,
                           const SaliencyMap& s);
ad::Tensor contact_logits_apply(const ContactNet& net, const PointCloud& cloud,
                                const SaliencyMap& b);

// ---- serialization ----
// Binary container: magic "BGSW", little-endian u32 format version, a text
// header listing tensor names/shapes, then float32 little-endian blobs in
// header order.
void save_model(const ModelWeights& model, const std::string& path);
ModelWeights load_model(const std::string& path);

// Enumerate (name, tensor) pairs in serialization order.
std::vector<std::pair<std::string, const ad::Tensor*>> named_tensors(
    const ModelWeights& model);
std::vector<std::pair<std::string, ad::Tensor*>> named_tensors(
    ModelWeights& model);

// All trainable tensors of a subnet, in deterministic order.
std::vector<ad::Tensor*> tensors_of(Mlp& mlp);
std::vector<ad::Tensor*> tensors_of(CorrectionNet& net);
std::vector<ad::Tensor*> tensors_of(SaliencyNet& net);
std::vector<ad::Tensor*> tensors_of(ContactNet& net);

}  // namespace bgs
