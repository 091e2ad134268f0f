#include "nets.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "rng.hpp"

namespace bgs {

std::string act_name(Act a) {
  switch (a) {
    case Act::Relu: return "relu";
    case Act::Tanh: return "tanh";
    case Act::Sigmoid: return "sigmoid";
    case Act::Linear: return "linear";
  }
  return "linear";
}

Act act_from_name(const std::string& name) {
  if (name == "relu") return Act::Relu;
  if (name == "tanh") return Act::Tanh;
  if (name == "sigmoid") return Act::Sigmoid;
  if (name == "linear") return Act::Linear;
  throw_config("unknown activation: " + name);
}

namespace {

ad::Var apply_act(ad::Graph& g, ad::Var x, Act act) {
  switch (act) {
    case Act::Relu: return g.relu(x);
    case Act::Tanh: return g.tanh(x);
    case Act::Sigmoid: return g.sigmoid(x);
    case Act::Linear: return x;
  }
  return x;
}

Dense init_dense(int in, int out, Rng& rng) {
  Dense d;
  d.w = ad::Tensor(in, out);
  d.b = ad::Tensor(1, out);
  double bound = 1.0 / std::sqrt(static_cast<double>(in));
  for (double& v : d.w.data) v = rng.uniform(-bound, bound);
  for (double& v : d.b.data) v = rng.uniform(-bound, bound);
  return d;
}

Mlp init_mlp(int input, const std::vector<int>& widths, Act hidden, Act head,
             Rng& rng) {
  if (widths.empty()) throw_config("mlp needs at least one layer");
  Mlp m;
  m.hidden = hidden;
  m.head = head;
  int in = input;
  for (int w : widths) {
    if (w < 1) throw_config("mlp layer width must be positive");
    m.layers.push_back(init_dense(in, w, rng));
    in = w;
  }
  return m;
}

Encoder init_encoder(int input_channels, const NetConfig& cfg, Rng& rng) {
  if (cfg.encoder_widths.size() < 2)
    throw_config("encoder needs at least two layers (skip feature + global)");
  Encoder e;
  // The last encoder layer keeps the hidden activation; max-pool follows.
  e.mlp = init_mlp(input_channels, cfg.encoder_widths, cfg.hidden_act,
                   cfg.hidden_act, rng);
  return e;
}

Decoder init_decoder(int input_width, int out, Act head, const NetConfig& cfg,
                     Rng& rng) {
  Decoder d;
  std::vector<int> widths = cfg.decoder_widths;
  widths.push_back(out);
  d.mlp = init_mlp(input_width, widths, cfg.hidden_act, head, rng);
  return d;
}

}  // namespace

ModelWeights init_model(const NetConfig& config, uint64_t seed) {
  Rng rng(Rng::mix(seed, 0x6d6f64656cULL));
  ModelWeights m;
  m.config = config;
  int combined = config.encoder_widths.front() + config.encoder_widths.back();
  m.correction.enc = init_encoder(4, config, rng);
  m.correction.dec = init_decoder(combined, 1, Act::Tanh, config, rng);
  m.saliency.enc_vec = init_encoder(4, config, rng);
  m.saliency.dec_vec = init_decoder(combined, 3, Act::Linear, config, rng);
  m.saliency.enc_adj = init_encoder(4, config, rng);
  m.saliency.dec_adj = init_decoder(combined, 1, Act::Tanh, config, rng);
  m.contact.enc = init_encoder(4, config, rng);
  m.contact.dec = init_decoder(combined, 3, Act::Linear, config, rng);
  m.refine = init_refine(config, Rng::mix(seed, 0x726566696eULL));
  return m;
}

RefineNet init_refine(const NetConfig& config, uint64_t seed) {
  Rng rng(seed);
  RefineNet r;
  std::vector<int> widths = config.refine_widths;
  widths.push_back(1);
  r.mlp = init_mlp(7, widths, config.hidden_act, Act::Tanh, rng);
  return r;
}

ad::Var mlp_forward(ad::Graph& g, ad::Bindings& binds, const Mlp& mlp,
                    ad::Var input) {
  ad::Var h = input;
  for (size_t i = 0; i < mlp.layers.size(); ++i) {
    // Weights live outside the graph; bind copies them in as leaves.
    auto& layer = const_cast<Dense&>(mlp.layers[i]);
    ad::Var w = binds.bind(g, layer.w);
    ad::Var b = binds.bind(g, layer.b);
    h = g.linear(h, w, b);
    h = apply_act(g, h, i + 1 == mlp.layers.size() ? mlp.head : mlp.hidden);
  }
  return h;
}

EncodeResult encode(ad::Graph& g, ad::Bindings& binds, const Encoder& enc,
                    ad::Var input) {
  EncodeResult r;
  ad::Var h = input;
  for (size_t i = 0; i < enc.mlp.layers.size(); ++i) {
    auto& layer = const_cast<Dense&>(enc.mlp.layers[i]);
    ad::Var w = binds.bind(g, layer.w);
    ad::Var b = binds.bind(g, layer.b);
    h = g.linear(h, w, b);
    h = apply_act(g, h, enc.mlp.hidden);
    if (i == 0) r.first = h;
  }
  r.global = g.max_pool_rows(h);
  ad::Var replicated = g.repeat_row(r.global, g.value(input).rows);
  r.combined = g.concat_cols(r.first, replicated);
  return r;
}

ad::Var decode(ad::Graph& g, ad::Bindings& binds, const Decoder& dec,
               ad::Var combined) {
  return mlp_forward(g, binds, dec.mlp, combined);
}

ad::Tensor cloud_matrix(const PointCloud& cloud) {
  ad::Tensor m(cloud.size(), 3);
  for (int i = 0; i < cloud.size(); ++i) {
    m.at(i, 0) = cloud.points[static_cast<size_t>(i)].x;
    m.at(i, 1) = cloud.points[static_cast<size_t>(i)].y;
    m.at(i, 2) = cloud.points[static_cast<size_t>(i)].z;
  }
  return m;
}

ad::Tensor cloud_with_channel(const PointCloud& cloud,
                              const std::vector<double>& channel) {
  if (static_cast<int>(channel.size()) != cloud.size())
    throw_data("extra channel length does not match cloud");
  ad::Tensor m(cloud.size(), 4);
  for (int i = 0; i < cloud.size(); ++i) {
    m.at(i, 0) = cloud.points[static_cast<size_t>(i)].x;
    m.at(i, 1) = cloud.points[static_cast<size_t>(i)].y;
    m.at(i, 2) = cloud.points[static_cast<size_t>(i)].z;
    m.at(i, 3) = channel[static_cast<size_t>(i)];
  }
  return m;
}

ad::Var correction_forward(ad::Graph& g, ad::Bindings& binds,
                           const CorrectionNet& net, const PointCloud& cloud,
                           const SaliencyMap& s_in) {
  validate_saliency(s_in, cloud.size());
  ad::Var input = g.constant(cloud_with_channel(cloud, s_in));
  EncodeResult enc = encode(g, binds, net.enc, input);
  ad::Var correction = decode(g, binds, net.dec, enc.combined);
  ad::Var base = g.constant(ad::Tensor::column(s_in));
  return g.clamp01(g.add(base, correction));
}

SaliencyForward saliency_forward(ad::Graph& g, ad::Bindings& binds,
                                 const SaliencyNet& net,
                                 const PointCloud& cloud, const SaliencyMap& s,
                                 bool with_vectors) {
  validate_saliency(s, cloud.size());
  SaliencyForward out;
  ad::Var input = g.constant(cloud_with_channel(cloud, s));
  if (with_vectors) {
    EncodeResult ev = encode(g, binds, net.enc_vec, input);
    out.vectors = decode(g, binds, net.dec_vec, ev.combined);
  }
  EncodeResult ea = encode(g, binds, net.enc_adj, input);
  out.delta = decode(g, binds, net.dec_adj, ea.combined);
  ad::Var base = g.constant(ad::Tensor::column(s));
  out.bimanual = g.clamp01(g.add(base, out.delta));
  return out;
}

ad::Var contact_forward(ad::Graph& g, ad::Bindings& binds,
                        const ContactNet& net, const PointCloud& cloud,
                        ad::Var bimanual) {
  ad::Var xyz = g.constant(cloud_matrix(cloud));
  ad::Var input = g.concat_cols(xyz, bimanual);
  EncodeResult enc = encode(g, binds, net.enc, input);
  return decode(g, binds, net.dec, enc.combined);
}

RefineForward refine_forward(ad::Graph& g, ad::Bindings& binds,
                             const RefineNet& net, const PointCloud& cloud,
                             const SaliencyMap& b, const ContactLabels& labels) {
  validate_saliency(b, cloud.size());
  validate_labels(labels, cloud.size());
  ad::Tensor input(cloud.size(), 7);
  for (int i = 0; i < cloud.size(); ++i) {
    const Vec3& p = cloud.points[static_cast<size_t>(i)];
    input.at(i, 0) = p.x;
    input.at(i, 1) = p.y;
    input.at(i, 2) = p.z;
    input.at(i, 3) = b[static_cast<size_t>(i)];
    input.at(i, 4 + labels[static_cast<size_t>(i)]) = 1.0;
  }
  RefineForward out;
  out.adjustment = mlp_forward(g, binds, net.mlp, g.constant(std::move(input)));
  ad::Var base = g.constant(ad::Tensor::column(b));
  out.refined = g.clamp01(g.add(base, out.adjustment));
  return out;
}

namespace {

SaliencyMap column_to_map(const ad::Tensor& t) {
  SaliencyMap m(static_cast<size_t>(t.rows));
  for (int i = 0; i < t.rows; ++i) m[static_cast<size_t>(i)] = t.at(i, 0);
  return m;
}

}  // namespace

SaliencyMap correction_apply(const CorrectionNet& net, const PointCloud& cloud,
                             const SaliencyMap& s_in) {
  ad::Graph g;
  ad::Bindings binds;
  binds.trainable = false;
  ad::Var s = correction_forward(g, binds, net, cloud, s_in);
  return column_to_map(g.value(s));
}

SaliencyMap saliency_apply(const SaliencyNet& net, const PointCloud& cloud,
                           const SaliencyMap& s) {
  ad::Graph g;
  ad::Bindings binds;
  binds.trainable = false;
  SaliencyForward f = saliency_forward(g, binds, net, cloud, s, false);
  return column_to_map(g.value(f.bimanual));
}

ad::Tensor contact_logits_apply(const ContactNet& net, const PointCloud& cloud,
                                const SaliencyMap& b) {
  validate_saliency(b, cloud.size());
  ad::Graph g;
  ad::Bindings binds;
  binds.trainable = false;
  ad::Var bv = g.constant(ad::Tensor::column(b));
  ad::Var logits = contact_forward(g, binds, net, cloud, bv);
  return g.value(logits);
}

// ---- serialization ----

namespace {

void collect(const std::string& prefix, const Mlp& mlp,
             std::vector<std::pair<std::string, const ad::Tensor*>>& out) {
  for (size_t i = 0; i < mlp.layers.size(); ++i) {
    out.emplace_back(prefix + "." + std::to_string(i) + ".w", &mlp.layers[i].w);
    out.emplace_back(prefix + "." + std::to_string(i) + ".b", &mlp.layers[i].b);
  }
}

}  // namespace

std::vector<std::pair<std::string, const ad::Tensor*>> named_tensors(
    const ModelWeights& m) {
  std::vector<std::pair<std::string, const ad::Tensor*>> out;
  collect("correction.enc", m.correction.enc.mlp, out);
  collect("correction.dec", m.correction.dec.mlp, out);
  collect("saliency.enc_vec", m.saliency.enc_vec.mlp, out);
  collect("saliency.dec_vec", m.saliency.dec_vec.mlp, out);
  collect("saliency.enc_adj", m.saliency.enc_adj.mlp, out);
  collect("saliency.dec_adj", m.saliency.dec_adj.mlp, out);
  collect("contact.enc", m.contact.enc.mlp, out);
  collect("contact.dec", m.contact.dec.mlp, out);
  collect("refine", m.refine.mlp, out);
  return out;
}

std::vector<std::pair<std::string, ad::Tensor*>> named_tensors(ModelWeights& m) {
  std::vector<std::pair<std::string, ad::Tensor*>> out;
  for (auto& [name, t] : named_tensors(static_cast<const ModelWeights&>(m)))
    out.emplace_back(name, const_cast<ad::Tensor*>(t));
  return out;
}

std::vector<ad::Tensor*> tensors_of(Mlp& mlp) {
  std::vector<ad::Tensor*> out;
  for (Dense& d : mlp.layers) {
    out.push_back(&d.w);
    out.push_back(&d.b);
  }
  return out;
}

std::vector<ad::Tensor*> tensors_of(CorrectionNet& net) {
  auto out = tensors_of(net.enc.mlp);
  auto d = tensors_of(net.dec.mlp);
  out.insert(out.end(), d.begin(), d.end());
  return out;
}

std::vector<ad::Tensor*> tensors_of(SaliencyNet& net) {
  std::vector<ad::Tensor*> out;
  for (auto* mlp : {&net.enc_vec.mlp, &net.dec_vec.mlp, &net.enc_adj.mlp,
                    &net.dec_adj.mlp}) {
    auto t = tensors_of(*mlp);
    out.insert(out.end(), t.begin(), t.end());
  }
  return out;
}

std::vector<ad::Tensor*> tensors_of(ContactNet& net) {
  auto out = tensors_of(net.enc.mlp);
  auto d = tensors_of(net.dec.mlp);
  out.insert(out.end(), d.begin(), d.end());
  return out;
}

namespace {

std::string widths_string(const std::vector<int>& widths) {
  std::ostringstream os;
  for (size_t i = 0; i < widths.size(); ++i) {
    if (i) os << ',';
    os << widths[i];
  }
  return os.str();
}

std::vector<int> parse_widths(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
  return out;
}

}  // namespace

void save_model(const ModelWeights& model, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw_data("cannot open model file for writing: " + path);
  f.write("BGSW", 4);
  uint32_t version = model.version;
  f.write(reinterpret_cast<const char*>(&version), 4);

  std::ostringstream header;
  header << "meta hidden_act " << act_name(model.config.hidden_act) << "\n";
  header << "meta encoder_widths " << widths_string(model.config.encoder_widths)
         << "\n";
  header << "meta decoder_widths " << widths_string(model.config.decoder_widths)
         << "\n";
  header << "meta refine_widths " << widths_string(model.config.refine_widths)
         << "\n";
  auto tensors = named_tensors(model);
  for (auto& [name, t] : tensors)
    header << "tensor " << name << " " << t->rows << " " << t->cols << "\n";
  header << "end_header\n";
  std::string h = header.str();
  f.write(h.data(), static_cast<std::streamsize>(h.size()));

  for (auto& [name, t] : tensors) {
    std::vector<float> blob(t->data.begin(), t->data.end());
    f.write(reinterpret_cast<const char*>(blob.data()),
            static_cast<std::streamsize>(blob.size() * sizeof(float)));
  }
  if (!f) throw_data("failed writing model file: " + path);
}

ModelWeights load_model(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw_data("cannot open model file: " + path);
  char magic[4];
  f.read(magic, 4);
  if (!f || std::memcmp(magic, "BGSW", 4) != 0)
    throw_data("not a model file (bad magic): " + path);
  uint32_t version = 0;
  f.read(reinterpret_cast<char*>(&version), 4);
  if (!f || version != 1) throw_data("unsupported model format version");

  NetConfig config;
  std::vector<std::pair<std::string, std::pair<int, int>>> shapes;
  std::string line;
  while (std::getline(f, line)) {
    if (line == "end_header") break;
    std::istringstream is(line);
    std::string kind;
    is >> kind;
    if (kind == "meta") {
      std::string key, value;
      is >> key >> value;
      if (key == "hidden_act") config.hidden_act = act_from_name(value);
      else if (key == "encoder_widths") config.encoder_widths = parse_widths(value);
      else if (key == "decoder_widths") config.decoder_widths = parse_widths(value);
      else if (key == "refine_widths") config.refine_widths = parse_widths(value);
      else throw_data("unknown meta key in model header: " + key);
    } else if (kind == "tensor") {
      std::string name;
      int rows = 0, cols = 0;
      is >> name >> rows >> cols;
      if (name.empty() || rows < 1 || cols < 1)
        throw_data("malformed tensor line in model header");
      shapes.emplace_back(name, std::make_pair(rows, cols));
    } else {
      throw_data("malformed model header line: " + line);
    }
  }
  if (line != "end_header") throw_data("model header not terminated");

  ModelWeights model = init_model(config, 0);
  model.version = version;
  auto tensors = named_tensors(model);
  if (tensors.size() != shapes.size())
    throw_data("model header tensor count does not match architecture");
  for (size_t i = 0; i < tensors.size(); ++i) {
    auto& [name, t] = tensors[i];
    if (name != shapes[i].first) throw_data("unexpected tensor name: " + shapes[i].first);
    if (t->rows != shapes[i].second.first || t->cols != shapes[i].second.second)
      throw_data("tensor shape mismatch for " + name);
    std::vector<float> blob(static_cast<size_t>(t->rows) * t->cols);
    f.read(reinterpret_cast<char*>(blob.data()),
           static_cast<std::streamsize>(blob.size() * sizeof(float)));
    if (!f) throw_data("model file truncated at tensor " + name);
    for (size_t j = 0; j < blob.size(); ++j) t->data[j] = blob[j];
  }
  return model;
}

}  // namespace bgs
