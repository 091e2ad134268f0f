#include "bgs/bgs.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>

#include "data.hpp"
#include "json.hpp"
#include "pipeline.hpp"
#include "ply.hpp"
#include "train.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

struct bgs_object {
  bgs::PointCloud cloud;
  std::optional<bgs::SaliencyMap> saliency;     // single-handed input map
  std::optional<bgs::SaliencyMap> bimanual;     // predicted / refined map
  std::optional<bgs::ContactLabels> labels;     // annotations
  std::optional<bgs::ContactLabels> predicted;  // contact-net output
  bgs::GravityLine gravity;
};

struct bgs_model {
  bgs::ModelWeights weights;
};

namespace {

thread_local std::string t_last_error;

int log_level() {
  static int level = [] {
    const char* v = std::getenv("BGS_LOG_LEVEL");
    return v ? std::atoi(v) : 1;
  }();
  return level;
}

void log_info(const std::string& msg) {
  if (log_level() >= 1) std::fprintf(stderr, "[bigrasp] %s\n", msg.c_str());
}

template <typename Fn>
bgs_status guarded(Fn&& fn) {
  t_last_error.clear();
  try {
    fn();
    return BGS_OK;
  } catch (const bgs::Error& e) {
    t_last_error = e.what();
    return static_cast<int>(e.category());
  } catch (const std::exception& e) {
    t_last_error = e.what();
    return BGS_ERR_DATA;
  }
}

// Typed config access with unknown-key rejection and a resolved-value echo.
class ConfigReader {
 public:
  ConfigReader(const char* config_json, const char* command) {
    if (!config_json) bgs::throw_config("null config");
    doc_ = json::parse(config_json, nullptr, false);
    if (doc_.is_discarded()) bgs::throw_config("config is not valid JSON");
    if (!doc_.is_object()) bgs::throw_config("config must be a JSON object");
    command_ = command;
  }

  std::string str(const char* key) {
    require(key);
    return fetch<std::string>(key, json::value_t::string);
  }
  std::string str(const char* key, const std::string& fallback) {
    return has(key) ? fetch<std::string>(key, json::value_t::string)
                    : remember(key, fallback);
  }
  int integer(const char* key, std::optional<int> fallback = {}) {
    if (!has(key)) {
      if (!fallback) require(key);
      return remember(key, *fallback);
    }
    if (!doc_[key].is_number_integer())
      bgs::throw_config(std::string(command_) + ": key '" + key + "' must be an integer");
    return remember(key, doc_[key].get<int>());
  }
  uint64_t unsigned64(const char* key, uint64_t fallback) {
    if (!has(key)) return remember(key, fallback);
    if (!doc_[key].is_number_unsigned() && !doc_[key].is_number_integer())
      bgs::throw_config(std::string(command_) + ": key '" + key + "' must be an integer");
    return remember(key, doc_[key].get<uint64_t>());
  }
  double real(const char* key, std::optional<double> fallback = {}) {
    if (!has(key)) {
      if (!fallback) require(key);
      return remember(key, *fallback);
    }
    if (!doc_[key].is_number())
      bgs::throw_config(std::string(command_) + ": key '" + key + "' must be a number");
    return remember(key, doc_[key].get<double>());
  }
  bool boolean(const char* key, bool fallback) {
    if (!has(key)) return remember(key, fallback);
    if (!doc_[key].is_boolean())
      bgs::throw_config(std::string(command_) + ": key '" + key + "' must be a boolean");
    return remember(key, doc_[key].get<bool>());
  }
  std::vector<std::string> str_list(const char* key,
                                    const std::vector<std::string>& fallback) {
    if (!has(key)) return remember(key, fallback);
    if (!doc_[key].is_array())
      bgs::throw_config(std::string(command_) + ": key '" + key + "' must be an array");
    std::vector<std::string> out;
    for (const auto& v : doc_[key]) out.push_back(v.get<std::string>());
    return remember(key, out);
  }
  std::vector<int> int_list(const char* key, const std::vector<int>& fallback) {
    if (!has(key)) return remember(key, fallback);
    if (!doc_[key].is_array())
      bgs::throw_config(std::string(command_) + ": key '" + key + "' must be an array");
    std::vector<int> out;
    for (const auto& v : doc_[key]) out.push_back(v.get<int>());
    return remember(key, out);
  }

  // Call after all keys were consumed; rejects anything unexpected.
  void done() const {
    for (auto it = doc_.begin(); it != doc_.end(); ++it) {
      if (!seen_.count(it.key()))
        bgs::throw_config(std::string(command_) + ": unknown config key '" +
                          it.key() + "'");
    }
  }

  // Resolved configuration (defaults included) for the reproducibility echo.
  void write_resolved(const std::string& out_dir) const {
    fs::create_directories(out_dir);
    std::ofstream f(fs::path(out_dir) / "resolved_config.json");
    if (!f) bgs::throw_data("cannot write resolved config");
    json echo = resolved_;
    echo["command"] = command_;
    f << echo.dump(2) << "\n";
  }

 private:
  bool has(const char* key) const { return doc_.contains(key); }
  void require(const char* key) {
    if (!has(key))
      bgs::throw_config(std::string(command_) + ": missing required key '" +
                        key + "'");
  }
  template <typename T>
  T fetch(const char* key, json::value_t) {
    if (!doc_[key].is_string())
      bgs::throw_config(std::string(command_) + ": key '" + key + "' must be a string");
    return remember(key, doc_[key].get<T>());
  }
  template <typename T>
  T remember(const char* key, const T& value) {
    seen_.insert(key);
    resolved_[key] = value;
    return value;
  }

  json doc_;
  json resolved_ = json::object();
  std::set<std::string> seen_;
  const char* command_ = "";
};

bgs::NetConfig net_config_from(ConfigReader& cfg) {
  bgs::NetConfig net;
  net.encoder_widths = cfg.int_list("encoder_widths", net.encoder_widths);
  net.decoder_widths = cfg.int_list("decoder_widths", net.decoder_widths);
  net.refine_widths = cfg.int_list("refine_widths", net.refine_widths);
  net.hidden_act = bgs::act_from_name(cfg.str("activation", "relu"));
  return net;
}

bgs::RefineConfig refine_config_from(ConfigReader& cfg) {
  bgs::RefineConfig rc;
  rc.w_r = cfg.real("w_r", rc.w_r);
  rc.max_iters = cfg.integer("max_iters", rc.max_iters);
  rc.lr = cfg.real("refine_lr", rc.lr);
  rc.temp = cfg.real("temp", rc.temp);
  rc.mu = cfg.real("mu", rc.mu);
  return rc;
}

bgs::PlyData object_to_ply(const bgs_object& o, bool prefer_bimanual) {
  bgs::PlyData ply;
  ply.cloud = o.cloud;
  if (prefer_bimanual && o.bimanual) ply.saliency = o.bimanual;
  else if (o.saliency) ply.saliency = o.saliency;
  if (o.predicted) ply.labels = o.predicted;
  else if (o.labels) ply.labels = o.labels;
  return ply;
}

}  // namespace

extern "C" {

const char* bgs_version(void) { return "0.1.0"; }

const char* bgs_last_error(void) { return t_last_error.c_str(); }

bgs_status bgs_gen_data(const char* config_json) {
  return guarded([&] {
    ConfigReader cfg(config_json, "gen-data");
    bgs::DatasetConfig dc;
    std::string out_dir = cfg.str("out_dir");
    std::vector<std::string> default_names;
    for (bgs::Category c : dc.categories)
      default_names.push_back(bgs::category_name(c));
    std::vector<std::string> names = cfg.str_list("categories", default_names);
    dc.categories.clear();
    for (const std::string& n : names)
      dc.categories.push_back(bgs::category_from_name(n));
    dc.train_per_category = cfg.integer("train_per_category", 2);
    dc.test_per_category = cfg.integer("test_per_category", 1);
    dc.n_points = cfg.integer("n_points", 5000);
    dc.n_candidates = cfg.integer("n_candidates", 1000);
    dc.seed = cfg.unsigned64("seed", 1);
    dc.disturb_fraction = cfg.real("disturb_fraction", 0.0);
    cfg.done();
    cfg.write_resolved(out_dir);
    bgs::Manifest m = bgs::make_dataset(dc, out_dir);
    log_info("gen-data: wrote " + std::to_string(m.train.size()) + " train / " +
             std::to_string(m.test.size()) + " test objects to " + out_dir);
  });
}

bgs_status bgs_train(const char* config_json) {
  return guarded([&] {
    ConfigReader cfg(config_json, "train");
    std::string data_dir = cfg.str("data_dir");
    std::string out_dir = cfg.str("out_dir");
    uint64_t seed = cfg.unsigned64("seed", 0);

    bgs::TrainConfig cm;
    cm.epochs = cfg.integer("cm_epochs", 2000);
    cm.lr = cfg.real("cm_lr", 1e-3);
    cm.stop_loss_fraction = cfg.real("cm_stop_loss_fraction", 0.0);
    cm.seed = seed;

    bgs::TrainConfig joint;
    joint.epochs = cfg.integer("epochs", 3000);
    joint.lr = cfg.real("lr", 1e-3);
    joint.first_update_epoch = cfg.integer("K", 2000);
    joint.update_period = cfg.integer("M", 200);
    joint.max_updates = cfg.integer("m_max", 10);
    joint.sigma_s = cfg.real("sigma_s", 0.8);
    joint.sigma_p = cfg.real("sigma_p", 0.12);
    joint.seed = seed;
    joint.loss.lambda1 = cfg.real("lambda1", 1.0);
    joint.loss.lambda2 = cfg.real("lambda2", 1.5);
    joint.loss.w1 = cfg.real("w1", 1.0);
    joint.loss.w2 = cfg.real("w2", 1.0);
    joint.loss.w3 = cfg.real("w3", 2.0);
    joint.loss.w4 = cfg.real("w4", 1.5);
    joint.loss.softsel_temp = cfg.real("temp", 0.1);
    joint.temp_anneal = cfg.real("temp_anneal", 0.5);
    joint.temp_anneal_every = cfg.integer("temp_anneal_every", 500);
    joint.temp_floor = cfg.real("temp_floor", 1e-3);
    joint.stop_loss_fraction = cfg.real("stop_loss_fraction", 0.0);
    joint.checkpoint_every = cfg.integer("checkpoint_every", 0);
    joint.checkpoint_dir = out_dir + "/checkpoints";
    cm.optimizer = joint.optimizer =
        cfg.str("optimizer", "adam") == "sgd" ? bgs::TrainConfig::Optimizer::Sgd
                                              : bgs::TrainConfig::Optimizer::Adam;
    bgs::NetConfig net = net_config_from(cfg);
    cfg.done();
    cfg.write_resolved(out_dir);

    bgs::Manifest manifest =
        bgs::load_manifest((fs::path(data_dir) / "manifest.json").string());
    bgs::Dataset train_set = bgs::load_dataset(data_dir, manifest, true);

    bgs::ModelWeights model = bgs::init_model(net, seed);
    log_info("train: correction module over " + std::to_string(train_set.size()) +
             " objects");
    bgs::CmTrainResult cm_result = bgs::train_cm(train_set, model, cm);
    bgs::save_cm_trace((fs::path(out_dir) / "cm_trace.jsonl").string(), cm_result);

    bgs::Dataset corrected = bgs::with_corrected_saliency(model, train_set);
    log_info("train: joint saliency/contact optimization");
    bgs::JointTrainResult joint_result = bgs::train_joint(corrected, model, joint);
    bgs::save_joint_trace((fs::path(out_dir) / "joint_trace.jsonl").string(),
                          joint_result);
    bgs::save_model(model, (fs::path(out_dir) / "model.bgsw").string());
    log_info("train: wrote model.bgsw (" +
             std::to_string(joint_result.trace.size()) + " joint epochs)");
  });
}

namespace {

bgs_object load_object_with_saliency(const std::string& path) {
  bgs::PlyData ply = bgs::load_ply(path);
  if (!ply.saliency)
    bgs::throw_data("object file carries no single-handed saliency map: " + path);
  bgs_object o;
  o.cloud = std::move(ply.cloud);
  o.saliency = std::move(ply.saliency);
  o.labels = std::move(ply.labels);
  o.gravity = bgs::gravity_line(o.cloud);
  return o;
}

}  // namespace

bgs_status bgs_infer(const char* config_json) {
  return guarded([&] {
    ConfigReader cfg(config_json, "infer");
    std::string model_path = cfg.str("model");
    std::string object_path = cfg.str("object");
    std::string out_dir = cfg.str("out_dir");
    double tau = cfg.real("tau", 0.5);
    cfg.done();
    cfg.write_resolved(out_dir);

    bgs::ModelWeights model = bgs::load_model(model_path);
    bgs_object obj = load_object_with_saliency(object_path);
    bgs::SaliencyMap corrected =
        bgs::correction_apply(model.correction, obj.cloud, *obj.saliency);
    bgs::Prediction pred = bgs::predict(model, obj.cloud, corrected);
    bgs::ContactLabels masked = bgs::mask_labels(pred.bimanual, pred.labels, tau);

    bgs::PlyData out_ply;
    out_ply.cloud = obj.cloud;
    out_ply.saliency = pred.bimanual;
    out_ply.labels = masked;
    bgs::save_ply((fs::path(out_dir) / "prediction.ply").string(), out_ply);

    json summary;
    summary["n_points"] = obj.cloud.size();
    summary["tau"] = tau;
    summary["right_contacts"] = bgs::label_indices(masked, {1}).size();
    summary["left_contacts"] = bgs::label_indices(masked, {2}).size();
    std::ofstream f(fs::path(out_dir) / "prediction.json");
    f << summary.dump(2) << "\n";
    log_info("infer: wrote prediction to " + out_dir);
  });
}

bgs_status bgs_refine(const char* config_json) {
  return guarded([&] {
    ConfigReader cfg(config_json, "refine");
    std::string model_path = cfg.str("model");
    std::string object_path = cfg.str("object");
    std::string out_dir = cfg.str("out_dir");
    uint64_t seed = cfg.unsigned64("seed", 0);
    double tau = cfg.real("tau", 0.5);
    bgs::RefineConfig rc = refine_config_from(cfg);
    cfg.done();
    cfg.write_resolved(out_dir);

    bgs::ModelWeights model = bgs::load_model(model_path);
    bgs_object obj = load_object_with_saliency(object_path);
    bgs::SaliencyMap corrected =
        bgs::correction_apply(model.correction, obj.cloud, *obj.saliency);
    bgs::Prediction pred = bgs::predict(model, obj.cloud, corrected);

    double pre = -1;
    std::vector<int> right = bgs::label_indices(pred.labels, {1});
    std::vector<int> other = bgs::label_indices(pred.labels, {0, 2});
    bgs::RefineResult refined;
    if (!right.empty() && !other.empty()) {
      pre = bgs::hard_balance_distance(obj.cloud, pred.bimanual, other, right,
                                       obj.gravity);
      refined = bgs::physics_refine(model, obj.cloud, pred.bimanual,
                                    pred.labels, rc, obj.gravity);
    } else {
      bgs::throw_data("refine: prediction produced an empty contact side");
    }

    bgs::ContactClusters clusters =
        bgs::cluster_contacts(obj.cloud, refined.refined, pred.labels, seed);

    bgs::PlyData out_ply;
    out_ply.cloud = obj.cloud;
    out_ply.saliency = refined.refined;
    out_ply.labels = bgs::mask_labels(refined.refined, pred.labels, tau);
    bgs::save_ply((fs::path(out_dir) / "refined.ply").string(), out_ply);

    json report;
    report["balance_pre"] = pre;
    report["balance_post"] = refined.final_distance;
    report["iterations"] = refined.iterations;
    report["warned"] = refined.warned;
    report["left"] = clusters.left;
    report["right"] = clusters.right;
    std::ofstream f(fs::path(out_dir) / "contacts.json");
    f << report.dump(2) << "\n";
    log_info("refine: balance " + std::to_string(pre) + " -> " +
             std::to_string(refined.final_distance));
  });
}

bgs_status bgs_eval(const char* config_json) {
  return guarded([&] {
    ConfigReader cfg(config_json, "eval");
    std::string model_path = cfg.str("model");
    std::string data_dir = cfg.str("data_dir");
    std::string out_dir = cfg.str("out_dir");
    std::string split = cfg.str("split", "test");
    double tau_c = cfg.real("tau_c", 0.7);
    double tau = cfg.real("tau", 0.5);
    bgs::RefineConfig rc = refine_config_from(cfg);
    cfg.done();
    if (split != "train" && split != "test")
      bgs::throw_config("eval: split must be 'train' or 'test'");
    cfg.write_resolved(out_dir);

    bgs::ModelWeights model = bgs::load_model(model_path);
    bgs::Manifest manifest =
        bgs::load_manifest((fs::path(data_dir) / "manifest.json").string());
    bgs::Dataset objects = bgs::load_dataset(data_dir, manifest, split == "train");
    objects = bgs::with_corrected_saliency(model, objects);
    std::vector<bgs::EvalRecord> records =
        bgs::evaluate(model, objects, rc, tau_c, tau);
    bgs::save_eval_report((fs::path(out_dir) / "report.jsonl").string(), records);

    double mean_bcacr = 0;
    int balanced = 0;
    for (const auto& r : records) {
      mean_bcacr += r.bcacr;
      if (r.balance_post >= 0 && r.balance_post < rc.w_r) ++balanced;
    }
    if (!records.empty()) mean_bcacr /= static_cast<double>(records.size());
    json summary;
    summary["objects"] = records.size();
    summary["mean_bcacr"] = mean_bcacr;
    summary["balanced_after_refine"] = balanced;
    std::ofstream f(fs::path(out_dir) / "summary.json");
    f << summary.dump(2) << "\n";
    log_info("eval: mean coverage rate " + std::to_string(mean_bcacr) + "% over " +
             std::to_string(records.size()) + " objects");
  });
}

bgs_status bgs_export_ply(const char* config_json) {
  return guarded([&] {
    ConfigReader cfg(config_json, "export-ply");
    std::string object_path = cfg.str("object");
    std::string out_path = cfg.str("out");
    bool binary = cfg.boolean("binary", true);
    cfg.done();

    bgs::PlyData ply = bgs::load_ply(object_path);
    if (!ply.saliency)
      bgs::throw_data("export-ply: object carries no saliency map");
    bgs::PlySaveOptions opts;
    opts.binary = binary;
    opts.with_colors = true;
    bgs::save_ply(out_path, ply, opts);
    log_info("export-ply: wrote " + out_path);
  });
}

bgs_status bgs_object_generate(const char* category, uint64_t seed,
                               int n_points, bgs_object** out) {
  return guarded([&] {
    if (!category || !out) bgs::throw_config("null argument");
    bgs::GeneratedObject gen =
        bgs::gen_object(bgs::category_from_name(category), seed, n_points);
    auto* o = new bgs_object();
    o->cloud = std::move(gen.cloud);
    o->saliency = std::move(gen.saliency);
    o->labels = std::move(gen.labels);
    o->gravity = gen.gravity;
    *out = o;
  });
}

bgs_status bgs_object_load_ply(const char* path, bgs_object** out) {
  return guarded([&] {
    if (!path || !out) bgs::throw_config("null argument");
    bgs::PlyData ply = bgs::load_ply(path);
    auto* o = new bgs_object();
    o->cloud = std::move(ply.cloud);
    o->saliency = std::move(ply.saliency);
    o->labels = std::move(ply.labels);
    o->gravity = bgs::gravity_line(o->cloud);
    *out = o;
  });
}

bgs_status bgs_object_save_ply(const bgs_object* object, const char* path,
                               int binary, int with_colors) {
  return guarded([&] {
    if (!object || !path) bgs::throw_config("null argument");
    bgs::PlySaveOptions opts;
    opts.binary = binary != 0;
    opts.with_colors = with_colors != 0;
    bgs::save_ply(path, object_to_ply(*object, true), opts);
  });
}

int bgs_object_size(const bgs_object* object) {
  return object ? object->cloud.size() : 0;
}

bgs_status bgs_object_points(const bgs_object* object, double* xyz) {
  return guarded([&] {
    if (!object || !xyz) bgs::throw_config("null argument");
    for (int i = 0; i < object->cloud.size(); ++i) {
      const bgs::Vec3& p = object->cloud.points[static_cast<size_t>(i)];
      xyz[3 * i + 0] = p.x;
      xyz[3 * i + 1] = p.y;
      xyz[3 * i + 2] = p.z;
    }
  });
}

bgs_status bgs_object_saliency(const bgs_object* object, double* values) {
  return guarded([&] {
    if (!object || !values) bgs::throw_config("null argument");
    if (!object->saliency) bgs::throw_data("object carries no saliency map");
    for (size_t i = 0; i < object->saliency->size(); ++i)
      values[i] = (*object->saliency)[i];
  });
}

bgs_status bgs_object_bimanual(const bgs_object* object, double* values) {
  return guarded([&] {
    if (!object || !values) bgs::throw_config("null argument");
    if (!object->bimanual)
      bgs::throw_data("object carries no bimanual map; run bgs_predict first");
    for (size_t i = 0; i < object->bimanual->size(); ++i)
      values[i] = (*object->bimanual)[i];
  });
}

bgs_status bgs_object_labels(const bgs_object* object, int* labels) {
  return guarded([&] {
    if (!object || !labels) bgs::throw_config("null argument");
    const bgs::ContactLabels* src = object->predicted ? &*object->predicted
                                    : object->labels  ? &*object->labels
                                                      : nullptr;
    if (!src) bgs::throw_data("object carries no labels");
    for (size_t i = 0; i < src->size(); ++i) labels[i] = (*src)[i];
  });
}

void bgs_object_free(bgs_object* object) { delete object; }

bgs_status bgs_model_init(uint64_t seed, bgs_model** out) {
  return guarded([&] {
    if (!out) bgs::throw_config("null argument");
    *out = new bgs_model{bgs::init_model(bgs::NetConfig{}, seed)};
  });
}

bgs_status bgs_model_load(const char* path, bgs_model** out) {
  return guarded([&] {
    if (!path || !out) bgs::throw_config("null argument");
    *out = new bgs_model{bgs::load_model(path)};
  });
}

bgs_status bgs_model_save(const bgs_model* model, const char* path) {
  return guarded([&] {
    if (!model || !path) bgs::throw_config("null argument");
    bgs::save_model(model->weights, path);
  });
}

void bgs_model_free(bgs_model* model) { delete model; }

bgs_status bgs_predict(const bgs_model* model, bgs_object* object) {
  return guarded([&] {
    if (!model || !object) bgs::throw_config("null argument");
    if (!object->saliency) bgs::throw_data("object carries no saliency map");
    bgs::SaliencyMap corrected = bgs::correction_apply(
        model->weights.correction, object->cloud, *object->saliency);
    bgs::Prediction pred = bgs::predict(model->weights, object->cloud, corrected);
    object->bimanual = std::move(pred.bimanual);
    object->predicted = std::move(pred.labels);
  });
}

bgs_status bgs_refine_object(const bgs_model* model, bgs_object* object,
                             double w_r, int max_iters, double* final_distance,
                             int* iterations, int* warned) {
  return guarded([&] {
    if (!model || !object) bgs::throw_config("null argument");
    if (!object->bimanual)
      bgs::throw_data("object carries no bimanual map; run bgs_predict first");
    const bgs::ContactLabels* labels = object->predicted ? &*object->predicted
                                       : object->labels  ? &*object->labels
                                                         : nullptr;
    if (!labels) bgs::throw_data("object carries no labels");
    bgs::RefineConfig rc;
    rc.w_r = w_r;
    rc.max_iters = max_iters;
    bgs::RefineResult result =
        bgs::physics_refine(model->weights, object->cloud, *object->bimanual,
                            *labels, rc, object->gravity);
    object->bimanual = result.refined;
    if (final_distance) *final_distance = result.final_distance;
    if (iterations) *iterations = result.iterations;
    if (warned) *warned = result.warned ? 1 : 0;
  });
}

bgs_status bgs_cluster_contacts(const bgs_object* object, uint64_t seed,
                                int* left, int* left_count, int* right,
                                int* right_count, int capacity) {
  return guarded([&] {
    if (!object || !left || !right || !left_count || !right_count)
      bgs::throw_config("null argument");
    if (!object->bimanual)
      bgs::throw_data("object carries no bimanual map; run bgs_predict first");
    const bgs::ContactLabels* labels = object->predicted ? &*object->predicted
                                       : object->labels  ? &*object->labels
                                                         : nullptr;
    if (!labels) bgs::throw_data("object carries no labels");
    bgs::ContactClusters clusters =
        bgs::cluster_contacts(object->cloud, *object->bimanual, *labels, seed);
    *left_count = static_cast<int>(clusters.left.size());
    *right_count = static_cast<int>(clusters.right.size());
    if (*left_count > capacity || *right_count > capacity)
      bgs::throw_data("cluster output exceeds buffer capacity");
    for (int i = 0; i < *left_count; ++i) left[i] = clusters.left[static_cast<size_t>(i)];
    for (int i = 0; i < *right_count; ++i) right[i] = clusters.right[static_cast<size_t>(i)];
  });
}

bgs_status bgs_bcacr(const bgs_object* object, double tau_c, double* out) {
  return guarded([&] {
    if (!object || !out) bgs::throw_config("null argument");
    if (!object->labels) bgs::throw_data("object carries no annotation labels");
    const bgs::SaliencyMap* map = object->bimanual ? &*object->bimanual
                                  : object->saliency ? &*object->saliency
                                                     : nullptr;
    if (!map) bgs::throw_data("object carries no saliency map");
    *out = bgs::bcacr(*map, *object->labels, tau_c);
  });
}

bgs_status bgs_balance_distance(const bgs_object* object, double* out) {
  return guarded([&] {
    if (!object || !out) bgs::throw_config("null argument");
    if (!object->bimanual)
      bgs::throw_data("object carries no bimanual map; run bgs_predict first");
    const bgs::ContactLabels* labels = object->predicted ? &*object->predicted
                                       : object->labels  ? &*object->labels
                                                         : nullptr;
    if (!labels) bgs::throw_data("object carries no labels");
    std::vector<int> right = bgs::label_indices(*labels, {1});
    std::vector<int> other = bgs::label_indices(*labels, {0, 2});
    *out = bgs::hard_balance_distance(object->cloud, *object->bimanual, other,
                                      right, object->gravity);
  });
}

}  // extern "C"
