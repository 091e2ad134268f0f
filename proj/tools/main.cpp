// bigrasp command line: drives the shared-library C API. Flags override keys
// from an optional --config JSON file; every run echoes its resolved
// configuration into the output directory. Set BGS_LOG_LEVEL=0 to silence
// progress lines.

#include <cstdio>
#include <fstream>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bgs/bgs.h"
#include "json.hpp"

using nlohmann::json;

namespace {

class CommandConfig {
 public:
  explicit CommandConfig(CLI::App* app) : app_(app) {
    app_->add_option("--config", config_path_,
                     "JSON config file; explicitly passed flags override it");
  }

  template <typename T>
  void add(const std::string& flag, const std::string& key, T default_value,
           const std::string& desc) {
    auto value = std::make_shared<T>(default_value);
    CLI::Option* opt = app_->add_option(flag, *value, desc)->capture_default_str();
    appliers_.push_back([opt, value, key](json& j) {
      if (opt->count() > 0) j[key] = *value;
    });
  }

  void add_flag(const std::string& flag, const std::string& key,
                bool default_value, const std::string& desc) {
    auto value = std::make_shared<bool>(default_value);
    CLI::Option* opt = app_->add_flag(flag, *value, desc)->capture_default_str();
    appliers_.push_back([opt, value, key](json& j) {
      if (opt->count() > 0) j[key] = *value;
    });
  }

  // Returns the merged config or exits with the config error code.
  std::string build() const {
    json j = json::object();
    if (!config_path_.empty()) {
      std::ifstream f(config_path_);
      if (!f) {
        std::fprintf(stderr, "error: cannot open config file: %s\n",
                     config_path_.c_str());
        std::exit(BGS_ERR_CONFIG);
      }
      j = json::parse(f, nullptr, false);
      if (j.is_discarded() || !j.is_object()) {
        std::fprintf(stderr, "error: config file is not a JSON object: %s\n",
                     config_path_.c_str());
        std::exit(BGS_ERR_CONFIG);
      }
    }
    for (const auto& apply : appliers_) apply(j);
    return j.dump();
  }

 private:
  CLI::App* app_;
  std::string config_path_;
  std::vector<std::function<void(json&)>> appliers_;
};

int run(bgs_status (*command)(const char*), const CommandConfig& cfg) {
  bgs_status status = command(cfg.build().c_str());
  if (status != BGS_OK) std::fprintf(stderr, "error: %s\n", bgs_last_error());
  return status;
}

void add_refine_options(CommandConfig& c) {
  c.add<double>("--w-r", "w_r", 0.12, "balance stop threshold (normalized units)");
  c.add<int>("--max-iters", "max_iters", 500, "refinement iteration cap");
  c.add<double>("--refine-lr", "refine_lr", 0.05, "refinement gradient step");
  c.add<double>("--temp", "temp", 0.1, "soft-selection temperature");
  c.add<double>("--mu", "mu", 0.1, "proximity penalty weight");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bimanual grasp saliency toolkit (lib version " +
               std::string(bgs_version()) + ")"};
  app.require_subcommand(1);

  int exit_code = 0;
  std::vector<std::function<void()>> runners;

  auto* gen = app.add_subcommand("gen-data", "generate a synthetic dataset");
  auto gen_cfg = std::make_shared<CommandConfig>(gen);
  gen_cfg->add<std::string>("--out", "out_dir", "", "output dataset directory");
  gen_cfg->add<std::vector<std::string>>(
      "--categories", "categories", {"mug", "pot", "pan", "tool"},
      "object categories (mug pot pan kettle vase kitchen-pot tool cad)");
  gen_cfg->add<int>("--train-per-category", "train_per_category", 2,
                    "training objects per category");
  gen_cfg->add<int>("--test-per-category", "test_per_category", 1,
                    "test objects per category");
  gen_cfg->add<int>("--n-points", "n_points", 5000, "surface samples per object");
  gen_cfg->add<int>("--n-candidates", "n_candidates", 1000,
                    "candidate vectors per labeled point");
  gen_cfg->add<uint64_t>("--seed", "seed", 1, "dataset seed");
  gen_cfg->add<double>("--disturb-fraction", "disturb_fraction", 0.0,
                       "fraction of labels scrambled on the train split");
  gen->callback([&, gen_cfg] { exit_code = run(bgs_gen_data, *gen_cfg); });

  auto* train = app.add_subcommand("train", "train correction + saliency/contact nets");
  auto train_cfg = std::make_shared<CommandConfig>(train);
  train_cfg->add<std::string>("--data", "data_dir", "", "dataset directory");
  train_cfg->add<std::string>("--out", "out_dir", "", "output directory");
  train_cfg->add<uint64_t>("--seed", "seed", 0, "training seed");
  train_cfg->add<std::string>("--optimizer", "optimizer", "adam", "adam or sgd");
  train_cfg->add<int>("--cm-epochs", "cm_epochs", 2000, "correction-module epochs");
  train_cfg->add<double>("--cm-lr", "cm_lr", 1e-3, "correction-module learning rate");
  train_cfg->add<int>("--epochs", "epochs", 3000, "joint training epochs");
  train_cfg->add<double>("--lr", "lr", 1e-3, "joint learning rate");
  train_cfg->add<int>("--first-update-epoch", "K", 2000,
                      "first saliency-update epoch (K)");
  train_cfg->add<int>("--update-period", "M", 200, "saliency-update period (M)");
  train_cfg->add<int>("--max-updates", "m_max", 10, "saliency update cap");
  train_cfg->add<double>("--sigma-s", "sigma_s", 0.8,
                         "labeled-saliency stop threshold");
  train_cfg->add<double>("--sigma-p", "sigma_p", 0.12,
                         "balance-distance stop threshold");
  train_cfg->add<double>("--lambda1", "lambda1", 1.0, "pair-consistency weight");
  train_cfg->add<double>("--lambda2", "lambda2", 1.5, "anchor-consistency weight");
  train_cfg->add<double>("--w1", "w1", 1.0, "correspondence weight");
  train_cfg->add<double>("--w2", "w2", 1.0, "adjustment weight");
  train_cfg->add<double>("--w3", "w3", 2.0, "balance weight");
  train_cfg->add<double>("--w4", "w4", 1.5, "classification weight");
  train_cfg->add<double>("--temp", "temp", 0.1, "soft-selection temperature");
  train_cfg->add<double>("--temp-anneal", "temp_anneal", 0.5,
                         "temperature anneal factor");
  train_cfg->add<int>("--temp-anneal-every", "temp_anneal_every", 500,
                      "epochs between temperature anneals");
  train_cfg->add<double>("--temp-floor", "temp_floor", 1e-3, "temperature floor");
  train_cfg->add<double>("--stop-loss-fraction", "stop_loss_fraction", 0.0,
                         "early exit at this fraction of the initial loss");
  train_cfg->add<int>("--checkpoint-every", "checkpoint_every", 0,
                      "checkpoint period in epochs (0 disables)");
  train_cfg->add<std::vector<int>>("--encoder-widths", "encoder_widths",
                                   {64, 128, 256, 512, 1024}, "encoder layer widths");
  train_cfg->add<std::vector<int>>("--decoder-widths", "decoder_widths",
                                   {512, 256, 128}, "decoder hidden widths");
  train_cfg->add<std::vector<int>>("--refine-widths", "refine_widths", {64, 64},
                                   "refinement stack hidden widths");
  train_cfg->add<std::string>("--activation", "activation", "relu",
                              "hidden activation (relu, tanh, sigmoid)");
  train->callback([&, train_cfg] { exit_code = run(bgs_train, *train_cfg); });

  auto* infer = app.add_subcommand("infer", "predict a bimanual map and contacts");
  auto infer_cfg = std::make_shared<CommandConfig>(infer);
  infer_cfg->add<std::string>("--model", "model", "", "model file (.bgsw)");
  infer_cfg->add<std::string>("--object", "object", "", "object PLY with saliency");
  infer_cfg->add<std::string>("--out", "out_dir", "", "output directory");
  infer_cfg->add<double>("--tau", "tau", 0.5, "saliency mask threshold");
  infer->callback([&, infer_cfg] { exit_code = run(bgs_infer, *infer_cfg); });

  auto* refine = app.add_subcommand("refine",
                                    "physics-aware refinement + clustered contacts");
  auto refine_cfg = std::make_shared<CommandConfig>(refine);
  refine_cfg->add<std::string>("--model", "model", "", "model file (.bgsw)");
  refine_cfg->add<std::string>("--object", "object", "", "object PLY with saliency");
  refine_cfg->add<std::string>("--out", "out_dir", "", "output directory");
  refine_cfg->add<uint64_t>("--seed", "seed", 0, "clustering seed");
  refine_cfg->add<double>("--tau", "tau", 0.5, "saliency mask threshold");
  add_refine_options(*refine_cfg);
  refine->callback([&, refine_cfg] { exit_code = run(bgs_refine, *refine_cfg); });

  auto* eval = app.add_subcommand("eval", "metric report over a dataset split");
  auto eval_cfg = std::make_shared<CommandConfig>(eval);
  eval_cfg->add<std::string>("--model", "model", "", "model file (.bgsw)");
  eval_cfg->add<std::string>("--data", "data_dir", "", "dataset directory");
  eval_cfg->add<std::string>("--out", "out_dir", "", "output directory");
  eval_cfg->add<std::string>("--split", "split", "test", "train or test");
  eval_cfg->add<double>("--tau-c", "tau_c", 0.7, "coverage-rate threshold");
  eval_cfg->add<double>("--tau", "tau", 0.5, "contact mask threshold");
  add_refine_options(*eval_cfg);
  eval->callback([&, eval_cfg] { exit_code = run(bgs_eval, *eval_cfg); });

  auto* exp = app.add_subcommand("export-ply", "write a saliency-colored PLY");
  auto exp_cfg = std::make_shared<CommandConfig>(exp);
  exp_cfg->add<std::string>("--object", "object", "", "input PLY with saliency");
  exp_cfg->add<std::string>("--out", "out", "", "output PLY path");
  exp_cfg->add<bool>("--binary", "binary", true,
                     "binary output (pass false for ascii)");
  exp->callback([&, exp_cfg] { exit_code = run(bgs_export_ply, *exp_cfg); });

  CLI11_PARSE(app, argc, argv);
  return exit_code;
}
