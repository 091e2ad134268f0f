// Exercises only the public C surface of libbigrasp.
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "bgs/bgs.h"
#include "doctest.h"

namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string file_bytes(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(f)), {});
}

std::string tiny_net_json() {
  return R"("encoder_widths":[8,16],"decoder_widths":[12,6],"refine_widths":[10])";
}

}  // namespace

TEST_CASE("version and error state") {
  CHECK(std::string(bgs_version()) == "0.1.0");
  CHECK(std::string(bgs_last_error()).empty());
}

TEST_CASE("object handles: generate, getters, save/load round trip") {
  bgs_object* obj = nullptr;
  REQUIRE(bgs_object_generate("mug", 5, 400, &obj) == BGS_OK);
  REQUIRE(obj != nullptr);
  CHECK(bgs_object_size(obj) == 400);

  std::vector<double> xyz(3 * 400), sal(400);
  std::vector<int> labels(400);
  CHECK(bgs_object_points(obj, xyz.data()) == BGS_OK);
  CHECK(bgs_object_saliency(obj, sal.data()) == BGS_OK);
  CHECK(bgs_object_labels(obj, labels.data()) == BGS_OK);
  bool has_right = false, has_left = false;
  for (int l : labels) {
    CHECK(l >= 0);
    CHECK(l <= 2);
    if (l == 1) has_right = true;
    if (l == 2) has_left = true;
  }
  CHECK(has_right);
  CHECK(has_left);

  fs::path dir = temp_dir("bgs_capi_obj");
  std::string path = (dir / "mug.ply").string();
  CHECK(bgs_object_save_ply(obj, path.c_str(), 1, 0) == BGS_OK);

  bgs_object* back = nullptr;
  REQUIRE(bgs_object_load_ply(path.c_str(), &back) == BGS_OK);
  CHECK(bgs_object_size(back) == 400);
  std::vector<double> sal2(400);
  CHECK(bgs_object_saliency(back, sal2.data()) == BGS_OK);
  for (int i = 0; i < 400; ++i)
    CHECK(sal2[static_cast<size_t>(i)] ==
          static_cast<double>(static_cast<float>(sal[static_cast<size_t>(i)])));

  bgs_object_free(obj);
  bgs_object_free(back);
}

TEST_CASE("error categories: config vs data") {
  bgs_object* obj = nullptr;
  CHECK(bgs_object_generate("spaceship", 1, 100, &obj) == BGS_ERR_CONFIG);
  CHECK(std::string(bgs_last_error()).find("category") != std::string::npos);
  CHECK(bgs_object_load_ply("/nonexistent/file.ply", &obj) == BGS_ERR_DATA);
  CHECK(bgs_gen_data("{ not json") == BGS_ERR_CONFIG);
  CHECK(bgs_gen_data(R"({"out_dir":"/tmp/x","bogus_key":1})") == BGS_ERR_CONFIG);
}

TEST_CASE("model handles and prediction flow") {
  bgs_model* model = nullptr;
  REQUIRE(bgs_model_init(3, &model) == BGS_OK);
  fs::path dir = temp_dir("bgs_capi_model");
  std::string mpath = (dir / "m.bgsw").string();
  CHECK(bgs_model_save(model, mpath.c_str()) == BGS_OK);
  bgs_model* loaded = nullptr;
  REQUIRE(bgs_model_load(mpath.c_str(), &loaded) == BGS_OK);

  bgs_object* obj = nullptr;
  REQUIRE(bgs_object_generate("pot", 7, 250, &obj) == BGS_OK);

  // Bimanual getters require a prediction first.
  std::vector<double> b(250);
  CHECK(bgs_object_bimanual(obj, b.data()) == BGS_ERR_DATA);
  REQUIRE(bgs_predict(loaded, obj) == BGS_OK);
  CHECK(bgs_object_bimanual(obj, b.data()) == BGS_OK);
  for (double v : b) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }

  double dist = -1;
  CHECK(bgs_balance_distance(obj, &dist) == BGS_OK);
  CHECK(dist >= 0.0);

  double rate = -1;
  CHECK(bgs_bcacr(obj, 0.7, &rate) == BGS_OK);
  CHECK(rate >= 0.0);
  CHECK(rate <= 100.0);

  double final_distance = -1;
  int iters = -1, warned = -1;
  CHECK(bgs_refine_object(loaded, obj, 0.12, 60, &final_distance, &iters, &warned) ==
        BGS_OK);
  CHECK(final_distance >= 0.0);
  CHECK(iters >= 0);

  std::vector<int> left(250), right(250);
  int nl = 0, nr = 0;
  CHECK(bgs_cluster_contacts(obj, 1, left.data(), &nl, right.data(), &nr, 250) ==
        BGS_OK);
  CHECK(nl > 0);
  CHECK(nr > 0);
  int tiny_cap = 1;
  if (nl > tiny_cap || nr > tiny_cap) {
    CHECK(bgs_cluster_contacts(obj, 1, left.data(), &nl, right.data(), &nr,
                               tiny_cap) == BGS_ERR_DATA);
  }

  bgs_object_free(obj);
  bgs_model_free(model);
  bgs_model_free(loaded);
}

TEST_CASE("gen-data command: determinism and resolved-config echo") {
  fs::path a = temp_dir("bgs_capi_gen_a");
  fs::path b = temp_dir("bgs_capi_gen_b");
  auto config = [](const fs::path& dir) {
    return std::string(R"({"out_dir":")") + dir.string() +
           R"(","categories":["mug","tool"],"train_per_category":1,)"
           R"("test_per_category":1,"n_points":120,"n_candidates":8,"seed":9})";
  };
  REQUIRE(bgs_gen_data(config(a).c_str()) == BGS_OK);
  REQUIRE(bgs_gen_data(config(b).c_str()) == BGS_OK);
  CHECK(file_bytes(a / "manifest.json") == file_bytes(b / "manifest.json"));
  CHECK(file_bytes(a / "annotations.json") == file_bytes(b / "annotations.json"));
  CHECK(fs::exists(a / "resolved_config.json"));
  std::string resolved = file_bytes(a / "resolved_config.json");
  CHECK(resolved.find("\"n_points\": 120") != std::string::npos);
  CHECK(resolved.find("\"disturb_fraction\"") != std::string::npos);  // default echoed
}

TEST_CASE("train / infer / eval commands run end to end on a tiny setup") {
  fs::path data = temp_dir("bgs_capi_flow_data");
  fs::path out = temp_dir("bgs_capi_flow_train");
  std::string gen = std::string(R"({"out_dir":")") + data.string() +
                    R"(","categories":["mug"],"train_per_category":1,)"
                    R"("test_per_category":1,"n_points":90,"n_candidates":8,"seed":4})";
  REQUIRE(bgs_gen_data(gen.c_str()) == BGS_OK);

  std::string train = std::string(R"({"data_dir":")") + data.string() +
                      R"(","out_dir":")" + out.string() +
                      R"(","seed":1,"cm_epochs":12,"epochs":10,"K":4,"M":3,)" +
                      R"("m_max":2,)" + tiny_net_json() + "}";
  REQUIRE_MESSAGE(bgs_train(train.c_str()) == BGS_OK, bgs_last_error());
  CHECK(fs::exists(out / "model.bgsw"));
  CHECK(fs::exists(out / "cm_trace.jsonl"));
  CHECK(fs::exists(out / "joint_trace.jsonl"));

  fs::path infer_out = temp_dir("bgs_capi_flow_infer");
  std::string object_ply = (data / "objects").string();
  for (const auto& e : fs::directory_iterator(data / "objects")) {
    object_ply = e.path().string();
    break;
  }
  std::string infer = std::string(R"({"model":")") + (out / "model.bgsw").string() +
                      R"(","object":")" + object_ply + R"(","out_dir":")" +
                      infer_out.string() + R"("})";
  REQUIRE_MESSAGE(bgs_infer(infer.c_str()) == BGS_OK, bgs_last_error());
  CHECK(fs::exists(infer_out / "prediction.ply"));
  CHECK(fs::exists(infer_out / "prediction.json"));

  fs::path eval_out = temp_dir("bgs_capi_flow_eval");
  std::string eval = std::string(R"({"model":")") + (out / "model.bgsw").string() +
                     R"(","data_dir":")" + data.string() + R"(","out_dir":")" +
                     eval_out.string() + R"(","split":"test","max_iters":30})";
  REQUIRE_MESSAGE(bgs_eval(eval.c_str()) == BGS_OK, bgs_last_error());
  CHECK(fs::exists(eval_out / "report.jsonl"));
  CHECK(fs::exists(eval_out / "summary.json"));

  fs::path export_out = temp_dir("bgs_capi_flow_export");
  std::string exp = std::string(R"({"object":")") + object_ply +
                    R"(","out":")" + (export_out / "colored.ply").string() +
                    R"(","binary":false})";
  REQUIRE_MESSAGE(bgs_export_ply(exp.c_str()) == BGS_OK, bgs_last_error());
  std::string text = file_bytes(export_out / "colored.ply");
  CHECK(text.find("property uchar red") != std::string::npos);
}
