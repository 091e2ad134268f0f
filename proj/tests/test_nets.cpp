#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "error.hpp"
#include "nets.hpp"
#include "rng.hpp"

using namespace bgs;

namespace {

NetConfig tiny_config(Act act = Act::Relu) {
  NetConfig c;
  c.encoder_widths = {8, 16};
  c.decoder_widths = {12, 6};
  c.refine_widths = {10};
  c.hidden_act = act;
  return c;
}

PointCloud random_cloud(int n, uint64_t seed) {
  Rng rng(seed);
  PointCloud c;
  for (int i = 0; i < n; ++i)
    c.points.push_back({rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5),
                        rng.uniform(-0.5, 0.5)});
  return c;
}

SaliencyMap random_map(int n, uint64_t seed) {
  Rng rng(seed);
  SaliencyMap m(static_cast<size_t>(n));
  for (double& v : m) v = rng.uniform();
  return m;
}

void zero_mlp(Mlp& mlp) {
  for (Dense& d : mlp.layers) {
    std::fill(d.w.data.begin(), d.w.data.end(), 0.0);
    std::fill(d.b.data.begin(), d.b.data.end(), 0.0);
  }
}

}  // namespace

TEST_CASE("default architecture pins the reference dimensions") {
  ModelWeights m = init_model(NetConfig{}, 5);
  CHECK(m.saliency.enc_adj.first_width() == 64);
  CHECK(m.saliency.enc_adj.global_width() == 1024);
  CHECK(m.saliency.enc_adj.input_channels() == 4);
  CHECK(m.saliency.dec_adj.input_width() == 1088);
  CHECK(m.saliency.dec_adj.output_width() == 1);
  CHECK(m.saliency.dec_vec.output_width() == 3);
  CHECK(m.contact.dec.output_width() == 3);
  CHECK(m.contact.enc.input_channels() == 4);
  CHECK(m.saliency.dec_adj.mlp.layers.size() == 4);  // 1088-512-256-128-1
  CHECK(m.refine.mlp.layers.front().w.rows == 7);
}

TEST_CASE("encode: permutation leaves the global feature unchanged") {
  ModelWeights m = init_model(tiny_config(), 17);
  PointCloud cloud = random_cloud(30, 2);
  SaliencyMap s = random_map(30, 3);

  ad::Graph g;
  ad::Bindings binds;
  binds.trainable = false;
  ad::Var input = g.constant(cloud_with_channel(cloud, s));
  EncodeResult r = encode(g, binds, m.saliency.enc_adj.mlp.layers.empty()
                                         ? m.saliency.enc_adj
                                         : m.saliency.enc_adj,
                          input);
  ad::Tensor global = g.value(r.global);

  // Permute the points (and channel) and re-encode.
  std::vector<int> perm(30);
  for (int i = 0; i < 30; ++i) perm[static_cast<size_t>(i)] = i;
  Rng rng(4);
  rng.shuffle(perm);
  PointCloud pc;
  SaliencyMap ps(30);
  for (int i = 0; i < 30; ++i) {
    pc.points.push_back(cloud.points[static_cast<size_t>(perm[static_cast<size_t>(i)])]);
    ps[static_cast<size_t>(i)] = s[static_cast<size_t>(perm[static_cast<size_t>(i)])];
  }
  ad::Graph g2;
  ad::Bindings binds2;
  binds2.trainable = false;
  EncodeResult r2 = encode(g2, binds2, m.saliency.enc_adj,
                           g2.constant(cloud_with_channel(pc, ps)));
  ad::Tensor global2 = g2.value(r2.global);
  for (int j = 0; j < global.cols; ++j)
    CHECK(global.at(0, j) == doctest::Approx(global2.at(0, j)).epsilon(1e-12));
}

TEST_CASE("encode: single point global equals its feature; duplication is a no-op") {
  ModelWeights m = init_model(tiny_config(), 23);
  PointCloud one;
  one.points = {{0.1, 0.2, 0.3}};
  SaliencyMap s1{0.5};

  ad::Graph g;
  ad::Bindings binds;
  binds.trainable = false;
  EncodeResult r = encode(g, binds, m.correction.enc,
                          g.constant(cloud_with_channel(one, s1)));
  // With one point, per-point features and the pooled global coincide.
  ad::Tensor combined = g.value(r.combined);
  ad::Tensor global = g.value(r.global);
  int fw = m.correction.enc.first_width();
  for (int j = 0; j < global.cols; ++j)
    CHECK(combined.at(0, fw + j) == global.at(0, j));

  // Duplicating every point leaves the global feature unchanged (max of
  // duplicated rows oracle).
  PointCloud cloud = random_cloud(12, 31);
  SaliencyMap s = random_map(12, 32);
  PointCloud doubled = cloud;
  SaliencyMap sd = s;
  for (int i = 0; i < 12; ++i) {
    doubled.points.push_back(cloud.points[static_cast<size_t>(i)]);
    sd.push_back(s[static_cast<size_t>(i)]);
  }
  ad::Graph ga, gb;
  ad::Bindings ba, bb;
  ba.trainable = bb.trainable = false;
  ad::Tensor global_a =
      ga.value(encode(ga, ba, m.correction.enc, ga.constant(cloud_with_channel(cloud, s))).global);
  ad::Tensor global_b =
      gb.value(encode(gb, bb, m.correction.enc, gb.constant(cloud_with_channel(doubled, sd))).global);
  for (int j = 0; j < global_a.cols; ++j)
    CHECK(global_a.at(0, j) == doctest::Approx(global_b.at(0, j)).epsilon(1e-12));
}

TEST_CASE("decode: rowwise purity and zero-weight bias rows") {
  ModelWeights m = init_model(tiny_config(), 41);
  int width = m.correction.dec.input_width();

  ad::Tensor rows(5, width);
  Rng rng(42);
  for (int j = 0; j < width; ++j) {
    double v = rng.uniform(-1, 1);
    for (int i = 0; i < 5; ++i) rows.at(i, j) = v;  // identical rows
  }
  ad::Graph g;
  ad::Bindings binds;
  binds.trainable = false;
  ad::Var out = decode(g, binds, m.correction.dec, g.constant(rows));
  for (int i = 1; i < 5; ++i)
    CHECK(g.value(out).at(i, 0) == g.value(out).at(0, 0));

  CorrectionNet zeroed = m.correction;
  zero_mlp(zeroed.dec.mlp);
  for (Dense& d : zeroed.dec.mlp.layers)
    std::fill(d.b.data.begin(), d.b.data.end(), 0.25);
  ad::Graph g2;
  ad::Bindings binds2;
  binds2.trainable = false;
  ad::Var out2 = decode(g2, binds2, zeroed.dec, g2.constant(rows));
  // All-zero weights leave only the bias path; rows must be identical.
  for (int i = 0; i < 5; ++i)
    CHECK(g2.value(out2).at(i, 0) == g2.value(out2).at(0, 0));
}

TEST_CASE("correction forward: zero net is clamp(s), outputs stay in [0,1]") {
  ModelWeights m = init_model(tiny_config(), 51);
  zero_mlp(m.correction.dec.mlp);
  PointCloud cloud = random_cloud(25, 52);
  SaliencyMap s = random_map(25, 53);
  SaliencyMap corrected = correction_apply(m.correction, cloud, s);
  for (int i = 0; i < 25; ++i)
    CHECK(corrected[static_cast<size_t>(i)] == doctest::Approx(s[static_cast<size_t>(i)]).epsilon(1e-15));

  ModelWeights m2 = init_model(tiny_config(), 54);
  SaliencyMap c2 = correction_apply(m2.correction, cloud, s);
  for (double v : c2) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("saliency forward: zero adjustment head gives b = s, clamp holds") {
  ModelWeights m = init_model(tiny_config(), 61);
  zero_mlp(m.saliency.dec_adj.mlp);
  PointCloud cloud = random_cloud(20, 62);
  SaliencyMap s = random_map(20, 63);
  SaliencyMap b = saliency_apply(m.saliency, cloud, s);
  for (int i = 0; i < 20; ++i)
    CHECK(b[static_cast<size_t>(i)] == doctest::Approx(s[static_cast<size_t>(i)]).epsilon(1e-15));

  ModelWeights m2 = init_model(tiny_config(), 64);
  SaliencyMap b2 = saliency_apply(m2.saliency, cloud, s);
  for (double v : b2) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("saliency forward: permuting points permutes outputs identically") {
  ModelWeights m = init_model(tiny_config(), 71);
  PointCloud cloud = random_cloud(18, 72);
  SaliencyMap s = random_map(18, 73);

  ad::Graph g;
  ad::Bindings binds;
  binds.trainable = false;
  SaliencyForward f = saliency_forward(g, binds, m.saliency, cloud, s, true);
  ad::Tensor v = g.value(f.vectors);
  ad::Tensor delta = g.value(f.delta);

  std::vector<int> perm(18);
  for (int i = 0; i < 18; ++i) perm[static_cast<size_t>(i)] = i;
  Rng rng(74);
  rng.shuffle(perm);
  PointCloud pc;
  SaliencyMap ps(18);
  for (int i = 0; i < 18; ++i) {
    pc.points.push_back(cloud.points[static_cast<size_t>(perm[static_cast<size_t>(i)])]);
    ps[static_cast<size_t>(i)] = s[static_cast<size_t>(perm[static_cast<size_t>(i)])];
  }
  ad::Graph g2;
  ad::Bindings binds2;
  binds2.trainable = false;
  SaliencyForward f2 = saliency_forward(g2, binds2, m.saliency, pc, ps, true);
  ad::Tensor v2 = g2.value(f2.vectors);
  ad::Tensor d2 = g2.value(f2.delta);
  for (int i = 0; i < 18; ++i) {
    int src = perm[static_cast<size_t>(i)];
    CHECK(d2.at(i, 0) == doctest::Approx(delta.at(src, 0)).epsilon(1e-11));
    for (int j = 0; j < 3; ++j)
      CHECK(v2.at(i, j) == doctest::Approx(v.at(src, j)).epsilon(1e-11));
  }
}

TEST_CASE("contact forward: softmax rows sum to one") {
  ModelWeights m = init_model(tiny_config(), 81);
  PointCloud cloud = random_cloud(15, 82);
  SaliencyMap b = random_map(15, 83);
  ad::Tensor logits = contact_logits_apply(m.contact, cloud, b);
  CHECK(logits.rows == 15);
  CHECK(logits.cols == 3);
  ad::Tensor probs = ad::softmax_rows(logits);
  for (int i = 0; i < 15; ++i) {
    double sum = probs.at(i, 0) + probs.at(i, 1) + probs.at(i, 2);
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }
  // Zero logits decode to uniform thirds.
  ad::Tensor uniform = ad::softmax_rows(ad::Tensor::zeros(4, 3));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(uniform.at(i, j) == doctest::Approx(1.0 / 3).epsilon(1e-15));
}

TEST_CASE("refine forward: zero stack leaves the map unchanged") {
  ModelWeights m = init_model(tiny_config(), 91);
  zero_mlp(m.refine.mlp);
  PointCloud cloud = random_cloud(10, 92);
  SaliencyMap b = random_map(10, 93);
  ContactLabels labels(10, 0);
  labels[0] = 1;
  labels[5] = 2;
  ad::Graph g;
  ad::Bindings binds;
  binds.trainable = false;
  RefineForward f = refine_forward(g, binds, m.refine, cloud, b, labels);
  for (int i = 0; i < 10; ++i)
    CHECK(g.value(f.refined).at(i, 0) == doctest::Approx(b[static_cast<size_t>(i)]).epsilon(1e-15));
}

TEST_CASE("serialization: float-exact round trip, byte-stable resave") {
  namespace fs = std::filesystem;
  NetConfig cfg = tiny_config(Act::Tanh);
  ModelWeights m = init_model(cfg, 101);
  fs::path dir = fs::temp_directory_path() / "bgs_nets_test";
  fs::create_directories(dir);
  std::string p1 = (dir / "model_a.bgsw").string();
  std::string p2 = (dir / "model_b.bgsw").string();

  save_model(m, p1);
  ModelWeights loaded = load_model(p1);
  CHECK(loaded.config.hidden_act == Act::Tanh);
  CHECK(loaded.config.encoder_widths == cfg.encoder_widths);

  auto orig = named_tensors(m);
  auto back = named_tensors(loaded);
  REQUIRE(orig.size() == back.size());
  for (size_t i = 0; i < orig.size(); ++i) {
    CHECK(orig[i].first == back[i].first);
    REQUIRE(orig[i].second->size() == back[i].second->size());
    for (int j = 0; j < orig[i].second->size(); ++j) {
      float expect = static_cast<float>(orig[i].second->data[static_cast<size_t>(j)]);
      CHECK(back[i].second->data[static_cast<size_t>(j)] == static_cast<double>(expect));
    }
  }

  save_model(loaded, p2);
  std::ifstream f1(p1, std::ios::binary), f2(p2, std::ios::binary);
  std::string bytes1((std::istreambuf_iterator<char>(f1)), {});
  std::string bytes2((std::istreambuf_iterator<char>(f2)), {});
  CHECK(bytes1 == bytes2);

  std::remove(p1.c_str());
  std::remove(p2.c_str());
}

TEST_CASE("serialization: corrupt files are rejected") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "bgs_nets_test";
  fs::create_directories(dir);
  std::string path = (dir / "bogus.bgsw").string();
  {
    std::ofstream f(path, std::ios::binary);
    f << "NOPE";
  }
  CHECK_THROWS_AS(load_model(path), Error);
  CHECK_THROWS_AS(load_model((dir / "missing.bgsw").string()), Error);
  std::remove(path.c_str());
}

TEST_CASE("tape and plain forward paths agree bitwise") {
  ModelWeights m = init_model(tiny_config(), 111);
  PointCloud cloud = random_cloud(22, 112);
  SaliencyMap s = random_map(22, 113);

  SaliencyMap plain = saliency_apply(m.saliency, cloud, s);
  ad::Graph g;
  ad::Bindings binds;
  SaliencyForward f = saliency_forward(g, binds, m.saliency, cloud, s, false);
  for (int i = 0; i < 22; ++i)
    CHECK(plain[static_cast<size_t>(i)] == g.value(f.bimanual).at(i, 0));
}
