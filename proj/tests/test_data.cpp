#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "data.hpp"
#include "doctest.h"
#include "error.hpp"
#include "ply.hpp"
#include "rng.hpp"

using namespace bgs;
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

}  // namespace

TEST_CASE("gen_object: 5000 points, both classes, deterministic") {
  GeneratedObject a = gen_object(Category::Mug, 7);
  CHECK(a.cloud.size() == 5000);
  CHECK(!label_indices(a.labels, {1}).empty());
  CHECK(!label_indices(a.labels, {2}).empty());
  CHECK(bounding_box_diagonal(a.cloud) == doctest::Approx(1.0).epsilon(1e-12));
  for (double v : a.saliency) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }

  GeneratedObject b = gen_object(Category::Mug, 7);
  REQUIRE(b.cloud.size() == a.cloud.size());
  for (int i = 0; i < a.cloud.size(); ++i) {
    CHECK(a.cloud.points[static_cast<size_t>(i)].x == b.cloud.points[static_cast<size_t>(i)].x);
    CHECK(a.saliency[static_cast<size_t>(i)] == b.saliency[static_cast<size_t>(i)]);
    CHECK(a.labels[static_cast<size_t>(i)] == b.labels[static_cast<size_t>(i)]);
  }
}

TEST_CASE("gen_object: saliency peaks inside the right-hand region") {
  for (Category c : all_categories()) {
    GeneratedObject obj = gen_object(c, 3, 1200);
    int arg = 0;
    for (int i = 1; i < obj.cloud.size(); ++i)
      if (obj.saliency[static_cast<size_t>(i)] > obj.saliency[static_cast<size_t>(arg)]) arg = i;
    INFO("category ", category_name(c));
    CHECK(obj.labels[static_cast<size_t>(arg)] == 1);
  }
}

TEST_CASE("build_vector_gt: minimal pair, full use, endpoint membership") {
  PointCloud c;
  c.points = {{0, 0, 0}, {1, 2, 3}, {5, 5, 5}};
  ContactLabels l{1, 2, 0};
  VectorGT gt = build_vector_gt(c, l, 1000, 9);
  REQUIRE(gt.candidates[0].size() == 1);
  REQUIRE(gt.candidates[1].size() == 1);
  CHECK(gt.candidates[0][0].x == 1.0);
  CHECK(gt.candidates[0][0].y == 2.0);
  CHECK(gt.candidates[0][0].z == 3.0);
  CHECK(gt.candidates[1][0].x == -1.0);
  CHECK(gt.candidates[2].empty());

  GeneratedObject obj = gen_object(Category::Pot, 5, 600);
  VectorGT big = build_vector_gt(obj.cloud, obj.labels, 1000, 10);
  auto rights = label_indices(obj.labels, {1});
  auto lefts = label_indices(obj.labels, {2});
  // n_cand >= opposite size: every opposite point used exactly once.
  REQUIRE(big.candidates[static_cast<size_t>(rights[0])].size() == lefts.size());

  // Every candidate endpoint lands exactly on an opposite-label point.
  for (int i : rights) {
    for (const Vec3& v : big.candidates[static_cast<size_t>(i)]) {
      Vec3 target = obj.cloud.points[static_cast<size_t>(i)] + v;
      bool found = false;
      for (int j : lefts) {
        if ((obj.cloud.points[static_cast<size_t>(j)] - target).norm() <= 1e-9) {
          found = true;
          break;
        }
      }
      CHECK(found);
    }
  }

  ContactLabels missing(3, 0);
  missing[0] = 1;
  CHECK_THROWS_AS(build_vector_gt(c, missing, 10, 1), Error);
}

TEST_CASE("disturb_labels: exact per-class fractions, classes preserved") {
  GeneratedObject obj = gen_object(Category::Pan, 11, 900);
  int rights = static_cast<int>(label_indices(obj.labels, {1}).size());
  int lefts = static_cast<int>(label_indices(obj.labels, {2}).size());
  ContactLabels noisy = disturb_labels(obj.labels, 0.75, 13);
  CHECK(static_cast<int>(label_indices(noisy, {1}).size()) == rights);
  CHECK(static_cast<int>(label_indices(noisy, {2}).size()) == lefts);

  // 3:1 disturbed:accurate ratio moves floor(0.75*n) labels per class.
  int moved = 0;
  for (size_t i = 0; i < noisy.size(); ++i)
    if (obj.labels[i] == 1 && noisy[i] != 1) ++moved;
  CHECK(moved == static_cast<int>(std::floor(0.75 * rights)));

  CHECK_THROWS_AS(disturb_labels(obj.labels, 1.5, 1), Error);
}

TEST_CASE("annotations: round trip, validation") {
  fs::path dir = temp_dir("bgs_data_ann");
  std::vector<AnnotationRecord> records;
  save_annotations((dir / "empty.json").string(), records);
  CHECK(load_annotations((dir / "empty.json").string()).empty());

  GeneratedObject obj = gen_object(Category::Kettle, 1, 5000);
  AnnotationRecord r;
  r.object_id = obj.id;
  r.num_points = obj.cloud.size();
  r.labels = obj.labels;
  r.saliency = obj.saliency;
  r.annotator = "u1";
  records.push_back(r);
  save_annotations((dir / "one.json").string(), records);
  auto loaded = load_annotations((dir / "one.json").string());
  REQUIRE(loaded.size() == 1);
  CHECK(loaded[0].object_id == obj.id);
  CHECK(loaded[0].labels == obj.labels);
  REQUIRE(loaded[0].saliency.has_value());
  for (size_t i = 0; i < obj.saliency.size(); ++i)
    CHECK((*loaded[0].saliency)[i] == obj.saliency[i]);

  // Label value 3 is rejected.
  {
    std::ofstream f(dir / "bad.json");
    f << R"({"version":1,"records":[{"object_id":"x","num_points":2,)"
      << R"("labels":[0,3],"annotator":"u"}]})";
  }
  CHECK_THROWS_AS(load_annotations((dir / "bad.json").string()), Error);

  // Unknown keys are rejected.
  {
    std::ofstream f(dir / "unknown.json");
    f << R"({"version":1,"records":[{"object_id":"x","num_points":1,)"
      << R"("labels":[0],"annotator":"u","extra":1}]})";
  }
  CHECK_THROWS_AS(load_annotations((dir / "unknown.json").string()), Error);

  // A record with labels from one class only is rejected.
  {
    std::ofstream f(dir / "oneclass.json");
    f << R"({"version":1,"records":[{"object_id":"x","num_points":2,)"
      << R"("labels":[1,0],"annotator":"u"}]})";
  }
  CHECK_THROWS_AS(load_annotations((dir / "oneclass.json").string()), Error);
}

TEST_CASE("ply: ascii and binary round trips are value-exact") {
  GeneratedObject obj = gen_object(Category::Vase, 21, 700);
  PlyData data;
  data.cloud = obj.cloud;
  data.saliency = obj.saliency;
  data.labels = obj.labels;
  fs::path dir = temp_dir("bgs_data_ply");

  for (bool binary : {false, true}) {
    PlySaveOptions opts;
    opts.binary = binary;
    fs::path p = dir / (binary ? "b.ply" : "a.ply");
    save_ply(p.string(), data, opts);
    PlyData back = load_ply(p.string());
    REQUIRE(back.cloud.size() == data.cloud.size());
    REQUIRE(back.saliency.has_value());
    REQUIRE(back.labels.has_value());
    for (int i = 0; i < data.cloud.size(); ++i) {
      size_t s = static_cast<size_t>(i);
      CHECK(back.cloud.points[s].x == static_cast<double>(static_cast<float>(data.cloud.points[s].x)));
      CHECK(back.cloud.points[s].y == static_cast<double>(static_cast<float>(data.cloud.points[s].y)));
      CHECK(back.cloud.points[s].z == static_cast<double>(static_cast<float>(data.cloud.points[s].z)));
      CHECK((*back.saliency)[s] == static_cast<double>(static_cast<float>((*data.saliency)[s])));
      CHECK((*back.labels)[s] == (*data.labels)[s]);
    }
  }
}

TEST_CASE("ply: hand-written 3-vertex fixture parses to documented values") {
  fs::path dir = temp_dir("bgs_data_fixture");
  fs::path p = dir / "fixture.ply";
  {
    std::ofstream f(p);
    f << "ply\n"
      << "format ascii 1.0\n"
      << "comment generated by hand\n"
      << "element vertex 3\n"
      << "property float x\n"
      << "property float y\n"
      << "property float z\n"
      << "property float saliency\n"
      << "property uchar label\n"
      << "end_header\n"
      << "0 0 0 0.25 0\n"
      << "1.5 -2 0.125 0.5 1\n"
      << "-0.5 3.25 1 1 2\n";
  }
  PlyData d = load_ply(p.string());
  REQUIRE(d.cloud.size() == 3);
  CHECK(d.cloud.points[1].x == 1.5);
  CHECK(d.cloud.points[1].y == -2.0);
  CHECK(d.cloud.points[1].z == 0.125);
  CHECK(d.cloud.points[2].y == 3.25);
  REQUIRE(d.saliency.has_value());
  CHECK((*d.saliency)[0] == 0.25);
  CHECK((*d.saliency)[1] == 0.5);
  CHECK((*d.saliency)[2] == 1.0);
  REQUIRE(d.labels.has_value());
  CHECK((*d.labels)[0] == 0);
  CHECK((*d.labels)[1] == 1);
  CHECK((*d.labels)[2] == 2);
}

TEST_CASE("ply: missing saliency loads, malformed headers fail") {
  fs::path dir = temp_dir("bgs_data_plyerr");
  fs::path bare = dir / "bare.ply";
  {
    std::ofstream f(bare);
    f << "ply\nformat ascii 1.0\nelement vertex 3\n"
      << "property float x\nproperty float y\nproperty float z\nend_header\n"
      << "0 0 0\n1 0 0\n0 1 0\n";
  }
  PlyData d = load_ply(bare.string());
  CHECK(!d.saliency.has_value());
  CHECK(!d.labels.has_value());

  fs::path bad = dir / "bad.ply";
  {
    std::ofstream f(bad);
    f << "ply\nformat ascii 2.0\nelement vertex 1\nproperty float x\nend_header\n0\n";
  }
  CHECK_THROWS_AS(load_ply(bad.string()), Error);

  fs::path truncated = dir / "short.ply";
  {
    std::ofstream f(truncated);
    f << "ply\nformat ascii 1.0\nelement vertex 5\n"
      << "property float x\nproperty float y\nproperty float z\nend_header\n"
      << "0 0 0\n";
  }
  CHECK_THROWS_AS(load_ply(truncated.string()), Error);

  fs::path lists = dir / "lists.ply";
  {
    std::ofstream f(lists);
    f << "ply\nformat ascii 1.0\nelement vertex 1\n"
      << "property list uchar int vertex_indices\nend_header\n0\n";
  }
  CHECK_THROWS_AS(load_ply(lists.string()), Error);
}

TEST_CASE("ply: color export uses the blue-to-red colormap") {
  PlyData d;
  d.cloud.points = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  d.saliency = SaliencyMap{0.0, 0.5, 1.0};
  fs::path dir = temp_dir("bgs_data_color");
  fs::path p = dir / "color.ply";
  PlySaveOptions opts;
  opts.binary = false;
  opts.with_colors = true;
  save_ply(p.string(), d, opts);
  std::string text = file_bytes(p);
  CHECK(text.find("property uchar red") != std::string::npos);
  CHECK(text.find("0 0 255") != std::string::npos);    // saliency 0 -> blue
  CHECK(text.find("128 0 128") != std::string::npos);  // saliency .5 -> middle
  CHECK(text.find("255 0 0") != std::string::npos);    // saliency 1 -> red

  PlyData no_sal;
  no_sal.cloud = d.cloud;
  CHECK_THROWS_AS(save_ply((dir / "x.ply").string(), no_sal, opts), Error);
}

TEST_CASE("make_dataset: manifest counts, disjoint seeds, byte-stable regeneration") {
  DatasetConfig cfg;
  cfg.categories = {Category::Mug, Category::Tool};
  cfg.train_per_category = 3;
  cfg.test_per_category = 1;
  cfg.n_points = 300;
  cfg.n_candidates = 50;
  cfg.seed = 5;

  fs::path d1 = temp_dir("bgs_dataset_a");
  fs::path d2 = temp_dir("bgs_dataset_b");
  Manifest m1 = make_dataset(cfg, d1.string());
  Manifest m2 = make_dataset(cfg, d2.string());
  CHECK(m1.train.size() == 6);
  CHECK(m1.test.size() == 2);

  std::set<uint64_t> seeds;
  for (const auto& e : m1.train) seeds.insert(e.seed);
  for (const auto& e : m1.test) seeds.insert(e.seed);
  CHECK(seeds.size() == m1.train.size() + m1.test.size());

  for (const auto& entry : m1.train)
    CHECK(file_bytes(d1 / entry.ply) == file_bytes(d2 / entry.ply));
  CHECK(file_bytes(d1 / "manifest.json") == file_bytes(d2 / "manifest.json"));
  CHECK(file_bytes(d1 / "annotations.json") == file_bytes(d2 / "annotations.json"));

  Manifest loaded = load_manifest((d1 / "manifest.json").string());
  CHECK(loaded.train.size() == m1.train.size());
  CHECK(loaded.n_candidates == 50);

  Dataset train_set = load_dataset(d1.string(), loaded, true);
  REQUIRE(train_set.size() == 6);
  for (const TrainObject& obj : train_set) {
    CHECK(obj.cloud.size() == 300);
    CHECK(!label_indices(obj.labels, {1}).empty());
    CHECK(!label_indices(obj.labels, {2}).empty());
    CHECK(static_cast<int>(obj.vectors.candidates.size()) == obj.cloud.size());
  }
}

TEST_CASE("load_dataset: annotation saliency overrides the stored map") {
  DatasetConfig cfg;
  cfg.categories = {Category::Cad};
  cfg.train_per_category = 1;
  cfg.test_per_category = 0;
  cfg.n_points = 120;
  cfg.n_candidates = 16;
  cfg.seed = 77;
  fs::path dir = temp_dir("bgs_dataset_override");
  Manifest m = make_dataset(cfg, dir.string());

  auto anns = load_annotations((dir / "annotations.json").string());
  REQUIRE(anns.size() == 1);
  anns[0].saliency = SaliencyMap(120, 0.625);
  save_annotations((dir / "annotations.json").string(), anns);

  Dataset set = load_dataset(dir.string(), m, true);
  REQUIRE(set.size() == 1);
  for (double v : set[0].saliency) CHECK(v == 0.625);
}
