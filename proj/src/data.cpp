#include "data.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>

#include "json.hpp"
#include "ply.hpp"
#include "rng.hpp"

namespace bgs {

using nlohmann::json;

namespace {
constexpr double kPi = 3.14159265358979323846;

constexpr uint64_t kStreamSample = 0x73616d706cULL;
constexpr uint64_t kStreamShape = 0x7368617065ULL;
constexpr uint64_t kStreamVectors = 0x76656374ULL;
constexpr uint64_t kStreamDisturb = 0x64697374ULL;
constexpr uint64_t kStreamTrain = 0x747261696eULL;
constexpr uint64_t kStreamTest = 0x74657374ULL;
}  // namespace

std::string category_name(Category c) {
  switch (c) {
    case Category::Mug: return "mug";
    case Category::Pot: return "pot";
    case Category::Pan: return "pan";
    case Category::Kettle: return "kettle";
    case Category::Vase: return "vase";
    case Category::KitchenPot: return "kitchen-pot";
    case Category::Tool: return "tool";
    case Category::Cad: return "cad";
  }
  return "mug";
}

Category category_from_name(const std::string& name) {
  for (Category c : all_categories())
    if (category_name(c) == name) return c;
  throw_config("unknown object category: " + name);
}

const std::vector<Category>& all_categories() {
  static const std::vector<Category> cats{
      Category::Mug,     Category::Pot,  Category::Pan,
      Category::Kettle,  Category::Vase, Category::KitchenPot,
      Category::Tool,    Category::Cad};
  return cats;
}

namespace {

// Stack of lateral frusta along z following a piecewise-linear radius profile.
void add_lathe(Surface& s, const std::vector<std::pair<double, double>>& zr,
               Region region = Region::Body) {
  for (size_t i = 0; i + 1 < zr.size(); ++i) {
    s.patches.push_back(frustum_side(zr[i].second, zr[i + 1].second,
                                     zr[i].first, zr[i + 1].first, 0, 2 * kPi,
                                     region));
  }
}

ParametricObject build_mug(uint64_t seed, Rng& rng) {
  ParametricObject o;
  double R = 0.38 * rng.uniform(0.9, 1.1);
  double H = 0.9 * rng.uniform(0.9, 1.1);
  double ring = 0.24 * H, tube = 0.05;
  Surface& s = o.surface;
  s.patches.push_back(frustum_side(R, R, 0, H, -0.75 * kPi, 0.75 * kPi));
  s.patches.push_back(frustum_side(R, R, 0, 0.25 * H, 0.75 * kPi, 1.25 * kPi));
  s.patches.push_back(frustum_side(R, R, 0.85 * H, H, 0.75 * kPi, 1.25 * kPi));
  s.patches.push_back(frustum_side(R, R, 0.25 * H, 0.85 * H, 0.75 * kPi,
                                   1.25 * kPi, Region::Balance));
  s.patches.push_back(disk(0, R, 0));
  s.patches.push_back(torus_segment({R, 0, 0.55 * H}, {1, 0, 0}, {0, 0, 1},
                                    ring, tube, -1.9, 1.9, Region::Functional));
  o.functional_anchor = {R + ring + tube, 0, 0.55 * H};
  o.balance_anchor = {-R, 0, 0.55 * H};
  o.distractor_anchor = {0, -R, H};
  return o;
}

ParametricObject build_pot(uint64_t seed, Rng& rng, bool tall) {
  ParametricObject o;
  double R = (tall ? 0.5 : 0.62) * rng.uniform(0.9, 1.1);
  double H = (tall ? 0.92 : 0.58) * rng.uniform(0.9, 1.1);
  double ring = 0.14, tube = 0.035, zh = 0.82 * H;
  Surface& s = o.surface;
  s.patches.push_back(frustum_side(R, R, 0, H, 0, 2 * kPi));
  s.patches.push_back(disk(0, R, 0));
  s.patches.push_back(disk(0, R, H));  // lid
  s.patches.push_back(torus_segment({R, 0, zh}, {1, 0, 0}, {0, 0, 1}, ring,
                                    tube, -1.8, 1.8, Region::Functional));
  s.patches.push_back(torus_segment({-R, 0, zh}, {-1, 0, 0}, {0, 0, 1}, ring,
                                    tube, -1.8, 1.8, Region::Balance));
  o.functional_anchor = {R + ring + tube, 0, zh};
  o.balance_anchor = {-R - ring - tube, 0, zh};
  o.distractor_anchor = tall ? Vec3{0, 0, H} : Vec3{0, R, H};
  return o;
}

ParametricObject build_pan(uint64_t seed, Rng& rng) {
  ParametricObject o;
  double R = 0.66 * rng.uniform(0.9, 1.1);
  double H = 0.16 * rng.uniform(0.9, 1.1);
  double Lh = 0.75 * rng.uniform(0.9, 1.1), hw = 0.045;
  Surface& s = o.surface;
  s.patches.push_back(frustum_side(R, R, 0, H, 0, 2 * kPi));
  s.patches.push_back(disk(0, R, 0));
  double zc = 0.75 * H;
  for (Patch& p : box({R, -hw, zc - hw}, {R + Lh, hw, zc + hw},
                      Region::Functional))
    s.patches.push_back(std::move(p));
  s.patches.push_back(torus_segment({-R, 0, 0.9 * H}, {-1, 0, 0}, {0, 0, 1},
                                    0.1, 0.03, -1.7, 1.7, Region::Balance));
  o.functional_anchor = {R + Lh, 0, zc};
  o.balance_anchor = {-R - 0.13, 0, 0.9 * H};
  o.distractor_anchor = {0, R, H};
  return o;
}

ParametricObject build_kettle(uint64_t seed, Rng& rng) {
  ParametricObject o;
  double S = rng.uniform(0.9, 1.1);
  Surface& s = o.surface;
  std::vector<std::pair<double, double>> zr{{0.0, 0.25 * S},
                                            {0.15 * S, 0.45 * S},
                                            {0.35 * S, 0.5 * S},
                                            {0.55 * S, 0.42 * S},
                                            {0.7 * S, 0.28 * S}};
  // Lowest band doubles as the supporting-hand region.
  s.patches.push_back(frustum_side(zr[0].second, zr[1].second, zr[0].first,
                                   zr[1].first, 0, 2 * kPi, Region::Balance));
  for (size_t i = 1; i + 1 < zr.size(); ++i)
    s.patches.push_back(frustum_side(zr[i].second, zr[i + 1].second,
                                     zr[i].first, zr[i + 1].first, 0, 2 * kPi));
  s.patches.push_back(disk(0, zr.front().second, 0));
  s.patches.push_back(disk(0, zr.back().second, zr.back().first));
  double ring = 0.3 * S, tube = 0.04;
  s.patches.push_back(torus_segment({0, 0, 0.7 * S}, {1, 0, 0}, {0, 0, 1},
                                    ring, tube, 0.45, kPi - 0.45,
                                    Region::Functional));
  o.functional_anchor = {0, 0, 0.7 * S + ring + tube};
  o.balance_anchor = {-0.4 * S, 0, 0.07 * S};
  o.distractor_anchor = {0.55 * S, 0, 0.45 * S};
  return o;
}

ParametricObject build_vase(uint64_t seed, Rng& rng) {
  ParametricObject o;
  double S = rng.uniform(0.9, 1.1);
  Surface& s = o.surface;
  auto band = [&](double z0, double r0, double z1, double r1) {
    double a = 0.6;
    s.patches.push_back(
        frustum_side(r0, r1, z0, z1, -a, a, Region::Functional));
    s.patches.push_back(
        frustum_side(r0, r1, z0, z1, kPi - a, kPi + a, Region::Balance));
    s.patches.push_back(frustum_side(r0, r1, z0, z1, a, kPi - a));
    s.patches.push_back(frustum_side(r0, r1, z0, z1, kPi + a, 2 * kPi - a));
  };
  std::vector<std::pair<double, double>> zr{
      {0.0, 0.18 * S}, {0.25 * S, 0.42 * S}, {0.45 * S, 0.5 * S},
      {0.7 * S, 0.3 * S}, {0.85 * S, 0.16 * S}, {1.0 * S, 0.2 * S}};
  add_lathe(s, {zr[0], zr[1]});
  band(zr[1].first, zr[1].second, zr[2].first, zr[2].second);
  band(zr[2].first, zr[2].second, zr[3].first, zr[3].second);
  add_lathe(s, {zr[3], zr[4], zr[5]});
  s.patches.push_back(disk(0, zr.front().second, 0));
  o.functional_anchor = {0.48 * S, 0, 0.45 * S};
  o.balance_anchor = {-0.48 * S, 0, 0.45 * S};
  o.distractor_anchor = {0, 0.17 * S, 0.92 * S};
  return o;
}

ParametricObject build_tool(uint64_t seed, Rng& rng) {
  ParametricObject o;
  double L = rng.uniform(0.9, 1.1);
  double r = 0.06 * rng.uniform(0.9, 1.1);
  Surface& s = o.surface;
  s.patches.push_back(frustum_side(r, r, 0, 0.2 * L, 0, 2 * kPi));
  s.patches.push_back(
      frustum_side(r, r, 0.2 * L, 0.5 * L, 0, 2 * kPi, Region::Functional));
  s.patches.push_back(frustum_side(r, r, 0.5 * L, 0.95 * L, 0, 2 * kPi));
  s.patches.push_back(disk(0, r, 0));
  for (Patch& p : box({-0.24, -0.085, 0.95 * L}, {0.24, 0.085, 0.95 * L + 0.17},
                      Region::Balance))
    s.patches.push_back(std::move(p));
  o.functional_anchor = {r, 0, 0.35 * L};
  o.balance_anchor = {0.24, 0, 0.95 * L + 0.085};
  o.distractor_anchor = {-r, 0, 0.05 * L};
  return o;
}

ParametricObject build_cad(uint64_t seed, Rng& rng) {
  ParametricObject o;
  double sx = rng.uniform(0.9, 1.1), sz = rng.uniform(0.9, 1.1);
  Surface& s = o.surface;
  for (Patch& p : box({-0.42 * sx, -0.3, 0}, {0.42 * sx, 0.3, 0.38 * sz}))
    s.patches.push_back(std::move(p));
  double z0 = 0.38 * sz, z1 = 0.58 * sz, hw = 0.08;
  for (Patch& p : box({0.22 * sx, -hw, z0}, {0.52 * sx, hw, z1},
                      Region::Functional))
    s.patches.push_back(std::move(p));
  for (Patch& p : box({-0.22 * sx, -hw, z0}, {0.22 * sx, hw, z1}))
    s.patches.push_back(std::move(p));
  for (Patch& p : box({-0.52 * sx, -hw, z0}, {-0.22 * sx, hw, z1},
                      Region::Balance))
    s.patches.push_back(std::move(p));
  o.functional_anchor = {0.52 * sx, 0, (z0 + z1) / 2};
  o.balance_anchor = {-0.52 * sx, 0, (z0 + z1) / 2};
  o.distractor_anchor = {0, 0.3, 0.19 * sz};
  return o;
}

}  // namespace

ParametricObject make_object(Category category, uint64_t seed) {
  Rng rng(Rng::mix(seed, kStreamShape));
  ParametricObject o;
  switch (category) {
    case Category::Mug: o = build_mug(seed, rng); break;
    case Category::Pot: o = build_pot(seed, rng, false); break;
    case Category::Pan: o = build_pan(seed, rng); break;
    case Category::Kettle: o = build_kettle(seed, rng); break;
    case Category::Vase: o = build_vase(seed, rng); break;
    case Category::KitchenPot: o = build_pot(seed, rng, true); break;
    case Category::Tool: o = build_tool(seed, rng); break;
    case Category::Cad: o = build_cad(seed, rng); break;
  }
  o.category = category;
  o.seed = seed;
  return o;
}

GeneratedObject gen_object(Category category, uint64_t seed, int n_points) {
  if (n_points < 3) throw_config("gen_object: need at least 3 points");
  ParametricObject obj = make_object(category, seed);
  SampledSurface sampled =
      sample_surface_tagged(obj.surface, n_points, Rng::mix(seed, kStreamSample));

  GeneratedObject out;
  out.id = category_name(category) + "_" + std::to_string(seed);
  out.category = category;
  out.seed = seed;
  out.cloud = std::move(sampled.cloud);
  out.labels.assign(static_cast<size_t>(n_points), 0);
  for (int i = 0; i < n_points; ++i) {
    if (sampled.regions[static_cast<size_t>(i)] == Region::Functional)
      out.labels[static_cast<size_t>(i)] = 1;
    else if (sampled.regions[static_cast<size_t>(i)] == Region::Balance)
      out.labels[static_cast<size_t>(i)] = 2;
  }

  // A tiny sample can miss a region entirely; pin the nearest point.
  auto ensure_class = [&](uint8_t cls, const Vec3& anchor) {
    for (uint8_t l : out.labels)
      if (l == cls) return;
    int best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_points; ++i) {
      double d = (out.cloud.points[static_cast<size_t>(i)] - anchor).norm();
      if (d < bd && out.labels[static_cast<size_t>(i)] == 0) {
        bd = d;
        best = i;
      }
    }
    out.labels[static_cast<size_t>(best)] = cls;
  };
  ensure_class(1, obj.functional_anchor);
  ensure_class(2, obj.balance_anchor);

  FrameTransform t = normalize_cloud(out.cloud);
  auto map_anchor = [&](const Vec3& a) { return (a - t.center) * t.scale; };
  Vec3 fa = map_anchor(obj.functional_anchor);
  Vec3 da = map_anchor(obj.distractor_anchor);

  const double sigma_f = 0.18, sigma_d = 0.10, amp_d = 0.45;
  out.saliency.resize(static_cast<size_t>(n_points));
  for (int i = 0; i < n_points; ++i) {
    const Vec3& p = out.cloud.points[static_cast<size_t>(i)];
    double df = (p - fa).norm();
    double dd = (p - da).norm();
    double v = std::exp(-df * df / (2 * sigma_f * sigma_f)) +
               amp_d * std::exp(-dd * dd / (2 * sigma_d * sigma_d));
    out.saliency[static_cast<size_t>(i)] = std::clamp(v, 0.0, 1.0);
  }

  out.gravity = gravity_line(out.cloud);
  return out;
}

VectorGT build_vector_gt(const PointCloud& cloud, const ContactLabels& labels,
                         int n_candidates, uint64_t seed) {
  validate_labels(labels, cloud.size());
  if (n_candidates < 1) throw_config("build_vector_gt: n_candidates must be >= 1");
  std::vector<int> right = label_indices(labels, {1});
  std::vector<int> left = label_indices(labels, {2});
  if (right.empty() || left.empty())
    throw_data("build_vector_gt: both label classes must be present");

  VectorGT gt;
  gt.candidates.resize(labels.size());
  for (size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == 0) continue;
    const std::vector<int>& opposite = labels[i] == 1 ? left : right;
    std::vector<int> order = opposite;
    Rng rng(Rng::mix(seed, kStreamVectors + i));
    rng.shuffle(order);
    int take = std::min<int>(n_candidates, static_cast<int>(order.size()));
    auto& list = gt.candidates[i];
    list.reserve(static_cast<size_t>(take));
    for (int c = 0; c < take; ++c) {
      list.push_back(cloud.points[static_cast<size_t>(order[static_cast<size_t>(c)])] -
                     cloud.points[i]);
    }
  }
  return gt;
}

ContactLabels disturb_labels(const ContactLabels& labels,
                             double disturbed_ratio, uint64_t seed) {
  if (disturbed_ratio < 0 || disturbed_ratio >= 1)
    throw_config("disturb_labels: ratio must be in [0,1)");
  ContactLabels out = labels;
  Rng rng(Rng::mix(seed, kStreamDisturb));
  for (uint8_t cls : {uint8_t{1}, uint8_t{2}}) {
    std::vector<int> idx = label_indices(out, {cls});
    int n_disturb = static_cast<int>(std::floor(disturbed_ratio * idx.size()));
    if (n_disturb == 0) continue;
    rng.shuffle(idx);
    std::vector<int> free;
    for (size_t i = 0; i < out.size(); ++i)
      if (out[i] == 0) free.push_back(static_cast<int>(i));
    for (int d = 0; d < n_disturb; ++d) {
      out[static_cast<size_t>(idx[static_cast<size_t>(d)])] = 0;
      free.push_back(idx[static_cast<size_t>(d)]);
      size_t pick = rng.below(free.size());
      out[static_cast<size_t>(free[pick])] = cls;
      free.erase(free.begin() + static_cast<long>(pick));
    }
  }
  return out;
}

// ---- annotation schema ----

namespace {

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) ok = true;
    if (!ok) throw_data("unknown key '" + it.key() + "' in " + where);
  }
}

AnnotationRecord record_from_json(const json& j) {
  if (!j.is_object()) throw_data("annotation record must be an object");
  reject_unknown_keys(j, {"object_id", "num_points", "labels", "saliency",
                          "annotator"},
                      "annotation record");
  AnnotationRecord r;
  if (!j.contains("object_id") || !j["object_id"].is_string())
    throw_data("annotation record: object_id missing or not a string");
  r.object_id = j["object_id"].get<std::string>();
  if (!j.contains("num_points") || !j["num_points"].is_number_integer())
    throw_data("annotation record: num_points missing or not an integer");
  r.num_points = j["num_points"].get<int>();
  if (!j.contains("labels") || !j["labels"].is_array())
    throw_data("annotation record: labels missing or not an array");
  for (const auto& v : j["labels"]) {
    if (!v.is_number_integer()) throw_data("annotation record: label not an integer");
    int l = v.get<int>();
    if (l < 0 || l > 2) throw_data("annotation record: label value outside {0,1,2}");
    r.labels.push_back(static_cast<uint8_t>(l));
  }
  if (static_cast<int>(r.labels.size()) != r.num_points)
    throw_data("annotation record: labels length does not match num_points");
  if (j.contains("saliency")) {
    if (!j["saliency"].is_array())
      throw_data("annotation record: saliency is not an array");
    SaliencyMap s;
    for (const auto& v : j["saliency"]) {
      if (!v.is_number()) throw_data("annotation record: saliency not numeric");
      s.push_back(v.get<double>());
    }
    validate_saliency(s, r.num_points);
    r.saliency = std::move(s);
  }
  if (!j.contains("annotator") || !j["annotator"].is_string())
    throw_data("annotation record: annotator missing or not a string");
  r.annotator = j["annotator"].get<std::string>();

  bool any = false, has_right = false, has_left = false;
  for (uint8_t l : r.labels) {
    if (l) any = true;
    if (l == 1) has_right = true;
    if (l == 2) has_left = true;
  }
  if (any && (!has_right || !has_left))
    throw_data("annotation record: bimanual record must contain both classes");
  return r;
}

json record_to_json(const AnnotationRecord& r) {
  json j;
  j["object_id"] = r.object_id;
  j["num_points"] = r.num_points;
  j["labels"] = json::array();
  for (uint8_t l : r.labels) j["labels"].push_back(static_cast<int>(l));
  if (r.saliency) j["saliency"] = *r.saliency;
  j["annotator"] = r.annotator;
  return j;
}

json parse_json_file(const std::string& path, const char* what) {
  std::ifstream f(path);
  if (!f) throw_data(std::string("cannot open ") + what + " file: " + path);
  json j = json::parse(f, nullptr, false);
  if (j.is_discarded()) throw_data(std::string("malformed ") + what + " file: " + path);
  return j;
}

void write_json_file(const std::string& path, const json& j, const char* what) {
  std::ofstream f(path);
  if (!f) throw_data(std::string("cannot open ") + what + " file for writing: " + path);
  f << j.dump(2) << "\n";
  if (!f) throw_data(std::string("failed writing ") + what + " file: " + path);
}

}  // namespace

std::vector<AnnotationRecord> load_annotations(const std::string& path) {
  json j = parse_json_file(path, "annotation");
  if (!j.is_object()) throw_data("annotation file: top level must be an object");
  reject_unknown_keys(j, {"version", "records"}, "annotation file");
  if (!j.contains("version") || j["version"].get<int>() != 1)
    throw_data("annotation file: unsupported version");
  if (!j.contains("records") || !j["records"].is_array())
    throw_data("annotation file: records array missing");
  std::vector<AnnotationRecord> out;
  for (const auto& rec : j["records"]) out.push_back(record_from_json(rec));
  return out;
}

void save_annotations(const std::string& path,
                      const std::vector<AnnotationRecord>& records) {
  json j;
  j["version"] = 1;
  j["records"] = json::array();
  for (const auto& r : records) j["records"].push_back(record_to_json(r));
  write_json_file(path, j, "annotation");
}

// ---- manifests ----

namespace {

json entry_to_json(const ManifestEntry& e) {
  json j;
  j["id"] = e.id;
  j["category"] = category_name(e.category);
  j["seed"] = e.seed;
  j["n_points"] = e.n_points;
  j["ply"] = e.ply;
  return j;
}

ManifestEntry entry_from_json(const json& j) {
  if (!j.is_object()) throw_data("manifest entry must be an object");
  reject_unknown_keys(j, {"id", "category", "seed", "n_points", "ply"},
                      "manifest entry");
  ManifestEntry e;
  e.id = j.at("id").get<std::string>();
  e.category = category_from_name(j.at("category").get<std::string>());
  e.seed = j.at("seed").get<uint64_t>();
  e.n_points = j.at("n_points").get<int>();
  e.ply = j.at("ply").get<std::string>();
  return e;
}

}  // namespace

Manifest load_manifest(const std::string& path) {
  json j = parse_json_file(path, "manifest");
  if (!j.is_object()) throw_data("manifest: top level must be an object");
  reject_unknown_keys(j, {"version", "n_candidates", "train", "test"},
                      "manifest");
  Manifest m;
  if (!j.contains("version") || j["version"].get<int>() != 1)
    throw_data("manifest: unsupported version");
  m.n_candidates = j.at("n_candidates").get<int>();
  for (const auto& e : j.at("train")) m.train.push_back(entry_from_json(e));
  for (const auto& e : j.at("test")) m.test.push_back(entry_from_json(e));
  return m;
}

void save_manifest(const Manifest& manifest, const std::string& path) {
  json j;
  j["version"] = 1;
  j["n_candidates"] = manifest.n_candidates;
  j["train"] = json::array();
  for (const auto& e : manifest.train) j["train"].push_back(entry_to_json(e));
  j["test"] = json::array();
  for (const auto& e : manifest.test) j["test"].push_back(entry_to_json(e));
  write_json_file(path, j, "manifest");
}

Manifest make_dataset(const DatasetConfig& config, const std::string& out_dir) {
  if (config.train_per_category < 1 || config.test_per_category < 0)
    throw_config("make_dataset: counts must be positive");
  if (config.categories.empty()) throw_config("make_dataset: no categories");

  namespace fs = std::filesystem;
  fs::create_directories(fs::path(out_dir) / "objects");

  Manifest manifest;
  manifest.n_candidates = config.n_candidates;
  std::vector<AnnotationRecord> annotations;

  auto emit = [&](bool train_split, int count, uint64_t stream,
                  std::vector<ManifestEntry>& entries) {
    for (size_t c = 0; c < config.categories.size(); ++c) {
      for (int i = 0; i < count; ++i) {
        uint64_t object_seed =
            Rng::mix(Rng::mix(config.seed, stream), c * 1000 + static_cast<uint64_t>(i));
        GeneratedObject obj =
            gen_object(config.categories[c], object_seed, config.n_points);
        if (train_split && config.disturb_fraction > 0)
          obj.labels = disturb_labels(obj.labels, config.disturb_fraction,
                                      object_seed);
        ManifestEntry e;
        e.id = obj.id;
        e.category = obj.category;
        e.seed = object_seed;
        e.n_points = config.n_points;
        e.ply = "objects/" + obj.id + ".ply";
        PlyData ply;
        ply.cloud = obj.cloud;
        ply.saliency = obj.saliency;
        ply.labels = obj.labels;
        save_ply((fs::path(out_dir) / e.ply).string(), ply);
        AnnotationRecord rec;
        rec.object_id = obj.id;
        rec.num_points = config.n_points;
        rec.labels = obj.labels;
        rec.annotator = "synthetic";
        annotations.push_back(std::move(rec));
        entries.push_back(std::move(e));
      }
    }
  };

  emit(true, config.train_per_category, kStreamTrain, manifest.train);
  emit(false, config.test_per_category, kStreamTest, manifest.test);

  save_annotations((fs::path(out_dir) / "annotations.json").string(), annotations);
  save_manifest(manifest, (fs::path(out_dir) / "manifest.json").string());
  return manifest;
}

Dataset load_dataset(const std::string& dataset_dir, const Manifest& manifest,
                     bool train_split) {
  namespace fs = std::filesystem;
  const auto& entries = train_split ? manifest.train : manifest.test;

  std::map<std::string, AnnotationRecord> by_id;
  fs::path ann_path = fs::path(dataset_dir) / "annotations.json";
  if (fs::exists(ann_path)) {
    for (auto& r : load_annotations(ann_path.string())) by_id[r.object_id] = r;
  }

  Dataset out;
  for (const ManifestEntry& e : entries) {
    PlyData ply = load_ply((fs::path(dataset_dir) / e.ply).string());
    if (!ply.saliency) throw_data("dataset object missing saliency: " + e.id);
    if (!ply.labels) throw_data("dataset object missing labels: " + e.id);
    TrainObject obj;
    obj.id = e.id;
    obj.cloud = std::move(ply.cloud);
    obj.labels = std::move(*ply.labels);
    obj.saliency = std::move(*ply.saliency);
    auto found = by_id.find(e.id);
    if (found != by_id.end() && found->second.saliency) {
      validate_saliency(*found->second.saliency, obj.cloud.size());
      obj.saliency = *found->second.saliency;
    }
    obj.vectors = build_vector_gt(obj.cloud, obj.labels, manifest.n_candidates,
                                  e.seed);
    obj.gravity = gravity_line(obj.cloud);
    out.push_back(std::move(obj));
  }
  return out;
}

}  // namespace bgs
