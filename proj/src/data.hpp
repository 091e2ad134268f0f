#pragma once

#include <optional>
#include <string>
#include <vector>

#include "geom.hpp"
#include "surface.hpp"

namespace bgs {

enum class Category { Mug, Pot, Pan, Kettle, Vase, KitchenPot, Tool, Cad };

std::string category_name(Category c);
Category category_from_name(const std::string& name);
const std::vector<Category>& all_categories();

// Procedural household object: a patch surface with grasp-region tags plus
// the anchor points that shape the synthetic single-handed saliency map.
struct ParametricObject {
  Category category = Category::Mug;
  uint64_t seed = 0;
  Surface surface;
  Vec3 functional_anchor;  // single-handed saliency peak (right-hand region)
  Vec3 balance_anchor;     // fallback left-hand location
  Vec3 distractor_anchor;  // spurious saliency bump the corrector must suppress
};

ParametricObject make_object(Category category, uint64_t seed);

struct GeneratedObject {
  std::string id;
  Category category = Category::Mug;
  uint64_t seed = 0;
  PointCloud cloud;      // unit-normalized frame
  ContactLabels labels;  // both classes guaranteed present
  SaliencyMap saliency;  // procedural single-handed map
  GravityLine gravity;
};

// Deterministic per (category, seed, n_points). Labels mark the functional
// region right-hand and the balance region left-hand; the saliency map is a
// smooth bump peaking at the functional region with a weaker spurious bump
// elsewhere.
GeneratedObject gen_object(Category category, uint64_t seed,
                           int n_points = 5000);

// Displacement candidates from each labeled point to opposite-label points;
// up to n_candidates per point, sampled without replacement, seeded.
VectorGT build_vector_gt(const PointCloud& cloud, const ContactLabels& labels,
                         int n_candidates = 1000, uint64_t seed = 0);

// Annotation-noise generator: relocates `disturbed_ratio` of each class's
// labels onto random unlabeled points (default 3 disturbed : 1 accurate).
ContactLabels disturb_labels(const ContactLabels& labels,
                             double disturbed_ratio, uint64_t seed);

// ---- annotation schema (versioned JSON) ----

struct AnnotationRecord {
  std::string object_id;
  int num_points = 0;
  ContactLabels labels;
  std::optional<SaliencyMap> saliency;  // external single-handed map drop-in
  std::string annotator;
};

std::vector<AnnotationRecord> load_annotations(const std::string& path);
void save_annotations(const std::string& path,
                      const std::vector<AnnotationRecord>& records);

// ---- dataset manifests ----

struct DatasetConfig {
  std::vector<Category> categories{Category::Mug, Category::Pot, Category::Pan,
                                   Category::Tool};
  int train_per_category = 2;
  int test_per_category = 1;
  int n_points = 5000;
  int n_candidates = 1000;
  uint64_t seed = 1;
  double disturb_fraction = 0.0;  // train-split label noise; 0 disables
};

struct ManifestEntry {
  std::string id;
  Category category = Category::Mug;
  uint64_t seed = 0;
  int n_points = 0;
  std::string ply;  // path relative to the dataset directory
};

struct Manifest {
  uint32_t version = 1;
  int n_candidates = 1000;
  std::vector<ManifestEntry> train;
  std::vector<ManifestEntry> test;
};

// Generates all objects under out_dir (objects/*.ply, annotations.json,
// manifest.json). Pure function of the config: regeneration is byte-stable.
Manifest make_dataset(const DatasetConfig& config, const std::string& out_dir);

Manifest load_manifest(const std::string& path);
void save_manifest(const Manifest& manifest, const std::string& path);

// ---- in-memory training set ----

struct TrainObject {
  std::string id;
  PointCloud cloud;
  ContactLabels labels;
  SaliencyMap saliency;
  VectorGT vectors;
  GravityLine gravity;
};

using Dataset = std::vector<TrainObject>;

// Loads a manifest split; candidate vectors are rebuilt deterministically
// from the stored labels. If annotations.json carries a saliency map for an
// object it overrides the PLY one (external predictor ingestion path).
Dataset load_dataset(const std::string& dataset_dir, const Manifest& manifest,
                     bool train_split);

}  // namespace bgs
