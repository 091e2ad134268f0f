#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "error.hpp"

namespace bgs {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const { return std::sqrt(dot(*this)); }
  Vec3 normalized() const {
    double n = norm();
    return n > 0 ? Vec3{x / n, y / n, z / n} : Vec3{};
  }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

// Object surface points in the unit-normalized canonical frame.
struct PointCloud {
  std::vector<Vec3> points;

  int size() const { return static_cast<int>(points.size()); }
  bool empty() const { return points.empty(); }
};

// Per-point class: 0 none, 1 right-hand contact, 2 left-hand contact.
using ContactLabels = std::vector<uint8_t>;

// Per-point scalar in [0,1]; used for both single-handed and bimanual maps.
using SaliencyMap = std::vector<double>;

// Vertical line through the object's geometric center, pointing down.
struct GravityLine {
  Vec3 origin{};
  Vec3 direction{0.0, 0.0, -1.0};
};

// Ground-truth displacement candidates: for each labeled point, vectors to
// points of the opposite label. Empty for unlabeled points.
struct VectorGT {
  std::vector<std::vector<Vec3>> candidates;
};

struct Neighbor {
  int index = -1;
  double distance = 0.0;
};

// Indices carrying any of the given classes, ascending.
std::vector<int> label_indices(const ContactLabels& labels,
                               std::initializer_list<uint8_t> classes);

Vec3 centroid(const PointCloud& cloud);

double point_line_distance(const Vec3& p, const GravityLine& line);

// k nearest neighbors of `query`, ascending by distance, ties broken by
// lower index. Throws if k is out of [1, N].
std::vector<Neighbor> knn(const PointCloud& cloud, const Vec3& query, int k);

// Inverse-distance-weighted mean of `field` over the k nearest neighbors of
// `query`; weights 1/(dist+eps). The result is a convex combination of the
// neighbor values.
double soft_interpolate(const PointCloud& cloud, const SaliencyMap& field,
                        const Vec3& query, int k, double eps);

// Canonical-frame ingestion: center on the centroid and scale so the
// bounding-box diagonal is 1. Returns {center, scale} of the applied map
// p' = (p - center) * scale.
struct FrameTransform {
  Vec3 center{};
  double scale = 1.0;
};
FrameTransform normalize_cloud(PointCloud& cloud);

double bounding_box_diagonal(const PointCloud& cloud);

// Gravity line anchored at the cloud centroid, direction -z.
GravityLine gravity_line(const PointCloud& cloud);

// Validation helpers used at ingestion boundaries.
void validate_cloud(const PointCloud& cloud);
void validate_labels(const ContactLabels& labels, int n_points);
void validate_saliency(const SaliencyMap& map, int n_points);

}  // namespace bgs
