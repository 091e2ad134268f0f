#include "geom.hpp"

#include <algorithm>
#include <limits>

namespace bgs {

std::vector<int> label_indices(const ContactLabels& labels,
                               std::initializer_list<uint8_t> classes) {
  std::vector<int> out;
  for (size_t i = 0; i < labels.size(); ++i) {
    for (uint8_t c : classes) {
      if (labels[i] == c) {
        out.push_back(static_cast<int>(i));
        break;
      }
    }
  }
  return out;
}

Vec3 centroid(const PointCloud& cloud) {
  if (cloud.empty()) throw_data("centroid: empty point cloud");
  Vec3 sum{};
  for (const Vec3& p : cloud.points) sum += p;
  return sum * (1.0 / cloud.size());
}

double point_line_distance(const Vec3& p, const GravityLine& line) {
  Vec3 r = p - line.origin;
  Vec3 d = line.direction;
  double t = r.dot(d);
  Vec3 perp = r - t * d;
  return perp.norm();
}

std::vector<Neighbor> knn(const PointCloud& cloud, const Vec3& query, int k) {
  const int n = cloud.size();
  if (k < 1 || k > n) throw_data("knn: k out of range");
  std::vector<Neighbor> all(n);
  for (int i = 0; i < n; ++i) {
    all[i].index = i;
    all[i].distance = (cloud.points[i] - query).norm();
  }
  auto cmp = [](const Neighbor& a, const Neighbor& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.index < b.index;
  };
  std::partial_sort(all.begin(), all.begin() + k, all.end(), cmp);
  all.resize(k);
  return all;
}

double soft_interpolate(const PointCloud& cloud, const SaliencyMap& field,
                        const Vec3& query, int k, double eps) {
  if (static_cast<int>(field.size()) != cloud.size())
    throw_data("soft_interpolate: field length does not match cloud");
  if (k < 1) throw_data("soft_interpolate: k must be >= 1");
  k = std::min(k, cloud.size());
  auto nbrs = knn(cloud, query, k);
  double wsum = 0.0, acc = 0.0;
  for (const Neighbor& nb : nbrs) {
    double w = 1.0 / (nb.distance + eps);
    wsum += w;
    acc += w * field[nb.index];
  }
  return acc / wsum;
}

double bounding_box_diagonal(const PointCloud& cloud) {
  if (cloud.empty()) return 0.0;
  Vec3 lo = cloud.points[0], hi = cloud.points[0];
  for (const Vec3& p : cloud.points) {
    lo.x = std::min(lo.x, p.x);
    lo.y = std::min(lo.y, p.y);
    lo.z = std::min(lo.z, p.z);
    hi.x = std::max(hi.x, p.x);
    hi.y = std::max(hi.y, p.y);
    hi.z = std::max(hi.z, p.z);
  }
  return (hi - lo).norm();
}

FrameTransform normalize_cloud(PointCloud& cloud) {
  validate_cloud(cloud);
  FrameTransform t;
  t.center = centroid(cloud);
  for (Vec3& p : cloud.points) p = p - t.center;
  double diag = bounding_box_diagonal(cloud);
  if (diag <= 0) throw_data("normalize_cloud: degenerate bounding box");
  t.scale = 1.0 / diag;
  for (Vec3& p : cloud.points) p = p * t.scale;
  return t;
}

GravityLine gravity_line(const PointCloud& cloud) {
  GravityLine g;
  g.origin = centroid(cloud);
  g.direction = Vec3{0.0, 0.0, -1.0};
  return g;
}

void validate_cloud(const PointCloud& cloud) {
  if (cloud.size() < 3) throw_data("point cloud must contain at least 3 points");
  for (const Vec3& p : cloud.points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z))
      throw_data("point cloud contains a non-finite coordinate");
  }
}

void validate_labels(const ContactLabels& labels, int n_points) {
  if (static_cast<int>(labels.size()) != n_points)
    throw_data("label array length does not match point count");
  for (uint8_t l : labels) {
    if (l > 2) throw_data("contact label out of {0,1,2}");
  }
}

void validate_saliency(const SaliencyMap& map, int n_points) {
  if (static_cast<int>(map.size()) != n_points)
    throw_data("saliency array length does not match point count");
  for (double v : map) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0)
      throw_data("saliency value outside [0,1]");
  }
}

}  // namespace bgs
