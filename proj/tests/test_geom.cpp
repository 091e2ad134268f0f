#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "error.hpp"
#include "geom.hpp"
#include "rng.hpp"
#include "surface.hpp"

using namespace bgs;

namespace {

PointCloud random_cloud(int n, uint64_t seed) {
  Rng rng(seed);
  PointCloud c;
  for (int i = 0; i < n; ++i)
    c.points.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)});
  return c;
}

Surface unit_sphere() {
  Surface s;
  s.patches.push_back(sphere_zone({0, 0, 0}, 1.0, -1.0, 1.0));
  return s;
}

}  // namespace

TEST_CASE("centroid: symmetry and identity") {
  PointCloud c;
  c.points = {{1, 0, 0}, {-1, 0, 0}};
  Vec3 m = centroid(c);
  CHECK(m.x == doctest::Approx(0).epsilon(1e-15));
  CHECK(m.y == 0);
  CHECK(m.z == 0);

  PointCloud single;
  single.points = {{0.3, -0.2, 0.9}};
  Vec3 p = centroid(single);
  CHECK(p.x == 0.3);
  CHECK(p.y == -0.2);
  CHECK(p.z == 0.9);

  CHECK_THROWS_AS(centroid(PointCloud{}), Error);
}

TEST_CASE("centroid: 5000 sampled points match brute-force summation") {
  PointCloud c = sample_surface(unit_sphere(), 5000, 42);
  Vec3 m = centroid(c);
  // Independent oracle: plain accumulation in a different order.
  double sx = 0, sy = 0, sz = 0;
  for (int i = c.size() - 1; i >= 0; --i) {
    sx += c.points[static_cast<size_t>(i)].x;
    sy += c.points[static_cast<size_t>(i)].y;
    sz += c.points[static_cast<size_t>(i)].z;
  }
  CHECK(std::abs(m.x - sx / c.size()) <= 1e-12);
  CHECK(std::abs(m.y - sy / c.size()) <= 1e-12);
  CHECK(std::abs(m.z - sz / c.size()) <= 1e-12);
}

TEST_CASE("point_line_distance: closed forms") {
  GravityLine line;
  line.origin = {0, 0, 0};
  line.direction = {0, 0, 1};
  CHECK(point_line_distance({0, 0, 5}, line) == doctest::Approx(0).epsilon(1e-15));
  CHECK(point_line_distance({3, 4, 0}, line) == doctest::Approx(5));
  CHECK(point_line_distance({3, 4, 7}, line) == doctest::Approx(5));
}

TEST_CASE("point_line_distance: dense 1-D projection scan oracle") {
  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    GravityLine line;
    line.origin = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    Vec3 d{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    line.direction = d.normalized();
    Vec3 p{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};

    // Oracle: scan the projection parameter densely around the optimum.
    double best = 1e300;
    for (int k = -100000; k <= 100000; ++k) {
      double t = k * 1e-4;
      Vec3 q = line.origin + t * line.direction;
      best = std::min(best, (p - q).norm());
    }
    CHECK(std::abs(point_line_distance(p, line) - best) <= 1e-7);
  }
}

TEST_CASE("point_line_distance: translation and sign-flip invariance") {
  Rng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    GravityLine line;
    line.origin = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    line.direction =
        Vec3{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)}.normalized();
    Vec3 p{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
    Vec3 shift{rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)};
    double base = point_line_distance(p, line);

    GravityLine moved = line;
    moved.origin += shift;
    CHECK(point_line_distance(p + shift, moved) == doctest::Approx(base).epsilon(1e-12));

    GravityLine flipped = line;
    flipped.direction = flipped.direction * -1.0;
    CHECK(point_line_distance(p, flipped) == doctest::Approx(base).epsilon(1e-12));
  }
}

TEST_CASE("knn: trivial cases and tie-breaking") {
  PointCloud c = random_cloud(40, 3);
  auto nearest = knn(c, c.points[17], 1);
  CHECK(nearest.size() == 1);
  CHECK(nearest[0].index == 17);
  CHECK(nearest[0].distance == 0);

  auto all = knn(c, {0.1, 0.2, 0.3}, c.size());
  CHECK(static_cast<int>(all.size()) == c.size());
  for (size_t i = 1; i < all.size(); ++i)
    CHECK(all[i - 1].distance <= all[i].distance);

  CHECK_THROWS_AS(knn(c, {0, 0, 0}, 0), Error);
  CHECK_THROWS_AS(knn(c, {0, 0, 0}, c.size() + 1), Error);

  // Equidistant points resolve to the lower index.
  PointCloud ties;
  ties.points = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}};
  auto r = knn(ties, {0, 0, 0}, 2);
  CHECK(r[0].index == 0);
  CHECK(r[1].index == 1);
}

TEST_CASE("knn: random queries against exhaustive sort oracle") {
  PointCloud c = random_cloud(200, 11);
  Rng rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    Vec3 q{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    int k = 1 + rng.index(c.size());
    auto got = knn(c, q, k);

    std::vector<std::pair<double, int>> oracle;
    for (int i = 0; i < c.size(); ++i)
      oracle.emplace_back((c.points[static_cast<size_t>(i)] - q).norm(), i);
    std::sort(oracle.begin(), oracle.end());
    REQUIRE(static_cast<int>(got.size()) == k);
    for (int i = 0; i < k; ++i) {
      CHECK(got[static_cast<size_t>(i)].index == oracle[static_cast<size_t>(i)].second);
      CHECK(got[static_cast<size_t>(i)].distance ==
            doctest::Approx(oracle[static_cast<size_t>(i)].first).epsilon(1e-14));
    }
  }
}

TEST_CASE("soft_interpolate: coincident, uniform, equidistant") {
  PointCloud c = random_cloud(30, 5);
  SaliencyMap field(30);
  Rng rng(6);
  for (double& v : field) v = rng.uniform();

  double at_point = soft_interpolate(c, field, c.points[4], 3, 1e-6);
  CHECK(std::abs(at_point - field[4]) <= 1e-3);

  SaliencyMap uniform(30, 0.37);
  double u = soft_interpolate(c, uniform, {0.5, 0.5, 0.5}, 5, 1e-6);
  CHECK(u == doctest::Approx(0.37).epsilon(1e-15));

  PointCloud pair;
  pair.points = {{1, 0, 0}, {-1, 0, 0}};
  SaliencyMap two{0.2, 0.8};
  double mid = soft_interpolate(pair, two, {0, 0, 0}, 2, 1e-6);
  CHECK(mid == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("soft_interpolate: output is a convex combination of neighbors") {
  PointCloud c = random_cloud(60, 21);
  SaliencyMap field(60);
  Rng rng(22);
  for (double& v : field) v = rng.uniform();
  for (int trial = 0; trial < 50; ++trial) {
    Vec3 q{rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)};
    int k = 1 + rng.index(8);
    auto nbrs = knn(c, q, k);
    double lo = 1e300, hi = -1e300;
    for (auto& nb : nbrs) {
      lo = std::min(lo, field[static_cast<size_t>(nb.index)]);
      hi = std::max(hi, field[static_cast<size_t>(nb.index)]);
    }
    double v = soft_interpolate(c, field, q, k, 1e-6);
    CHECK(v >= lo - 1e-12);
    CHECK(v <= hi + 1e-12);
  }
}

TEST_CASE("sample_surface: sphere mean, determinism, planarity") {
  PointCloud sphere = sample_surface(unit_sphere(), 10000, 99);
  Vec3 m = centroid(sphere);
  CHECK(m.norm() < 0.02);

  PointCloud again = sample_surface(unit_sphere(), 10000, 99);
  REQUIRE(again.size() == sphere.size());
  for (int i = 0; i < sphere.size(); ++i) {
    CHECK(sphere.points[static_cast<size_t>(i)].x == again.points[static_cast<size_t>(i)].x);
    CHECK(sphere.points[static_cast<size_t>(i)].y == again.points[static_cast<size_t>(i)].y);
    CHECK(sphere.points[static_cast<size_t>(i)].z == again.points[static_cast<size_t>(i)].z);
  }

  Surface square;
  square.patches.push_back(rect({0, 0, 0.25}, {1, 0, 0}, {0, 1, 0}));
  PointCloud flat = sample_surface(square, 500, 4);
  for (const Vec3& p : flat.points) CHECK(std::abs(p.z - 0.25) <= 1e-12);

  Surface degenerate;
  degenerate.patches.push_back(rect({0, 0, 0}, {0, 0, 0}, {0, 1, 0}));
  CHECK_THROWS_AS(sample_surface(degenerate, 10, 1), Error);
  CHECK_THROWS_AS(sample_surface(unit_sphere(), 2, 1), Error);
}

TEST_CASE("sample_surface: per-region counts follow area fractions (3 sigma)") {
  Surface s;
  s.patches.push_back(rect({0, 0, 0}, {3, 0, 0}, {0, 1, 0}, Region::Body));
  s.patches.push_back(rect({0, 2, 0}, {1, 0, 0}, {0, 1, 0}, Region::Functional));
  const int n = 20000;
  SampledSurface tagged = sample_surface_tagged(s, n, 123);
  int functional = 0;
  for (Region r : tagged.regions)
    if (r == Region::Functional) ++functional;
  double p = 1.0 / 4.0;  // area fraction
  double sigma = std::sqrt(n * p * (1 - p));
  CHECK(std::abs(functional - n * p) <= 3 * sigma);
}

TEST_CASE("normalize_cloud: unit diagonal, centered") {
  PointCloud c = random_cloud(100, 31);
  for (Vec3& p : c.points) p = p * 3.7 + Vec3{5, -2, 1};
  normalize_cloud(c);
  CHECK(bounding_box_diagonal(c) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(centroid(c).norm() <= 1e-12);
}

TEST_CASE("patch areas: analytic values match sample fractions") {
  Surface s;
  s.patches.push_back(disk(0, 1.0, 0));  // area pi
  s.patches.push_back(frustum_side(1, 1, 0, 2, 0, 2 * 3.14159265358979323846));
  double a0 = s.patches[0].area, a1 = s.patches[1].area;
  CHECK(a0 == doctest::Approx(3.14159265358979).epsilon(1e-12));
  CHECK(a1 == doctest::Approx(4 * 3.14159265358979).epsilon(1e-9));
  SampledSurface tagged = sample_surface_tagged(s, 30000, 8);
  int low = 0;
  for (const Vec3& p : tagged.cloud.points)
    if (p.z == 0) ++low;
  double frac = a0 / (a0 + a1);
  double sigma = std::sqrt(30000 * frac * (1 - frac));
  CHECK(std::abs(low - 30000 * frac) <= 3 * sigma);
}
