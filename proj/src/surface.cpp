#include "surface.hpp"

#include <cmath>

namespace bgs {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

Patch frustum_side(double r0, double r1, double z0, double z1, double theta0,
                   double theta1, Region region) {
  double dz = z1 - z0;
  double slant = std::sqrt(dz * dz + (r1 - r0) * (r1 - r0));
  Patch p;
  p.region = region;
  p.area = 0.5 * (r0 + r1) * slant * (theta1 - theta0);
  p.sample = [=](Rng& rng) {
    // Radius grows linearly along the slant, so area density in t is linear;
    // invert the CDF of r(t) = r0 + (r1-r0) t.
    double u = rng.uniform();
    double t;
    if (std::abs(r1 - r0) < 1e-15) {
      t = u;
    } else {
      double a = r0, b = r1 - r0;
      // CDF(t) = (a t + b t^2 / 2) / (a + b/2)
      double c = u * (a + 0.5 * b);
      t = (-a + std::sqrt(a * a + 2.0 * b * c)) / b;
    }
    double r = r0 + (r1 - r0) * t;
    double z = z0 + dz * t;
    double th = theta0 + (theta1 - theta0) * rng.uniform();
    return Vec3{r * std::cos(th), r * std::sin(th), z};
  };
  return p;
}

Patch disk(double r_inner, double r_outer, double z, Region region) {
  Patch p;
  p.region = region;
  p.area = kPi * (r_outer * r_outer - r_inner * r_inner);
  p.sample = [=](Rng& rng) {
    double r = std::sqrt(r_inner * r_inner +
                         (r_outer * r_outer - r_inner * r_inner) * rng.uniform());
    double th = 2.0 * kPi * rng.uniform();
    return Vec3{r * std::cos(th), r * std::sin(th), z};
  };
  return p;
}

Patch rect(const Vec3& corner, const Vec3& edge_u, const Vec3& edge_v,
           Region region) {
  Patch p;
  p.region = region;
  Vec3 cross{edge_u.y * edge_v.z - edge_u.z * edge_v.y,
             edge_u.z * edge_v.x - edge_u.x * edge_v.z,
             edge_u.x * edge_v.y - edge_u.y * edge_v.x};
  p.area = cross.norm();
  p.sample = [=](Rng& rng) {
    return corner + edge_u * rng.uniform() + edge_v * rng.uniform();
  };
  return p;
}

Patch torus_segment(const Vec3& center, const Vec3& u, const Vec3& v,
                    double ring_r, double tube_r, double phi0, double phi1,
                    Region region) {
  Vec3 w{u.y * v.z - u.z * v.y, u.z * v.x - u.x * v.z, u.x * v.y - u.y * v.x};
  Patch p;
  p.region = region;
  // Exact: integral of tube_r (ring_r + tube_r cos a) da dphi over full tube.
  p.area = (phi1 - phi0) * 2.0 * kPi * tube_r * ring_r;
  p.sample = [=](Rng& rng) {
    double phi = phi0 + (phi1 - phi0) * rng.uniform();
    // Tube angle needs density proportional to (ring_r + tube_r cos a);
    // rejection against the max keeps the draw exact.
    double a;
    for (;;) {
      a = 2.0 * kPi * rng.uniform();
      double accept = (ring_r + tube_r * std::cos(a)) / (ring_r + tube_r);
      if (rng.uniform() < accept) break;
    }
    Vec3 ring_dir = u * std::cos(phi) + v * std::sin(phi);
    Vec3 pos = center + ring_dir * (ring_r + tube_r * std::cos(a)) +
               w * (tube_r * std::sin(a));
    return pos;
  };
  return p;
}

Patch sphere_zone(const Vec3& center, double r, double z0, double z1,
                  Region region) {
  Patch p;
  p.region = region;
  p.area = 2.0 * kPi * r * (z1 - z0);
  p.sample = [=](Rng& rng) {
    double z = z0 + (z1 - z0) * rng.uniform();
    double th = 2.0 * kPi * rng.uniform();
    double rr = std::sqrt(std::max(0.0, r * r - z * z));
    return center + Vec3{rr * std::cos(th), rr * std::sin(th), z};
  };
  return p;
}

std::vector<Patch> box(const Vec3& lo, const Vec3& hi, Region region) {
  Vec3 d = hi - lo;
  std::vector<Patch> faces;
  faces.push_back(rect(lo, {d.x, 0, 0}, {0, d.y, 0}, region));
  faces.push_back(rect({lo.x, lo.y, hi.z}, {d.x, 0, 0}, {0, d.y, 0}, region));
  faces.push_back(rect(lo, {d.x, 0, 0}, {0, 0, d.z}, region));
  faces.push_back(rect({lo.x, hi.y, lo.z}, {d.x, 0, 0}, {0, 0, d.z}, region));
  faces.push_back(rect(lo, {0, d.y, 0}, {0, 0, d.z}, region));
  faces.push_back(rect({hi.x, lo.y, lo.z}, {0, d.y, 0}, {0, 0, d.z}, region));
  return faces;
}

SampledSurface sample_surface_tagged(const Surface& surface, int n,
                                     uint64_t seed) {
  if (n < 3) throw_data("sample_surface: need at least 3 points");
  double total = surface.total_area();
  if (!(total > 0)) throw_data("sample_surface: surface has zero area");

  std::vector<double> cum;
  cum.reserve(surface.patches.size());
  double acc = 0;
  for (const Patch& p : surface.patches) {
    acc += p.area;
    cum.push_back(acc);
  }

  Rng rng(seed);
  SampledSurface out;
  out.cloud.points.reserve(n);
  out.regions.reserve(n);
  for (int i = 0; i < n; ++i) {
    double u = rng.uniform() * total;
    size_t pi = 0;
    while (pi + 1 < cum.size() && u >= cum[pi]) ++pi;
    const Patch& patch = surface.patches[pi];
    out.cloud.points.push_back(patch.sample(rng));
    out.regions.push_back(patch.region);
  }
  return out;
}

PointCloud sample_surface(const Surface& surface, int n, uint64_t seed) {
  return sample_surface_tagged(surface, n, seed).cloud;
}

}  // namespace bgs
