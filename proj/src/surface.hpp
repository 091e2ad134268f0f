#pragma once

#include <functional>
#include <string>
#include <vector>

#include "geom.hpp"
#include "rng.hpp"

namespace bgs {

// Grasp role of a surface patch; drives contact labeling of sampled points.
enum class Region { Body, Functional, Balance };

// A parametric surface piece with an exact area and a sampler that draws one
// point uniformly over the piece.
struct Patch {
  Region region = Region::Body;
  double area = 0.0;
  std::function<Vec3(Rng&)> sample;
};

struct Surface {
  std::vector<Patch> patches;

  double total_area() const {
    double a = 0;
    for (const Patch& p : patches) a += p.area;
    return a;
  }
};

// Patch constructors. All areas are exact; all samplers are uniform in area.
// Frustum side: lateral surface of a truncated cone around the z axis,
// radius r0 at z0 to r1 at z1, angular range [theta0, theta1].
Patch frustum_side(double r0, double r1, double z0, double z1, double theta0,
                   double theta1, Region region = Region::Body);
// Horizontal annulus at height z.
Patch disk(double r_inner, double r_outer, double z,
           Region region = Region::Body);
// Planar rectangle: origin corner plus two edge vectors.
Patch rect(const Vec3& corner, const Vec3& edge_u, const Vec3& edge_v,
           Region region = Region::Body);
// Torus segment: ring of radius `ring_r` and tube radius `tube_r` centered at
// `center`; the ring lies in the plane spanned by `u` and `v` (unit,
// orthogonal), sweeping ring angle [phi0, phi1].
Patch torus_segment(const Vec3& center, const Vec3& u, const Vec3& v,
                    double ring_r, double tube_r, double phi0, double phi1,
                    Region region = Region::Body);
// Spherical zone of the radius-r sphere at `center`, z-band [z0, z1] relative
// to the center (Archimedes: uniform z is uniform in area).
Patch sphere_zone(const Vec3& center, double r, double z0, double z1,
                  Region region = Region::Body);

// Axis-aligned box given min/max corners; all six faces share one region.
std::vector<Patch> box(const Vec3& lo, const Vec3& hi,
                       Region region = Region::Body);

struct SampledSurface {
  PointCloud cloud;
  std::vector<Region> regions;  // per point, provenance patch region
};

// n points over the surface, area-weighted uniform, deterministic per seed.
// Throws on zero total area or n < 3.
SampledSurface sample_surface_tagged(const Surface& surface, int n,
                                     uint64_t seed);
PointCloud sample_surface(const Surface& surface, int n, uint64_t seed);

}  // namespace bgs
