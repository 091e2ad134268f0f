#pragma once

#include <optional>
#include <string>

#include "geom.hpp"

namespace bgs {

struct PlyData {
  PointCloud cloud;
  std::optional<SaliencyMap> saliency;
  std::optional<ContactLabels> labels;
};

struct PlySaveOptions {
  bool binary = true;
  // Adds red/green/blue vertex properties: saliency mapped through a linear
  // blue-to-red colormap (r = 255*s, g = 0, b = 255*(1-s)). Requires saliency.
  bool with_colors = false;
};

// Vertex properties understood: x, y, z (float32, required), saliency
// (float32, optional), label (uchar, optional), red/green/blue (uchar,
// ignored on load). Other scalar properties are skipped; property lists and
// non-vertex elements are rejected. Formats: ascii 1.0 and
// binary_little_endian 1.0.
PlyData load_ply(const std::string& path);
void save_ply(const std::string& path, const PlyData& data,
              const PlySaveOptions& options = {});

}  // namespace bgs
