#pragma once

#include <cstdint>
#include <vector>

namespace bgs {

struct KMeansResult {
  std::vector<int> assignment;          // per row, cluster id in [0,k)
  std::vector<std::vector<double>> centers;
  double inertia = 0;                   // sum of squared distances to centers
  int iterations = 0;
};

// Lloyd's algorithm with seeded farthest-point initialization and a few
// seeded restarts (best inertia wins). Fully deterministic per seed; ties
// break toward lower indices. Rows are flat, row-major, `dim` wide.
KMeansResult kmeans(const std::vector<double>& rows, int n, int dim, int k,
                    uint64_t seed, int max_iters = 100, int restarts = 3);

}  // namespace bgs
