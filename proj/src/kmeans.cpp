#include "kmeans.hpp"

#include <cmath>
#include <limits>

#include "error.hpp"
#include "rng.hpp"

namespace bgs {

namespace {

double sq_dist(const double* a, const double* b, int dim) {
  double d = 0;
  for (int j = 0; j < dim; ++j) {
    double t = a[j] - b[j];
    d += t * t;
  }
  return d;
}

KMeansResult run_once(const std::vector<double>& rows, int n, int dim, int k,
                      int first_center, int max_iters) {
  KMeansResult r;
  r.centers.assign(static_cast<size_t>(k), std::vector<double>(static_cast<size_t>(dim), 0.0));

  // Farthest-point seeding from the given start row.
  std::vector<int> chosen{first_center};
  while (static_cast<int>(chosen.size()) < k) {
    int best = -1;
    double best_d = -1;
    for (int i = 0; i < n; ++i) {
      double nearest = std::numeric_limits<double>::infinity();
      for (int c : chosen)
        nearest = std::min(nearest, sq_dist(&rows[static_cast<size_t>(i) * dim],
                                            &rows[static_cast<size_t>(c) * dim], dim));
      if (nearest > best_d) {
        best_d = nearest;
        best = i;
      }
    }
    chosen.push_back(best);
  }
  for (int c = 0; c < k; ++c)
    for (int j = 0; j < dim; ++j)
      r.centers[static_cast<size_t>(c)][static_cast<size_t>(j)] =
          rows[static_cast<size_t>(chosen[static_cast<size_t>(c)]) * dim + j];

  r.assignment.assign(static_cast<size_t>(n), -1);
  for (int iter = 0; iter < max_iters; ++iter) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        double d = sq_dist(&rows[static_cast<size_t>(i) * dim],
                           r.centers[static_cast<size_t>(c)].data(), dim);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (r.assignment[static_cast<size_t>(i)] != best) {
        r.assignment[static_cast<size_t>(i)] = best;
        changed = true;
      }
    }
    r.iterations = iter + 1;
    if (!changed) break;

    std::vector<int> counts(static_cast<size_t>(k), 0);
    for (auto& c : r.centers) std::fill(c.begin(), c.end(), 0.0);
    for (int i = 0; i < n; ++i) {
      int c = r.assignment[static_cast<size_t>(i)];
      ++counts[static_cast<size_t>(c)];
      for (int j = 0; j < dim; ++j)
        r.centers[static_cast<size_t>(c)][static_cast<size_t>(j)] +=
            rows[static_cast<size_t>(i) * dim + j];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<size_t>(c)] > 0) {
        for (int j = 0; j < dim; ++j)
          r.centers[static_cast<size_t>(c)][static_cast<size_t>(j)] /= counts[static_cast<size_t>(c)];
      } else {
        // Re-seed an empty cluster at the point farthest from its center.
        int far = 0;
        double far_d = -1;
        for (int i = 0; i < n; ++i) {
          int a = r.assignment[static_cast<size_t>(i)];
          double d = sq_dist(&rows[static_cast<size_t>(i) * dim],
                             r.centers[static_cast<size_t>(a)].data(), dim);
          if (d > far_d) {
            far_d = d;
            far = i;
          }
        }
        for (int j = 0; j < dim; ++j)
          r.centers[static_cast<size_t>(c)][static_cast<size_t>(j)] =
              rows[static_cast<size_t>(far) * dim + j];
      }
    }
  }

  r.inertia = 0;
  for (int i = 0; i < n; ++i)
    r.inertia += sq_dist(&rows[static_cast<size_t>(i) * dim],
                         r.centers[static_cast<size_t>(r.assignment[static_cast<size_t>(i)])].data(),
                         dim);
  return r;
}

}  // namespace

KMeansResult kmeans(const std::vector<double>& rows, int n, int dim, int k,
                    uint64_t seed, int max_iters, int restarts) {
  if (n < k) throw_data("kmeans: fewer rows than clusters");
  if (static_cast<int>(rows.size()) != n * dim) throw_data("kmeans: bad row buffer");

  int distinct = 0;
  for (int i = 0; i < n && distinct < k; ++i) {
    bool dup = false;
    for (int j = 0; j < i && !dup; ++j)
      dup = sq_dist(&rows[static_cast<size_t>(i) * dim],
                    &rows[static_cast<size_t>(j) * dim], dim) == 0.0;
    if (!dup) ++distinct;
  }
  if (distinct < k) throw_data("kmeans: fewer distinct rows than clusters");

  Rng rng(Rng::mix(seed, 0x6b6d65616e73ULL));
  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    KMeansResult cur = run_once(rows, n, dim, k, rng.index(n), max_iters);
    if (cur.inertia < best.inertia) best = std::move(cur);
  }
  return best;
}

}  // namespace bgs
