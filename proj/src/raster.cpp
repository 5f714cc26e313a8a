#include "symgen/raster.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace symgen {
namespace {

struct Edge {
  double x0, y0, slope, ymin, ymax;
  int dir;
};

struct Crossing {
  double x;
  int dir;
};

}  // namespace

Plane rasterize(const Outline& outline, int height, int width) {
  Plane cov = Plane::Zero(height, width);
  if (height <= 0 || width <= 0) return cov;

  std::vector<Edge> edges;
  double ylo = 1e300, yhi = -1e300;
  for (const auto& c : outline.contours) {
    const Eigen::Index n = c.cols();
    if (n < 3) continue;
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index j = (i + 1) % n;
      const double x0 = c(0, i), y0 = c(1, i), x1 = c(0, j), y1 = c(1, j);
      if (y0 == y1) continue;
      Edge e;
      e.dir = y1 > y0 ? 1 : -1;
      e.x0 = x0;
      e.y0 = y0;
      e.slope = (x1 - x0) / (y1 - y0);
      e.ymin = std::min(y0, y1);
      e.ymax = std::max(y0, y1);
      ylo = std::min(ylo, e.ymin);
      yhi = std::max(yhi, e.ymax);
      edges.push_back(e);
    }
  }
  if (edges.empty()) return cov;
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) { return a.ymin < b.ymin; });

  const int row_begin = std::max(0, static_cast<int>(std::floor(ylo)));
  const int row_end = std::min(height, static_cast<int>(std::ceil(yhi)) + 1);
  const int sub_width = width * kSupersample;
  std::vector<int> counts(static_cast<std::size_t>(width));
  std::vector<Crossing> xs;
  constexpr float kNorm = 1.0f / (kSupersample * kSupersample);

  for (int row = row_begin; row < row_end; ++row) {
    std::fill(counts.begin(), counts.end(), 0);
    bool any = false;
    for (int s = 0; s < kSupersample; ++s) {
      const double sy = row + (s + 0.5) / kSupersample;
      xs.clear();
      for (std::size_t k = 0; k < edges.size(); ++k) {
        const Edge& e = edges[k];
        if (e.ymin > sy) break;
        if (sy >= e.ymax) continue;
        xs.push_back({e.x0 + (sy - e.y0) * e.slope, e.dir});
      }
      if (xs.size() < 2) continue;
      std::sort(xs.begin(), xs.end(), [](const Crossing& a, const Crossing& b) {
        return a.x < b.x || (a.x == b.x && a.dir < b.dir);
      });
      int winding = 0;
      for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
        winding += xs[k].dir;
        if (winding == 0) continue;
        // Subsample j is centred at (j + 0.5) / kSupersample.
        const int j0 = std::max(0, static_cast<int>(std::ceil(xs[k].x * kSupersample - 0.5)));
        const int j1 = std::min(sub_width, static_cast<int>(std::ceil(xs[k + 1].x * kSupersample - 0.5)));
        for (int j = j0; j < j1; ++j) ++counts[static_cast<std::size_t>(j / kSupersample)];
        any = any || j1 > j0;
      }
    }
    if (!any) continue;
    for (int x = 0; x < width; ++x) cov(row, x) = static_cast<float>(counts[static_cast<std::size_t>(x)]) * kNorm;
  }
  return cov;
}

Mask8 to_mask8(const Plane& coverage) {
  return (coverage.cwiseMax(0.0f).cwiseMin(1.0f) * 255.0f + 0.5f).floor().cast<std::uint8_t>();
}

}  // namespace symgen
