#include "flowkit/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "flowkit/image_ops.hpp"

namespace flowkit {

FeatureMap extract_features(const Image& image_at_level) {
  require_image(image_at_level, "extract_features");
  const int h = image_at_level.height, w = image_at_level.width;
  const int nc = image_at_level.channels;
  Grid dx, dy;
  spatial_gradients(image_at_level, dx, dy);

  FeatureMap fm;
  fm.values = Grid(h, w, 3 * nc, 0.0);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < nc; ++c) {
        fm.values.at(y, x, c) = image_at_level.at(y, x, c);
        fm.values.at(y, x, nc + c) = x + 1 < w ? std::abs(dx.at(y, x, c)) : 0.0;
        fm.values.at(y, x, 2 * nc + c) =
            y + 1 < h ? std::abs(dy.at(y, x, c)) : 0.0;
      }

  double sum = 0.0, sumsq = 0.0;
  for (double v : fm.values.data) {
    sum += v;
    sumsq += v * v;
  }
  const double n = static_cast<double>(fm.values.size());
  fm.mean = sum / n;
  fm.stddev = std::sqrt(std::max(0.0, sumsq / n - fm.mean * fm.mean));
  return fm;
}

FeatureMap normalize_features(const FeatureMap& features) {
  const double denom = std::max(features.stddev, 1e-6);
  FeatureMap out;
  out.values = Grid(features.values.height, features.values.width,
                    features.values.channels);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < features.values.size(); ++i)
    out.values.data[i] = (features.values.data[i] - features.mean) / denom;

  double sum = 0.0, sumsq = 0.0;
  for (double v : out.values.data) {
    sum += v;
    sumsq += v * v;
  }
  const double n = static_cast<double>(out.values.size());
  out.mean = sum / n;
  out.stddev = std::sqrt(std::max(0.0, sumsq / n - out.mean * out.mean));
  return out;
}

CostVolume cost_volume(const FeatureMap& f1, const FeatureMap& f2, int radius) {
  if (radius < 1) throw std::invalid_argument("cost_volume: radius must be >= 1");
  require_same_shape(f1.values, f2.values, "cost_volume");
  const int h = f1.values.height, w = f1.values.width, d = f1.values.channels;
  const int side = 2 * radius + 1;
  CostVolume cv;
  cv.radius = radius;
  cv.values = Grid(h, w, side * side, 0.0);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int v = -radius; v <= radius; ++v) {
        const int sy = y + v;
        for (int u = -radius; u <= radius; ++u) {
          const int sx = x + u;
          const int ch = (v + radius) * side + (u + radius);
          if (sx < 0 || sx >= w || sy < 0 || sy >= h) continue;
          double acc = 0.0;
          for (int k = 0; k < d; ++k)
            acc += f1.values.at(y, x, k) * f2.values.at(sy, sx, k);
          cv.values.at(y, x, ch) = acc;
        }
      }
    }
  }
  return cv;
}

FlowField argmax_flow(const CostVolume& volume) {
  const int h = volume.values.height, w = volume.values.width;
  const int r = volume.radius;
  const int side = 2 * r + 1;
  FlowField flow(h, w, 2, 0.0);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double best = -std::numeric_limits<double>::infinity();
      int best_u = 0, best_v = 0;
      bool first = true;
      for (int v = -r; v <= r; ++v) {
        for (int u = -r; u <= r; ++u) {
          const double c = volume.values.at(y, x, (v + r) * side + (u + r));
          bool better = first || c > best;
          if (!better && c == best) {
            const int na = std::abs(u) + std::abs(v);
            const int oa = std::abs(best_u) + std::abs(best_v);
            better = na < oa || (na == oa && (v < best_v ||
                                              (v == best_v && u < best_u)));
          }
          if (better) {
            best = c;
            best_u = u;
            best_v = v;
            first = false;
          }
        }
      }
      flow.at(y, x, 0) = best_u;
      flow.at(y, x, 1) = best_v;
    }
  }
  return flow;
}

}  // namespace flowkit
