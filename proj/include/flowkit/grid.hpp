#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace flowkit {

// Dense H x W x C grid of doubles, row-major with channels interleaved:
// index(y, x, c) = (y * width + x) * channels + c.
//
// The same container backs the three domain kinds:
//   Image     - 1 or 3 channels, photometric values in [-1, 1]
//   FlowField - 2 channels, (u = horizontal, v = vertical) displacement in px
//   Mask      - 1 channel in [0, 1]; 1 = usable, 0 = excluded
struct Grid {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<double> data;

  Grid() = default;
  Grid(int h, int w, int c, double fill = 0.0)
      : height(h), width(w), channels(c) {
    if (h <= 0 || w <= 0 || c <= 0)
      throw std::invalid_argument("Grid: dimensions must be positive (" +
                                  std::to_string(h) + "x" + std::to_string(w) +
                                  "x" + std::to_string(c) + ")");
    data.assign(static_cast<std::size_t>(h) * w * c, fill);
  }

  double& at(int y, int x, int c) {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  double at(int y, int x, int c) const {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }

  std::size_t size() const { return data.size(); }

  bool same_shape(const Grid& o) const {
    return height == o.height && width == o.width && channels == o.channels;
  }
  bool same_spatial_shape(const Grid& o) const {
    return height == o.height && width == o.width;
  }

  bool all_finite() const {
    for (double v : data)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

using Image = Grid;
using FlowField = Grid;
using Mask = Grid;

inline std::string shape_string(const Grid& g) {
  return std::to_string(g.height) + "x" + std::to_string(g.width) + "x" +
         std::to_string(g.channels);
}

inline void require_same_shape(const Grid& a, const Grid& b,
                               const char* what) {
  if (!a.same_shape(b))
    throw std::invalid_argument(std::string(what) + ": shape mismatch " +
                                shape_string(a) + " vs " + shape_string(b));
}

inline void require_same_spatial_shape(const Grid& a, const Grid& b,
                                       const char* what) {
  if (!a.same_spatial_shape(b))
    throw std::invalid_argument(std::string(what) +
                                ": spatial shape mismatch " + shape_string(a) +
                                " vs " + shape_string(b));
}

inline void require_flow(const Grid& g, const char* what) {
  if (g.channels != 2)
    throw std::invalid_argument(std::string(what) +
                                ": expected a 2-channel flow field, got " +
                                shape_string(g));
}

inline void require_mask(const Grid& g, const char* what) {
  if (g.channels != 1)
    throw std::invalid_argument(std::string(what) +
                                ": expected a 1-channel mask, got " +
                                shape_string(g));
}

inline void require_image(const Grid& g, const char* what) {
  if (g.channels != 1 && g.channels != 3)
    throw std::invalid_argument(std::string(what) +
                                ": expected a 1- or 3-channel image, got " +
                                shape_string(g));
}

}  // namespace flowkit
