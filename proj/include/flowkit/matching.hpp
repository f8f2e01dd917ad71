#pragma once

#include "flowkit/grid.hpp"

namespace flowkit {

struct FeatureMap {
  Grid values;        // H x W x d
  double mean = 0.0;  // over all spatial and feature entries
  double stddev = 0.0;
};

struct CostVolume {
  Grid values;  // H x W x (2r+1)^2, channel = (v + r) * (2r+1) + (u + r)
  int radius = 4;
};

// Fixed image-derived channels standing in for a learned pyramid:
// the color channels plus per-channel |d/dx| and |d/dy|, gradient channels
// zero-padded back to full shape.
FeatureMap extract_features(const Image& image_at_level);

// (x - mean) / max(stddev, 1e-6), statistics taken jointly over every
// entry (population variance).
FeatureMap normalize_features(const FeatureMap& features);

// C(x, y, u, v) = sum_d f1(x, y, d) * f2(x+u, y+v, d); out-of-bounds shifted
// samples contribute 0. Inputs are expected to be normalized.
CostVolume cost_volume(const FeatureMap& f1, const FeatureMap& f2, int radius);

// Per-pixel displacement maximizing the cost; ties break toward the smallest
// |u| + |v|, then smallest v, then smallest u.
FlowField argmax_flow(const CostVolume& volume);

}  // namespace flowkit
