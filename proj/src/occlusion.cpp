#include "flowkit/occlusion.hpp"

#include <stdexcept>

#include "flowkit/image_ops.hpp"

namespace flowkit {

void OcclusionConfig::validate() const {
  if (alpha1 < 0.0 || alpha2 < 0.0)
    throw std::invalid_argument("OcclusionConfig: alpha1, alpha2 must be >= 0");
  if (range_threshold <= 0.0)
    throw std::invalid_argument("OcclusionConfig: range_threshold must be > 0");
  if (activation_fraction < 0.0 || activation_fraction > 1.0)
    throw std::invalid_argument(
        "OcclusionConfig: activation_fraction must be in [0, 1]");
}

OcclusionMethod occlusion_method_from_string(const std::string& name) {
  if (name == "none") return OcclusionMethod::None;
  if (name == "range") return OcclusionMethod::RangeMap;
  if (name == "fb") return OcclusionMethod::ForwardBackward;
  throw std::invalid_argument("unknown occlusion method: " + name);
}

Mask fb_consistency_mask(const FlowField& forward, const FlowField& backward,
                         const OcclusionConfig& config) {
  config.validate();
  require_flow(forward, "fb_consistency_mask");
  require_flow(backward, "fb_consistency_mask");
  require_same_shape(forward, backward, "fb_consistency_mask");
  const FlowField back_warped = warp(backward, forward, Border::Clamp);
  const int h = forward.height, w = forward.width;
  Mask mask(h, w, 1, 0.0);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double fu = forward.at(y, x, 0), fv = forward.at(y, x, 1);
      const double bu = back_warped.at(y, x, 0), bv = back_warped.at(y, x, 1);
      const double residual = (fu + bu) * (fu + bu) + (fv + bv) * (fv + bv);
      const double bound =
          config.alpha1 * (fu * fu + fv * fv + bu * bu + bv * bv) +
          config.alpha2;
      mask.at(y, x, 0) = residual < bound ? 1.0 : 0.0;
    }
  }
  return mask;
}

Grid range_map(const FlowField& backward) {
  require_flow(backward, "range_map");
  const Grid ones(backward.height, backward.width, 1, 1.0);
  return splat(ones, backward);
}

Mask range_occlusion_mask(const FlowField& backward,
                          const OcclusionConfig& config) {
  config.validate();
  Grid range = range_map(backward);
  Mask mask(range.height, range.width, 1, 0.0);
  // inclusive threshold with one-ulp-scale slack: a constant sub-pixel flow
  // accumulates (1-f)+f per pixel, which can round to just under 1
  const double threshold = config.range_threshold - 1e-9;
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < range.size(); ++i)
    mask.data[i] = range.data[i] >= threshold ? 1.0 : 0.0;
  return mask;
}

Mask invalid_mask(const FlowField& flow) {
  require_flow(flow, "invalid_mask");
  const int h = flow.height, w = flow.width;
  Mask mask(h, w, 1, 0.0);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double tx = x + flow.at(y, x, 0);
      const double ty = y + flow.at(y, x, 1);
      mask.at(y, x, 0) =
          (tx >= 0.0 && tx <= w - 1 && ty >= 0.0 && ty <= h - 1) ? 1.0 : 0.0;
    }
  return mask;
}

Mask combined_mask(const FlowField& forward, const FlowField& backward,
                   const OcclusionConfig& config, double progress) {
  config.validate();
  if (progress < 0.0 || progress > 1.0)
    throw std::invalid_argument("combined_mask: progress must be in [0, 1]");
  Mask mask = invalid_mask(forward);
  Mask occ;
  switch (config.method) {
    case OcclusionMethod::None:
      return mask;
    case OcclusionMethod::RangeMap:
      occ = range_occlusion_mask(backward, config);
      break;
    case OcclusionMethod::ForwardBackward:
      if (progress < config.activation_fraction) return mask;
      occ = fb_consistency_mask(forward, backward, config);
      break;
  }
  for (std::size_t i = 0; i < mask.size(); ++i) mask.data[i] *= occ.data[i];
  return mask;
}

}  // namespace flowkit
