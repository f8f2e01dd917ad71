#pragma once

#include "flowkit/grid.hpp"

namespace flowkit {

enum class OcclusionMethod { None, RangeMap, ForwardBackward };

struct OcclusionConfig {
  OcclusionMethod method = OcclusionMethod::RangeMap;
  double alpha1 = 0.01;
  double alpha2 = 0.5;
  double range_threshold = 1.0;
  // fraction of solver iterations after which FB masking activates
  double activation_fraction = 0.2;

  void validate() const;
};

OcclusionMethod occlusion_method_from_string(const std::string& name);

// Sundaram-style check: visible where
//   |f + w(b, f)|^2 < alpha1 * (|f|^2 + |w(b, f)|^2) + alpha2.
// For consistent flows the back-projected backward flow is the negated
// forward flow, so the residual uses f + b_warped.
Mask fb_consistency_mask(const FlowField& forward, const FlowField& backward,
                         const OcclusionConfig& config);

// Soft histogram of backward-flow endpoints: splat of an all-ones grid.
Grid range_map(const FlowField& backward);

// 1 where range_map >= range_threshold (inclusive, so the identity flow is
// fully visible), else 0.
Mask range_occlusion_mask(const FlowField& backward,
                          const OcclusionConfig& config);

// 1 where (x + u, y + v) lands inside [0, W-1] x [0, H-1].
Mask invalid_mask(const FlowField& flow);

// Product of invalid_mask(forward) with the configured occlusion estimate.
// ForwardBackward contributes all-ones until progress >= activation_fraction.
// The result is a constant w.r.t. the flow: no gradient passes through it.
Mask combined_mask(const FlowField& forward, const FlowField& backward,
                   const OcclusionConfig& config, double progress);

}  // namespace flowkit
