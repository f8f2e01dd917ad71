#pragma once

#include "flowkit/grid.hpp"

namespace flowkit {

struct SmoothnessConfig {
  int order = 1;          // k in {1, 2}
  double lambda = 150.0;  // edge weight
  int level = 2;          // pyramid level where the loss applies
  double weight = 2.0;    // w_smooth; 2 pairs with k=1, 4 with k=2

  void validate() const;
};

// Published pairing of w_smooth with the smoothness order.
double default_smoothness_weight(int order);

// wx = exp(-(lambda / channels) * sum_c |dI_c/dx|), analogously wy.
// Shapes follow the forward-difference shapes: wx is H x (W-1), wy (H-1) x W.
void edge_weights(const Image& image, double lambda, Grid& wx, Grid& wy);

// Edge-aware k-th order smoothness of the flow at its native resolution.
// image_full is the full-resolution frame; it is box-downsampled
// config.level times and must then match the flow's spatial shape.
// Second-order differences use the [1, -2, 1] stencil with the edge weight
// sampled at the center position; the mean runs over positions where the
// stencil fits entirely, per axis, over both flow channels.
double smoothness_loss(const FlowField& flow_at_level, const Image& image_full,
                       const SmoothnessConfig& config,
                       FlowField* grad_flow = nullptr);

// Same loss with the image already at the flow's resolution.
double smoothness_loss_at_resolution(const FlowField& flow,
                                     const Image& image_at_level,
                                     const SmoothnessConfig& config,
                                     FlowField* grad_flow = nullptr);

}  // namespace flowkit
