#pragma once

#include "flowkit/grid.hpp"
#include "flowkit/occlusion.hpp"
#include "flowkit/photometric.hpp"
#include "flowkit/smoothness.hpp"

// Sequential scalar implementations of every kernel, written as literal
// per-pixel loops. They are the ground truth the parallel kernels are tested
// against and the baseline the benchmark target compares with; nothing here
// shares code with the main implementations.
namespace flowkit::reference {

Grid warp_clamp(const Grid& source, const FlowField& flow);
Grid warp_zero(const Grid& source, const FlowField& flow);
Grid splat(const Grid& weights, const FlowField& flow);
Grid downsample2x(const Grid& image);
Grid second_difference_x(const Grid& grid);
Grid second_difference_y(const Grid& grid);
double masked_mean(const Grid& values, const Mask& mask);

double census_loss(const Image& image1, const Image& warped2, const Mask& mask,
                   const PhotometricConfig& config);
double ssim_loss(const Image& image1, const Image& warped2, const Mask& mask,
                 const PhotometricConfig& config);
double smoothness_loss(const FlowField& flow, const Image& image_at_level,
                       const SmoothnessConfig& config);

Grid cost_volume(const Grid& f1, const Grid& f2, int radius);
FlowField argmax_flow(const Grid& volume, int radius);
Grid range_map(const FlowField& backward);
Mask fb_consistency_mask(const FlowField& forward, const FlowField& backward,
                         const OcclusionConfig& config);

Grid endpoint_error(const FlowField& pred, const FlowField& truth);
double error_rate(const FlowField& pred, const FlowField& truth,
                  const Mask& valid);

}  // namespace flowkit::reference
