#pragma once

#include "flowkit/grid.hpp"

namespace flowkit {

enum class PhotometricKind { L1, Charbonnier, SSIM, Census };

struct PhotometricConfig {
  PhotometricKind kind = PhotometricKind::Census;
  double charbonnier_alpha = 0.5;
  double charbonnier_eps = 0.001;
  double l1_eps = 1e-6;
  int census_window = 7;
  int ssim_window = 3;
  double ssim_c1 = 0.01 * 0.01;
  double ssim_c2 = 0.03 * 0.03;

  void validate() const;
};

PhotometricKind photometric_kind_from_string(const std::string& name);

// sum(values * mask) / (sum(mask) + 1e-16). The mask carries no gradient.
double masked_mean(const Grid& values, const Mask& mask);

// Elementwise robust penalty: (d^2 + eps^2)^alpha for Charbonnier,
// |d + eps'| for L1. Other kinds are structural and rejected here.
Grid robust_penalty(const Grid& diff, const PhotometricConfig& config);

// Census loss between image1 and an already-warped image2. Descriptors are
// soft-sign neighbor-center differences d/sqrt(0.0081 + d^2) on grayscale;
// descriptor distance sums q^2/(0.1 + q^2) over the window; per-pixel
// distances pass through the Charbonnier penalty and an occlusion-masked
// average. The mask is eroded by the window radius so no descriptor reads
// outside the frame. grad_warped, when non-null, receives dLoss/dwarped2.
double census_loss(const Image& image1, const Image& warped2, const Mask& mask,
                   const PhotometricConfig& config, Grid* grad_warped = nullptr);

// Mean over channels of per-pixel SSIM with box window statistics;
// loss = masked_mean of (1 - SSIM) / 2 clamped to [0, 1], with the mask
// eroded by the window radius.
double ssim_loss(const Image& image1, const Image& warped2, const Mask& mask,
                 const PhotometricConfig& config, Grid* grad_warped = nullptr);

// Warps image2 by flow (clamped borders), dispatches on kind, reduces with
// masked_mean. grad_flow, when non-null, receives dLoss/dflow.
double photometric_loss(const Image& image1, const Image& image2,
                        const FlowField& flow, const Mask& mask,
                        const PhotometricConfig& config,
                        FlowField* grad_flow = nullptr);

}  // namespace flowkit
