#pragma once

#include "flowkit/grid.hpp"

namespace flowkit {

struct EvalResult {
  double epe_all = 0.0;
  double epe_noc = 0.0;
  double er_all = 0.0;
  double er_noc = 0.0;
  long pixel_count = 0;
};

// Per-pixel Euclidean norm of (pred - truth); mean taken over valid pixels.
// Throws when the valid set is empty.
Grid endpoint_error(const FlowField& pred, const FlowField& truth,
                    const Mask& valid, double* mean = nullptr);

// KITTI outlier convention: erroneous iff EPE > 3 px and EPE > 5% of the
// true vector length.
double error_rate(const FlowField& pred, const FlowField& truth,
                  const Mask& valid);

// noc, when non-null, restricts the *_noc fields to valid & noc pixels;
// otherwise they repeat the all-pixel numbers.
EvalResult evaluate_flow(const FlowField& pred, const FlowField& truth,
                         const Mask& valid, const Mask* noc = nullptr);

}  // namespace flowkit
