#pragma once

#include "flowkit/grid.hpp"
#include "flowkit/occlusion.hpp"
#include "flowkit/photometric.hpp"
#include "flowkit/smoothness.hpp"

namespace flowkit {

struct SelfsupSchedule {
  double start_fraction = 0.5;  // w_self is 0 before this progress
  double ramp_fraction = 0.1;   // linear ramp to the terminal weight
};

struct ObjectiveConfig {
  PhotometricConfig photometric;
  OcclusionConfig occlusion;
  SmoothnessConfig smoothness;
  double w_photo = 1.0;  // 1 with Census; 2 when comparing the other losses
  double w_self = 0.3;   // terminal self-supervision weight
  SelfsupSchedule selfsup_ramp;
  int selfsup_crop = 64;
  bool selfsup_enabled = false;

  void validate() const;
  void validate_for_image(int height, int width) const;
};

// Objective defaults keyed to the loss kind and smoothness order.
ObjectiveConfig make_objective(PhotometricKind kind, int smoothness_order);

// 0 before start_fraction, linear to w_self over ramp_fraction, then constant.
double w_self_at(const ObjectiveConfig& config, double progress);

struct SolverConfig {
  int levels = 4;  // pyramid depth; flow is estimated down to quarter resolution
  int iterations_per_level = 300;
  double step_size = 0.04;  // per-pair Adam step; the usual 1e-4 training rate
                            // is far too small for direct optimization
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  unsigned long seed = 0;  // recorded for reproducibility; the solve itself
                           // is deterministic

  void validate() const;
};

struct LossTerms {
  double total = 0.0;
  double photo = 0.0;
  double smooth = 0.0;
  double self = 0.0;
};

// Teacher-derived supervision for one resolution. Labels and masks are
// materialized constants: perturbing the teacher afterwards cannot change
// them, and no gradient flows into them.
struct SelfsupLabels {
  FlowField labels_forward;
  FlowField labels_backward;
  Mask mask_forward;
  Mask mask_backward;
};

struct FlowEstimate {
  FlowField forward;
  FlowField backward;
  Mask mask_forward;
  Mask mask_backward;
  double final_loss = 0.0;     // best full-frame objective at the native level
  LossTerms per_term_losses;   // photo/smooth from the full-frame solve,
                               // self from the student stage (0 if disabled)
};

// Crops the teacher flow by `crop` pixels per edge, resizes to the target
// shape with value rescaling, and masks labels by the teacher's
// forward-backward consistency on the cropped, rescaled pair.
void selfsup_labels(const FlowField& teacher_forward,
                    const FlowField& teacher_backward, int crop,
                    int target_height, int target_width,
                    const OcclusionConfig& occlusion, FlowField& labels,
                    Mask& label_mask);

// Charbonnier distance to the labels, averaged where the teacher is
// consistent and the student is not. Both masks are constants w.r.t. the
// student flow. grad_student receives dLoss/d(student_forward).
double selfsup_loss(const FlowField& student_forward,
                    const FlowField& student_backward, const FlowField& labels,
                    const Mask& label_mask, const ObjectiveConfig& config,
                    FlowField* grad_student = nullptr);

// Weighted sum of the objective terms, both directions averaged. All inputs
// must share one spatial shape; smoothness is evaluated at that shape with
// edge weights from the matching frame. Occlusion masks are recomputed from
// the current flows but contribute no gradient. When `selfsup` is given the
// flows are interpreted as student flows and the self term is added with
// weight w_self(progress).
LossTerms total_loss(const Image& image1, const Image& image2,
                     const FlowField& forward, const FlowField& backward,
                     const ObjectiveConfig& config, double progress,
                     const SelfsupLabels* selfsup = nullptr,
                     FlowField* grad_forward = nullptr,
                     FlowField* grad_backward = nullptr);

// Coarse-to-fine direct minimization of the composite objective for one
// image pair. Both directions are initialized at the coarsest level from
// the argmax of normalized cost volumes and refined with Adam; each level
// returns its best-loss iterate. Flow is estimated down to
// min(2, levels - 1) and resized (values rescaled) back to full resolution.
// With self-supervision enabled, the converged full-frame flow becomes the
// frozen teacher and a student flow is re-optimized on the crop-resized
// pair during the second part of the schedule.
FlowEstimate estimate_flow(const Image& image1, const Image& image2,
                           const ObjectiveConfig& objective,
                           const SolverConfig& solver);

}  // namespace flowkit
