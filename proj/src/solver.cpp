#include "flowkit/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "flowkit/image_ops.hpp"
#include "flowkit/matching.hpp"

namespace flowkit {

namespace {

constexpr int kCostVolumeRadius = 4;
constexpr double kDenomStabilizer = 1e-16;

// Matching score for the argmax initializer. The raw inner-product volume
// is biased toward large-norm feature vectors (z . z' beats z . z when
// |z'| > |z|), so complete it to the SSD-equivalent score C - |z'|^2 / 2,
// push out-of-bounds shifts to -inf, and aggregate 3x3 blocks.
CostVolume matching_scores(const CostVolume& cv, const FeatureMap& f2) {
  const int h = cv.values.height, w = cv.values.width;
  const int r = cv.radius, side = 2 * r + 1;

  Grid norm2(h, w, 1, 0.0);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double s = 0.0;
      for (int d = 0; d < f2.values.channels; ++d) {
        const double z = f2.values.at(y, x, d);
        s += z * z;
      }
      norm2.at(y, x, 0) = s;
    }

  Grid ssd(h, w, side * side, 0.0);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int v = -r; v <= r; ++v)
        for (int u = -r; u <= r; ++u) {
          const int ch = (v + r) * side + (u + r);
          const int sy = y + v, sx = x + u;
          ssd.at(y, x, ch) =
              (sy < 0 || sy >= h || sx < 0 || sx >= w)
                  ? -1e30
                  : cv.values.at(y, x, ch) - 0.5 * norm2.at(sy, sx, 0);
        }

  CostVolume out;
  out.radius = r;
  out.values = Grid(h, w, side * side, 0.0);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int ch = 0; ch < side * side; ++ch) {
        double s = 0.0;
        int n = 0;
        for (int oy = -1; oy <= 1; ++oy)
          for (int ox = -1; ox <= 1; ++ox) {
            const int sy = y + oy, sx = x + ox;
            if (sy < 0 || sy >= h || sx < 0 || sx >= w) continue;
            s += ssd.at(sy, sx, ch);
            ++n;
          }
        out.values.at(y, x, ch) = s / n;
      }
  return out;
}

// 3x3 per-channel median; knocks single-pixel outliers out of the argmax
// initialization before refinement starts.
FlowField median3x3(const FlowField& flow) {
  FlowField out = flow;
  std::vector<double> vals;
  vals.reserve(9);
  for (int y = 0; y < flow.height; ++y)
    for (int x = 0; x < flow.width; ++x)
      for (int c = 0; c < 2; ++c) {
        vals.clear();
        for (int oy = -1; oy <= 1; ++oy)
          for (int ox = -1; ox <= 1; ++ox) {
            const int sy = y + oy, sx = x + ox;
            if (sy < 0 || sy >= flow.height || sx < 0 || sx >= flow.width)
              continue;
            vals.push_back(flow.at(sy, sx, c));
          }
        std::nth_element(vals.begin(), vals.begin() + vals.size() / 2,
                         vals.end());
        out.at(y, x, c) = vals[vals.size() / 2];
      }
  return out;
}

Grid crop_grid(const Grid& g, int crop) {
  if (2 * crop >= g.height || 2 * crop >= g.width)
    throw std::invalid_argument("crop of " + std::to_string(crop) +
                                " px per edge leaves no pixels in " +
                                shape_string(g));
  const int h = g.height - 2 * crop, w = g.width - 2 * crop;
  Grid out(h, w, g.channels);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < g.channels; ++c)
        out.at(y, x, c) = g.at(y + crop, x + crop, c);
  return out;
}

inline double charb(double d, const PhotometricConfig& c) {
  return std::pow(d * d + c.charbonnier_eps * c.charbonnier_eps,
                  c.charbonnier_alpha);
}

inline double charb_deriv(double d, const PhotometricConfig& c) {
  const double s = d * d + c.charbonnier_eps * c.charbonnier_eps;
  return 2.0 * c.charbonnier_alpha * d * std::pow(s, c.charbonnier_alpha - 1.0);
}

}  // namespace

void ObjectiveConfig::validate() const {
  photometric.validate();
  occlusion.validate();
  smoothness.validate();
  if (w_photo < 0.0 || w_self < 0.0)
    throw std::invalid_argument("ObjectiveConfig: weights must be >= 0");
  if (selfsup_ramp.start_fraction < 0.0 || selfsup_ramp.start_fraction > 1.0 ||
      selfsup_ramp.ramp_fraction < 0.0)
    throw std::invalid_argument("ObjectiveConfig: bad self-supervision ramp");
  if (selfsup_crop < 0)
    throw std::invalid_argument("ObjectiveConfig: selfsup_crop must be >= 0");
}

void ObjectiveConfig::validate_for_image(int height, int width) const {
  validate();
  if (selfsup_enabled && 2 * selfsup_crop >= std::min(height, width))
    throw std::invalid_argument(
        "ObjectiveConfig: selfsup_crop must be < half the smaller dimension");
}

ObjectiveConfig make_objective(PhotometricKind kind, int smoothness_order) {
  ObjectiveConfig cfg;
  cfg.photometric.kind = kind;
  cfg.w_photo = kind == PhotometricKind::Census ? 1.0 : 2.0;
  cfg.smoothness.order = smoothness_order;
  cfg.smoothness.weight = default_smoothness_weight(smoothness_order);
  return cfg;
}

double w_self_at(const ObjectiveConfig& config, double progress) {
  const double start = config.selfsup_ramp.start_fraction;
  const double ramp = config.selfsup_ramp.ramp_fraction;
  if (progress < start) return 0.0;
  if (ramp <= 0.0 || progress >= start + ramp) return config.w_self;
  return config.w_self * (progress - start) / ramp;
}

void SolverConfig::validate() const {
  if (levels < 1) throw std::invalid_argument("SolverConfig: levels must be >= 1");
  if (iterations_per_level < 1)
    throw std::invalid_argument("SolverConfig: iterations_per_level must be >= 1");
  if (step_size <= 0.0)
    throw std::invalid_argument("SolverConfig: step_size must be > 0");
}

void selfsup_labels(const FlowField& teacher_forward,
                    const FlowField& teacher_backward, int crop,
                    int target_height, int target_width,
                    const OcclusionConfig& occlusion, FlowField& labels,
                    Mask& label_mask) {
  require_flow(teacher_forward, "selfsup_labels");
  require_flow(teacher_backward, "selfsup_labels");
  require_same_shape(teacher_forward, teacher_backward, "selfsup_labels");
  if (crop < 0) throw std::invalid_argument("selfsup_labels: crop must be >= 0");
  if (teacher_forward.height - 2 * crop < 2 ||
      teacher_forward.width - 2 * crop < 2)
    throw std::invalid_argument(
        "selfsup_labels: crop too large for teacher flow " +
        shape_string(teacher_forward));
  FlowField f = crop_grid(teacher_forward, crop);
  FlowField b = crop_grid(teacher_backward, crop);
  labels = resize_bilinear(f, target_height, target_width, true);
  FlowField labels_b = resize_bilinear(b, target_height, target_width, true);
  label_mask = fb_consistency_mask(labels, labels_b, occlusion);
}

double selfsup_loss(const FlowField& student_forward,
                    const FlowField& student_backward, const FlowField& labels,
                    const Mask& label_mask, const ObjectiveConfig& config,
                    FlowField* grad_student) {
  require_flow(student_forward, "selfsup_loss");
  require_same_shape(student_forward, student_backward, "selfsup_loss");
  require_same_shape(student_forward, labels, "selfsup_loss");
  require_same_spatial_shape(student_forward, label_mask, "selfsup_loss");
  const int h = student_forward.height, w = student_forward.width;

  // supervise only where the teacher is consistent and the student is not;
  // the student FB mask is a constant w.r.t. the student flow
  const Mask student_fb =
      fb_consistency_mask(student_forward, student_backward, config.occlusion);
  Mask active(h, w, 1, 0.0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      active.at(y, x, 0) =
          label_mask.at(y, x, 0) * (1.0 - student_fb.at(y, x, 0));

  std::vector<double> row_num(h, 0.0), row_den(h, 0.0);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    double num = 0.0, den = 0.0;
    for (int x = 0; x < w; ++x) {
      const double m = active.at(y, x, 0);
      const double vu =
          charb(student_forward.at(y, x, 0) - labels.at(y, x, 0),
                config.photometric);
      const double vv =
          charb(student_forward.at(y, x, 1) - labels.at(y, x, 1),
                config.photometric);
      num += 0.5 * (vu + vv) * m;
      den += m;
    }
    row_num[y] = num;
    row_den[y] = den;
  }
  double num = 0.0, den = 0.0;
  for (int y = 0; y < h; ++y) {
    num += row_num[y];
    den += row_den[y];
  }
  const double loss = num / (den + kDenomStabilizer);

  if (grad_student) {
    *grad_student = FlowField(h, w, 2, 0.0);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const double m = active.at(y, x, 0) / (den + kDenomStabilizer) * 0.5;
        for (int c = 0; c < 2; ++c)
          grad_student->at(y, x, c) =
              m * charb_deriv(student_forward.at(y, x, c) - labels.at(y, x, c),
                              config.photometric);
      }
  }
  return loss;
}

LossTerms total_loss(const Image& image1, const Image& image2,
                     const FlowField& forward, const FlowField& backward,
                     const ObjectiveConfig& config, double progress,
                     const SelfsupLabels* selfsup, FlowField* grad_forward,
                     FlowField* grad_backward) {
  config.validate();
  if (progress < 0.0 || progress > 1.0)
    throw std::invalid_argument("total_loss: progress must be in [0, 1]");
  require_same_shape(image1, image2, "total_loss");
  require_same_spatial_shape(image1, forward, "total_loss");
  require_same_shape(forward, backward, "total_loss");

  const Mask mask_f = combined_mask(forward, backward, config.occlusion, progress);
  const Mask mask_b = combined_mask(backward, forward, config.occlusion, progress);

  LossTerms terms;
  FlowField gf, gb, tmp;

  const double photo_f = photometric_loss(image1, image2, forward, mask_f,
                                          config.photometric,
                                          grad_forward ? &gf : nullptr);
  const double photo_b = photometric_loss(image2, image1, backward, mask_b,
                                          config.photometric,
                                          grad_backward ? &gb : nullptr);
  terms.photo = 0.5 * (photo_f + photo_b);
  if (grad_forward) {
    *grad_forward = FlowField(forward.height, forward.width, 2, 0.0);
    for (std::size_t i = 0; i < gf.size(); ++i)
      grad_forward->data[i] = 0.5 * config.w_photo * gf.data[i];
  }
  if (grad_backward) {
    *grad_backward = FlowField(forward.height, forward.width, 2, 0.0);
    for (std::size_t i = 0; i < gb.size(); ++i)
      grad_backward->data[i] = 0.5 * config.w_photo * gb.data[i];
  }

  const double smooth_f = smoothness_loss_at_resolution(
      forward, image1, config.smoothness, grad_forward ? &tmp : nullptr);
  if (grad_forward)
    for (std::size_t i = 0; i < tmp.size(); ++i)
      grad_forward->data[i] += 0.5 * config.smoothness.weight * tmp.data[i];
  const double smooth_b = smoothness_loss_at_resolution(
      backward, image2, config.smoothness, grad_backward ? &tmp : nullptr);
  if (grad_backward)
    for (std::size_t i = 0; i < tmp.size(); ++i)
      grad_backward->data[i] += 0.5 * config.smoothness.weight * tmp.data[i];
  terms.smooth = 0.5 * (smooth_f + smooth_b);

  const double wself = w_self_at(config, progress);
  if (selfsup) {
    const double self_f =
        selfsup_loss(forward, backward, selfsup->labels_forward,
                     selfsup->mask_forward, config,
                     grad_forward && wself > 0.0 ? &tmp : nullptr);
    if (grad_forward && wself > 0.0)
      for (std::size_t i = 0; i < tmp.size(); ++i)
        grad_forward->data[i] += 0.5 * wself * tmp.data[i];
    const double self_b =
        selfsup_loss(backward, forward, selfsup->labels_backward,
                     selfsup->mask_backward, config,
                     grad_backward && wself > 0.0 ? &tmp : nullptr);
    if (grad_backward && wself > 0.0)
      for (std::size_t i = 0; i < tmp.size(); ++i)
        grad_backward->data[i] += 0.5 * wself * tmp.data[i];
    terms.self = 0.5 * (self_f + self_b);
  }

  terms.total = config.w_photo * terms.photo +
                config.smoothness.weight * terms.smooth + wself * terms.self;
  return terms;
}

namespace {

struct AdamState {
  FlowField m, v;
  int t = 0;
  explicit AdamState(int h, int w) : m(h, w, 2, 0.0), v(h, w, 2, 0.0) {}
};

// Constant step for the first 80% of a level's iterations, then exponential
// decay by three decades so the iterate settles below Adam's oscillation.
double step_at(const SolverConfig& cfg, int it, int iters) {
  const double tail_start = 0.8 * iters;
  if (it < tail_start) return cfg.step_size;
  const double f = (it - tail_start) / std::max(1.0, iters - tail_start);
  return cfg.step_size * std::pow(10.0, -3.0 * f);
}

void adam_step(FlowField& x, const FlowField& g, AdamState& st,
               const SolverConfig& cfg, double step) {
  ++st.t;
  const double bc1 = 1.0 - std::pow(cfg.beta1, st.t);
  const double bc2 = 1.0 - std::pow(cfg.beta2, st.t);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < x.size(); ++i) {
    st.m.data[i] = cfg.beta1 * st.m.data[i] + (1.0 - cfg.beta1) * g.data[i];
    st.v.data[i] =
        cfg.beta2 * st.v.data[i] + (1.0 - cfg.beta2) * g.data[i] * g.data[i];
    const double mhat = st.m.data[i] / bc1;
    const double vhat = st.v.data[i] / bc2;
    x.data[i] -= step * mhat / (std::sqrt(vhat) + cfg.adam_eps);
  }
}

void check_finite_terms(const LossTerms& t, int level) {
  const char* bad = nullptr;
  if (!std::isfinite(t.photo)) bad = "photometric";
  else if (!std::isfinite(t.smooth)) bad = "smoothness";
  else if (!std::isfinite(t.self)) bad = "self-supervision";
  else if (!std::isfinite(t.total)) bad = "total";
  if (bad)
    throw std::runtime_error("estimate_flow: non-finite " + std::string(bad) +
                             " loss at pyramid level " + std::to_string(level));
}

struct SolveResult {
  FlowField forward, backward;  // at the native level
  LossTerms best_terms;
};

// Final-stage objective: the photometric term is imposed on the final
// output, i.e. on the full-resolution images through the bilinearly
// upsampled, value-rescaled flow, while smoothness stays at the native flow
// resolution. Masks come from the upsampled flows and stay gradient-free.
LossTerms final_objective(const Image& full1, const Image& full2,
                          const Image& native1, const Image& native2,
                          const FlowField& vf, const FlowField& vb,
                          const ObjectiveConfig& config, double progress,
                          const SelfsupLabels* selfsup, FlowField* grad_f,
                          FlowField* grad_b) {
  const int fh = full1.height, fw = full1.width;
  const int nh = vf.height, nw = vf.width;
  const FlowField vf_full = resize_bilinear(vf, fh, fw, true);
  const FlowField vb_full = resize_bilinear(vb, fh, fw, true);
  const Mask mask_f = combined_mask(vf_full, vb_full, config.occlusion, progress);
  const Mask mask_b = combined_mask(vb_full, vf_full, config.occlusion, progress);

  LossTerms terms;
  FlowField gfull, tmp;
  const double photo_f =
      photometric_loss(full1, full2, vf_full, mask_f, config.photometric,
                       grad_f ? &gfull : nullptr);
  if (grad_f) {
    *grad_f = resize_bilinear_vjp(gfull, nh, nw, true);
    for (double& g : grad_f->data) g *= 0.5 * config.w_photo;
  }
  const double photo_b =
      photometric_loss(full2, full1, vb_full, mask_b, config.photometric,
                       grad_b ? &gfull : nullptr);
  if (grad_b) {
    *grad_b = resize_bilinear_vjp(gfull, nh, nw, true);
    for (double& g : grad_b->data) g *= 0.5 * config.w_photo;
  }
  terms.photo = 0.5 * (photo_f + photo_b);

  const double smooth_f = smoothness_loss_at_resolution(
      vf, native1, config.smoothness, grad_f ? &tmp : nullptr);
  if (grad_f)
    for (std::size_t i = 0; i < tmp.size(); ++i)
      grad_f->data[i] += 0.5 * config.smoothness.weight * tmp.data[i];
  const double smooth_b = smoothness_loss_at_resolution(
      vb, native2, config.smoothness, grad_b ? &tmp : nullptr);
  if (grad_b)
    for (std::size_t i = 0; i < tmp.size(); ++i)
      grad_b->data[i] += 0.5 * config.smoothness.weight * tmp.data[i];
  terms.smooth = 0.5 * (smooth_f + smooth_b);

  const double wself = w_self_at(config, progress);
  if (selfsup) {
    const double self_f =
        selfsup_loss(vf, vb, selfsup->labels_forward, selfsup->mask_forward,
                     config, grad_f && wself > 0.0 ? &tmp : nullptr);
    if (grad_f && wself > 0.0)
      for (std::size_t i = 0; i < tmp.size(); ++i)
        grad_f->data[i] += 0.5 * wself * tmp.data[i];
    const double self_b =
        selfsup_loss(vb, vf, selfsup->labels_backward, selfsup->mask_backward,
                     config, grad_b && wself > 0.0 ? &tmp : nullptr);
    if (grad_b && wself > 0.0)
      for (std::size_t i = 0; i < tmp.size(); ++i)
        grad_b->data[i] += 0.5 * wself * tmp.data[i];
    terms.self = 0.5 * (self_f + self_b);
  }

  terms.total = config.w_photo * terms.photo +
                config.smoothness.weight * terms.smooth + wself * terms.self;
  return terms;
}

// One coarse-to-fine pass over an image pair. Progress is mapped linearly
// onto [progress_begin, progress_end]. Selfsup labels, when a teacher is
// given, are rebuilt from it at each level's resolution.
SolveResult coarse_to_fine(const Image& image1, const Image& image2,
                           const ObjectiveConfig& objective,
                           const SolverConfig& solver, double progress_begin,
                           double progress_end,
                           const FlowField* teacher_forward = nullptr,
                           const FlowField* teacher_backward = nullptr) {
  const int levels = solver.levels;
  const int native = std::min(2, levels - 1);

  std::vector<Image> pyr1(levels), pyr2(levels);
  pyr1[0] = image1;
  pyr2[0] = image2;
  for (int l = 1; l < levels; ++l) {
    pyr1[l] = downsample2x(pyr1[l - 1]);
    pyr2[l] = downsample2x(pyr2[l - 1]);
  }

  const int coarsest = levels - 1;
  const long total_iters =
      static_cast<long>(coarsest - native + 1) * solver.iterations_per_level;
  long done = 0;
  auto progress_at = [&](long it) {
    return progress_begin +
           (progress_end - progress_begin) * static_cast<double>(it) /
               static_cast<double>(total_iters);
  };

  FlowField vf, vb;
  {
    const FeatureMap f1 = normalize_features(extract_features(pyr1[coarsest]));
    const FeatureMap f2 = normalize_features(extract_features(pyr2[coarsest]));
    vf = median3x3(
        argmax_flow(matching_scores(cost_volume(f1, f2, kCostVolumeRadius), f2)));
    vb = median3x3(
        argmax_flow(matching_scores(cost_volume(f2, f1, kCostVolumeRadius), f1)));
  }

  SolveResult result{FlowField(), FlowField(), LossTerms()};
  for (int level = coarsest; level >= native; --level) {
    const Image& i1 = pyr1[level];
    const Image& i2 = pyr2[level];
    if (level != coarsest) {
      vf = resize_bilinear(vf, i1.height, i1.width, true);
      vb = resize_bilinear(vb, i1.height, i1.width, true);
    }

    SelfsupLabels labels;
    const SelfsupLabels* labels_ptr = nullptr;
    if (teacher_forward) {
      selfsup_labels(*teacher_forward, *teacher_backward,
                     objective.selfsup_crop, i1.height, i1.width,
                     objective.occlusion, labels.labels_forward,
                     labels.mask_forward);
      selfsup_labels(*teacher_backward, *teacher_forward,
                     objective.selfsup_crop, i1.height, i1.width,
                     objective.occlusion, labels.labels_backward,
                     labels.mask_backward);
      labels_ptr = &labels;
    }

    // the native level optimizes the final-output objective; coarser levels
    // bootstrap on their own resolution
    const bool final_stage = level == native && native > 0;
    auto evaluate = [&](double progress, FlowField* gf,
                        FlowField* gb) -> LossTerms {
      if (final_stage)
        return final_objective(pyr1[0], pyr2[0], i1, i2, vf, vb, objective,
                               progress, labels_ptr, gf, gb);
      return total_loss(i1, i2, vf, vb, objective, progress, labels_ptr, gf,
                        gb);
    };

    AdamState state_f(i1.height, i1.width), state_b(i1.height, i1.width);
    double best = std::numeric_limits<double>::infinity();
    FlowField best_f = vf, best_b = vb;
    LossTerms best_terms;
    FlowField gf, gb;
    for (int it = 0; it < solver.iterations_per_level; ++it) {
      const double progress = progress_at(done++);
      const LossTerms terms = evaluate(progress, &gf, &gb);
      check_finite_terms(terms, level);
      if (terms.total < best) {
        best = terms.total;
        best_f = vf;
        best_b = vb;
        best_terms = terms;
      }
      const double step = step_at(solver, it, solver.iterations_per_level);
      adam_step(vf, gf, state_f, solver, step);
      adam_step(vb, gb, state_b, solver, step);
    }
    {
      const LossTerms terms = evaluate(progress_at(done), nullptr, nullptr);
      check_finite_terms(terms, level);
      if (terms.total < best) {
        best = terms.total;
        best_f = vf;
        best_b = vb;
        best_terms = terms;
      }
    }
    vf = best_f;
    vb = best_b;
    if (level == native) result.best_terms = best_terms;
  }
  result.forward = vf;
  result.backward = vb;
  return result;
}

}  // namespace

FlowEstimate estimate_flow(const Image& image1, const Image& image2,
                           const ObjectiveConfig& objective,
                           const SolverConfig& solver) {
  solver.validate();
  require_image(image1, "estimate_flow");
  require_same_shape(image1, image2, "estimate_flow");
  objective.validate_for_image(image1.height, image1.width);
  const int h = image1.height, w = image1.width;
  if (std::min(h, w) < (1 << solver.levels))
    throw std::invalid_argument(
        "estimate_flow: image " + shape_string(image1) +
        " too small for pyramid depth " + std::to_string(solver.levels));

  const double teacher_end =
      objective.selfsup_enabled ? objective.selfsup_ramp.start_fraction : 1.0;
  SolveResult full =
      coarse_to_fine(image1, image2, objective, solver, 0.0, teacher_end);

  FlowEstimate est;
  est.forward = resize_bilinear(full.forward, h, w, true);
  est.backward = resize_bilinear(full.backward, h, w, true);
  est.mask_forward =
      combined_mask(est.forward, est.backward, objective.occlusion, 1.0);
  est.mask_backward =
      combined_mask(est.backward, est.forward, objective.occlusion, 1.0);
  est.final_loss = full.best_terms.total;
  est.per_term_losses = full.best_terms;

  if (objective.selfsup_enabled) {
    const int crop = objective.selfsup_crop;
    const Image crop1 =
        resize_bilinear(crop_grid(image1, crop), h, w, false);
    const Image crop2 =
        resize_bilinear(crop_grid(image2, crop), h, w, false);
    SolveResult student =
        coarse_to_fine(crop1, crop2, objective, solver, teacher_end, 1.0,
                       &est.forward, &est.backward);
    est.per_term_losses.self = student.best_terms.self;
  }
  return est;
}

}  // namespace flowkit
