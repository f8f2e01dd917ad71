#include "flowkit/checks.hpp"

#include <cmath>
#include <functional>
#include <ostream>
#include <random>
#include <vector>

#include "flowkit/image_ops.hpp"
#include "flowkit/matching.hpp"
#include "flowkit/metrics.hpp"
#include "flowkit/occlusion.hpp"
#include "flowkit/reference.hpp"
#include "flowkit/smoothness.hpp"
#include "flowkit/solver.hpp"
#include "flowkit/synth.hpp"

namespace flowkit::checks {

namespace {

using Evaluator = std::function<double(const FlowField&)>;

// Central finite differences against an analytic gradient. Components
// carrying less than 0.1% of the peak gradient magnitude are checked
// absolutely against that cutoff instead: relative error there measures
// finite-difference noise, not gradient correctness.
double fd_max_rel_err(const Evaluator& f, const FlowField& x,
                      const FlowField& analytic, double step = kFdStep) {
  double peak = 0.0;
  for (double g : analytic.data) peak = std::max(peak, std::abs(g));
  const double cutoff = std::max(1e-7, 1e-3 * peak);

  FlowField probe = x;
  double worst = 0.0;
  for (std::size_t i = 0; i < probe.size(); ++i) {
    const double orig = probe.data[i];
    probe.data[i] = orig + step;
    const double fp = f(probe);
    probe.data[i] = orig - step;
    const double fm = f(probe);
    probe.data[i] = orig;
    const double fd = (fp - fm) / (2.0 * step);
    const double a = analytic.data[i];
    const double denom = std::max(std::abs(a), std::abs(fd));
    if (denom > cutoff)
      worst = std::max(worst, std::abs(a - fd) / denom);
    else if (std::abs(a - fd) > cutoff)
      worst = std::max(worst, 1.0);
  }
  return worst;
}

// Alternating-sign flow with magnitudes in [0.15, 0.35]: sample coordinates
// stay >= 0.15 from integers, and first/second differences stay >= 0.3 from
// the absolute-value kink.
FlowField margin_flow(std::uint64_t seed, int height, int width) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> mag(0.15, 0.35);
  FlowField flow(height, width, 2);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      for (int c = 0; c < 2; ++c) {
        const double s = (x + y + c) % 2 == 0 ? 1.0 : -1.0;
        flow.at(y, x, c) = s * mag(rng);
      }
  return flow;
}

Image scaled_texture(std::uint64_t seed, int h, int w, double center,
                     double half_range) {
  Image t = noise_texture(seed, h, w, 3);
  for (double& v : t.data) v = center + half_range * v;  // v was in [-0.9, 0.9]
  return t;
}

struct PhotoProblem {
  Image image1, image2;
  FlowField flow;
  Mask mask;
};

PhotoProblem make_photo_problem(PhotometricKind kind, std::uint64_t seed,
                                int size = 16) {
  PhotoProblem p;
  if (kind == PhotometricKind::L1 || kind == PhotometricKind::Charbonnier) {
    // keep |image1 - warp(image2)| away from the penalty's kink/curvature
    p.image1 = scaled_texture(seed * 3 + 1, size, size, 0.55, 0.35);
    p.image2 = scaled_texture(seed * 3 + 2, size, size, -0.55, 0.35);
  } else if (kind == PhotometricKind::Census) {
    // the soft-sign transform has strong third derivatives near zero; gentle
    // slopes keep the h^2 truncation of central differences below the
    // tolerance (truncation scales with slope^3, the gradient with slope)
    p.image1 = noise_texture(seed * 3 + 1, size, size, 3, 6);
    p.image2 = noise_texture(seed * 3 + 2, size, size, 3, 6);
    for (double& v : p.image1.data) v *= 0.2;
    for (double& v : p.image2.data) v *= 0.2;
  } else {
    p.image1 = noise_texture(seed * 3 + 1, size, size, 3);
    p.image2 = noise_texture(seed * 3 + 2, size, size, 3);
  }
  p.flow = margin_flow(seed * 3 + 3, size, size);
  p.mask = Mask(size, size, 1, 1.0);
  return p;
}

int instance_size(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> d(12, 24);
  return d(rng);
}

Grid random_grid(std::mt19937_64& rng, int h, int w, int c, double lo,
                 double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Grid g(h, w, c);
  for (double& v : g.data) v = dist(rng);
  return g;
}

Mask random_binary_mask(std::mt19937_64& rng, int h, int w) {
  std::bernoulli_distribution d(0.8);
  Mask m(h, w, 1);
  for (double& v : m.data) v = d(rng) ? 1.0 : 0.0;
  return m;
}

double max_abs_diff(const Grid& a, const Grid& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(a.data[i] - b.data[i]));
  return worst;
}

}  // namespace

double gradcheck_photometric(PhotometricKind kind, int trials,
                             std::uint64_t seed) {
  PhotometricConfig cfg;
  cfg.kind = kind;
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const PhotoProblem p = make_photo_problem(kind, seed + t);
    FlowField grad;
    photometric_loss(p.image1, p.image2, p.flow, p.mask, cfg, &grad);
    const Evaluator f = [&](const FlowField& v) {
      return photometric_loss(p.image1, p.image2, v, p.mask, cfg);
    };
    worst = std::max(worst, fd_max_rel_err(f, p.flow, grad));
  }
  return worst;
}

double gradcheck_smoothness(int order, int trials, std::uint64_t seed) {
  SmoothnessConfig cfg;
  cfg.order = order;
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Image image = noise_texture(seed + 2 * t, 16, 16, 3);
    const FlowField flow = margin_flow(seed + 2 * t + 1, 16, 16);
    FlowField grad;
    smoothness_loss_at_resolution(flow, image, cfg, &grad);
    const Evaluator f = [&](const FlowField& v) {
      return smoothness_loss_at_resolution(v, image, cfg);
    };
    worst = std::max(worst, fd_max_rel_err(f, flow, grad));
  }
  return worst;
}

double gradcheck_selfsup(int trials, std::uint64_t seed) {
  ObjectiveConfig cfg;
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng(seed + t);
    std::uniform_real_distribution<double> label_mag(1.0, 2.0);
    std::uniform_real_distribution<double> off_mag(0.05, 0.3);
    const int size = 16;
    FlowField labels(size, size, 2), student(size, size, 2);
    for (int y = 0; y < size; ++y)
      for (int x = 0; x < size; ++x)
        for (int c = 0; c < 2; ++c) {
          labels.at(y, x, c) = label_mag(rng);
          const double s = (x + y + c) % 2 == 0 ? 1.0 : -1.0;
          student.at(y, x, c) = labels.at(y, x, c) + s * off_mag(rng);
        }
    // zero backward flow leaves every student pixel FB-inconsistent by a
    // wide margin, so the stopped mask is stable under the FD probes
    const FlowField backward(size, size, 2, 0.0);
    const Mask label_mask(size, size, 1, 1.0);
    FlowField grad;
    selfsup_loss(student, backward, labels, label_mask, cfg, &grad);
    const Evaluator f = [&](const FlowField& v) {
      return selfsup_loss(v, backward, labels, label_mask, cfg);
    };
    worst = std::max(worst, fd_max_rel_err(f, student, grad));
  }
  return worst;
}

double gradcheck_warp(int trials, std::uint64_t seed) {
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Image source = noise_texture(seed + 2 * t, 16, 16, 3);
    const FlowField flow = margin_flow(seed + 2 * t + 1, 16, 16);
    // probe the warp through a fixed random projection so it is scalar-valued
    const Image probe = noise_texture(seed + 2 * t + 7, 16, 16, 3);
    FlowField grad;
    warp_vjp(source, flow, Border::Clamp, probe, grad);
    const Evaluator f = [&](const FlowField& v) {
      const Grid warped = warp(source, v, Border::Clamp);
      double s = 0.0;
      for (std::size_t i = 0; i < warped.size(); ++i)
        s += warped.data[i] * probe.data[i];
      return s;
    };
    worst = std::max(worst, fd_max_rel_err(f, flow, grad));
  }
  return worst;
}

double gradcheck_total(int trials, std::uint64_t seed) {
  ObjectiveConfig cfg;
  cfg.photometric.kind = PhotometricKind::Charbonnier;
  cfg.w_photo = 2.0;
  cfg.occlusion.method = OcclusionMethod::None;
  cfg.smoothness.order = 1;
  cfg.smoothness.lambda = 10.0;
  cfg.smoothness.weight = 1.0;
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const PhotoProblem p =
        make_photo_problem(PhotometricKind::Charbonnier, seed + t);
    const FlowField backward = margin_flow(seed * 7 + t, 16, 16);
    FlowField gf, gb;
    total_loss(p.image1, p.image2, p.flow, backward, cfg, 0.0, nullptr, &gf,
               &gb);
    const Evaluator f_fwd = [&](const FlowField& v) {
      return total_loss(p.image1, p.image2, v, backward, cfg, 0.0).total;
    };
    const Evaluator f_bwd = [&](const FlowField& v) {
      return total_loss(p.image1, p.image2, p.flow, v, cfg, 0.0).total;
    };
    worst = std::max(worst, fd_max_rel_err(f_fwd, p.flow, gf));
    worst = std::max(worst, fd_max_rel_err(f_bwd, backward, gb));
  }
  return worst;
}

bool gradstop_occlusion_mask(std::uint64_t seed) {
  // the gradient with the mask recomputed from the flows must be identical
  // to the gradient with the mask frozen: no gradient term touches the mask
  ObjectiveConfig cfg;
  cfg.photometric.kind = PhotometricKind::Charbonnier;
  cfg.occlusion.method = OcclusionMethod::RangeMap;
  cfg.smoothness.weight = 0.0;
  const PhotoProblem p =
      make_photo_problem(PhotometricKind::Charbonnier, seed);
  const FlowField backward = margin_flow(seed * 11 + 1, 16, 16);

  FlowField g_recomputed, g_back;
  total_loss(p.image1, p.image2, p.flow, backward, cfg, 0.0, nullptr,
             &g_recomputed, &g_back);

  const Mask frozen = combined_mask(p.flow, backward, cfg.occlusion, 0.0);
  FlowField g_frozen;
  photometric_loss(p.image1, p.image2, p.flow, frozen, cfg.photometric,
                   &g_frozen);
  for (std::size_t i = 0; i < g_frozen.size(); ++i)
    g_frozen.data[i] *= 0.5 * cfg.w_photo;

  for (std::size_t i = 0; i < g_frozen.size(); ++i)
    if (g_recomputed.data[i] != g_frozen.data[i]) return false;
  return true;
}

bool gradstop_teacher(std::uint64_t seed) {
  // labels are materialized from the teacher; perturbing the teacher
  // afterwards must leave the loss bit-identical (zero gradient)
  ObjectiveConfig cfg;
  std::mt19937_64 rng(seed);
  FlowField teacher_f = random_grid(rng, 64, 64, 2, -3.0, 3.0);
  FlowField teacher_b = random_grid(rng, 64, 64, 2, -3.0, 3.0);
  FlowField labels;
  Mask label_mask;
  selfsup_labels(teacher_f, teacher_b, 8, 64, 64, cfg.occlusion, labels,
                 label_mask);

  const FlowField student = random_grid(rng, 64, 64, 2, -2.0, 2.0);
  const FlowField student_b = random_grid(rng, 64, 64, 2, -2.0, 2.0);
  const double before =
      selfsup_loss(student, student_b, labels, label_mask, cfg);
  for (double& v : teacher_f.data) v += 0.37;
  for (double& v : teacher_b.data) v -= 0.11;
  const double after =
      selfsup_loss(student, student_b, labels, label_mask, cfg);
  return before == after;
}

double oracle_warp(int trials, std::uint64_t seed) {
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng(seed + t);
    const int n = instance_size(rng);
    const Grid src = random_grid(rng, n, n, 3, -1.0, 1.0);
    const FlowField flow = random_grid(rng, n, n, 2, -3.0, 3.0);
    worst = std::max(worst, max_abs_diff(warp(src, flow, Border::Clamp),
                                         reference::warp_clamp(src, flow)));
    worst = std::max(worst, max_abs_diff(warp(src, flow, Border::Zero),
                                         reference::warp_zero(src, flow)));
  }
  return worst;
}

double oracle_splat(int trials, std::uint64_t seed) {
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng(seed + t);
    const int n = instance_size(rng);
    const Grid w = random_grid(rng, n, n, 1, 0.0, 2.0);
    const FlowField flow = random_grid(rng, n, n, 2, -3.0, 3.0);
    worst = std::max(worst,
                     max_abs_diff(splat(w, flow), reference::splat(w, flow)));
  }
  return worst;
}

double oracle_downsample(int trials, std::uint64_t seed) {
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng(seed + t);
    const int h = instance_size(rng), w = instance_size(rng);
    const Grid g = random_grid(rng, h, w, 3, -1.0, 1.0);
    worst =
        std::max(worst, max_abs_diff(downsample2x(g), reference::downsample2x(g)));
  }
  return worst;
}

double oracle_second_differences(int trials, std::uint64_t seed) {
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng(seed + t);
    const int n = instance_size(rng);
    const Grid g = random_grid(rng, n, n, 2, -2.0, 2.0);
    Grid dx, dy, dxx, dyy, tmp;
    spatial_gradients(g, dx, dy);
    spatial_gradients(dx, dxx, tmp);
    spatial_gradients(dy, tmp, dyy);
    worst = std::max(worst, max_abs_diff(dxx, reference::second_difference_x(g)));
    worst = std::max(worst, max_abs_diff(dyy, reference::second_difference_y(g)));
  }
  return worst;
}

double oracle_masked_mean(int trials, std::uint64_t seed) {
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng(seed + t);
    const int n = instance_size(rng);
    const Grid v = random_grid(rng, n, n, 1, -2.0, 2.0);
    const Mask m = random_grid(rng, n, n, 1, 0.0, 1.0);
    worst = std::max(worst, std::abs(masked_mean(v, m) -
                                     reference::masked_mean(v, m)));
  }
  return worst;
}

double oracle_cost_volume(int trials, std::uint64_t seed) {
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng(seed + t);
    const int n = instance_size(rng);
    const Grid f1 = random_grid(rng, n, n, 5, -1.5, 1.5);
    const Grid f2 = random_grid(rng, n, n, 5, -1.5, 1.5);
    FeatureMap a, b;
    a.values = f1;
    b.values = f2;
    worst = std::max(worst, max_abs_diff(cost_volume(a, b, 4).values,
                                         reference::cost_volume(f1, f2, 4)));
  }
  return worst;
}

double oracle_census(int trials, std::uint64_t seed) {
  PhotometricConfig cfg;
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng(seed + t);
    const int n = instance_size(rng);
    const Image a = random_grid(rng, n, n, 3, -1.0, 1.0);
    const Image b = random_grid(rng, n, n, 3, -1.0, 1.0);
    const Mask m = random_binary_mask(rng, n, n);
    worst = std::max(worst, std::abs(census_loss(a, b, m, cfg) -
                                     reference::census_loss(a, b, m, cfg)));
  }
  return worst;
}

double oracle_ssim(int trials, std::uint64_t seed) {
  PhotometricConfig cfg;
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng(seed + t);
    const int n = instance_size(rng);
    const Image a = random_grid(rng, n, n, 3, -1.0, 1.0);
    const Image b = random_grid(rng, n, n, 3, -1.0, 1.0);
    const Mask m = random_binary_mask(rng, n, n);
    worst = std::max(worst, std::abs(ssim_loss(a, b, m, cfg) -
                                     reference::ssim_loss(a, b, m, cfg)));
  }
  return worst;
}

double oracle_smoothness(int trials, std::uint64_t seed) {
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng(seed + t);
    const int n = instance_size(rng);
    SmoothnessConfig cfg;
    cfg.order = 1 + static_cast<int>(rng() % 2);
    const double lambdas[3] = {0.0, 10.0, 150.0};
    cfg.lambda = lambdas[rng() % 3];
    const Image image = random_grid(rng, n, n, 3, -1.0, 1.0);
    const FlowField flow = random_grid(rng, n, n, 2, -2.0, 2.0);
    worst = std::max(
        worst, std::abs(smoothness_loss_at_resolution(flow, image, cfg) -
                        reference::smoothness_loss(flow, image, cfg)));
  }
  return worst;
}

double oracle_range_map(int trials, std::uint64_t seed) {
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng(seed + t);
    const int n = instance_size(rng);
    const FlowField flow = random_grid(rng, n, n, 2, -4.0, 4.0);
    worst = std::max(worst,
                     max_abs_diff(range_map(flow), reference::range_map(flow)));
  }
  return worst;
}

double oracle_fb_consistency(int trials, std::uint64_t seed) {
  OcclusionConfig cfg;
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng(seed + t);
    const int n = instance_size(rng);
    const FlowField f = random_grid(rng, n, n, 2, -2.0, 2.0);
    const FlowField b = random_grid(rng, n, n, 2, -2.0, 2.0);
    worst = std::max(worst, max_abs_diff(fb_consistency_mask(f, b, cfg),
                                         reference::fb_consistency_mask(f, b, cfg)));
  }
  return worst;
}

double oracle_endpoint_error(int trials, std::uint64_t seed) {
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng(seed + t);
    const int n = instance_size(rng);
    const FlowField p = random_grid(rng, n, n, 2, -5.0, 5.0);
    const FlowField g = random_grid(rng, n, n, 2, -5.0, 5.0);
    const Mask ones(n, n, 1, 1.0);
    double mean = 0.0;
    const Grid epe = endpoint_error(p, g, ones, &mean);
    const Grid ref = reference::endpoint_error(p, g);
    worst = std::max(worst, max_abs_diff(epe, ref));
    double ref_mean = 0.0;
    for (double v : ref.data) ref_mean += v;
    worst = std::max(worst, std::abs(mean - ref_mean / ref.size()));
  }
  return worst;
}

double oracle_error_rate(int trials, std::uint64_t seed) {
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng(seed + t);
    const int n = instance_size(rng);
    // mix small and gross errors so both branches of the criterion fire
    const FlowField g = random_grid(rng, n, n, 2, -40.0, 40.0);
    FlowField p = g;
    std::uniform_real_distribution<double> noise(-6.0, 6.0);
    for (double& v : p.data) v += noise(rng);
    const Mask m = random_binary_mask(rng, n, n);
    worst = std::max(worst, std::abs(error_rate(p, g, m) -
                                     reference::error_rate(p, g, m)));
  }
  return worst;
}

double oracle_argmax(int trials, std::uint64_t seed) {
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng(seed + t);
    const int n = instance_size(rng);
    CostVolume cv;
    cv.radius = 4;
    cv.values = random_grid(rng, n, n, 81, -3.0, 3.0);
    worst = std::max(worst, max_abs_diff(argmax_flow(cv),
                                         reference::argmax_flow(cv.values, 4)));
  }
  return worst;
}

double invariant_warp_identity(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Grid g = random_grid(rng, 17, 23, 3, -1.0, 1.0);
  const FlowField zero(17, 23, 2, 0.0);
  return max_abs_diff(warp(g, zero, Border::Clamp), g);
}

double invariant_warp_linearity(int trials, std::uint64_t seed) {
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng(seed + t);
    const int n = instance_size(rng);
    const Grid a = random_grid(rng, n, n, 3, -1.0, 1.0);
    const Grid b = random_grid(rng, n, n, 3, -1.0, 1.0);
    const FlowField flow = random_grid(rng, n, n, 2, -2.0, 2.0);
    Grid combo(n, n, 3);
    for (std::size_t i = 0; i < combo.size(); ++i)
      combo.data[i] = 2.5 * a.data[i] - 1.25 * b.data[i];
    const Grid wa = warp(a, flow, Border::Clamp);
    const Grid wb = warp(b, flow, Border::Clamp);
    const Grid wc = warp(combo, flow, Border::Clamp);
    for (std::size_t i = 0; i < wc.size(); ++i)
      worst = std::max(worst, std::abs(wc.data[i] - (2.5 * wa.data[i] -
                                                     1.25 * wb.data[i])));
  }
  return worst;
}

double invariant_adjointness(int trials, std::uint64_t seed) {
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng(seed + t);
    const int n = instance_size(rng);
    const Grid img = random_grid(rng, n, n, 1, -1.0, 1.0);
    const Grid wts = random_grid(rng, n, n, 1, -1.0, 1.0);
    const FlowField flow = random_grid(rng, n, n, 2, -3.0, 3.0);
    const Grid warped = warp(img, flow, Border::Zero);
    const Grid splatted = splat(wts, flow);
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t i = 0; i < warped.size(); ++i) {
      lhs += warped.data[i] * wts.data[i];
      rhs += img.data[i] * splatted.data[i];
    }
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

double invariant_mass_conservation(int trials, std::uint64_t seed) {
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng(seed + t);
    const int n = instance_size(rng);
    // endpoints drawn inside the frame so no mass can leave
    std::uniform_real_distribution<double> ex(0.0, n - 1.0);
    FlowField flow(n, n, 2);
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x) {
        flow.at(y, x, 0) = ex(rng) - x;
        flow.at(y, x, 1) = ex(rng) - y;
      }
    const Grid wts = random_grid(rng, n, n, 1, 0.0, 2.0);
    const Grid out = splat(wts, flow);
    double in_sum = 0.0, out_sum = 0.0;
    for (double v : wts.data) in_sum += v;
    for (double v : out.data) out_sum += v;
    worst = std::max(worst, std::abs(in_sum - out_sum));
  }
  return worst;
}

double invariant_normalization_idempotence(int trials, std::uint64_t seed) {
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng(seed + t);
    const int n = instance_size(rng);
    FeatureMap f;
    f.values = random_grid(rng, n, n, 9, -2.0, 5.0);
    double sum = 0.0, sumsq = 0.0;
    for (double v : f.values.data) {
      sum += v;
      sumsq += v * v;
    }
    f.mean = sum / f.values.size();
    f.stddev = std::sqrt(std::max(0.0, sumsq / f.values.size() - f.mean * f.mean));
    const FeatureMap once = normalize_features(f);
    const FeatureMap twice = normalize_features(once);
    worst = std::max(worst, max_abs_diff(once.values, twice.values));
  }
  return worst;
}

double invariant_self_cost_mean(int trials, std::uint64_t seed) {
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Image image = noise_texture(seed + t, 20, 20, 3);
    const FeatureMap f = normalize_features(extract_features(image));
    const CostVolume cv = cost_volume(f, f, 4);
    const int center = (2 * cv.radius + 1) * cv.radius + cv.radius;
    double mean = 0.0;
    for (int y = 0; y < cv.values.height; ++y)
      for (int x = 0; x < cv.values.width; ++x)
        mean += cv.values.at(y, x, center);
    mean /= static_cast<double>(cv.values.height) * cv.values.width;
    worst = std::max(worst, std::abs(mean - f.values.channels));
  }
  return worst;
}

namespace {

struct CheckLine {
  const char* name;
  std::function<double()> run;
  double tolerance;
};

int run_lines(const std::vector<CheckLine>& lines, std::ostream& out) {
  int failures = 0;
  for (const auto& line : lines) {
    const double err = line.run();
    const bool ok = err <= line.tolerance;
    out << (ok ? "[PASS] " : "[FAIL] ") << line.name << ": max err " << err
        << " (tol " << line.tolerance << ")\n";
    if (!ok) ++failures;
  }
  return failures;
}

}  // namespace

int run_gradcheck(const std::string& module, double tolerance,
                  std::ostream& out) {
  const bool all = module == "all";
  std::vector<CheckLine> lines;
  const int trials = 8;
  if (all || module == "photometric") {
    lines.push_back({"grad l1", [=] {
                       return gradcheck_photometric(PhotometricKind::L1, trials, 11);
                     },
                     tolerance});
    lines.push_back({"grad charbonnier", [=] {
                       return gradcheck_photometric(PhotometricKind::Charbonnier,
                                                    trials, 22);
                     },
                     tolerance});
    lines.push_back({"grad ssim", [=] {
                       return gradcheck_photometric(PhotometricKind::SSIM, trials, 33);
                     },
                     tolerance});
    lines.push_back({"grad census", [=] {
                       return gradcheck_photometric(PhotometricKind::Census, trials, 44);
                     },
                     tolerance});
    lines.push_back({"grad warp", [=] { return gradcheck_warp(trials, 55); },
                     tolerance});
  }
  if (all || module == "smoothness") {
    lines.push_back({"grad smoothness k=1",
                     [=] { return gradcheck_smoothness(1, trials, 66); },
                     tolerance});
    lines.push_back({"grad smoothness k=2",
                     [=] { return gradcheck_smoothness(2, trials, 77); },
                     tolerance});
  }
  if (all || module == "occlusion") {
    lines.push_back({"gradient stop at occlusion mask",
                     [] { return gradstop_occlusion_mask(321) ? 0.0 : 1.0; },
                     0.0});
  }
  if (all || module == "solver") {
    lines.push_back({"grad self-supervision",
                     [=] { return gradcheck_selfsup(trials, 88); }, tolerance});
    lines.push_back({"grad total objective",
                     [=] { return gradcheck_total(4, 99); }, tolerance});
    lines.push_back({"gradient stop at teacher flow",
                     [] { return gradstop_teacher(432) ? 0.0 : 1.0; }, 0.0});
  }
  if (lines.empty()) {
    out << "unknown module: " << module << "\n";
    return 1;
  }
  return run_lines(lines, out);
}

int run_selfcheck(std::ostream& out) {
  std::vector<CheckLine> lines = {
      {"oracle warp", [] { return oracle_warp(10, 101); }, 1e-6},
      {"oracle splat", [] { return oracle_splat(10, 102); }, 1e-6},
      {"oracle downsample", [] { return oracle_downsample(10, 103); }, 1e-6},
      {"oracle second differences",
       [] { return oracle_second_differences(10, 104); }, 1e-6},
      {"oracle masked mean", [] { return oracle_masked_mean(10, 105); }, 1e-9},
      {"oracle cost volume", [] { return oracle_cost_volume(10, 106); }, 1e-6},
      {"oracle census", [] { return oracle_census(10, 107); }, 1e-6},
      {"oracle ssim", [] { return oracle_ssim(10, 108); }, 1e-6},
      {"oracle smoothness", [] { return oracle_smoothness(10, 109); }, 1e-6},
      {"oracle range map", [] { return oracle_range_map(10, 110); }, 1e-6},
      {"oracle fb consistency", [] { return oracle_fb_consistency(10, 111); },
       0.0},
      {"oracle endpoint error", [] { return oracle_endpoint_error(10, 112); },
       1e-9},
      {"oracle error rate", [] { return oracle_error_rate(10, 113); }, 0.0},
      {"oracle argmax", [] { return oracle_argmax(10, 114); }, 0.0},
      {"invariant warp identity", [] { return invariant_warp_identity(115); },
       0.0},
      {"invariant warp linearity",
       [] { return invariant_warp_linearity(10, 116); }, 1e-6},
      {"invariant adjointness", [] { return invariant_adjointness(10, 117); },
       1e-6},
      {"invariant mass conservation",
       [] { return invariant_mass_conservation(10, 118); }, 1e-6},
      {"invariant normalization idempotence",
       [] { return invariant_normalization_idempotence(10, 119); }, 1e-6},
      {"invariant self cost volume mean",
       [] { return invariant_self_cost_mean(5, 120); }, 1e-5},
      {"gradient stop at occlusion mask",
       [] { return gradstop_occlusion_mask(121) ? 0.0 : 1.0; }, 0.0},
      {"gradient stop at teacher flow",
       [] { return gradstop_teacher(122) ? 0.0 : 1.0; }, 0.0},
  };
  return run_lines(lines, out);
}

}  // namespace flowkit::checks
