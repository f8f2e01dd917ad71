#include "flowkit/photometric.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "flowkit/image_ops.hpp"

namespace flowkit {

namespace {

constexpr double kDenomStabilizer = 1e-16;
constexpr double kSoftSignScale = 0.0081;
constexpr double kHammingScale = 0.1;

inline double soft_sign(double t) { return t / std::sqrt(kSoftSignScale + t * t); }

inline double soft_sign_deriv(double t) {
  const double s = kSoftSignScale + t * t;
  return kSoftSignScale / (s * std::sqrt(s));
}

inline double soft_hamming(double q) { return q * q / (kHammingScale + q * q); }

inline double soft_hamming_deriv(double q) {
  const double s = kHammingScale + q * q;
  return 2.0 * kHammingScale * q / (s * s);
}

inline double charbonnier(double d, const PhotometricConfig& c) {
  return std::pow(d * d + c.charbonnier_eps * c.charbonnier_eps,
                  c.charbonnier_alpha);
}

inline double charbonnier_deriv(double d, const PhotometricConfig& c) {
  const double s = d * d + c.charbonnier_eps * c.charbonnier_eps;
  return 2.0 * c.charbonnier_alpha * d * std::pow(s, c.charbonnier_alpha - 1.0);
}

// Deterministic reduction: per-row partials accumulated in row order.
void masked_sums(const Grid& values, const Mask& mask, double& num,
                 double& den) {
  const int h = values.height, w = values.width;
  std::vector<double> row_num(h, 0.0), row_den(h, 0.0);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    double n = 0.0, d = 0.0;
    for (int x = 0; x < w; ++x) {
      n += values.at(y, x, 0) * mask.at(y, x, 0);
      d += mask.at(y, x, 0);
    }
    row_num[y] = n;
    row_den[y] = d;
  }
  num = 0.0;
  den = 0.0;
  for (int y = 0; y < h; ++y) {
    num += row_num[y];
    den += row_den[y];
  }
}

Mask erode_mask(const Mask& mask, int radius) {
  Mask out(mask.height, mask.width, 1, 0.0);
  for (int y = radius; y < mask.height - radius; ++y)
    for (int x = radius; x < mask.width - radius; ++x)
      out.at(y, x, 0) = mask.at(y, x, 0);
  return out;
}

void check_window(int window, const Grid& image, const char* what) {
  if (window > image.height || window > image.width)
    throw std::invalid_argument(std::string(what) + ": window " +
                                std::to_string(window) +
                                " larger than image " + shape_string(image));
}

}  // namespace

void PhotometricConfig::validate() const {
  if (census_window < 3 || census_window % 2 == 0)
    throw std::invalid_argument("PhotometricConfig: census_window must be odd and >= 3");
  if (ssim_window < 3 || ssim_window % 2 == 0)
    throw std::invalid_argument("PhotometricConfig: ssim_window must be odd and >= 3");
  if (charbonnier_alpha <= 0.0 || charbonnier_alpha > 1.0)
    throw std::invalid_argument("PhotometricConfig: alpha must be in (0, 1]");
  if (charbonnier_eps <= 0.0 || l1_eps <= 0.0)
    throw std::invalid_argument("PhotometricConfig: eps offsets must be > 0");
}

PhotometricKind photometric_kind_from_string(const std::string& name) {
  if (name == "l1") return PhotometricKind::L1;
  if (name == "charbonnier") return PhotometricKind::Charbonnier;
  if (name == "ssim") return PhotometricKind::SSIM;
  if (name == "census") return PhotometricKind::Census;
  throw std::invalid_argument("unknown photometric loss: " + name);
}

double masked_mean(const Grid& values, const Mask& mask) {
  require_mask(values, "masked_mean: values");
  require_mask(mask, "masked_mean: mask");
  require_same_spatial_shape(values, mask, "masked_mean");
  double num = 0.0, den = 0.0;
  masked_sums(values, mask, num, den);
  return num / (den + kDenomStabilizer);
}

Grid robust_penalty(const Grid& diff, const PhotometricConfig& config) {
  config.validate();
  Grid out(diff.height, diff.width, diff.channels);
  if (config.kind == PhotometricKind::Charbonnier) {
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < diff.size(); ++i)
      out.data[i] = charbonnier(diff.data[i], config);
  } else if (config.kind == PhotometricKind::L1) {
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < diff.size(); ++i)
      out.data[i] = std::abs(diff.data[i] + config.l1_eps);
  } else {
    throw std::invalid_argument(
        "robust_penalty: only L1 and Charbonnier are elementwise");
  }
  return out;
}

double census_loss(const Image& image1, const Image& warped2, const Mask& mask,
                   const PhotometricConfig& config, Grid* grad_warped) {
  config.validate();
  require_same_shape(image1, warped2, "census_loss");
  require_same_spatial_shape(image1, mask, "census_loss");
  check_window(config.census_window, image1, "census_loss");
  const int h = image1.height, w = image1.width;
  const int r = config.census_window / 2;

  const Grid g1 = grayscale(image1);
  const Grid g2 = grayscale(warped2);
  const Mask eroded = erode_mask(mask, r);

  // per-pixel descriptor distance over the window
  Grid dist(h, w, 1, 0.0);
#pragma omp parallel for schedule(static)
  for (int y = r; y < h - r; ++y) {
    for (int x = r; x < w - r; ++x) {
      const double c1 = g1.at(y, x, 0);
      const double c2 = g2.at(y, x, 0);
      double d = 0.0;
      for (int oy = -r; oy <= r; ++oy)
        for (int ox = -r; ox <= r; ++ox) {
          const double q = soft_sign(g1.at(y + oy, x + ox, 0) - c1) -
                           soft_sign(g2.at(y + oy, x + ox, 0) - c2);
          d += soft_hamming(q);
        }
      dist.at(y, x, 0) = d;
    }
  }

  Grid value(h, w, 1, 0.0);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < dist.size(); ++i)
    value.data[i] = charbonnier(dist.data[i], config);

  double num = 0.0, den = 0.0;
  masked_sums(value, eroded, num, den);
  const double loss = num / (den + kDenomStabilizer);

  if (grad_warped) {
    // coef(p) = d loss / d dist(p)
    Grid coef(h, w, 1, 0.0);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        coef.at(y, x, 0) = eroded.at(y, x, 0) / (den + kDenomStabilizer) *
                           charbonnier_deriv(dist.at(y, x, 0), config);

    // e_o(p) = coef(p) * dh/dq * dq/d g2(p+o); the same term enters g2(p)
    // with opposite sign. Gathered per target pixel.
    Grid grad_gray(h, w, 1, 0.0);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double g = 0.0;
        for (int oy = -r; oy <= r; ++oy) {
          for (int ox = -r; ox <= r; ++ox) {
            // as neighbor of center p = (y,x) - o
            const int py = y - oy, px = x - ox;
            if (py >= r && py < h - r && px >= r && px < w - r &&
                coef.at(py, px, 0) != 0.0) {
              const double t = g2.at(y, x, 0) - g2.at(py, px, 0);
              const double q =
                  soft_sign(g1.at(y, x, 0) - g1.at(py, px, 0)) - soft_sign(t);
              g += coef.at(py, px, 0) * (-soft_hamming_deriv(q)) *
                   soft_sign_deriv(t);
            }
          }
        }
        // as center of its own window
        if (coef.at(y, x, 0) != 0.0) {
          const double c1 = g1.at(y, x, 0);
          const double c2 = g2.at(y, x, 0);
          double gc = 0.0;
          for (int oy = -r; oy <= r; ++oy)
            for (int ox = -r; ox <= r; ++ox) {
              const double t = g2.at(y + oy, x + ox, 0) - c2;
              const double q = soft_sign(g1.at(y + oy, x + ox, 0) - c1) -
                               soft_sign(t);
              gc += (-soft_hamming_deriv(q)) * soft_sign_deriv(t);
            }
          g -= coef.at(y, x, 0) * gc;
        }
        grad_gray.at(y, x, 0) = g;
      }
    }

    *grad_warped = Grid(h, w, image1.channels, 0.0);
    if (image1.channels == 1) {
#pragma omp parallel for schedule(static)
      for (std::size_t i = 0; i < grad_gray.size(); ++i)
        grad_warped->data[i] = grad_gray.data[i];
    } else {
      const double wgt[3] = {0.299, 0.587, 0.114};
#pragma omp parallel for schedule(static)
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
          for (int c = 0; c < 3; ++c)
            grad_warped->at(y, x, c) = wgt[c] * grad_gray.at(y, x, 0);
    }
  }
  return loss;
}

double ssim_loss(const Image& image1, const Image& warped2, const Mask& mask,
                 const PhotometricConfig& config, Grid* grad_warped) {
  config.validate();
  require_same_shape(image1, warped2, "ssim_loss");
  require_same_spatial_shape(image1, mask, "ssim_loss");
  check_window(config.ssim_window, image1, "ssim_loss");
  const int h = image1.height, w = image1.width, nc = image1.channels;
  const int r = config.ssim_window / 2;
  const double n = static_cast<double>(config.ssim_window) * config.ssim_window;
  const Mask eroded = erode_mask(mask, r);

  // raw window moments per channel: mu1, mu2, E[a^2], E[b^2], E[ab]
  Grid mu1(h, w, nc, 0.0), mu2(h, w, nc, 0.0);
  Grid m11(h, w, nc, 0.0), m22(h, w, nc, 0.0), m12(h, w, nc, 0.0);
#pragma omp parallel for schedule(static)
  for (int y = r; y < h - r; ++y) {
    for (int x = r; x < w - r; ++x) {
      for (int c = 0; c < nc; ++c) {
        double s1 = 0, s2 = 0, s11 = 0, s22 = 0, s12 = 0;
        for (int oy = -r; oy <= r; ++oy)
          for (int ox = -r; ox <= r; ++ox) {
            const double a = image1.at(y + oy, x + ox, c);
            const double b = warped2.at(y + oy, x + ox, c);
            s1 += a;
            s2 += b;
            s11 += a * a;
            s22 += b * b;
            s12 += a * b;
          }
        mu1.at(y, x, c) = s1 / n;
        mu2.at(y, x, c) = s2 / n;
        m11.at(y, x, c) = s11 / n;
        m22.at(y, x, c) = s22 / n;
        m12.at(y, x, c) = s12 / n;
      }
    }
  }

  Grid value(h, w, 1, 0.0);
  Grid ga, gb, gc_;
  if (grad_warped) {
    ga = Grid(h, w, nc, 0.0);  // dloss/dmu2 accumulator (pre box-spread)
    gb = Grid(h, w, nc, 0.0);  // dloss/dm22
    gc_ = Grid(h, w, nc, 0.0); // dloss/dm12
  }

  // forward values first; the mean denominator is needed for the backward pass
#pragma omp parallel for schedule(static)
  for (int y = r; y < h - r; ++y) {
    for (int x = r; x < w - r; ++x) {
      double ssim_sum = 0.0;
      for (int c = 0; c < nc; ++c) {
        const double u1 = mu1.at(y, x, c), u2 = mu2.at(y, x, c);
        const double v1 = m11.at(y, x, c) - u1 * u1;
        const double v2 = m22.at(y, x, c) - u2 * u2;
        const double cov = m12.at(y, x, c) - u1 * u2;
        const double num1 = 2.0 * u1 * u2 + config.ssim_c1;
        const double den1 = u1 * u1 + u2 * u2 + config.ssim_c1;
        const double num2 = 2.0 * cov + config.ssim_c2;
        const double den2 = v1 + v2 + config.ssim_c2;
        ssim_sum += (num1 * num2) / (den1 * den2);
      }
      value.at(y, x, 0) = std::clamp((1.0 - ssim_sum / nc) * 0.5, 0.0, 1.0);
    }
  }

  double num = 0.0, den = 0.0;
  masked_sums(value, eroded, num, den);
  const double loss = num / (den + kDenomStabilizer);

  if (grad_warped) {
#pragma omp parallel for schedule(static)
    for (int y = r; y < h - r; ++y) {
      for (int x = r; x < w - r; ++x) {
        if (eroded.at(y, x, 0) == 0.0) continue;
        const double raw_sum = [&] {
          double s = 0.0;
          for (int c = 0; c < nc; ++c) {
            const double u1 = mu1.at(y, x, c), u2 = mu2.at(y, x, c);
            const double v1 = m11.at(y, x, c) - u1 * u1;
            const double v2 = m22.at(y, x, c) - u2 * u2;
            const double cov = m12.at(y, x, c) - u1 * u2;
            s += (2.0 * u1 * u2 + config.ssim_c1) * (2.0 * cov + config.ssim_c2) /
                 ((u1 * u1 + u2 * u2 + config.ssim_c1) *
                  (v1 + v2 + config.ssim_c2));
          }
          return s;
        }();
        const double raw = (1.0 - raw_sum / nc) * 0.5;
        if (raw < 0.0 || raw > 1.0) continue;  // clamped flat
        const double dl_dval = eroded.at(y, x, 0) / (den + kDenomStabilizer);
        for (int c = 0; c < nc; ++c) {
          const double u1 = mu1.at(y, x, c), u2 = mu2.at(y, x, c);
          const double v1 = m11.at(y, x, c) - u1 * u1;
          const double v2 = m22.at(y, x, c) - u2 * u2;
          const double cov = m12.at(y, x, c) - u1 * u2;
          const double num1 = 2.0 * u1 * u2 + config.ssim_c1;
          const double den1 = u1 * u1 + u2 * u2 + config.ssim_c1;
          const double num2 = 2.0 * cov + config.ssim_c2;
          const double den2 = v1 + v2 + config.ssim_c2;
          const double ssim = (num1 * num2) / (den1 * den2);
          const double dl_dssim = dl_dval * (-0.5 / nc);
          const double ds_dn1 = num2 / (den1 * den2);
          const double ds_dd1 = -ssim / den1;
          const double ds_dn2 = num1 / (den1 * den2);
          const double ds_dd2 = -ssim / den2;
          // mu2 enters N1 (2*u1), D1 (2*u2), cov (-u1) and v2 (-2*u2)
          ga.at(y, x, c) = dl_dssim * (ds_dn1 * 2.0 * u1 + ds_dd1 * 2.0 * u2 +
                                       ds_dn2 * 2.0 * (-u1) +
                                       ds_dd2 * (-2.0 * u2));
          gb.at(y, x, c) = dl_dssim * ds_dd2;        // m22 via v2
          gc_.at(y, x, c) = dl_dssim * ds_dn2 * 2.0;  // m12 via cov
        }
      }
    }

    // spread the per-window moment gradients back to pixels:
    // dL/dB(t) = (1/n) * sum_{centers p covering t} a(p) + 2 B(t) b(p) + A(t) c(p)
    *grad_warped = Grid(h, w, nc, 0.0);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        for (int c = 0; c < nc; ++c) {
          double sa = 0, sb = 0, sc = 0;
          for (int oy = -r; oy <= r; ++oy) {
            const int py = y + oy;
            if (py < r || py >= h - r) continue;
            for (int ox = -r; ox <= r; ++ox) {
              const int px = x + ox;
              if (px < r || px >= w - r) continue;
              sa += ga.at(py, px, c);
              sb += gb.at(py, px, c);
              sc += gc_.at(py, px, c);
            }
          }
          grad_warped->at(y, x, c) =
              (sa + 2.0 * warped2.at(y, x, c) * sb + image1.at(y, x, c) * sc) /
              n;
        }
      }
    }
  }
  return loss;
}

double photometric_loss(const Image& image1, const Image& image2,
                        const FlowField& flow, const Mask& mask,
                        const PhotometricConfig& config, FlowField* grad_flow) {
  config.validate();
  require_same_shape(image1, image2, "photometric_loss");
  require_same_spatial_shape(image1, flow, "photometric_loss");
  require_same_spatial_shape(image1, mask, "photometric_loss");
  const Grid warped = warp(image2, flow, Border::Clamp);
  const int h = image1.height, w = image1.width, nc = image1.channels;

  double loss = 0.0;
  Grid grad_warped;
  Grid* gw = grad_flow ? &grad_warped : nullptr;

  switch (config.kind) {
    case PhotometricKind::L1:
    case PhotometricKind::Charbonnier: {
      Grid value(h, w, 1, 0.0);
#pragma omp parallel for schedule(static)
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
          double v = 0.0;
          for (int c = 0; c < nc; ++c) {
            const double d = image1.at(y, x, c) - warped.at(y, x, c);
            v += config.kind == PhotometricKind::Charbonnier
                     ? charbonnier(d, config)
                     : std::abs(d + config.l1_eps);
          }
          value.at(y, x, 0) = v / nc;
        }
      double num = 0.0, den = 0.0;
      masked_sums(value, mask, num, den);
      loss = num / (den + kDenomStabilizer);
      if (gw) {
        *gw = Grid(h, w, nc, 0.0);
#pragma omp parallel for schedule(static)
        for (int y = 0; y < h; ++y)
          for (int x = 0; x < w; ++x) {
            const double m = mask.at(y, x, 0) / (den + kDenomStabilizer) / nc;
            for (int c = 0; c < nc; ++c) {
              const double d = image1.at(y, x, c) - warped.at(y, x, c);
              const double dpen =
                  config.kind == PhotometricKind::Charbonnier
                      ? charbonnier_deriv(d, config)
                      : (d + config.l1_eps >= 0.0 ? 1.0 : -1.0);
              gw->at(y, x, c) = -m * dpen;  // d(d)/d(warped) = -1
            }
          }
      }
      break;
    }
    case PhotometricKind::SSIM:
      loss = ssim_loss(image1, warped, mask, config, gw);
      break;
    case PhotometricKind::Census:
      loss = census_loss(image1, warped, mask, config, gw);
      break;
  }

  if (grad_flow) warp_vjp(image2, flow, Border::Clamp, grad_warped, *grad_flow);
  return loss;
}

}  // namespace flowkit
