#include "flowkit/reference.hpp"

#include <algorithm>
#include <cmath>

namespace flowkit::reference {

namespace {

double bilinear_clamp(const Grid& g, double sy, double sx, int c) {
  sx = std::clamp(sx, 0.0, static_cast<double>(g.width - 1));
  sy = std::clamp(sy, 0.0, static_cast<double>(g.height - 1));
  const int x0 = static_cast<int>(std::floor(sx));
  const int y0 = static_cast<int>(std::floor(sy));
  const double fx = sx - x0, fy = sy - y0;
  auto px = [&](int y, int x) {
    return g.at(std::min(y, g.height - 1), std::min(x, g.width - 1), c);
  };
  return (1 - fy) * ((1 - fx) * px(y0, x0) + fx * px(y0, x0 + 1)) +
         fy * ((1 - fx) * px(y0 + 1, x0) + fx * px(y0 + 1, x0 + 1));
}

double bilinear_zero(const Grid& g, double sy, double sx, int c) {
  const int x0 = static_cast<int>(std::floor(sx));
  const int y0 = static_cast<int>(std::floor(sy));
  const double fx = sx - x0, fy = sy - y0;
  auto px = [&](int y, int x) {
    if (x < 0 || x >= g.width || y < 0 || y >= g.height) return 0.0;
    return g.at(y, x, c);
  };
  return (1 - fy) * ((1 - fx) * px(y0, x0) + fx * px(y0, x0 + 1)) +
         fy * ((1 - fx) * px(y0 + 1, x0) + fx * px(y0 + 1, x0 + 1));
}

double gray_at(const Image& im, int y, int x) {
  if (im.channels == 1) return im.at(y, x, 0);
  return 0.299 * im.at(y, x, 0) + 0.587 * im.at(y, x, 1) +
         0.114 * im.at(y, x, 2);
}

}  // namespace

Grid warp_clamp(const Grid& source, const FlowField& flow) {
  Grid out(source.height, source.width, source.channels);
  for (int y = 0; y < source.height; ++y)
    for (int x = 0; x < source.width; ++x)
      for (int c = 0; c < source.channels; ++c)
        out.at(y, x, c) = bilinear_clamp(source, y + flow.at(y, x, 1),
                                         x + flow.at(y, x, 0), c);
  return out;
}

Grid warp_zero(const Grid& source, const FlowField& flow) {
  Grid out(source.height, source.width, source.channels);
  for (int y = 0; y < source.height; ++y)
    for (int x = 0; x < source.width; ++x)
      for (int c = 0; c < source.channels; ++c)
        out.at(y, x, c) = bilinear_zero(source, y + flow.at(y, x, 1),
                                        x + flow.at(y, x, 0), c);
  return out;
}

Grid splat(const Grid& weights, const FlowField& flow) {
  Grid out(weights.height, weights.width, weights.channels, 0.0);
  for (int y = 0; y < weights.height; ++y) {
    for (int x = 0; x < weights.width; ++x) {
      const double ex = x + flow.at(y, x, 0);
      const double ey = y + flow.at(y, x, 1);
      const int x0 = static_cast<int>(std::floor(ex));
      const int y0 = static_cast<int>(std::floor(ey));
      const double fx = ex - x0, fy = ey - y0;
      for (int c = 0; c < weights.channels; ++c) {
        const double v = weights.at(y, x, c);
        struct {
          int x, y;
          double w;
        } taps[4] = {{x0, y0, (1 - fx) * (1 - fy)},
                     {x0 + 1, y0, fx * (1 - fy)},
                     {x0, y0 + 1, (1 - fx) * fy},
                     {x0 + 1, y0 + 1, fx * fy}};
        for (const auto& t : taps)
          if (t.x >= 0 && t.x < weights.width && t.y >= 0 &&
              t.y < weights.height && t.w != 0.0)
            out.at(t.y, t.x, c) += t.w * v;
      }
    }
  }
  return out;
}

Grid downsample2x(const Grid& image) {
  const int oh = (image.height + 1) / 2, ow = (image.width + 1) / 2;
  Grid out(oh, ow, image.channels);
  for (int oy = 0; oy < oh; ++oy)
    for (int ox = 0; ox < ow; ++ox)
      for (int c = 0; c < image.channels; ++c) {
        double sum = 0.0;
        int count = 0;
        for (int y = 2 * oy; y < std::min(2 * oy + 2, image.height); ++y)
          for (int x = 2 * ox; x < std::min(2 * ox + 2, image.width); ++x) {
            sum += image.at(y, x, c);
            ++count;
          }
        out.at(oy, ox, c) = sum / count;
      }
  return out;
}

Grid second_difference_x(const Grid& grid) {
  Grid out(grid.height, grid.width - 2, grid.channels);
  for (int y = 0; y < grid.height; ++y)
    for (int x = 0; x + 2 < grid.width; ++x)
      for (int c = 0; c < grid.channels; ++c)
        out.at(y, x, c) = grid.at(y, x, c) - 2.0 * grid.at(y, x + 1, c) +
                          grid.at(y, x + 2, c);
  return out;
}

Grid second_difference_y(const Grid& grid) {
  Grid out(grid.height - 2, grid.width, grid.channels);
  for (int y = 0; y + 2 < grid.height; ++y)
    for (int x = 0; x < grid.width; ++x)
      for (int c = 0; c < grid.channels; ++c)
        out.at(y, x, c) = grid.at(y, x, c) - 2.0 * grid.at(y + 1, x, c) +
                          grid.at(y + 2, x, c);
  return out;
}

double masked_mean(const Grid& values, const Mask& mask) {
  double num = 0.0, den = 0.0;
  for (int y = 0; y < values.height; ++y)
    for (int x = 0; x < values.width; ++x) {
      num += values.at(y, x, 0) * mask.at(y, x, 0);
      den += mask.at(y, x, 0);
    }
  return num / (den + 1e-16);
}

double census_loss(const Image& image1, const Image& warped2, const Mask& mask,
                   const PhotometricConfig& config) {
  const int h = image1.height, w = image1.width;
  const int r = config.census_window / 2;
  auto soft = [](double t) { return t / std::sqrt(0.0081 + t * t); };
  double num = 0.0, den = 0.0;
  for (int y = r; y < h - r; ++y) {
    for (int x = r; x < w - r; ++x) {
      double dist = 0.0;
      for (int oy = -r; oy <= r; ++oy)
        for (int ox = -r; ox <= r; ++ox) {
          const double q =
              soft(gray_at(image1, y + oy, x + ox) - gray_at(image1, y, x)) -
              soft(gray_at(warped2, y + oy, x + ox) - gray_at(warped2, y, x));
          dist += q * q / (0.1 + q * q);
        }
      const double penalized =
          std::pow(dist * dist + config.charbonnier_eps * config.charbonnier_eps,
                   config.charbonnier_alpha);
      num += penalized * mask.at(y, x, 0);
      den += mask.at(y, x, 0);
    }
  }
  return num / (den + 1e-16);
}

double ssim_loss(const Image& image1, const Image& warped2, const Mask& mask,
                 const PhotometricConfig& config) {
  const int h = image1.height, w = image1.width, nc = image1.channels;
  const int r = config.ssim_window / 2;
  const double n = static_cast<double>(config.ssim_window) * config.ssim_window;
  double num = 0.0, den = 0.0;
  for (int y = r; y < h - r; ++y) {
    for (int x = r; x < w - r; ++x) {
      double ssim_sum = 0.0;
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
        const double u1 = s1 / n, u2 = s2 / n;
        const double v1 = s11 / n - u1 * u1;
        const double v2 = s22 / n - u2 * u2;
        const double cov = s12 / n - u1 * u2;
        ssim_sum += (2 * u1 * u2 + config.ssim_c1) * (2 * cov + config.ssim_c2) /
                    ((u1 * u1 + u2 * u2 + config.ssim_c1) *
                     (v1 + v2 + config.ssim_c2));
      }
      const double v =
          std::clamp((1.0 - ssim_sum / nc) * 0.5, 0.0, 1.0);
      num += v * mask.at(y, x, 0);
      den += mask.at(y, x, 0);
    }
  }
  return num / (den + 1e-16);
}

double smoothness_loss(const FlowField& flow, const Image& image_at_level,
                       const SmoothnessConfig& config) {
  const int h = flow.height, w = flow.width, k = config.order;
  const int nc = image_at_level.channels;
  auto wx_at = [&](int y, int x) {  // weight for forward difference at x
    double s = 0.0;
    for (int c = 0; c < nc; ++c)
      s += std::abs(image_at_level.at(y, x + 1, c) - image_at_level.at(y, x, c));
    return std::exp(-config.lambda / nc * s);
  };
  auto wy_at = [&](int y, int x) {
    double s = 0.0;
    for (int c = 0; c < nc; ++c)
      s += std::abs(image_at_level.at(y + 1, x, c) - image_at_level.at(y, x, c));
    return std::exp(-config.lambda / nc * s);
  };

  double sum_x = 0.0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x + k < w; ++x) {
      const double ew = k == 1 ? wx_at(y, x) : wx_at(y, x + 1);
      for (int c = 0; c < 2; ++c) {
        const double d = k == 1
                             ? flow.at(y, x + 1, c) - flow.at(y, x, c)
                             : flow.at(y, x, c) - 2 * flow.at(y, x + 1, c) +
                                   flow.at(y, x + 2, c);
        sum_x += ew * std::abs(d);
      }
    }
  double sum_y = 0.0;
  for (int y = 0; y + k < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double ew = k == 1 ? wy_at(y, x) : wy_at(y + 1, x);
      for (int c = 0; c < 2; ++c) {
        const double d = k == 1
                             ? flow.at(y + 1, x, c) - flow.at(y, x, c)
                             : flow.at(y, x, c) - 2 * flow.at(y + 1, x, c) +
                                   flow.at(y + 2, x, c);
        sum_y += ew * std::abs(d);
      }
    }
  return sum_x / (static_cast<double>(h) * (w - k) * 2) +
         sum_y / (static_cast<double>(h - k) * w * 2);
}

Grid cost_volume(const Grid& f1, const Grid& f2, int radius) {
  const int h = f1.height, w = f1.width, d = f1.channels;
  const int side = 2 * radius + 1;
  Grid out(h, w, side * side, 0.0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int v = -radius; v <= radius; ++v)
        for (int u = -radius; u <= radius; ++u) {
          double acc = 0.0;
          for (int k = 0; k < d; ++k) {
            const int sy = y + v, sx = x + u;
            if (sy < 0 || sy >= h || sx < 0 || sx >= w) continue;
            acc += f1.at(y, x, k) * f2.at(sy, sx, k);
          }
          out.at(y, x, (v + radius) * side + (u + radius)) = acc;
        }
  return out;
}

FlowField argmax_flow(const Grid& volume, int radius) {
  const int side = 2 * radius + 1;
  FlowField flow(volume.height, volume.width, 2, 0.0);
  for (int y = 0; y < volume.height; ++y)
    for (int x = 0; x < volume.width; ++x) {
      double best = -1e300;
      int bu = 0, bv = 0;
      bool any = false;
      for (int v = -radius; v <= radius; ++v)
        for (int u = -radius; u <= radius; ++u) {
          const double c = volume.at(y, x, (v + radius) * side + (u + radius));
          bool take = !any || c > best;
          if (!take && c == best) {
            const int na = std::abs(u) + std::abs(v);
            const int oa = std::abs(bu) + std::abs(bv);
            take = na < oa || (na == oa && (v < bv || (v == bv && u < bu)));
          }
          if (take) {
            best = c;
            bu = u;
            bv = v;
            any = true;
          }
        }
      flow.at(y, x, 0) = bu;
      flow.at(y, x, 1) = bv;
    }
  return flow;
}

Grid range_map(const FlowField& backward) {
  Grid ones(backward.height, backward.width, 1, 1.0);
  return splat(ones, backward);
}

Mask fb_consistency_mask(const FlowField& forward, const FlowField& backward,
                         const OcclusionConfig& config) {
  const Grid bw = warp_clamp(backward, forward);
  Mask mask(forward.height, forward.width, 1, 0.0);
  for (int y = 0; y < forward.height; ++y)
    for (int x = 0; x < forward.width; ++x) {
      const double fu = forward.at(y, x, 0), fv = forward.at(y, x, 1);
      const double bu = bw.at(y, x, 0), bv = bw.at(y, x, 1);
      const double lhs = (fu + bu) * (fu + bu) + (fv + bv) * (fv + bv);
      const double rhs =
          config.alpha1 * (fu * fu + fv * fv + bu * bu + bv * bv) +
          config.alpha2;
      mask.at(y, x, 0) = lhs < rhs ? 1.0 : 0.0;
    }
  return mask;
}

Grid endpoint_error(const FlowField& pred, const FlowField& truth) {
  Grid out(pred.height, pred.width, 1, 0.0);
  for (int y = 0; y < pred.height; ++y)
    for (int x = 0; x < pred.width; ++x) {
      const double du = pred.at(y, x, 0) - truth.at(y, x, 0);
      const double dv = pred.at(y, x, 1) - truth.at(y, x, 1);
      out.at(y, x, 0) = std::sqrt(du * du + dv * dv);
    }
  return out;
}

double error_rate(const FlowField& pred, const FlowField& truth,
                  const Mask& valid) {
  double bad = 0.0, total = 0.0;
  for (int y = 0; y < pred.height; ++y)
    for (int x = 0; x < pred.width; ++x) {
      if (valid.at(y, x, 0) == 0.0) continue;
      const double du = pred.at(y, x, 0) - truth.at(y, x, 0);
      const double dv = pred.at(y, x, 1) - truth.at(y, x, 1);
      const double epe = std::sqrt(du * du + dv * dv);
      const double tu = truth.at(y, x, 0), tv = truth.at(y, x, 1);
      const double tlen = std::sqrt(tu * tu + tv * tv);
      if (epe > 3.0 && epe > 0.05 * tlen) bad += 1.0;
      total += 1.0;
    }
  return bad / total;
}

}  // namespace flowkit::reference
