#include "flowkit/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace flowkit {

namespace {

constexpr double kPi = 3.14159265358979323846;

double bilinear(const Grid& g, double sy, double sx, int c) {
  sx = std::clamp(sx, 0.0, static_cast<double>(g.width - 1));
  sy = std::clamp(sy, 0.0, static_cast<double>(g.height - 1));
  const int x0 = static_cast<int>(std::floor(sx));
  const int y0 = static_cast<int>(std::floor(sy));
  const double fx = sx - x0, fy = sy - y0;
  const int x1 = std::min(x0 + 1, g.width - 1);
  const int y1 = std::min(y0 + 1, g.height - 1);
  return (1 - fy) * ((1 - fx) * g.at(y0, x0, c) + fx * g.at(y0, x1, c)) +
         fy * ((1 - fx) * g.at(y1, x0, c) + fx * g.at(y1, x1, c));
}

void box_blur_inplace(Grid& g, int radius) {
  Grid tmp(g.height, g.width, g.channels);
  for (int y = 0; y < g.height; ++y)
    for (int x = 0; x < g.width; ++x)
      for (int c = 0; c < g.channels; ++c) {
        double s = 0;
        int n = 0;
        for (int ox = -radius; ox <= radius; ++ox) {
          const int sx = x + ox;
          if (sx < 0 || sx >= g.width) continue;
          s += g.at(y, sx, c);
          ++n;
        }
        tmp.at(y, x, c) = s / n;
      }
  for (int y = 0; y < g.height; ++y)
    for (int x = 0; x < g.width; ++x)
      for (int c = 0; c < g.channels; ++c) {
        double s = 0;
        int n = 0;
        for (int oy = -radius; oy <= radius; ++oy) {
          const int sy = y + oy;
          if (sy < 0 || sy >= g.height) continue;
          s += tmp.at(sy, x, c);
          ++n;
        }
        g.at(y, x, c) = s / n;
      }
}

}  // namespace

MotionKind motion_kind_from_string(const std::string& name) {
  if (name == "translation") return MotionKind::Translation;
  if (name == "affine") return MotionKind::Affine;
  if (name == "two_layer") return MotionKind::TwoLayer;
  throw std::invalid_argument("unknown motion kind: " + name);
}

Image noise_texture(std::uint64_t seed, int height, int width, int channels,
                    int blur_passes) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);

  // fine octave: blurred white noise
  Image tex(height, width, channels);
  for (double& v : tex.data) v = dist(rng);
  for (int i = 0; i < blur_passes; ++i) box_blur_inplace(tex, 2);

  // coarse octave keeps the texture matchable after repeated downsampling
  const int ch = std::max(2, height / 8), cw = std::max(2, width / 8);
  Image coarse(ch, cw, channels);
  for (double& v : coarse.data) v = dist(rng);
  box_blur_inplace(coarse, 1);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const double sy = (ch - 1) * static_cast<double>(y) / (height - 1);
      const double sx = (cw - 1) * static_cast<double>(x) / (width - 1);
      for (int c = 0; c < channels; ++c)
        tex.at(y, x, c) = 0.5 * tex.at(y, x, c) + bilinear(coarse, sy, sx, c);
    }

  // stretch to a usable contrast
  double lo = 1e300, hi = -1e300;
  for (double v : tex.data) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double span = hi - lo;
  if (span > 0)
    for (double& v : tex.data) v = ((v - lo) / span) * 1.8 - 0.9;
  return tex;
}

SyntheticPair synth_translation(std::uint64_t seed, int height, int width,
                                double du, double dv) {
  const int margin =
      static_cast<int>(std::ceil(std::max(std::abs(du), std::abs(dv)))) + 2;
  if (2 * margin >= height || 2 * margin >= width)
    throw std::invalid_argument("synth_translation: motion too large for shape");
  const Image tex =
      noise_texture(seed, height + 2 * margin, width + 2 * margin, 3);

  SyntheticPair pair;
  pair.seed = seed;
  pair.image1 = Image(height, width, 3);
  pair.image2 = Image(height, width, 3);
  pair.true_flow = FlowField(height, width, 2);
  pair.true_occlusion = Mask(height, width, 1, 0.0);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      pair.true_flow.at(y, x, 0) = du;
      pair.true_flow.at(y, x, 1) = dv;
      for (int c = 0; c < 3; ++c) {
        pair.image1.at(y, x, c) = tex.at(y + margin, x + margin, c);
        pair.image2.at(y, x, c) =
            bilinear(tex, y + margin - dv, x + margin - du, c);
      }
    }
  return pair;
}

SyntheticPair synth_affine(std::uint64_t seed, int height, int width,
                           const double a[4], const double b[2]) {
  // forward map F(p) = p + A p + b; require it stays well inside the texture
  const double m00 = 1.0 + a[0], m01 = a[1], m10 = a[2], m11 = 1.0 + a[3];
  const double det = m00 * m11 - m01 * m10;
  if (std::abs(det) < 1e-6)
    throw std::invalid_argument("synth_affine: motion is degenerate");

  double max_disp = 0.0;
  for (int cy = 0; cy <= 1; ++cy)
    for (int cx = 0; cx <= 1; ++cx) {
      const double x = cx * (width - 1), y = cy * (height - 1);
      const double u = a[0] * x + a[1] * y + b[0];
      const double v = a[2] * x + a[3] * y + b[1];
      max_disp = std::max(max_disp, std::max(std::abs(u), std::abs(v)));
    }
  const int margin = static_cast<int>(std::ceil(max_disp)) + 2;
  if (2 * margin >= height || 2 * margin >= width)
    throw std::invalid_argument("synth_affine: motion too large for shape");
  const Image tex =
      noise_texture(seed, height + 2 * margin, width + 2 * margin, 3);

  SyntheticPair pair;
  pair.seed = seed;
  pair.image1 = Image(height, width, 3);
  pair.image2 = Image(height, width, 3);
  pair.true_flow = FlowField(height, width, 2);
  pair.true_occlusion = Mask(height, width, 1, 0.0);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      pair.true_flow.at(y, x, 0) = a[0] * x + a[1] * y + b[0];
      pair.true_flow.at(y, x, 1) = a[2] * x + a[3] * y + b[1];
      for (int c = 0; c < 3; ++c)
        pair.image1.at(y, x, c) = tex.at(y + margin, x + margin, c);
      // inverse of F at this pixel of image2
      const double rx = x - b[0], ry = y - b[1];
      const double px = (m11 * rx - m01 * ry) / det;
      const double py = (-m10 * rx + m00 * ry) / det;
      for (int c = 0; c < 3; ++c)
        pair.image2.at(y, x, c) = bilinear(tex, py + margin, px + margin, c);
    }
  return pair;
}

SyntheticPair synth_two_layer(std::uint64_t seed, int height, int width,
                              int square_size, int du, int dv) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  const Image bg = noise_texture(seed, height, width, 3);
  const Image fg = noise_texture(seed + 1, square_size, square_size, 3);

  const int max_x0 = width - square_size - std::max(du, 0);
  const int max_y0 = height - square_size - std::max(dv, 0);
  const int min_x0 = std::max(-du, 0);
  const int min_y0 = std::max(-dv, 0);
  if (min_x0 >= max_x0 || min_y0 >= max_y0)
    throw std::invalid_argument("synth_two_layer: motion exceeds shape margins");
  std::uniform_int_distribution<int> dx0(min_x0, max_x0 - 1);
  std::uniform_int_distribution<int> dy0(min_y0, max_y0 - 1);
  const int x0 = dx0(rng), y0 = dy0(rng);

  auto in_rect = [&](int y, int x, int ry, int rx) {
    return y >= ry && y < ry + square_size && x >= rx && x < rx + square_size;
  };

  SyntheticPair pair;
  pair.seed = seed;
  pair.image1 = bg;
  pair.image2 = bg;
  pair.true_flow = FlowField(height, width, 2, 0.0);
  pair.true_occlusion = Mask(height, width, 1, 0.0);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const bool in1 = in_rect(y, x, y0, x0);
      const bool in2 = in_rect(y, x, y0 + dv, x0 + du);
      if (in1) {
        for (int c = 0; c < 3; ++c)
          pair.image1.at(y, x, c) = fg.at(y - y0, x - x0, c);
        pair.true_flow.at(y, x, 0) = du;
        pair.true_flow.at(y, x, 1) = dv;
      }
      if (in2)
        for (int c = 0; c < 3; ++c)
          pair.image2.at(y, x, c) = fg.at(y - y0 - dv, x - x0 - du, c);
      // background of image1 covered by the square in image2
      if (!in1 && in2) pair.true_occlusion.at(y, x, 0) = 1.0;
    }
  return pair;
}

SyntheticPair synth_pair(std::uint64_t seed, MotionKind motion, int height,
                         int width) {
  std::mt19937_64 rng(seed);
  switch (motion) {
    case MotionKind::Translation: {
      std::uniform_int_distribution<int> shift(-6, 6);
      int du = shift(rng), dv = shift(rng);
      if (du == 0 && dv == 0) du = 3;
      return synth_translation(seed, height, width, du, dv);
    }
    case MotionKind::Affine: {
      std::uniform_real_distribution<double> small(-0.02, 0.02);
      std::uniform_real_distribution<double> trans(-3.0, 3.0);
      const double a[4] = {small(rng), small(rng), small(rng), small(rng)};
      const double b[2] = {trans(rng), trans(rng)};
      return synth_affine(seed, height, width, a, b);
    }
    case MotionKind::TwoLayer: {
      const int square = std::max(8, std::min(height, width) / 3);
      return synth_two_layer(seed, height, width, square, 4, 0);
    }
  }
  throw std::logic_error("synth_pair: unreachable");
}

void add_shading(SyntheticPair& pair, std::uint64_t seed, double amplitude) {
  std::mt19937_64 rng(seed ^ 0xc2b2ae3d27d4eb4fULL);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
  const double px = phase(rng), py = phase(rng);
  const double fx = 2.0 * kPi / pair.image2.width;
  const double fy = 2.0 * kPi / pair.image2.height;
  for (int y = 0; y < pair.image2.height; ++y)
    for (int x = 0; x < pair.image2.width; ++x) {
      const double s =
          amplitude * std::sin(fx * x + px) * std::sin(fy * y + py);
      for (int c = 0; c < 3; ++c) {
        double& v = pair.image2.at(y, x, c);
        v = std::clamp(v + s, -1.0, 1.0);
      }
    }
}

namespace {

void flip_lr_inplace(Grid& g, bool negate_u) {
  for (int y = 0; y < g.height; ++y)
    for (int x = 0; x < g.width / 2; ++x)
      for (int c = 0; c < g.channels; ++c)
        std::swap(g.at(y, x, c), g.at(y, g.width - 1 - x, c));
  if (negate_u)
    for (int y = 0; y < g.height; ++y)
      for (int x = 0; x < g.width; ++x) g.at(y, x, 0) = -g.at(y, x, 0);
}

void flip_ud_inplace(Grid& g, bool negate_v) {
  for (int y = 0; y < g.height / 2; ++y)
    for (int x = 0; x < g.width; ++x)
      for (int c = 0; c < g.channels; ++c)
        std::swap(g.at(y, x, c), g.at(g.height - 1 - y, x, c));
  if (negate_v)
    for (int y = 0; y < g.height; ++y)
      for (int x = 0; x < g.width; ++x) g.at(y, x, 1) = -g.at(y, x, 1);
}

void rotate_hue_inplace(Image& im, double angle) {
  // rotation about the achromatic axis
  const double cs = std::cos(angle), sn = std::sin(angle);
  const double a = cs + (1.0 - cs) / 3.0;
  const double b = (1.0 - cs) / 3.0 - sn / std::sqrt(3.0);
  const double c = (1.0 - cs) / 3.0 + sn / std::sqrt(3.0);
  for (int y = 0; y < im.height; ++y)
    for (int x = 0; x < im.width; ++x) {
      const double r = im.at(y, x, 0), g = im.at(y, x, 1), bl = im.at(y, x, 2);
      im.at(y, x, 0) = std::clamp(a * r + b * g + c * bl, -1.0, 1.0);
      im.at(y, x, 1) = std::clamp(c * r + a * g + b * bl, -1.0, 1.0);
      im.at(y, x, 2) = std::clamp(b * r + c * g + a * bl, -1.0, 1.0);
    }
}

}  // namespace

SyntheticPair augment(const SyntheticPair& pair, const AugmentOps& ops,
                      std::uint64_t seed) {
  if ((ops.channel_swap || ops.hue_shift) && pair.image1.channels != 3)
    throw std::invalid_argument("augment: color ops require 3 channels");
  SyntheticPair out = pair;
  std::mt19937_64 rng(seed);

  if (ops.channel_swap) {
    int perm[3] = {0, 1, 2};
    std::shuffle(perm, perm + 3, rng);
    for (Image* im : {&out.image1, &out.image2}) {
      Image src = *im;
      for (int y = 0; y < im->height; ++y)
        for (int x = 0; x < im->width; ++x)
          for (int c = 0; c < 3; ++c) im->at(y, x, c) = src.at(y, x, perm[c]);
    }
  }
  if (ops.hue_shift) {
    std::uniform_real_distribution<double> dist(-0.5, 0.5);
    const double angle = dist(rng);
    rotate_hue_inplace(out.image1, angle);
    rotate_hue_inplace(out.image2, angle);
  }
  if (ops.flip_lr) {
    flip_lr_inplace(out.image1, false);
    flip_lr_inplace(out.image2, false);
    flip_lr_inplace(out.true_flow, true);
    flip_lr_inplace(out.true_occlusion, false);
  }
  if (ops.flip_ud) {
    flip_ud_inplace(out.image1, false);
    flip_ud_inplace(out.image2, false);
    flip_ud_inplace(out.true_flow, true);
    flip_ud_inplace(out.true_occlusion, false);
  }
  return out;
}

}  // namespace flowkit
