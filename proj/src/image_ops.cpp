#include "flowkit/image_ops.hpp"

#include <algorithm>
#include <cmath>

namespace flowkit {

namespace {

inline double fetch_clamp(const Grid& g, int y, int x, int c) {
  x = std::clamp(x, 0, g.width - 1);
  y = std::clamp(y, 0, g.height - 1);
  return g.at(y, x, c);
}

inline double fetch_zero(const Grid& g, int y, int x, int c) {
  if (x < 0 || x >= g.width || y < 0 || y >= g.height) return 0.0;
  return g.at(y, x, c);
}

}  // namespace

FlowField warp(const Grid& source, const FlowField& flow, Border border) {
  require_flow(flow, "warp");
  require_same_spatial_shape(source, flow, "warp");
  const int h = source.height, w = source.width, c = source.channels;
  Grid out(h, w, c);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double sx = x + flow.at(y, x, 0);
      double sy = y + flow.at(y, x, 1);
      if (border == Border::Clamp) {
        sx = std::clamp(sx, 0.0, static_cast<double>(w - 1));
        sy = std::clamp(sy, 0.0, static_cast<double>(h - 1));
      }
      const int x0 = static_cast<int>(std::floor(sx));
      const int y0 = static_cast<int>(std::floor(sy));
      const double fx = sx - x0, fy = sy - y0;
      for (int k = 0; k < c; ++k) {
        double v00, v01, v10, v11;
        if (border == Border::Clamp) {
          v00 = fetch_clamp(source, y0, x0, k);
          v01 = fetch_clamp(source, y0, x0 + 1, k);
          v10 = fetch_clamp(source, y0 + 1, x0, k);
          v11 = fetch_clamp(source, y0 + 1, x0 + 1, k);
        } else {
          v00 = fetch_zero(source, y0, x0, k);
          v01 = fetch_zero(source, y0, x0 + 1, k);
          v10 = fetch_zero(source, y0 + 1, x0, k);
          v11 = fetch_zero(source, y0 + 1, x0 + 1, k);
        }
        out.at(y, x, k) = (1.0 - fy) * ((1.0 - fx) * v00 + fx * v01) +
                          fy * ((1.0 - fx) * v10 + fx * v11);
      }
    }
  }
  return out;
}

void warp_vjp(const Grid& source, const FlowField& flow, Border border,
              const Grid& grad_out, FlowField& grad_flow, Grid* grad_source) {
  require_flow(flow, "warp_vjp");
  require_same_spatial_shape(source, flow, "warp_vjp");
  if (!grad_out.same_shape(source))
    throw std::invalid_argument("warp_vjp: grad_out shape " +
                                shape_string(grad_out) +
                                " does not match source " +
                                shape_string(source));
  const int h = source.height, w = source.width, c = source.channels;
  grad_flow = FlowField(h, w, 2, 0.0);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double sx = x + flow.at(y, x, 0);
      double sy = y + flow.at(y, x, 1);
      bool sat_x = false, sat_y = false;
      if (border == Border::Clamp) {
        sat_x = sx < 0.0 || sx > w - 1;
        sat_y = sy < 0.0 || sy > h - 1;
        sx = std::clamp(sx, 0.0, static_cast<double>(w - 1));
        sy = std::clamp(sy, 0.0, static_cast<double>(h - 1));
      }
      const int x0 = static_cast<int>(std::floor(sx));
      const int y0 = static_cast<int>(std::floor(sy));
      const double fx = sx - x0, fy = sy - y0;
      double gu = 0.0, gv = 0.0;
      for (int k = 0; k < c; ++k) {
        double v00, v01, v10, v11;
        if (border == Border::Clamp) {
          v00 = fetch_clamp(source, y0, x0, k);
          v01 = fetch_clamp(source, y0, x0 + 1, k);
          v10 = fetch_clamp(source, y0 + 1, x0, k);
          v11 = fetch_clamp(source, y0 + 1, x0 + 1, k);
        } else {
          v00 = fetch_zero(source, y0, x0, k);
          v01 = fetch_zero(source, y0, x0 + 1, k);
          v10 = fetch_zero(source, y0 + 1, x0, k);
          v11 = fetch_zero(source, y0 + 1, x0 + 1, k);
        }
        const double g = grad_out.at(y, x, k);
        gu += g * ((1.0 - fy) * (v01 - v00) + fy * (v11 - v10));
        gv += g * ((1.0 - fx) * (v10 - v00) + fx * (v11 - v01));
      }
      grad_flow.at(y, x, 0) = sat_x ? 0.0 : gu;
      grad_flow.at(y, x, 1) = sat_y ? 0.0 : gv;
    }
  }
  if (grad_source) {
    *grad_source = Grid(h, w, c, 0.0);
    // scatter pass; kept sequential so accumulation order is fixed
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double sx = x + flow.at(y, x, 0);
        double sy = y + flow.at(y, x, 1);
        if (border == Border::Clamp) {
          sx = std::clamp(sx, 0.0, static_cast<double>(w - 1));
          sy = std::clamp(sy, 0.0, static_cast<double>(h - 1));
        }
        const int x0 = static_cast<int>(std::floor(sx));
        const int y0 = static_cast<int>(std::floor(sy));
        const double fx = sx - x0, fy = sy - y0;
        const int xs[2] = {x0, x0 + 1};
        const int ys[2] = {y0, y0 + 1};
        const double wxs[2] = {1.0 - fx, fx};
        const double wys[2] = {1.0 - fy, fy};
        for (int j = 0; j < 2; ++j) {
          for (int i = 0; i < 2; ++i) {
            int tx = xs[i], ty = ys[j];
            if (border == Border::Clamp) {
              tx = std::clamp(tx, 0, w - 1);
              ty = std::clamp(ty, 0, h - 1);
            } else if (tx < 0 || tx >= w || ty < 0 || ty >= h) {
              continue;
            }
            const double wgt = wxs[i] * wys[j];
            if (wgt == 0.0) continue;
            for (int k = 0; k < c; ++k)
              grad_source->at(ty, tx, k) += wgt * grad_out.at(y, x, k);
          }
        }
      }
    }
  }
}

Grid splat(const Grid& weights, const FlowField& flow) {
  require_flow(flow, "splat");
  require_same_spatial_shape(weights, flow, "splat");
  const int h = weights.height, w = weights.width, c = weights.channels;
  Grid out(h, w, c, 0.0);
  // scatter; sequential for a fixed accumulation order
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double ex = x + flow.at(y, x, 0);
      const double ey = y + flow.at(y, x, 1);
      const int x0 = static_cast<int>(std::floor(ex));
      const int y0 = static_cast<int>(std::floor(ey));
      const double fx = ex - x0, fy = ey - y0;
      const int xs[2] = {x0, x0 + 1};
      const int ys[2] = {y0, y0 + 1};
      const double wxs[2] = {1.0 - fx, fx};
      const double wys[2] = {1.0 - fy, fy};
      for (int j = 0; j < 2; ++j) {
        for (int i = 0; i < 2; ++i) {
          const int tx = xs[i], ty = ys[j];
          if (tx < 0 || tx >= w || ty < 0 || ty >= h) continue;
          const double wgt = wxs[i] * wys[j];
          if (wgt == 0.0) continue;
          for (int k = 0; k < c; ++k)
            out.at(ty, tx, k) += wgt * weights.at(y, x, k);
        }
      }
    }
  }
  return out;
}

Grid downsample2x(const Grid& image) {
  if (image.height < 2 || image.width < 2)
    throw std::invalid_argument("downsample2x: needs height, width >= 2, got " +
                                shape_string(image));
  const int oh = (image.height + 1) / 2;
  const int ow = (image.width + 1) / 2;
  Grid out(oh, ow, image.channels);
#pragma omp parallel for schedule(static)
  for (int oy = 0; oy < oh; ++oy) {
    for (int ox = 0; ox < ow; ++ox) {
      const int y1 = std::min(2 * oy + 2, image.height);
      const int x1 = std::min(2 * ox + 2, image.width);
      const int count = (y1 - 2 * oy) * (x1 - 2 * ox);
      for (int k = 0; k < image.channels; ++k) {
        double sum = 0.0;
        for (int y = 2 * oy; y < y1; ++y)
          for (int x = 2 * ox; x < x1; ++x) sum += image.at(y, x, k);
        out.at(oy, ox, k) = sum / count;
      }
    }
  }
  return out;
}

Grid downsample_levels(const Grid& image, int levels) {
  Grid out = image;
  for (int i = 0; i < levels; ++i) out = downsample2x(out);
  return out;
}

Grid resize_bilinear(const Grid& grid, int new_height, int new_width,
                     bool rescale_flow_values) {
  if (new_height < 2 || new_width < 2)
    throw std::invalid_argument("resize_bilinear: new dimensions must be >= 2");
  if (rescale_flow_values && grid.channels != 2)
    throw std::invalid_argument(
        "resize_bilinear: rescale_flow_values requires a flow field, got " +
        shape_string(grid));
  const int h = grid.height, w = grid.width, c = grid.channels;
  const double sy_ratio = static_cast<double>(h - 1) / (new_height - 1);
  const double sx_ratio = static_cast<double>(w - 1) / (new_width - 1);
  Grid out(new_height, new_width, c);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < new_height; ++y) {
    const double sy = y * sy_ratio;
    const int y0 = std::min(static_cast<int>(std::floor(sy)), h - 1);
    const double fy = sy - y0;
    const int y1 = std::min(y0 + 1, h - 1);
    for (int x = 0; x < new_width; ++x) {
      const double sx = x * sx_ratio;
      const int x0 = std::min(static_cast<int>(std::floor(sx)), w - 1);
      const double fx = sx - x0;
      const int x1 = std::min(x0 + 1, w - 1);
      for (int k = 0; k < c; ++k) {
        const double v =
            (1.0 - fy) * ((1.0 - fx) * grid.at(y0, x0, k) +
                          fx * grid.at(y0, x1, k)) +
            fy * ((1.0 - fx) * grid.at(y1, x0, k) + fx * grid.at(y1, x1, k));
        out.at(y, x, k) = v;
      }
    }
  }
  if (rescale_flow_values) {
    const double su = static_cast<double>(new_width) / w;
    const double sv = static_cast<double>(new_height) / h;
    for (int y = 0; y < new_height; ++y)
      for (int x = 0; x < new_width; ++x) {
        out.at(y, x, 0) *= su;
        out.at(y, x, 1) *= sv;
      }
  }
  return out;
}

Grid resize_bilinear_vjp(const Grid& grad_out, int src_height, int src_width,
                         bool rescale_flow_values) {
  if (rescale_flow_values && grad_out.channels != 2)
    throw std::invalid_argument(
        "resize_bilinear_vjp: rescale_flow_values requires a flow field");
  const int dh = grad_out.height, dw = grad_out.width, c = grad_out.channels;
  const double sy_ratio = static_cast<double>(src_height - 1) / (dh - 1);
  const double sx_ratio = static_cast<double>(src_width - 1) / (dw - 1);
  const double su = static_cast<double>(dw) / src_width;
  const double sv = static_cast<double>(dh) / src_height;

  Grid grad_src(src_height, src_width, c, 0.0);
  // sequential scatter with the exact forward tap arithmetic
  for (int y = 0; y < dh; ++y) {
    const double sy = y * sy_ratio;
    const int y0 = std::min(static_cast<int>(std::floor(sy)), src_height - 1);
    const double fy = sy - y0;
    const int y1 = std::min(y0 + 1, src_height - 1);
    for (int x = 0; x < dw; ++x) {
      const double sx = x * sx_ratio;
      const int x0 = std::min(static_cast<int>(std::floor(sx)), src_width - 1);
      const double fx = sx - x0;
      const int x1 = std::min(x0 + 1, src_width - 1);
      for (int k = 0; k < c; ++k) {
        double g = grad_out.at(y, x, k);
        if (rescale_flow_values) g *= k == 0 ? su : sv;
        grad_src.at(y0, x0, k) += (1.0 - fy) * (1.0 - fx) * g;
        grad_src.at(y0, x1, k) += (1.0 - fy) * fx * g;
        grad_src.at(y1, x0, k) += fy * (1.0 - fx) * g;
        grad_src.at(y1, x1, k) += fy * fx * g;
      }
    }
  }
  return grad_src;
}

void spatial_gradients(const Grid& grid, Grid& d_dx, Grid& d_dy) {
  if (grid.height < 2 || grid.width < 2)
    throw std::invalid_argument(
        "spatial_gradients: needs height, width >= 2, got " +
        shape_string(grid));
  const int h = grid.height, w = grid.width, c = grid.channels;
  d_dx = Grid(h, w - 1, c);
  d_dy = Grid(h - 1, w, c);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y)
    for (int x = 0; x + 1 < w; ++x)
      for (int k = 0; k < c; ++k)
        d_dx.at(y, x, k) = grid.at(y, x + 1, k) - grid.at(y, x, k);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h - 1; ++y)
    for (int x = 0; x < w; ++x)
      for (int k = 0; k < c; ++k)
        d_dy.at(y, x, k) = grid.at(y + 1, x, k) - grid.at(y, x, k);
}

Grid grayscale(const Image& image) {
  require_image(image, "grayscale");
  if (image.channels == 1) return image;
  Grid out(image.height, image.width, 1);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < image.height; ++y)
    for (int x = 0; x < image.width; ++x)
      out.at(y, x, 0) = 0.299 * image.at(y, x, 0) +
                        0.587 * image.at(y, x, 1) + 0.114 * image.at(y, x, 2);
  return out;
}

}  // namespace flowkit
