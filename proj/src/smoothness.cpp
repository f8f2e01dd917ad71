#include "flowkit/smoothness.hpp"

#include <cmath>
#include <vector>

#include "flowkit/image_ops.hpp"

namespace flowkit {

namespace {

inline double sgn(double t) { return t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0); }

}  // namespace

void SmoothnessConfig::validate() const {
  if (order != 1 && order != 2)
    throw std::invalid_argument("SmoothnessConfig: order must be 1 or 2");
  if (lambda < 0.0)
    throw std::invalid_argument("SmoothnessConfig: lambda must be >= 0");
  if (level < 0)
    throw std::invalid_argument("SmoothnessConfig: level must be >= 0");
  if (weight < 0.0)
    throw std::invalid_argument("SmoothnessConfig: weight must be >= 0");
}

double default_smoothness_weight(int order) { return order == 2 ? 4.0 : 2.0; }

void edge_weights(const Image& image, double lambda, Grid& wx, Grid& wy) {
  require_image(image, "edge_weights");
  Grid dx, dy;
  spatial_gradients(image, dx, dy);
  const double scale = lambda / image.channels;
  wx = Grid(dx.height, dx.width, 1);
  wy = Grid(dy.height, dy.width, 1);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < dx.height; ++y)
    for (int x = 0; x < dx.width; ++x) {
      double s = 0.0;
      for (int c = 0; c < dx.channels; ++c) s += std::abs(dx.at(y, x, c));
      wx.at(y, x, 0) = std::exp(-scale * s);
    }
#pragma omp parallel for schedule(static)
  for (int y = 0; y < dy.height; ++y)
    for (int x = 0; x < dy.width; ++x) {
      double s = 0.0;
      for (int c = 0; c < dy.channels; ++c) s += std::abs(dy.at(y, x, c));
      wy.at(y, x, 0) = std::exp(-scale * s);
    }
}

double smoothness_loss_at_resolution(const FlowField& flow,
                                     const Image& image_at_level,
                                     const SmoothnessConfig& config,
                                     FlowField* grad_flow) {
  config.validate();
  require_flow(flow, "smoothness_loss");
  require_same_spatial_shape(flow, image_at_level, "smoothness_loss");
  const int h = flow.height, w = flow.width;
  const int k = config.order;
  if (w <= k || h <= k)
    throw std::invalid_argument("smoothness_loss: flow too small for order " +
                                std::to_string(k));

  Grid wx, wy;
  edge_weights(image_at_level, config.lambda, wx, wy);

  const int nx_pos = w - k, ny_pos = h - k;
  const double inv_nx = 1.0 / (static_cast<double>(h) * nx_pos * 2);
  const double inv_ny = 1.0 / (static_cast<double>(ny_pos) * w * 2);

  // term_x: k-th difference along x, edge weight at the stencil center
  std::vector<double> row_sums(h, 0.0);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    double s = 0.0;
    for (int x = 0; x < nx_pos; ++x) {
      const double ew = k == 1 ? wx.at(y, x, 0) : wx.at(y, x + 1, 0);
      for (int c = 0; c < 2; ++c) {
        const double d = k == 1 ? flow.at(y, x + 1, c) - flow.at(y, x, c)
                                : flow.at(y, x, c) - 2.0 * flow.at(y, x + 1, c) +
                                      flow.at(y, x + 2, c);
        s += ew * std::abs(d);
      }
    }
    row_sums[y] = s;
  }
  double term_x = 0.0;
  for (int y = 0; y < h; ++y) term_x += row_sums[y];
  term_x *= inv_nx;

  std::vector<double> col_row_sums(ny_pos, 0.0);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < ny_pos; ++y) {
    double s = 0.0;
    for (int x = 0; x < w; ++x) {
      const double ew = k == 1 ? wy.at(y, x, 0) : wy.at(y + 1, x, 0);
      for (int c = 0; c < 2; ++c) {
        const double d = k == 1 ? flow.at(y + 1, x, c) - flow.at(y, x, c)
                                : flow.at(y, x, c) - 2.0 * flow.at(y + 1, x, c) +
                                      flow.at(y + 2, x, c);
        s += ew * std::abs(d);
      }
    }
    col_row_sums[y] = s;
  }
  double term_y = 0.0;
  for (int y = 0; y < ny_pos; ++y) term_y += col_row_sums[y];
  term_y *= inv_ny;

  if (grad_flow) {
    *grad_flow = FlowField(h, w, 2, 0.0);
    const double cx[3] = {1.0, -2.0, 1.0};
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        for (int c = 0; c < 2; ++c) {
          double g = 0.0;
          // x stencils starting at s in [x-k, x] that contain x
          for (int s = x - k; s <= x; ++s) {
            if (s < 0 || s >= nx_pos) continue;
            const double ew = k == 1 ? wx.at(y, s, 0) : wx.at(y, s + 1, 0);
            const double d =
                k == 1 ? flow.at(y, s + 1, c) - flow.at(y, s, c)
                       : flow.at(y, s, c) - 2.0 * flow.at(y, s + 1, c) +
                             flow.at(y, s + 2, c);
            const double coeff = k == 1 ? (x == s ? -1.0 : 1.0) : cx[x - s];
            g += inv_nx * ew * sgn(d) * coeff;
          }
          for (int s = y - k; s <= y; ++s) {
            if (s < 0 || s >= ny_pos) continue;
            const double ew = k == 1 ? wy.at(s, x, 0) : wy.at(s + 1, x, 0);
            const double d =
                k == 1 ? flow.at(s + 1, x, c) - flow.at(s, x, c)
                       : flow.at(s, x, c) - 2.0 * flow.at(s + 1, x, c) +
                             flow.at(s + 2, x, c);
            const double coeff = k == 1 ? (y == s ? -1.0 : 1.0) : cx[y - s];
            g += inv_ny * ew * sgn(d) * coeff;
          }
          grad_flow->at(y, x, c) = g;
        }
      }
    }
  }
  return term_x + term_y;
}

double smoothness_loss(const FlowField& flow_at_level, const Image& image_full,
                       const SmoothnessConfig& config, FlowField* grad_flow) {
  config.validate();
  require_flow(flow_at_level, "smoothness_loss");
  const Image at_level = downsample_levels(image_full, config.level);
  if (!at_level.same_spatial_shape(flow_at_level))
    throw std::invalid_argument(
        "smoothness_loss: flow " + shape_string(flow_at_level) +
        " does not match image downsampled to level " +
        std::to_string(config.level) + " (" + shape_string(at_level) + ")");
  return smoothness_loss_at_resolution(flow_at_level, at_level, config,
                                       grad_flow);
}

}  // namespace flowkit
