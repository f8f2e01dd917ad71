#include "flowkit/visualize.hpp"

#include <algorithm>
#include <cmath>

namespace flowkit {

namespace {

constexpr double kPi = 3.14159265358979323846;

void hsv_to_rgb(double h, double s, double v, double& r, double& g, double& b) {
  h = h - std::floor(h / 360.0) * 360.0;
  const double c = v * s;
  const double hp = h / 60.0;
  const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
  switch (static_cast<int>(hp) % 6) {
    case 0: r = c; g = x; b = 0; break;
    case 1: r = x; g = c; b = 0; break;
    case 2: r = 0; g = c; b = x; break;
    case 3: r = 0; g = x; b = c; break;
    case 4: r = x; g = 0; b = c; break;
    default: r = c; g = 0; b = x; break;
  }
  const double m = v - c;
  r += m;
  g += m;
  b += m;
}

}  // namespace

Image flow_to_color(const FlowField& flow, double max_magnitude) {
  require_flow(flow, "flow_to_color");
  double norm = max_magnitude;
  if (norm <= 0.0) {
    for (int y = 0; y < flow.height; ++y)
      for (int x = 0; x < flow.width; ++x)
        norm = std::max(norm, std::hypot(flow.at(y, x, 0), flow.at(y, x, 1)));
  }

  Image out(flow.height, flow.width, 3, 1.0);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < flow.height; ++y) {
    for (int x = 0; x < flow.width; ++x) {
      const double u = flow.at(y, x, 0), v = flow.at(y, x, 1);
      const double mag = std::hypot(u, v);
      const double sat = norm > 0.0 ? std::min(mag / norm, 1.0) : 0.0;
      const double hue = (std::atan2(v, u) + kPi) / (2.0 * kPi) * 360.0;
      double r, g, b;
      hsv_to_rgb(hue, sat, 1.0, r, g, b);
      out.at(y, x, 0) = 2.0 * r - 1.0;
      out.at(y, x, 1) = 2.0 * g - 1.0;
      out.at(y, x, 2) = 2.0 * b - 1.0;
    }
  }
  return out;
}

}  // namespace flowkit
