#pragma once

#include "flowkit/grid.hpp"

namespace flowkit {

// Color-wheel rendering: hue encodes direction, saturation encodes magnitude
// normalized by max_magnitude (the field's own maximum when <= 0). Zero flow
// maps to white; magnitudes beyond the normalizer saturate rather than wrap.
Image flow_to_color(const FlowField& flow, double max_magnitude = 0.0);

}  // namespace flowkit
