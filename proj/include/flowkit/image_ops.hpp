#pragma once

#include "flowkit/grid.hpp"

namespace flowkit {

enum class Border {
  Clamp,  // out-of-grid samples clamp to the nearest border pixel
  Zero,   // out-of-grid samples read as zero
};

// Bilinear backward warp: out(x,y) = sample of source at (x+u, y+v).
// Works on any channel count (images and flow fields alike).
FlowField warp(const Grid& source, const FlowField& flow,
               Border border = Border::Clamp);

// Vector-Jacobian product of warp. grad_out has the output's shape; fills
// grad_flow (2 channels) and, if non-null, grad_source (source's shape).
// At integer sample coordinates the flow derivative takes the
// right-continuous branch of the bilinear kernel; saturated clamped
// coordinates contribute zero flow gradient.
void warp_vjp(const Grid& source, const FlowField& flow, Border border,
              const Grid& grad_out, FlowField& grad_flow,
              Grid* grad_source = nullptr);

// Forward bilinear splat: each source pixel distributes weights(x,y) onto
// the <=4 integer pixels around (x+u, y+v); off-grid contributions are
// dropped. Adjoint of zero-padded warp.
Grid splat(const Grid& weights, const FlowField& flow);

// 2x2 box-mean downsample to ceil(H/2) x ceil(W/2); edge blocks average
// the available pixels.
Grid downsample2x(const Grid& image);

// Repeated downsample2x.
Grid downsample_levels(const Grid& image, int levels);

// Corner-aligned bilinear resize. With rescale_flow_values the grid must be
// a flow field; u scales by new_width/width and v by new_height/height.
Grid resize_bilinear(const Grid& grid, int new_height, int new_width,
                     bool rescale_flow_values = false);

// Adjoint of resize_bilinear: pulls a gradient at the output shape back to
// the source shape (src_height x src_width, grad_out's channel count).
Grid resize_bilinear_vjp(const Grid& grad_out, int src_height, int src_width,
                         bool rescale_flow_values = false);

// Forward differences. d_dx is H x (W-1) x C, d_dy is (H-1) x W x C; no
// padding, so loss terms average over valid positions only.
void spatial_gradients(const Grid& grid, Grid& d_dx, Grid& d_dy);

// Luma conversion with 0.299/0.587/0.114 weights; 1-channel input passes
// through as a copy.
Grid grayscale(const Image& image);

}  // namespace flowkit
