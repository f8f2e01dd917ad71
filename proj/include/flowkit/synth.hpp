#pragma once

#include <cstdint>

#include "flowkit/grid.hpp"

namespace flowkit {

enum class MotionKind { Translation, Affine, TwoLayer };

MotionKind motion_kind_from_string(const std::string& name);

// image2 is the generator's exact inverse-warp of image1 under the motion
// model; true_occlusion is binary with 1 marking pixels of image1 that have
// no correspondence in image2.
struct SyntheticPair {
  Image image1;
  Image image2;
  FlowField true_flow;
  Mask true_occlusion;
  std::uint64_t seed = 0;
};

// Band-limited noise texture in roughly [-0.9, 0.9], deterministic per seed.
Image noise_texture(std::uint64_t seed, int height, int width, int channels,
                    int blur_passes = 3);

// Wrap-free constant translation: both views are crops of one larger
// texture, so every pixel is valid and the true flow is exact everywhere.
SyntheticPair synth_translation(std::uint64_t seed, int height, int width,
                                double du, double dv);

// Small affine motion field u(x) = A x + b; image2 is rendered through the
// closed-form inverse map.
SyntheticPair synth_affine(std::uint64_t seed, int height, int width,
                           const double a[4], const double b[2]);

// Textured square over a static textured background, moved by an integer
// offset; true_occlusion marks the background strip the square covers.
SyntheticPair synth_two_layer(std::uint64_t seed, int height, int width,
                              int square_size, int du, int dv);

// Draws motion parameters from the seed: integer translations up to 6 px,
// gentle affine fields, or a moving square covering about a third of the
// frame.
SyntheticPair synth_pair(std::uint64_t seed, MotionKind motion, int height,
                         int width);

// Smooth low-frequency brightness field added to image2, emulating shading
// that violates photometric constancy without moving any pixel.
void add_shading(SyntheticPair& pair, std::uint64_t seed, double amplitude);

struct AugmentOps {
  bool channel_swap = false;
  bool hue_shift = false;
  bool flip_lr = false;
  bool flip_ud = false;
};

// Applies the selected operations to both images with the ground truth flow
// and occlusion transformed consistently: mirrored flows negate the mirrored
// component; color operations use the same seeded draw on both frames.
SyntheticPair augment(const SyntheticPair& pair, const AugmentOps& ops,
                      std::uint64_t seed);

}  // namespace flowkit
