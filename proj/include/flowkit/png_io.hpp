#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "flowkit/grid.hpp"

namespace flowkit {

// Decoded PNG pixels, interleaved row-major. 8-bit files are widened into
// the same uint16 container with max_value 255.
struct PngData {
  int height = 0;
  int width = 0;
  int channels = 0;  // 1 or 3; alpha is stripped on read
  int max_value = 255;
  std::vector<std::uint16_t> pixels;
};

PngData read_png(const std::string& path);
void write_png8(const std::string& path, int height, int width, int channels,
                const std::vector<std::uint8_t>& pixels);
void write_png16(const std::string& path, int height, int width, int channels,
                 const std::vector<std::uint16_t>& pixels);

// Photometric-domain conversions: pixel value p maps to 2p/max - 1.
Image image_from_png(const PngData& png);
void write_image_png(const std::string& path, const Image& image);

// Masks: nonzero pixel = 1.
Mask mask_from_png(const PngData& png);
void write_mask_png(const std::string& path, const Mask& mask);

Image load_image(const std::string& path);
Mask load_mask(const std::string& path);

}  // namespace flowkit
