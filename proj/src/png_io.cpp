#include "flowkit/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <stdexcept>

namespace flowkit {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::runtime_error("png: " + path + ": " + what);
}

}  // namespace

PngData read_png(const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) fail(path, "cannot open for reading");

  unsigned char sig[8];
  if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0)
    fail(path, "not a PNG file (bad signature)");

  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(path, "libpng allocation failed");
  }

  std::vector<std::uint16_t> pixels;
  volatile int height = 0, width = 0, channels = 0, max_value = 255;
  volatile bool error = false;
  if (setjmp(png_jmpbuf(png))) {
    error = true;
  } else {
    png_init_io(png, fp.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    width = static_cast<int>(png_get_image_width(png, info));
    height = static_cast<int>(png_get_image_height(png, info));
    const int bit_depth = png_get_bit_depth(png, info);
    const int color_type = png_get_color_type(png, info);

    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8)
      png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    if (bit_depth == 16) png_set_swap(png);  // stored big-endian
    png_read_update_info(png, info);

    const int out_channels = png_get_channels(png, info);
    const int out_depth = png_get_bit_depth(png, info);
    channels = out_channels;
    max_value = out_depth == 16 ? 65535 : 255;

    const std::size_t row_bytes = png_get_rowbytes(png, info);
    std::vector<unsigned char> row(row_bytes);
    pixels.resize(static_cast<std::size_t>(height) * width * channels);
    for (int y = 0; y < height; ++y) {
      png_read_row(png, row.data(), nullptr);
      for (int i = 0; i < width * channels; ++i) {
        pixels[static_cast<std::size_t>(y) * width * channels + i] =
            out_depth == 16
                ? reinterpret_cast<const std::uint16_t*>(row.data())[i]
                : row[i];
      }
    }
    png_read_end(png, nullptr);
  }
  png_destroy_read_struct(&png, &info, nullptr);
  if (error) fail(path, "corrupt or truncated image data");
  if (channels != 1 && channels != 3)
    fail(path, "unsupported channel count " + std::to_string(channels));

  PngData out;
  out.height = height;
  out.width = width;
  out.channels = channels;
  out.max_value = max_value;
  out.pixels = std::move(pixels);
  return out;
}

namespace {

void write_png_impl(const std::string& path, int height, int width,
                    int channels, int bit_depth, const unsigned char* bytes8,
                    const std::uint16_t* words16) {
  if (channels != 1 && channels != 3)
    fail(path, "unsupported channel count " + std::to_string(channels));
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) fail(path, "cannot open for writing");

  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    fail(path, "libpng allocation failed");
  }

  bool error = false;
  if (setjmp(png_jmpbuf(png))) {
    error = true;
  } else {
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, width, height, bit_depth,
                 channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    if (bit_depth == 16) png_set_swap(png);
    for (int y = 0; y < height; ++y) {
      if (bit_depth == 16) {
        png_write_row(png, reinterpret_cast<png_const_bytep>(
                               words16 + static_cast<std::size_t>(y) * width *
                                             channels));
      } else {
        png_write_row(png,
                      bytes8 + static_cast<std::size_t>(y) * width * channels);
      }
    }
    png_write_end(png, nullptr);
  }
  png_destroy_write_struct(&png, &info);
  if (error) fail(path, "write failed");
}

}  // namespace

void write_png8(const std::string& path, int height, int width, int channels,
                const std::vector<std::uint8_t>& pixels) {
  if (pixels.size() != static_cast<std::size_t>(height) * width * channels)
    fail(path, "pixel buffer size mismatch");
  write_png_impl(path, height, width, channels, 8, pixels.data(), nullptr);
}

void write_png16(const std::string& path, int height, int width, int channels,
                 const std::vector<std::uint16_t>& pixels) {
  if (pixels.size() != static_cast<std::size_t>(height) * width * channels)
    fail(path, "pixel buffer size mismatch");
  write_png_impl(path, height, width, channels, 16, nullptr, pixels.data());
}

Image image_from_png(const PngData& png) {
  Image out(png.height, png.width, png.channels);
  const double scale = 2.0 / png.max_value;
  for (std::size_t i = 0; i < out.size(); ++i)
    out.data[i] = png.pixels[i] * scale - 1.0;
  return out;
}

void write_image_png(const std::string& path, const Image& image) {
  require_image(image, "write_image_png");
  std::vector<std::uint8_t> bytes(image.size());
  for (std::size_t i = 0; i < image.size(); ++i) {
    const double v = std::clamp((image.data[i] + 1.0) * 0.5, 0.0, 1.0);
    bytes[i] = static_cast<std::uint8_t>(std::lround(v * 255.0));
  }
  write_png8(path, image.height, image.width, image.channels, bytes);
}

Mask mask_from_png(const PngData& png) {
  Mask out(png.height, png.width, 1, 0.0);
  for (int y = 0; y < png.height; ++y)
    for (int x = 0; x < png.width; ++x) {
      bool any = false;
      for (int c = 0; c < png.channels; ++c)
        any = any ||
              png.pixels[(static_cast<std::size_t>(y) * png.width + x) *
                             png.channels +
                         c] != 0;
      out.at(y, x, 0) = any ? 1.0 : 0.0;
    }
  return out;
}

void write_mask_png(const std::string& path, const Mask& mask) {
  require_mask(mask, "write_mask_png");
  std::vector<std::uint8_t> bytes(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i)
    bytes[i] = mask.data[i] > 0.5 ? 255 : 0;
  write_png8(path, mask.height, mask.width, 1, bytes);
}

Image load_image(const std::string& path) {
  return image_from_png(read_png(path));
}

Mask load_mask(const std::string& path) { return mask_from_png(read_png(path)); }

}  // namespace flowkit
