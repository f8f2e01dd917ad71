#include "flowkit/flow_io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <memory>
#include <stdexcept>
#include <vector>

#include "flowkit/png_io.hpp"

namespace flowkit {

namespace {

constexpr float kFloTag = 202021.25f;  // reads as "PIEH" in ASCII
constexpr int kMaxDimension = 1 << 20;

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void put_u32_le(std::vector<unsigned char>& out, std::uint32_t v) {
  out.push_back(v & 0xff);
  out.push_back((v >> 8) & 0xff);
  out.push_back((v >> 16) & 0xff);
  out.push_back((v >> 24) & 0xff);
}

void put_f32_le(std::vector<unsigned char>& out, float f) {
  std::uint32_t v;
  std::memcpy(&v, &f, 4);
  put_u32_le(out, v);
}

std::uint32_t get_u32_le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

float get_f32_le(const unsigned char* p) {
  const std::uint32_t v = get_u32_le(p);
  float f;
  std::memcpy(&f, &v, 4);
  return f;
}

}  // namespace

FlowFormat flow_format_from_string(const std::string& name) {
  if (name == "flo" || name == "middlebury") return FlowFormat::Middlebury;
  if (name == "kitti16") return FlowFormat::Kitti16;
  throw std::invalid_argument("unknown flow format: " + name);
}

void write_flo(const std::string& path, const FlowField& flow) {
  require_flow(flow, "write_flo");
  if (!flow.all_finite())
    throw std::invalid_argument("write_flo: flow contains non-finite values");
  std::vector<unsigned char> bytes;
  bytes.reserve(12 + flow.size() * 4);
  put_f32_le(bytes, kFloTag);
  put_u32_le(bytes, static_cast<std::uint32_t>(flow.width));
  put_u32_le(bytes, static_cast<std::uint32_t>(flow.height));
  for (int y = 0; y < flow.height; ++y)
    for (int x = 0; x < flow.width; ++x) {
      put_f32_le(bytes, static_cast<float>(flow.at(y, x, 0)));
      put_f32_le(bytes, static_cast<float>(flow.at(y, x, 1)));
    }
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw std::runtime_error("write_flo: cannot open " + path);
  if (std::fwrite(bytes.data(), 1, bytes.size(), fp.get()) != bytes.size())
    throw std::runtime_error("write_flo: short write to " + path);
}

FlowField read_flo(const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw std::runtime_error("read_flo: cannot open " + path);

  unsigned char header[12];
  const std::size_t got = std::fread(header, 1, 12, fp.get());
  if (got < 12)
    throw std::runtime_error("read_flo: " + path +
                             ": truncated header at byte " +
                             std::to_string(got));
  const float tag = get_f32_le(header);
  if (tag != kFloTag)
    throw std::runtime_error("read_flo: " + path +
                             ": bad magic at byte 0 (expected 202021.25, got " +
                             std::to_string(tag) + ")");
  const std::uint32_t w = get_u32_le(header + 4);
  const std::uint32_t h = get_u32_le(header + 8);
  if (w == 0 || h == 0 || w > kMaxDimension || h > kMaxDimension)
    throw std::runtime_error("read_flo: " + path + ": implausible size " +
                             std::to_string(w) + "x" + std::to_string(h));

  const std::size_t payload = static_cast<std::size_t>(w) * h * 2 * 4;
  std::vector<unsigned char> bytes(payload);
  const std::size_t read = std::fread(bytes.data(), 1, payload, fp.get());
  if (read != payload)
    throw std::runtime_error("read_flo: " + path +
                             ": truncated payload at byte " +
                             std::to_string(12 + read) + " (expected " +
                             std::to_string(12 + payload) + " bytes)");

  FlowField flow(static_cast<int>(h), static_cast<int>(w), 2);
  std::size_t off = 0;
  for (int y = 0; y < flow.height; ++y)
    for (int x = 0; x < flow.width; ++x) {
      flow.at(y, x, 0) = get_f32_le(bytes.data() + off);
      flow.at(y, x, 1) = get_f32_le(bytes.data() + off + 4);
      off += 8;
    }
  return flow;
}

void write_kitti16(const std::string& path, const FlowField& flow,
                   const Mask* valid) {
  require_flow(flow, "write_kitti16");
  if (!flow.all_finite())
    throw std::invalid_argument("write_kitti16: flow contains non-finite values");
  if (valid) require_same_spatial_shape(flow, *valid, "write_kitti16");
  std::vector<std::uint16_t> pixels(static_cast<std::size_t>(flow.height) *
                                    flow.width * 3);
  std::size_t i = 0;
  for (int y = 0; y < flow.height; ++y)
    for (int x = 0; x < flow.width; ++x) {
      for (int c = 0; c < 2; ++c) {
        const double enc = std::round(flow.at(y, x, c) * 64.0 + 32768.0);
        if (enc < 0.0 || enc > 65535.0)
          throw std::invalid_argument(
              "write_kitti16: flow value " + std::to_string(flow.at(y, x, c)) +
              " at (" + std::to_string(x) + ", " + std::to_string(y) +
              ") is out of the representable range");
        pixels[i++] = static_cast<std::uint16_t>(enc);
      }
      pixels[i++] = !valid || valid->at(y, x, 0) > 0.5 ? 1 : 0;
    }
  write_png16(path, flow.height, flow.width, 3, pixels);
}

Kitti16Flow read_kitti16(const std::string& path) {
  const PngData png = read_png(path);
  if (png.channels != 3 || png.max_value != 65535)
    throw std::runtime_error("read_kitti16: " + path +
                             ": expected a 16-bit 3-channel image");
  Kitti16Flow out;
  out.flow = FlowField(png.height, png.width, 2);
  out.valid = Mask(png.height, png.width, 1);
  for (int y = 0; y < png.height; ++y)
    for (int x = 0; x < png.width; ++x) {
      const std::size_t base =
          (static_cast<std::size_t>(y) * png.width + x) * 3;
      out.flow.at(y, x, 0) = (png.pixels[base + 0] - 32768.0) / 64.0;
      out.flow.at(y, x, 1) = (png.pixels[base + 1] - 32768.0) / 64.0;
      out.valid.at(y, x, 0) = png.pixels[base + 2] != 0 ? 1.0 : 0.0;
    }
  return out;
}

}  // namespace flowkit
