#pragma once

#include <string>

#include "flowkit/grid.hpp"

namespace flowkit {

enum class FlowFormat { Middlebury, Kitti16 };

FlowFormat flow_format_from_string(const std::string& name);

// Middlebury .flo: the 202021.25 sanity tag, width and height as 4-byte
// little-endian integers, then row-major interleaved (u, v) as 4-byte
// little-endian floats. Write requires finite flow; read validates the tag
// and reports the byte position on truncation.
void write_flo(const std::string& path, const FlowField& flow);
FlowField read_flo(const std::string& path);

// KITTI convention: 16-bit 3-channel PNG with
//   u = (ch1 - 2^15) / 64,  v = (ch2 - 2^15) / 64,  valid = ch3.
// Values whose encoding leaves [0, 65535] are rejected.
struct Kitti16Flow {
  FlowField flow;
  Mask valid;
};

void write_kitti16(const std::string& path, const FlowField& flow,
                   const Mask* valid = nullptr);
Kitti16Flow read_kitti16(const std::string& path);

}  // namespace flowkit
