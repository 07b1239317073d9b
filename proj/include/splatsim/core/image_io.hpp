#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "splatsim/core/image.hpp"

namespace splatsim {

using Bytes = std::vector<std::uint8_t>;

Bytes encode_png(const Image8& image);
Image8 decode_png(const Bytes& bytes, const std::string& context);

// Baseline JPEG, quality 1..100, 4:2:0 chroma subsampling.
Bytes encode_jpeg(const Image8& image, int quality);
// Truncated or corrupt streams raise Error(parse) prefixed with `context`;
// decoder warnings (e.g. premature end of data) are treated as errors.
Image8 decode_jpeg(const Bytes& bytes, const std::string& context);

// Picks the codec from the extension (.png, .jpg/.jpeg).
void write_image(const Image8& image, const std::string& path, int jpeg_quality = 90);
Image8 read_image(const std::string& path);

void write_bytes(const Bytes& bytes, const std::string& path);
Bytes read_bytes(const std::string& path);

// Depth raster: a short text header followed by little-endian float32
// values, row-major:
//   DEPTH
//   width <w>
//   height <h>
//   units meters
//   end_header
void write_depth(const DepthImage& depth, const std::string& path);
DepthImage read_depth(const std::string& path);

}  // namespace splatsim
