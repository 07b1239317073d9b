#include "splatsim/core/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include <jpeglib.h>
#include <png.h>

#include <fmt/format.h>

#include "splatsim/core/error.hpp"

namespace splatsim {

namespace {

std::string lower_extension(const std::string& path) {
  std::string ext = std::filesystem::path(path).extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

struct JpegErrorManager {
  jpeg_error_mgr base;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

// Warnings such as "premature end of JPEG file" become hard errors so that
// truncated frames never decode silently into gray padding.
void jpeg_emit_message(j_common_ptr cinfo, int level) {
  if (level < 0) jpeg_error_exit(cinfo);
}

}  // namespace

Bytes encode_png(const Image8& image) {
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(image.width);
  png.height = static_cast<png_uint_32>(image.height);
  png.format = PNG_FORMAT_RGB;
  png_alloc_size_t size = 0;
  if (!png_image_write_get_memory_size(png, size, 0, image.data.data(), 0, nullptr)) {
    throw io_error(std::string("PNG encode failed: ") + png.message);
  }
  Bytes out(size);
  if (!png_image_write_to_memory(&png, out.data(), &size, 0, image.data.data(), 0, nullptr)) {
    throw io_error(std::string("PNG encode failed: ") + png.message);
  }
  out.resize(size);
  return out;
}

Image8 decode_png(const Bytes& bytes, const std::string& context) {
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&png, bytes.data(), bytes.size())) {
    throw Error(ErrorCategory::parse, context + ": PNG header invalid: " + png.message);
  }
  png.format = PNG_FORMAT_RGB;
  Image8 image(static_cast<int>(png.width), static_cast<int>(png.height));
  if (!png_image_finish_read(&png, nullptr, image.data.data(), 0, nullptr)) {
    png_image_free(&png);
    throw Error(ErrorCategory::parse, context + ": PNG data invalid: " + png.message);
  }
  if (png.warning_or_error != 0) {
    throw Error(ErrorCategory::parse, context + ": PNG decode warning: " + png.message);
  }
  return image;
}

Bytes encode_jpeg(const Image8& image, int quality) {
  if (quality < 1 || quality > 100) throw invalid_argument(fmt::format("JPEG quality must be 1..100 (got {})", quality));
  jpeg_compress_struct cinfo;
  JpegErrorManager err;
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = jpeg_error_exit;
  unsigned char* buffer = nullptr;
  unsigned long size = 0;
  if (setjmp(err.jump)) {
    jpeg_destroy_compress(&cinfo);
    std::free(buffer);
    throw io_error(std::string("JPEG encode failed: ") + err.message);
  }
  jpeg_create_compress(&cinfo);
  jpeg_mem_dest(&cinfo, &buffer, &size);
  cinfo.image_width = static_cast<JDIMENSION>(image.width);
  cinfo.image_height = static_cast<JDIMENSION>(image.height);
  cinfo.input_components = 3;
  cinfo.in_color_space = JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, quality, TRUE);
  jpeg_start_compress(&cinfo, TRUE);
  const auto stride = static_cast<std::size_t>(image.width) * 3;
  while (cinfo.next_scanline < cinfo.image_height) {
    JSAMPROW row = const_cast<JSAMPROW>(image.data.data() + cinfo.next_scanline * stride);
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  Bytes out(buffer, buffer + size);
  jpeg_destroy_compress(&cinfo);
  std::free(buffer);
  return out;
}

Image8 decode_jpeg(const Bytes& bytes, const std::string& context) {
  jpeg_decompress_struct cinfo;
  JpegErrorManager err;
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = jpeg_error_exit;
  err.base.emit_message = jpeg_emit_message;
  Image8 image;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    throw Error(ErrorCategory::parse, context + ": JPEG decode failed: " + err.message);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);
  image = Image8(static_cast<int>(cinfo.output_width), static_cast<int>(cinfo.output_height));
  const auto stride = static_cast<std::size_t>(image.width) * 3;
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = image.data.data() + cinfo.output_scanline * stride;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return image;
}

void write_bytes(const Bytes& bytes, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw io_error("write failed for '" + path + "'");
}

Bytes read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open '" + path + "' for reading");
  return Bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_image(const Image8& image, const std::string& path, int jpeg_quality) {
  const std::string ext = lower_extension(path);
  if (ext == ".png") write_bytes(encode_png(image), path);
  else if (ext == ".jpg" || ext == ".jpeg") write_bytes(encode_jpeg(image, jpeg_quality), path);
  else throw invalid_argument("unsupported image extension '" + ext + "'");
}

Image8 read_image(const std::string& path) {
  const std::string ext = lower_extension(path);
  if (ext == ".png") return decode_png(read_bytes(path), path);
  if (ext == ".jpg" || ext == ".jpeg") return decode_jpeg(read_bytes(path), path);
  throw invalid_argument("unsupported image extension '" + ext + "'");
}

void write_depth(const DepthImage& depth, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open '" + path + "' for writing");
  out << "DEPTH\nwidth " << depth.width << "\nheight " << depth.height << "\nunits meters\nend_header\n";
  out.write(reinterpret_cast<const char*>(depth.depth.data()),
            static_cast<std::streamsize>(depth.depth.size() * sizeof(float)));
  if (!out) throw io_error("write failed for '" + path + "'");
}

DepthImage read_depth(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open '" + path + "' for reading");
  std::string line;
  std::size_t line_no = 0;
  int width = -1, height = -1;
  auto fail = [&](const std::string& what) { throw ParseError(path, ParseError::Unit::line, line_no, what); };
  if (!std::getline(in, line) || line != "DEPTH") {
    line_no = 1;
    fail("missing DEPTH magic");
  }
  line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line == "end_header") break;
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    if (key == "width") ss >> width;
    else if (key == "height") ss >> height;
    else if (key == "units") {
      std::string units;
      ss >> units;
      if (units != "meters" && units != "m") fail("unsupported depth units '" + units + "'");
    } else fail("unknown header key '" + key + "'");
    if (ss.fail()) fail("malformed header line");
  }
  if (line != "end_header") fail("unterminated header");
  if (width < 1 || height < 1) fail("missing or invalid width/height");
  DepthImage depth(width, height);
  const std::streamoff header_end = in.tellg();
  in.read(reinterpret_cast<char*>(depth.depth.data()), static_cast<std::streamsize>(depth.depth.size() * sizeof(float)));
  if (in.gcount() != static_cast<std::streamsize>(depth.depth.size() * sizeof(float))) {
    throw ParseError(path, ParseError::Unit::byte, static_cast<std::size_t>(header_end + in.gcount()),
                     "truncated depth payload");
  }
  return depth;
}

}  // namespace splatsim
