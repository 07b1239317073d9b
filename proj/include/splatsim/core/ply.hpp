#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace splatsim::ply {

enum class Format { ascii, binary_little_endian, binary_big_endian };

enum class Type { int8, uint8, int16, uint16, int32, uint32, float32, float64 };

struct Property {
  std::string name;
  Type type = Type::float32;
  bool is_list = false;
  Type count_type = Type::uint8;
  // Scalar payload, one entry per element.
  std::vector<double> values;
  // List payload: entries of element i are list_values[list_offsets[i] ..
  // list_offsets[i + 1]).
  std::vector<std::uint32_t> list_offsets;
  std::vector<std::int64_t> list_values;
};

struct Element {
  std::string name;
  std::size_t count = 0;
  std::vector<Property> properties;

  const Property* find(const std::string& property) const;
};

struct File {
  Format format = Format::binary_little_endian;
  std::vector<std::string> comments;
  std::vector<Element> elements;

  const Element* find(const std::string& element) const;
  Element* find(const std::string& element);
};

// Reads the whole file. Throws ParseError with a line (header/ascii) or
// byte offset (binary) on malformed content, Error(io) when unreadable.
File read(const std::string& path);

// Writes ascii or binary_little_endian.
void write(const File& file, const std::string& path);

}  // namespace splatsim::ply
