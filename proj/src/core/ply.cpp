#include "splatsim/core/ply.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include <fmt/format.h>

#include "splatsim/core/error.hpp"

namespace splatsim::ply {

namespace {

std::optional<Type> parse_type(const std::string& s) {
  if (s == "char" || s == "int8") return Type::int8;
  if (s == "uchar" || s == "uint8") return Type::uint8;
  if (s == "short" || s == "int16") return Type::int16;
  if (s == "ushort" || s == "uint16") return Type::uint16;
  if (s == "int" || s == "int32") return Type::int32;
  if (s == "uint" || s == "uint32") return Type::uint32;
  if (s == "float" || s == "float32") return Type::float32;
  if (s == "double" || s == "float64") return Type::float64;
  return std::nullopt;
}

const char* type_name(Type t) {
  switch (t) {
    case Type::int8: return "char";
    case Type::uint8: return "uchar";
    case Type::int16: return "short";
    case Type::uint16: return "ushort";
    case Type::int32: return "int";
    case Type::uint32: return "uint";
    case Type::float32: return "float";
    case Type::float64: return "double";
  }
  return "float";
}

std::size_t type_size(Type t) {
  switch (t) {
    case Type::int8:
    case Type::uint8: return 1;
    case Type::int16:
    case Type::uint16: return 2;
    case Type::int32:
    case Type::uint32:
    case Type::float32: return 4;
    case Type::float64: return 8;
  }
  return 4;
}

template <typename T>
T load_raw(const char* p, bool swap) {
  char buf[sizeof(T)];
  std::memcpy(buf, p, sizeof(T));
  if (swap) {
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(buf[i], buf[sizeof(T) - 1 - i]);
  }
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

double decode(Type t, const char* p, bool swap) {
  switch (t) {
    case Type::int8: return load_raw<std::int8_t>(p, swap);
    case Type::uint8: return load_raw<std::uint8_t>(p, swap);
    case Type::int16: return load_raw<std::int16_t>(p, swap);
    case Type::uint16: return load_raw<std::uint16_t>(p, swap);
    case Type::int32: return load_raw<std::int32_t>(p, swap);
    case Type::uint32: return load_raw<std::uint32_t>(p, swap);
    case Type::float32: return load_raw<float>(p, swap);
    case Type::float64: return load_raw<double>(p, swap);
  }
  return 0.0;
}

template <typename T>
void store_raw(std::string& out, T v) {
  static_assert(std::endian::native == std::endian::little, "little-endian host expected");
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

void encode(Type t, double v, std::string& out) {
  switch (t) {
    case Type::int8: store_raw(out, static_cast<std::int8_t>(v)); break;
    case Type::uint8: store_raw(out, static_cast<std::uint8_t>(v)); break;
    case Type::int16: store_raw(out, static_cast<std::int16_t>(v)); break;
    case Type::uint16: store_raw(out, static_cast<std::uint16_t>(v)); break;
    case Type::int32: store_raw(out, static_cast<std::int32_t>(v)); break;
    case Type::uint32: store_raw(out, static_cast<std::uint32_t>(v)); break;
    case Type::float32: store_raw(out, static_cast<float>(v)); break;
    case Type::float64: store_raw(out, v); break;
  }
}

bool is_integer(Type t) { return t != Type::float32 && t != Type::float64; }

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream ss(line);
  return {std::istream_iterator<std::string>(ss), std::istream_iterator<std::string>()};
}

class Parser {
 public:
  Parser(std::string path, std::string data) : path_(std::move(path)), data_(std::move(data)) {}

  File parse() {
    File file;
    parse_header(file);
    for (auto& e : file.elements) {
      for (auto& p : e.properties) {
        if (p.is_list) {
          p.list_offsets.reserve(e.count + 1);
          p.list_offsets.push_back(0);
        } else {
          p.values.reserve(e.count);
        }
      }
    }
    if (file.format == Format::ascii) parse_ascii(file);
    else parse_binary(file, file.format == Format::binary_big_endian);
    return file;
  }

 private:
  [[noreturn]] void fail_line(const std::string& what) const {
    throw ParseError(path_, ParseError::Unit::line, line_, what);
  }
  [[noreturn]] void fail_byte(std::size_t offset, const std::string& what) const {
    throw ParseError(path_, ParseError::Unit::byte, offset, what);
  }

  bool next_line(std::string& line) {
    if (pos_ >= data_.size()) return false;
    std::size_t end = data_.find('\n', pos_);
    if (end == std::string::npos) end = data_.size();
    line.assign(data_, pos_, end - pos_);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    pos_ = end + 1;
    ++line_;
    return true;
  }

  void parse_header(File& file) {
    std::string line;
    if (!next_line(line) || line != "ply") fail_line("missing 'ply' magic");
    bool have_format = false;
    while (true) {
      if (!next_line(line)) fail_line("unterminated header (no end_header)");
      const auto tok = split_ws(line);
      if (tok.empty()) continue;
      if (tok[0] == "end_header") break;
      if (tok[0] == "comment" || tok[0] == "obj_info") {
        file.comments.push_back(line.size() > 8 ? line.substr(8) : "");
      } else if (tok[0] == "format") {
        if (tok.size() < 2) fail_line("malformed format line");
        if (tok[1] == "ascii") file.format = Format::ascii;
        else if (tok[1] == "binary_little_endian") file.format = Format::binary_little_endian;
        else if (tok[1] == "binary_big_endian") file.format = Format::binary_big_endian;
        else fail_line("unknown format '" + tok[1] + "'");
        have_format = true;
      } else if (tok[0] == "element") {
        if (tok.size() != 3) fail_line("malformed element line");
        Element e;
        e.name = tok[1];
        const auto [ptr, ec] = std::from_chars(tok[2].data(), tok[2].data() + tok[2].size(), e.count);
        if (ec != std::errc() || ptr != tok[2].data() + tok[2].size()) fail_line("bad element count");
        file.elements.push_back(std::move(e));
      } else if (tok[0] == "property") {
        if (file.elements.empty()) fail_line("property before any element");
        Property p;
        if (tok.size() == 5 && tok[1] == "list") {
          const auto ct = parse_type(tok[2]);
          const auto vt = parse_type(tok[3]);
          if (!ct || !vt || !is_integer(*ct)) fail_line("bad list property types");
          p.is_list = true;
          p.count_type = *ct;
          p.type = *vt;
          p.name = tok[4];
        } else if (tok.size() == 3) {
          const auto t = parse_type(tok[1]);
          if (!t) fail_line("unknown property type '" + tok[1] + "'");
          p.type = *t;
          p.name = tok[2];
        } else {
          fail_line("malformed property line");
        }
        file.elements.back().properties.push_back(std::move(p));
      } else {
        fail_line("unexpected header keyword '" + tok[0] + "'");
      }
    }
    if (!have_format) fail_line("header has no format line");
  }

  void parse_ascii(File& file) {
    std::string line;
    for (auto& e : file.elements) {
      for (std::size_t i = 0; i < e.count; ++i) {
        do {
          if (!next_line(line)) fail_line(fmt::format("unexpected end of file in element '{}' ({} of {})", e.name, i, e.count));
        } while (line.find_first_not_of(" \t") == std::string::npos);
        const auto tok = split_ws(line);
        std::size_t t = 0;
        auto take = [&]() -> double {
          if (t >= tok.size()) fail_line("too few values on line");
          double v = 0.0;
          const auto& s = tok[t++];
          const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
          if (ec != std::errc() || ptr != s.data() + s.size()) fail_line("invalid number '" + s + "'");
          return v;
        };
        for (auto& p : e.properties) {
          if (p.is_list) {
            const double n = take();
            if (n < 0 || n != static_cast<double>(static_cast<long>(n))) fail_line("bad list length");
            for (long k = 0; k < static_cast<long>(n); ++k) p.list_values.push_back(static_cast<std::int64_t>(take()));
            p.list_offsets.push_back(static_cast<std::uint32_t>(p.list_values.size()));
          } else {
            p.values.push_back(take());
          }
        }
        if (t != tok.size()) fail_line("too many values on line");
      }
    }
  }

  void parse_binary(File& file, bool big_endian) {
    const bool swap = big_endian != (std::endian::native == std::endian::big);
    for (auto& e : file.elements) {
      for (std::size_t i = 0; i < e.count; ++i) {
        for (auto& p : e.properties) {
          if (p.is_list) {
            const double n = read_value(p.count_type, swap, e.name);
            if (n < 0) fail_byte(pos_, "negative list length");
            for (long k = 0; k < static_cast<long>(n); ++k) {
              p.list_values.push_back(static_cast<std::int64_t>(read_value(p.type, swap, e.name)));
            }
            p.list_offsets.push_back(static_cast<std::uint32_t>(p.list_values.size()));
          } else {
            p.values.push_back(read_value(p.type, swap, e.name));
          }
        }
      }
    }
  }

  double read_value(Type t, bool swap, const std::string& element) {
    const std::size_t n = type_size(t);
    if (pos_ + n > data_.size()) fail_byte(pos_, "truncated binary payload in element '" + element + "'");
    const double v = decode(t, data_.data() + pos_, swap);
    pos_ += n;
    return v;
  }

  std::string path_;
  std::string data_;
  std::size_t pos_ = 0;
  std::size_t line_ = 0;
};

}  // namespace

const Property* Element::find(const std::string& property) const {
  for (const auto& p : properties) {
    if (p.name == property) return &p;
  }
  return nullptr;
}

const Element* File::find(const std::string& element) const {
  for (const auto& e : elements) {
    if (e.name == element) return &e;
  }
  return nullptr;
}

Element* File::find(const std::string& element) {
  for (auto& e : elements) {
    if (e.name == element) return &e;
  }
  return nullptr;
}

File read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open '" + path + "' for reading");
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return Parser(path, std::move(data)).parse();
}

void write(const File& file, const std::string& path) {
  if (file.format == Format::binary_big_endian) throw invalid_argument("big-endian PLY output is not supported");
  std::string out = "ply\n";
  out += file.format == Format::ascii ? "format ascii 1.0\n" : "format binary_little_endian 1.0\n";
  for (const auto& c : file.comments) out += "comment " + c + "\n";
  for (const auto& e : file.elements) {
    out += fmt::format("element {} {}\n", e.name, e.count);
    for (const auto& p : e.properties) {
      if (p.is_list) out += fmt::format("property list {} {} {}\n", type_name(p.count_type), type_name(p.type), p.name);
      else out += fmt::format("property {} {}\n", type_name(p.type), p.name);
    }
  }
  out += "end_header\n";
  const bool ascii = file.format == Format::ascii;
  for (const auto& e : file.elements) {
    for (const auto& p : e.properties) {
      const std::size_t expected = p.is_list ? p.list_offsets.size() : p.values.size();
      if (expected != (p.is_list ? e.count + 1 : e.count)) {
        throw invalid_argument(fmt::format("PLY property '{}' has wrong value count", p.name));
      }
    }
    for (std::size_t i = 0; i < e.count; ++i) {
      bool first = true;
      for (const auto& p : e.properties) {
        if (p.is_list) {
          const auto begin = p.list_offsets[i], end = p.list_offsets[i + 1];
          if (ascii) {
            out += fmt::format("{}{}", first ? "" : " ", end - begin);
            for (auto k = begin; k < end; ++k) out += fmt::format(" {}", p.list_values[k]);
          } else {
            encode(p.count_type, end - begin, out);
            for (auto k = begin; k < end; ++k) encode(p.type, static_cast<double>(p.list_values[k]), out);
          }
        } else if (ascii) {
          if (is_integer(p.type)) out += fmt::format("{}{}", first ? "" : " ", static_cast<long long>(p.values[i]));
          else out += fmt::format("{}{:.17g}", first ? "" : " ", p.values[i]);
        } else {
          encode(p.type, p.values[i], out);
        }
        first = false;
      }
      if (ascii) out += '\n';
    }
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw io_error("cannot open '" + path + "' for writing");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw io_error("write failed for '" + path + "'");
}

}  // namespace splatsim::ply
