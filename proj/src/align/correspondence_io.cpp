#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "splatsim/align/correspondence.hpp"
#include "splatsim/core/error.hpp"

namespace splatsim {

void CorrespondenceSet::validate() const {
  if (source.size() != target.size()) {
    throw invalid_argument(fmt::format("correspondences: {} source points but {} target points", source.size(),
                                       target.size()));
  }
  if (source.size() < 3) throw invalid_argument(fmt::format("correspondences: need >= 3 pairs, got {}", source.size()));
  for (std::size_t i = 0; i < source.size(); ++i) {
    if (!source[i].allFinite() || !target[i].allFinite()) {
      throw invalid_argument(fmt::format("correspondences: pair {} is not finite", i));
    }
  }
}

CorrespondenceSet read_correspondences(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCategory::not_found, fmt::format("cannot open correspondence file '{}'", path));
  CorrespondenceSet corr;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    double v[6];
    for (double& x : v) {
      if (!(fields >> x)) throw ParseError(path, ParseError::Unit::line, line_no, "expected 6 numbers");
    }
    std::string extra;
    if (fields >> extra) throw ParseError(path, ParseError::Unit::line, line_no, "unexpected token '" + extra + "'");
    for (double x : v) {
      if (!std::isfinite(x)) throw ParseError(path, ParseError::Unit::line, line_no, "non-finite coordinate");
    }
    corr.source.emplace_back(v[0], v[1], v[2]);
    corr.target.emplace_back(v[3], v[4], v[5]);
  }
  return corr;
}

void write_correspondences(const CorrespondenceSet& corr, const std::string& path) {
  if (corr.source.size() != corr.target.size()) throw invalid_argument("correspondences: mismatched counts");
  std::ofstream out(path);
  if (!out) throw io_error(fmt::format("cannot write correspondence file '{}'", path));
  out << "# sx sy sz tx ty tz\n";
  for (std::size_t i = 0; i < corr.size(); ++i) {
    const auto& s = corr.source[i];
    const auto& t = corr.target[i];
    out << fmt::format("{:.17g} {:.17g} {:.17g} {:.17g} {:.17g} {:.17g}\n", s.x(), s.y(), s.z(), t.x(), t.y(), t.z());
  }
  if (!out) throw io_error(fmt::format("failed writing '{}'", path));
}

}  // namespace splatsim
