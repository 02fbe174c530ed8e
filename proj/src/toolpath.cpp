#include "nitiflex/toolpath.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "nitiflex/error.hpp"

namespace nitiflex {

double Polyline::length() const {
  double len = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    len += std::hypot(points[i].x - points[i - 1].x, points[i].y - points[i - 1].y);
  }
  return len;
}

void Toolpath::validate() const {
  for (std::size_t k = 0; k < polylines.size(); ++k) {
    const auto& pl = polylines[k];
    for (std::size_t i = 0; i < pl.points.size(); ++i) {
      if (!std::isfinite(pl.points[i].x) || !std::isfinite(pl.points[i].y)) {
        throw Error(ErrorKind::Domain, fmt::format("toolpath: polyline {} has a non-finite point", k));
      }
      if (i > 0 && pl.points[i] == pl.points[i - 1]) {
        throw Error(ErrorKind::Domain,
                    fmt::format("toolpath: polyline {} repeats point {}", k, i));
      }
    }
  }
}

double Toolpath::total_length() const {
  double len = 0.0;
  for (const auto& pl : polylines) len += pl.length();
  return len;
}

void write_toolpath(std::ostream& os, const Toolpath& tp) {
  for (const auto& pl : tp.polylines) {
    fmt::print(os, "layer={} passes={} :", pl.layer, pl.passes);
    for (const auto& p : pl.points) fmt::print(os, " {:.6f},{:.6f}", p.x, p.y);
    os << '\n';
  }
}

Toolpath read_toolpath(std::istream& is) {
  Toolpath tp;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto colon = line.find(':');
    Polyline pl;
    if (colon == std::string::npos ||
        std::sscanf(line.c_str(), "layer=%d passes=%d", &pl.layer, &pl.passes) != 2) {
      throw Error(ErrorKind::Parse, fmt::format("toolpath line {}: bad header", lineno));
    }
    std::istringstream rest(line.substr(colon + 1));
    std::string tok;
    while (rest >> tok) {
      Point2 p;
      const auto comma = tok.find(',');
      if (comma == std::string::npos) {
        throw Error(ErrorKind::Parse, fmt::format("toolpath line {}: bad point '{}'", lineno, tok));
      }
      try {
        p.x = std::stod(tok.substr(0, comma));
        p.y = std::stod(tok.substr(comma + 1));
      } catch (const std::exception&) {
        throw Error(ErrorKind::Parse, fmt::format("toolpath line {}: bad point '{}'", lineno, tok));
      }
      pl.points.push_back(p);
    }
    tp.polylines.push_back(std::move(pl));
  }
  return tp;
}

void write_dxf(std::ostream& os, const Toolpath& tp) {
  os << "0\nSECTION\n2\nHEADER\n9\n$INSUNITS\n70\n4\n0\nENDSEC\n";
  os << "0\nSECTION\n2\nENTITIES\n";
  for (const auto& pl : tp.polylines) {
    fmt::print(os, "0\nLWPOLYLINE\n8\nL{}\n90\n{}\n70\n0\n", pl.layer, pl.points.size());
    for (const auto& p : pl.points) fmt::print(os, "10\n{:.6f}\n20\n{:.6f}\n", p.x, p.y);
  }
  os << "0\nENDSEC\n0\nEOF\n";
}

}  // namespace nitiflex
