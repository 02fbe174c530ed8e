#pragma once

#include <iosfwd>
#include <vector>

namespace nitiflex {

struct Point2 {
  double x = 0.0;  // mm
  double y = 0.0;  // mm

  friend bool operator==(const Point2&, const Point2&) = default;
};

struct Polyline {
  int layer = 1;
  int passes = 1;
  std::vector<Point2> points;

  double length() const;
};

/// Machine-facing geometry in millimetres.
struct Toolpath {
  std::vector<Polyline> polylines;

  /// Throws Error(Domain) on non-finite points or consecutive duplicates.
  void validate() const;
  double total_length() const;
};

/// `layer=<k> passes=<n> : x0,y0 x1,y1 ...` per line, 6 decimals (1 nm).
void write_toolpath(std::ostream& os, const Toolpath& tp);
Toolpath read_toolpath(std::istream& is);

/// Minimal ASCII DXF with one LWPOLYLINE per polyline on layer "L<k>".
void write_dxf(std::ostream& os, const Toolpath& tp);

}  // namespace nitiflex
