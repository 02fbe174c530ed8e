#include "nitiflex/planner.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "nitiflex/error.hpp"

namespace nitiflex::planner {

DepthMap::DepthMap(std::size_t nx_, std::size_t ny_, double pitch, double fill)
    : nx(nx_), ny(ny_), pitch_um(pitch), depths(nx_ * ny_, fill) {}

double DepthMap::max_depth() const {
  double m = 0.0;
  for (double d : depths) m = std::max(m, d);
  return m;
}

void DepthMap::validate() const {
  if (nx == 0 || ny == 0 || depths.size() != nx * ny) {
    throw Error(ErrorKind::Domain, fmt::format("depth map: {} values for a {}x{} grid",
                                               depths.size(), nx, ny));
  }
  if (!(pitch_um > 0.0)) throw Error(ErrorKind::Domain, "depth map: pitch must be positive");
  for (double d : depths) {
    if (!std::isfinite(d) || d < 0.0) {
      throw Error(ErrorKind::Domain, "depth map: depths must be finite and nonnegative");
    }
  }
}

std::size_t Mask::count() const {
  return static_cast<std::size_t>(std::count(cells.begin(), cells.end(), std::uint8_t{1}));
}

bool Mask::subset_of(const Mask& outer) const {
  if (nx != outer.nx || ny != outer.ny) return false;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i] && !outer.cells[i]) return false;
  }
  return true;
}

namespace {

void require_same_grid(std::size_t nx, std::size_t ny, double pitch, const DepthMap& dm,
                       const char* op) {
  if (nx != dm.nx || ny != dm.ny || std::abs(pitch - dm.pitch_um) > 1e-12 * pitch) {
    throw Error(ErrorKind::Dimension,
                fmt::format("{}: grid {}x{} @ {} um does not match {}x{} @ {} um", op, nx, ny,
                            pitch, dm.nx, dm.ny, dm.pitch_um));
  }
}

}  // namespace

SideMaps profile_to_depthmap(const HingeSpec& hinge, double pitch_um, CutSides sides,
                             std::size_t margin_cells) {
  if (!(pitch_um > 0.0)) throw Error(ErrorKind::Domain, "profile_to_depthmap: pitch must be positive");
  const double sheet_um = hinge.sheet_t * 1e6;
  const double length_um = hinge.profile.length() * 1e6;
  const double width_um = hinge.width * 1e6;
  if (hinge.profile.max_thickness() * 1e6 > sheet_um * (1.0 + 1e-12)) {
    throw Error(ErrorKind::InfeasibleProfile,
                fmt::format("profile_to_depthmap: profile reaches {} um on a {} um sheet",
                            hinge.profile.max_thickness() * 1e6, sheet_um));
  }
  // Node-centred sampling so both ends (and the mid-length for an even cell
  // count) fall on grid columns.
  const auto cells_x = static_cast<std::size_t>(std::llround(length_um / pitch_um));
  const auto cells_y = static_cast<std::size_t>(std::llround(width_um / pitch_um));
  const std::size_t hinge_nx = cells_x + 1;
  const std::size_t ny = cells_y + 1;
  const std::size_t nx = hinge_nx + 2 * margin_cells;

  DepthMap top(nx, ny, pitch_um);
  const double split = sides == CutSides::Both ? 0.5 : 1.0;
  for (std::size_t i = 0; i < hinge_nx; ++i) {
    const double s_um = std::min(static_cast<double>(i) * pitch_um, length_um);
    const double t_um = hinge.profile.thickness_at(s_um * 1e-6) * 1e6;
    const double depth = std::max(0.0, (sheet_um - t_um) * split);
    for (std::size_t iy = 0; iy < ny; ++iy) top.at(i + margin_cells, iy) = depth;
  }
  SideMaps out{top, std::nullopt};
  if (sides == CutSides::Both) out.bottom = top;
  return out;
}

LayerPlan slice(const DepthMap& dm, const lasercal::AblationSetting& setting) {
  dm.validate();
  const double delta = setting.depth_per_layer_um;
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw Error(ErrorKind::Domain, "slice: depth per layer must be positive");
  }
  LayerPlan plan;
  plan.nx = dm.nx;
  plan.ny = dm.ny;
  plan.pitch_um = dm.pitch_um;
  plan.setting = setting;
  const auto n_layers = static_cast<int>(std::floor(dm.max_depth() / delta + 0.5));
  for (int k = 1; k <= n_layers; ++k) {
    const double threshold = (k - 0.5) * delta;
    Layer layer{k, Mask(dm.nx, dm.ny), setting.passes_per_layer};
    for (std::size_t i = 0; i < dm.depths.size(); ++i) {
      layer.mask.cells[i] = dm.depths[i] >= threshold ? 1 : 0;
    }
    plan.layers.push_back(std::move(layer));
  }
  return plan;
}

std::vector<Polyline> rasterize(const Mask& mask, double pitch_um, ScanAngle angle,
                                bool serpentine) {
  const bool along_x = angle == ScanAngle::Deg0;
  const std::size_t n_lines = along_x ? mask.ny : mask.nx;
  const std::size_t n_cells = along_x ? mask.nx : mask.ny;
  const double p = pitch_um * 1e-3;  // mm

  auto cell = [&](std::size_t line, std::size_t pos) {
    return along_x ? mask.at(pos, line) : mask.at(line, pos);
  };
  auto point = [&](double along, std::size_t line) {
    const double across = static_cast<double>(line) * p;
    return along_x ? Point2{along, across} : Point2{across, along};
  };

  std::vector<Polyline> out;
  bool reverse = false;
  for (std::size_t line = 0; line < n_lines; ++line) {
    std::vector<Polyline> segs;
    std::size_t pos = 0;
    while (pos < n_cells) {
      if (!cell(line, pos)) {
        ++pos;
        continue;
      }
      const std::size_t a = pos;
      while (pos < n_cells && cell(line, pos)) ++pos;
      const std::size_t b = pos - 1;
      double start = static_cast<double>(a) * p;
      double end = static_cast<double>(b) * p;
      if (a == b) {
        start -= 0.5 * p;
        end += 0.5 * p;
      }
      Polyline pl;
      pl.points = {point(start, line), point(end, line)};
      segs.push_back(std::move(pl));
    }
    if (segs.empty()) continue;
    if (serpentine && reverse) {
      std::reverse(segs.begin(), segs.end());
      for (auto& s : segs) std::reverse(s.points.begin(), s.points.end());
    }
    reverse = !reverse;
    for (auto& s : segs) out.push_back(std::move(s));
  }
  return out;
}

Toolpath plan_toolpath(const LayerPlan& plan, ScanAngle angle, bool serpentine) {
  Toolpath tp;
  for (const auto& layer : plan.layers) {
    for (auto& pl : rasterize(layer.mask, plan.pitch_um, angle, serpentine)) {
      pl.layer = layer.index;
      pl.passes = layer.passes;
      tp.polylines.push_back(std::move(pl));
    }
  }
  return tp;
}

DepthMap reconstruct(const LayerPlan& plan) {
  DepthMap dm(plan.nx, plan.ny, plan.pitch_um);
  for (const auto& layer : plan.layers) {
    if (layer.mask.nx != plan.nx || layer.mask.ny != plan.ny) {
      throw Error(ErrorKind::Dimension, fmt::format("plan: layer {} mask has the wrong shape",
                                                    layer.index));
    }
    for (std::size_t i = 0; i < dm.depths.size(); ++i) {
      if (layer.mask.cells[i]) dm.depths[i] += plan.setting.depth_per_layer_um;
    }
  }
  return dm;
}

PlanReport verify_plan(const LayerPlan& plan, const DepthMap& target,
                       std::optional<double> tolerance_um) {
  require_same_grid(plan.nx, plan.ny, plan.pitch_um, target, "verify_plan");
  const DepthMap achieved = reconstruct(plan);
  const double delta = plan.setting.depth_per_layer_um;
  PlanReport r;
  r.tolerance_um = tolerance_um.value_or(0.5 * delta);
  double sq = 0.0;
  std::size_t within = 0;
  for (std::size_t i = 0; i < target.depths.size(); ++i) {
    const double e = std::abs(achieved.depths[i] - target.depths[i]);
    r.max_abs_error_um = std::max(r.max_abs_error_um, e);
    sq += e * e;
    if (e <= r.tolerance_um * (1.0 + 1e-12)) ++within;
  }
  const auto n = static_cast<double>(target.depths.size());
  r.rms_error_um = std::sqrt(sq / n);
  r.fraction_within = static_cast<double>(within) / n;
  r.within_quantization_bound = r.max_abs_error_um <= 0.5 * delta * (1.0 + 1e-12);
  return r;
}

ToleranceReport tolerance_report(const DepthMap& designed, const DepthMap& measured, double band_um,
                                 std::optional<std::size_t> section_row) {
  require_same_grid(designed.nx, designed.ny, designed.pitch_um, measured, "tolerance_report");
  if (!(band_um >= 0.0)) throw Error(ErrorKind::Domain, "tolerance_report: band must be >= 0");
  ToleranceReport r;
  r.band_um = band_um;
  r.max_cut_depth_um = designed.max_depth();
  const double ten_pct = 0.1 * r.max_cut_depth_um;
  std::size_t within = 0, within_pct = 0;
  for (std::size_t i = 0; i < designed.depths.size(); ++i) {
    const double dev = std::abs(measured.depths[i] - designed.depths[i]);
    r.max_deviation_um = std::max(r.max_deviation_um, dev);
    if (dev <= band_um + 1e-12) ++within;
    if (dev <= ten_pct + 1e-12) ++within_pct;
  }
  const auto n = static_cast<double>(designed.depths.size());
  r.fraction_within = static_cast<double>(within) / n;
  r.fraction_within_10pct_of_depth = static_cast<double>(within_pct) / n;
  r.max_deviation_pct_of_depth =
      r.max_cut_depth_um > 0.0 ? 100.0 * r.max_deviation_um / r.max_cut_depth_um : 0.0;

  r.section_row = section_row.value_or(designed.ny / 2);
  if (r.section_row >= designed.ny) {
    throw Error(ErrorKind::Dimension,
                fmt::format("tolerance_report: section row {} outside {} rows", r.section_row,
                            designed.ny));
  }
  r.section_deviation_um.resize(designed.nx);
  for (std::size_t ix = 0; ix < designed.nx; ++ix) {
    r.section_deviation_um[ix] = measured.at(ix, r.section_row) - designed.at(ix, r.section_row);
  }
  return r;
}

// ---- text formats ------------------------------------------------------------

void write_depthmap(std::ostream& os, const DepthMap& dm) {
  fmt::print(os, "{} {} {}\n", dm.nx, dm.ny, dm.pitch_um);
  for (std::size_t iy = 0; iy < dm.ny; ++iy) {
    for (std::size_t ix = 0; ix < dm.nx; ++ix) {
      fmt::print(os, "{}{}", ix ? " " : "", dm.at(ix, iy));
    }
    os << '\n';
  }
}

DepthMap read_depthmap(std::istream& is) {
  DepthMap dm;
  if (!(is >> dm.nx >> dm.ny >> dm.pitch_um)) {
    throw Error(ErrorKind::Parse, "depth map: expected header 'nx ny pitch_um'");
  }
  dm.depths.reserve(dm.nx * dm.ny);
  double v;
  while (dm.depths.size() < dm.nx * dm.ny && (is >> v)) dm.depths.push_back(v);
  if (dm.depths.size() != dm.nx * dm.ny) {
    throw Error(ErrorKind::Parse, fmt::format("depth map: expected {} values, read {}",
                                              dm.nx * dm.ny, dm.depths.size()));
  }
  dm.validate();
  return dm;
}

void write_plan(std::ostream& os, const LayerPlan& plan) {
  fmt::print(os, "layerplan {} {} {} {} {} {} {}\n", plan.nx, plan.ny, plan.pitch_um,
             plan.setting.depth_per_layer_um, plan.setting.passes_per_layer,
             plan.setting.rep_rate_khz, plan.layers.size());
  for (const auto& layer : plan.layers) {
    fmt::print(os, "layer {} passes {}\n", layer.index, layer.passes);
    std::string row(plan.nx, '0');
    for (std::size_t iy = 0; iy < plan.ny; ++iy) {
      for (std::size_t ix = 0; ix < plan.nx; ++ix) row[ix] = layer.mask.at(ix, iy) ? '1' : '0';
      os << row << '\n';
    }
  }
}

LayerPlan read_plan(std::istream& is) {
  LayerPlan plan;
  std::string magic;
  std::size_t n_layers = 0;
  if (!(is >> magic >> plan.nx >> plan.ny >> plan.pitch_um >> plan.setting.depth_per_layer_um >>
        plan.setting.passes_per_layer >> plan.setting.rep_rate_khz >> n_layers) ||
      magic != "layerplan") {
    throw Error(ErrorKind::Parse, "layer plan: bad header");
  }
  for (std::size_t k = 0; k < n_layers; ++k) {
    std::string kw1, kw2;
    Layer layer;
    if (!(is >> kw1 >> layer.index >> kw2 >> layer.passes) || kw1 != "layer" || kw2 != "passes") {
      throw Error(ErrorKind::Parse, fmt::format("layer plan: bad header for layer {}", k + 1));
    }
    layer.mask = Mask(plan.nx, plan.ny);
    for (std::size_t iy = 0; iy < plan.ny; ++iy) {
      std::string row;
      if (!(is >> row) || row.size() != plan.nx ||
          row.find_first_not_of("01") != std::string::npos) {
        throw Error(ErrorKind::Parse,
                    fmt::format("layer plan: bad mask row {} in layer {}", iy, layer.index));
      }
      for (std::size_t ix = 0; ix < plan.nx; ++ix) layer.mask.set(ix, iy, row[ix] == '1');
    }
    plan.layers.push_back(std::move(layer));
  }
  return plan;
}

}  // namespace nitiflex::planner
