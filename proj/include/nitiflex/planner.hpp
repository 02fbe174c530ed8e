#pragma once

// 2.5D process planning: designed hinge profile -> target depth map ->
// nested per-layer masks -> raster toolpaths, plus checks of a plan against
// its target and of a measured surface against the design.
//
// Grids are row-major with x (index ix) along the hinge length and y (iy)
// across its width. Cell (ix, iy) is centred at (ix*pitch, iy*pitch).

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "nitiflex/lasercal.hpp"
#include "nitiflex/mechanics.hpp"
#include "nitiflex/toolpath.hpp"

namespace nitiflex::planner {

struct DepthMap {
  std::size_t nx = 0;
  std::size_t ny = 0;
  double pitch_um = 5.0;
  std::vector<double> depths;  // um, size nx*ny

  DepthMap() = default;
  DepthMap(std::size_t nx, std::size_t ny, double pitch_um, double fill = 0.0);

  double& at(std::size_t ix, std::size_t iy) { return depths[iy * nx + ix]; }
  double at(std::size_t ix, std::size_t iy) const { return depths[iy * nx + ix]; }
  double max_depth() const;
  /// Throws Error(Domain) on shape mismatch or negative / non-finite depths.
  void validate() const;
};

struct Mask {
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::vector<std::uint8_t> cells;

  Mask() = default;
  Mask(std::size_t nx, std::size_t ny) : nx(nx), ny(ny), cells(nx * ny, 0) {}

  bool at(std::size_t ix, std::size_t iy) const { return cells[iy * nx + ix] != 0; }
  void set(std::size_t ix, std::size_t iy, bool v) { cells[iy * nx + ix] = v ? 1 : 0; }
  std::size_t count() const;
  /// True when every set cell of *this is also set in `outer`.
  bool subset_of(const Mask& outer) const;
};

struct Layer {
  int index = 1;  // 1-based, shallowest first
  Mask mask;
  int passes = 1;
};

struct LayerPlan {
  std::size_t nx = 0;
  std::size_t ny = 0;
  double pitch_um = 5.0;
  lasercal::AblationSetting setting;
  std::vector<Layer> layers;
};

struct SideMaps {
  DepthMap top;
  std::optional<DepthMap> bottom;  // set for both-sided cuts
};

/// Depth to remove so the sheet is left with the hinge profile. One-sided
/// cuts take sheet_t - t(s); both-sided cuts split it equally per side.
/// Depth is uniform across the width; `margin_cells` zero columns pad
/// each end of the hinge window.
SideMaps profile_to_depthmap(const HingeSpec& hinge, double pitch_um, CutSides sides,
                             std::size_t margin_cells = 0);

/// Round-to-nearest layering: layer k covers cells with depth >= (k - 1/2) * delta.
LayerPlan slice(const DepthMap& dm, const lasercal::AblationSetting& setting);

enum class ScanAngle { Deg0, Deg90 };

/// Scanline fill of the set cells. A run from cell a to b becomes one segment
/// between the cell centres; a single-cell run spans one pitch around its
/// centre. Serpentine ordering alternates direction on successive lines.
std::vector<Polyline> rasterize(const Mask& mask, double pitch_um, ScanAngle angle,
                                bool serpentine);

/// Rasterizes every layer, tagging polylines with layer index and passes.
Toolpath plan_toolpath(const LayerPlan& plan, ScanAngle angle = ScanAngle::Deg0,
                       bool serpentine = true);

/// Depth each cell receives from the plan.
DepthMap reconstruct(const LayerPlan& plan);

struct PlanReport {
  double max_abs_error_um = 0.0;
  double rms_error_um = 0.0;
  double tolerance_um = 0.0;
  double fraction_within = 0.0;
  bool within_quantization_bound = true;  // max error <= depth_per_layer / 2
};

/// Tolerance defaults to depth_per_layer / 2.
PlanReport verify_plan(const LayerPlan& plan, const DepthMap& target,
                       std::optional<double> tolerance_um = std::nullopt);

struct ToleranceReport {
  double band_um = 0.0;
  double fraction_within = 0.0;
  double max_deviation_um = 0.0;
  double max_cut_depth_um = 0.0;
  double max_deviation_pct_of_depth = 0.0;
  double fraction_within_10pct_of_depth = 0.0;
  std::size_t section_row = 0;
  std::vector<double> section_deviation_um;  // measured - designed along the row
};

ToleranceReport tolerance_report(const DepthMap& designed, const DepthMap& measured, double band_um,
                                 std::optional<std::size_t> section_row = std::nullopt);

// Text formats.
void write_depthmap(std::ostream& os, const DepthMap& dm);
DepthMap read_depthmap(std::istream& is);
void write_plan(std::ostream& os, const LayerPlan& plan);
LayerPlan read_plan(std::istream& is);

}  // namespace nitiflex::planner
