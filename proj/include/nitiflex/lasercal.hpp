#pragma once

// Etch-rate calibration for raster ablation.
//
// The repetition rate (kHz) is the power knob: each rate gets its own
// depth-vs-passes line. Depths are micrometres, rates kilohertz.

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "nitiflex/toolpath.hpp"

namespace nitiflex::lasercal {

struct EtchSample {
  double rep_rate_khz = 0.0;
  int passes = 0;
  double depth_um = 0.0;
};

struct EtchFit {
  double rep_rate_khz = 0.0;
  double rate_um_per_pass = 0.0;
  double intercept_um = 0.0;
  double rate_ci95 = 0.0;  // half-width, um/pass
  double r2 = 0.0;
  std::size_t n = 0;

  bool accepted() const { return rate_um_per_pass > 0.0; }
};

/// Ordinary least squares of depth on passes, one line per repetition rate,
/// sorted by rate. The slope interval uses the two-sided 97.5% Student-t
/// quantile with n-2 degrees of freedom.
std::vector<EtchFit> fit_etch_rates(std::span<const EtchSample> samples);

struct AblationSetting {
  double rep_rate_khz = 0.0;
  std::optional<double> fluence_j_cm2;
  int passes_per_layer = 0;
  double depth_per_layer_um = 0.0;
};

/// Pulse energy (uJ) delivered at a repetition rate; used to annotate fluence.
using PulseEnergyFn = std::function<std::optional<double>(double rep_rate_khz)>;

/// Picks the (rate, passes) pair closest to the target depth per layer.
/// Ties go to fewer passes, then to the lower rate. Pairs whose propagated
/// interval (ci95 * passes) exceeds 20% of the target are rejected.
AblationSetting select_setting(std::span<const EtchFit> fits, double target_depth_um,
                               const PulseEnergyFn& pulse_energy = {},
                               double spot_diameter_um = 8.0);

/// Flat-top fluence E / (pi (d/2)^2), returned in J/cm^2. This is half the
/// peak fluence of a Gaussian beam with 1/e^2 diameter d.
double fluence(double pulse_energy_uj, double spot_diameter_um);

struct CalibrationCell {
  std::size_t row = 0;  // index into the rate list
  std::size_t col = 0;  // index into the pass range
  double rep_rate_khz = 0.0;
  int passes = 0;
  std::size_t raster_lines = 0;
};

struct CalibrationGrid {
  std::vector<CalibrationCell> cells;
  Toolpath toolpath;  // one serpentine polyline per cell, same order as cells
};

/// Characterization array: rows are repetition rates, columns pass counts,
/// each square filled by a serpentine raster with the given line pitch.
/// Squares are separated by `gap_um`. Polylines are tagged layer = row + 1.
CalibrationGrid calibration_grid(std::span<const double> rates_khz, int passes_first,
                                 int passes_last, double square_side_um, double pitch_um,
                                 double gap_um = 100.0);

}  // namespace nitiflex::lasercal
