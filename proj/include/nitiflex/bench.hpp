#pragma once

// Torque-test data pipeline: filter raw trials, put them on a common angle
// grid, aggregate, and score model curves against the result.
// Angles are radians and torques N m; plots show degrees and N um.

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nitiflex/mechanics.hpp"

namespace nitiflex::bench {

struct TrialPoint {
  double theta = 0.0;   // rad
  double torque = 0.0;  // N m
};

struct TorqueTrial {
  std::string hinge_id;
  int trial_index = 0;
  std::vector<TrialPoint> points;
};

struct AggregateCurve {
  std::vector<double> grid;  // rad
  std::vector<double> mean;  // N m
  std::vector<double> std;   // N m, sample (n-1) standard deviation
  std::size_t n_trials = 0;
};

/// Centered running median. Near the ends the window shrinks symmetrically
/// to the widest odd window that fits, so length and phase are preserved.
std::vector<double> median_filter(std::span<const double> series, int order = 101);

/// Filters each trial's torque, interpolates onto a uniform grid over the
/// overlap of all trial ranges, and returns per-point mean and std.
AggregateCurve aggregate(std::span<const TorqueTrial> trials, double grid_step, int order = 101);

struct CompareReport {
  double rmse = 0.0;              // N m
  double max_abs_error = 0.0;     // N m
  double nrmse_pct = 0.0;         // percent of peak |mean|
  double fraction_in_band = 0.0;  // |model - mean| <= 2 std
  std::size_t n_points = 0;
};

/// Interpolates the model onto the experiment grid points it covers.
CompareReport compare(const TorqueCurve& model, const AggregateCurve& experiment);

struct PlotSeries {
  std::string label;
  std::vector<double> theta;  // rad
  std::vector<double> torque; // N m
  std::vector<double> std;    // optional band, N m; empty for none
};

PlotSeries series_from(const std::string& label, const TorqueCurve& curve);
PlotSeries series_from(const std::string& label, const AggregateCurve& agg);

/// Writes `<stem>.svg` and `<stem>.csv`; returns both paths.
std::vector<std::filesystem::path> emit_plot(std::span<const PlotSeries> series,
                                             const std::filesystem::path& stem,
                                             const std::string& title = "");

// CSV formats.
/// `theta_rad,torque_nm`, or `theta_rad,force_n` scaled by arm_m (required then).
TorqueTrial read_trial_csv(const std::filesystem::path& path,
                           std::optional<double> arm_m = std::nullopt);
/// Every *.csv in a directory, sorted by file name.
std::vector<TorqueTrial> read_trial_dir(const std::filesystem::path& dir,
                                        std::optional<double> arm_m = std::nullopt);
void write_aggregate_csv(std::ostream& os, const AggregateCurve& agg);
AggregateCurve read_aggregate_csv(std::istream& is);
void write_compare_csv(std::ostream& os, const CompareReport& r);

}  // namespace nitiflex::bench
