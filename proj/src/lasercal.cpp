#include "nitiflex/lasercal.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>

#include "nitiflex/error.hpp"

namespace nitiflex::lasercal {

std::vector<EtchFit> fit_etch_rates(std::span<const EtchSample> samples) {
  std::map<double, std::vector<EtchSample>> groups;
  for (const auto& s : samples) {
    if (!std::isfinite(s.rep_rate_khz) || !std::isfinite(s.depth_um) || s.passes < 1 ||
        s.depth_um < 0.0) {
      throw Error(ErrorKind::Domain,
                  fmt::format("fit_etch_rates: invalid sample (rate={}, passes={}, depth={})",
                              s.rep_rate_khz, s.passes, s.depth_um));
    }
    groups[s.rep_rate_khz].push_back(s);
  }
  if (groups.empty()) {
    throw Error(ErrorKind::InsufficientData, "fit_etch_rates: no samples");
  }

  std::vector<EtchFit> fits;
  for (const auto& [rate, group] : groups) {
    std::set<int> distinct;
    for (const auto& s : group) distinct.insert(s.passes);
    if (distinct.size() < 3) {
      throw Error(ErrorKind::InsufficientData,
                  fmt::format("fit_etch_rates: group {} kHz has {} distinct pass counts (need 3)",
                              rate, distinct.size()));
    }
    const double n = static_cast<double>(group.size());
    double mx = 0.0, my = 0.0;
    for (const auto& s : group) {
      mx += s.passes;
      my += s.depth_um;
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& s : group) {
      const double dx = s.passes - mx;
      const double dy = s.depth_um - my;
      sxx += dx * dx;
      sxy += dx * dy;
      syy += dy * dy;
    }
    if (!(sxx > 0.0)) {
      throw Error(ErrorKind::DegenerateRegressor,
                  fmt::format("fit_etch_rates: group {} kHz has zero variance in passes", rate));
    }
    EtchFit f;
    f.rep_rate_khz = rate;
    f.n = group.size();
    f.rate_um_per_pass = sxy / sxx;
    f.intercept_um = my - f.rate_um_per_pass * mx;
    double ssr = 0.0;
    for (const auto& s : group) {
      const double r = s.depth_um - (f.intercept_um + f.rate_um_per_pass * s.passes);
      ssr += r * r;
    }
    f.r2 = syy > 0.0 ? std::clamp(1.0 - ssr / syy, 0.0, 1.0) : 1.0;
    const double dof = n - 2.0;
    const double se = std::sqrt(ssr / dof / sxx);
    const boost::math::students_t dist(dof);
    f.rate_ci95 = se * boost::math::quantile(dist, 0.975);
    fits.push_back(f);
  }
  return fits;
}

namespace {

struct Candidate {
  const EtchFit* fit = nullptr;
  int passes = 0;
  double error = 0.0;
};

}  // namespace

AblationSetting select_setting(std::span<const EtchFit> fits, double target_depth_um,
                               const PulseEnergyFn& pulse_energy, double spot_diameter_um) {
  if (!(target_depth_um > 0.0) || !std::isfinite(target_depth_um)) {
    throw Error(ErrorKind::Domain, "select_setting: target depth must be positive");
  }
  const double tie = 1e-9 * target_depth_um;
  auto better = [tie](const Candidate& a, const Candidate& b) {
    if (std::abs(a.error - b.error) > tie) return a.error < b.error;
    if (a.passes != b.passes) return a.passes < b.passes;
    return a.fit->rep_rate_khz < b.fit->rep_rate_khz;
  };

  std::optional<Candidate> best, best_any;
  bool any_accepted = false;
  for (const auto& f : fits) {
    if (!f.accepted()) continue;
    any_accepted = true;
    const double ideal = target_depth_um / f.rate_um_per_pass;
    std::set<int> passes{1};
    const double lo = std::floor(ideal);
    if (lo >= 1.0 && lo < 1e6) passes.insert(static_cast<int>(lo));
    if (lo + 1.0 < 1e6) passes.insert(static_cast<int>(lo) + 1);
    for (int p : passes) {
      Candidate c{&f, p, std::abs(f.rate_um_per_pass * p - target_depth_um)};
      if (!best_any || better(c, *best_any)) best_any = c;
      if (f.rate_ci95 * p > 0.2 * target_depth_um) continue;
      if (!best || better(c, *best)) best = c;
    }
  }
  if (!any_accepted) {
    throw Error(ErrorKind::NoFeasibleSetting, "select_setting: no accepted etch fits");
  }
  if (!best) {
    throw Error(ErrorKind::NoFeasibleSetting,
                fmt::format("select_setting: no setting within the 20% interval bound; best "
                            "candidate {} kHz x {} passes = {:.3f} um (ci95 +-{:.3f} um)",
                            best_any->fit->rep_rate_khz, best_any->passes,
                            best_any->fit->rate_um_per_pass * best_any->passes,
                            best_any->fit->rate_ci95 * best_any->passes));
  }

  AblationSetting s;
  s.rep_rate_khz = best->fit->rep_rate_khz;
  s.passes_per_layer = best->passes;
  s.depth_per_layer_um = best->fit->rate_um_per_pass * best->passes;
  if (pulse_energy) {
    if (const auto e = pulse_energy(s.rep_rate_khz)) {
      s.fluence_j_cm2 = fluence(*e, spot_diameter_um);
    }
  }
  return s;
}

double fluence(double pulse_energy_uj, double spot_diameter_um) {
  if (!(pulse_energy_uj > 0.0) || !(spot_diameter_um > 0.0) || !std::isfinite(pulse_energy_uj) ||
      !std::isfinite(spot_diameter_um)) {
    throw Error(ErrorKind::Domain, "fluence: pulse energy and spot diameter must be positive");
  }
  const double energy_j = pulse_energy_uj * 1e-6;
  const double radius_cm = 0.5 * spot_diameter_um * 1e-4;
  return energy_j / (std::numbers::pi * radius_cm * radius_cm);
}

CalibrationGrid calibration_grid(std::span<const double> rates_khz, int passes_first,
                                 int passes_last, double square_side_um, double pitch_um,
                                 double gap_um) {
  if (!(pitch_um > 0.0)) throw Error(ErrorKind::Domain, "calibration_grid: pitch must be positive");
  if (!(square_side_um >= 2.0 * pitch_um)) {
    throw Error(ErrorKind::Domain, "calibration_grid: square side must be at least 2 pitches");
  }
  if (rates_khz.empty() || passes_first < 1 || passes_last < passes_first) {
    throw Error(ErrorKind::Domain, "calibration_grid: empty rate list or pass range");
  }
  if (!(gap_um >= 0.0)) throw Error(ErrorKind::Domain, "calibration_grid: gap must be >= 0");

  const auto lines = static_cast<std::size_t>(std::floor(square_side_um / pitch_um + 1e-9)) + 1;
  const double cell = square_side_um + gap_um;
  constexpr double kMm = 1e-3;

  CalibrationGrid grid;
  for (std::size_t row = 0; row < rates_khz.size(); ++row) {
    for (int p = passes_first; p <= passes_last; ++p) {
      const auto col = static_cast<std::size_t>(p - passes_first);
      const double x0 = static_cast<double>(col) * cell;
      const double y0 = static_cast<double>(row) * cell;
      Polyline pl;
      pl.layer = static_cast<int>(row) + 1;
      pl.passes = p;
      for (std::size_t k = 0; k < lines; ++k) {
        const double y = (y0 + static_cast<double>(k) * pitch_um) * kMm;
        const double xa = x0 * kMm, xb = (x0 + square_side_um) * kMm;
        if (k % 2 == 0) {
          pl.points.push_back({xa, y});
          pl.points.push_back({xb, y});
        } else {
          pl.points.push_back({xb, y});
          pl.points.push_back({xa, y});
        }
      }
      grid.cells.push_back({row, col, rates_khz[row], p, lines});
      grid.toolpath.polylines.push_back(std::move(pl));
    }
  }
  return grid;
}

}  // namespace nitiflex::lasercal
