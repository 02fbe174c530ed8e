// Acceptance suite: one PASS/FAIL line per criterion. Exit status is nonzero
// when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "nitiflex/bench.hpp"
#include "nitiflex/fiber_kernels.hpp"
#include "nitiflex/lasercal.hpp"
#include "nitiflex/mechanics.hpp"
#include "nitiflex/planner.hpp"
#include "oracles.hpp"
#include "suite_commands.hpp"

using namespace nitiflex;

namespace {

constexpr double um = 1e-6;
constexpr double deg = std::numbers::pi / 180.0;
const BilinearMaterial kMat{60e9, 20e9, 0.01, 0.06};
const oracle::Law kLaw{60e9, 20e9, 0.01};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  fmt::print("[{}] {:>2} {}: {}\n", pass ? "PASS" : "FAIL", id, name, detail);
  if (!pass) ++failures;
}

HingeSpec rect(double t, double L) {
  HingeSpec h;
  h.profile = ThicknessProfile::rectangular(L, t);
  h.width = 2e-3;
  h.material = kMat;
  return h;
}

HingeSpec arc(double t_min) {
  HingeSpec h;
  h.profile = ThicknessProfile::arc(400 * um, t_min, 1e-3, CutSides::Both);
  h.width = 2e-3;
  h.material = kMat;
  return h;
}

// The eight hinges: four rectangular and four circular-cutout thicknesses.
std::vector<std::pair<std::string, HingeSpec>> geometries() {
  std::vector<std::pair<std::string, HingeSpec>> g;
  for (double t : {35.0, 30.0, 25.0, 20.0}) g.emplace_back(fmt::format("rect {} um", t), rect(t * um, 1e-3));
  for (double t : {30.0, 25.0, 20.0, 15.0}) g.emplace_back(fmt::format("arc {} um", t), arc(t * um));
  return g;
}

void criterion1() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> td(10 * um, 40 * um), wd(0.5e-3, 3e-3), ed(0.0, 0.06);
  double worst = 0.0;
  int plastic = 0;
  for (int i = 0; i < 200; ++i) {
    const double t = td(rng), w = wd(rng), e = ed(rng);
    const double kappa = 2.0 * e / t;
    plastic += e > kMat.eps_l ? 1 : 0;
    worst = std::max(worst, rel(section_moment(kMat, t, w, kappa), oracle::fiber_moment(kLaw, t, w, kappa, 10000)));
  }
  const double s = seconds_since(t0);
  report(1, "closed-form section moment vs 1e4-fiber quadrature", worst <= 1e-6 && s < 5.0 && plastic > 0 && plastic < 200,
         fmt::format("200 draws ({} past the knee), max rel err {:.2e} (tol 1e-6), {:.2f} s (limit 5 s)", plastic, worst, s));
}

void criterion2() {
  const auto t0 = Clock::now();
  double worst_a = 0.0, worst_n = 0.0;
  for (const auto& [name, h] : geometries()) {
    const bool analytical = h.profile.kind() == ThicknessProfile::Kind::Rectangular;
    for (int k = 1; k <= 20; ++k) {
      const double r = castigliano_residual(h, 40.0 * deg * k / 20.0, 1e-5);
      (analytical ? worst_a : worst_n) = std::max(analytical ? worst_a : worst_n, r);
    }
  }
  const double s = seconds_since(t0);
  report(2, "Castigliano dU/dtheta vs torque, 8 hinges x 20 angles",
         worst_a <= 1e-4 && worst_n <= 1e-3 && s < 30.0,
         fmt::format("analytical max {:.2e} (tol 1e-4), numerical max {:.2e} (tol 1e-3), {:.2f} s (limit 30 s)",
                     worst_a, worst_n, s));
}

void criterion3() {
  double worst = 0.0;
  for (double t : {35.0, 30.0, 25.0, 20.0}) {
    const auto h = rect(t * um, 1e-3);
    for (int k = 0; k <= 40; ++k) {
      const double th = k * deg;
      const double a = torque_rect_analytical(h, th).torque;
      const double n = torque_profile_numerical(h, th).torque;
      worst = std::max(worst, a == 0.0 ? std::abs(n) : rel(n, a));
    }
  }
  report(3, "numerical solver vs closed form on rectangles, 0..40 deg", worst <= 1e-5,
         fmt::format("4 thicknesses x 41 angles, max rel diff {:.2e} (tol 1e-5)", worst));
}

void criterion4() {
  double worst = 0.0;
  SolverOptions fine;
  fine.stations = 402;
  fine.fibers = 4000;
  for (double t : {30.0, 25.0, 20.0, 15.0}) {
    const auto h = arc(t * um);
    worst = std::max(worst, rel(torque_profile_numerical(h, 40 * deg, fine).torque,
                                torque_profile_numerical(h, 40 * deg).torque));
  }
  report(4, "convergence 201->402 stations, 2000->4000 fibers at 40 deg", worst < 1e-4,
         fmt::format("4 arc hinges, max rel change {:.2e} (tol 1e-4)", worst));
}

void criterion5() {
  const double t = max_thickness_for(50 * deg, 160 * um, 0.06);
  const double lim = elastic_limit(rect(t, 160 * um), 0.06) / deg;
  const double lim22 = elastic_limit(rect(22 * um, 160 * um), 0.06) / deg;
  report(5, "elastic-range sizing at 50 deg, L = 160 um, 6%",
         std::abs(t / um - 22.0) <= 0.1 && std::abs(lim - 50.0) <= 0.1,
         fmt::format("max thickness {:.4f} um (22.0 +- 0.1), elastic limit {:.4f} deg (50.0 +- 0.1); "
                     "22 um hinge reaches 6% at {:.4f} deg", t / um, lim, lim22));
}

void criterion6() {
  std::vector<lasercal::EtchSample> s;
  for (double r : {150.0, 175.0, 200.0, 225.0, 250.0}) {
    for (int p = 1; p <= 14; ++p) s.push_back({r, p, (r == 200.0 ? 1.0 : 0.37 + r / 1000.0) * p});
  }
  const auto fits = lasercal::fit_etch_rates(s);
  const auto sel = lasercal::select_setting(fits, 5.0);
  const double rate200 = fits[2].rate_um_per_pass;
  report(6, "operating point for 5 um/layer", sel.rep_rate_khz == 200.0 && sel.passes_per_layer == 5,
         fmt::format("200 kHz fit {:.4f} um/pass; selected {} kHz x {} passes = {:.4f} um", rate200,
                     sel.rep_rate_khz, sel.passes_per_layer, sel.depth_per_layer_um));
}

void criterion7() {
  const double f = lasercal::fluence(0.206, 8.0);
  report(7, "fluence(0.206 uJ, 8 um) = 4.10 +- 0.01 J/cm^2", std::abs(f - 4.10) <= 0.01,
         fmt::format("flat-top E/(pi r^2) gives {:.4f} J/cm^2; 4.10 J/cm^2 corresponds to {:.3f} uJ",
                     f, 4.10 * std::numbers::pi * 4e-4 * 4e-4 * 1e6));
}

void criterion8() {
  lasercal::AblationSetting set;
  set.rep_rate_khz = 200;
  set.passes_per_layer = 5;
  set.depth_per_layer_um = 5.0;
  const planner::DepthMap flat(41, 41, 5.0, 90.0);
  const auto plan = planner::slice(flat, set);
  bool nested = true;
  for (std::size_t k = 1; k < plan.layers.size(); ++k) {
    nested = nested && plan.layers[k].mask.subset_of(plan.layers[k - 1].mask);
  }
  const double flat_err = planner::verify_plan(plan, flat).max_abs_error_um;

  double worst = 0.0;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> tmin(5.0, 80.0), radius(0.25e-3, 3e-3), len(100e-6, 800e-6);
  std::bernoulli_distribution both(0.5);
  int done = 0;
  while (done < 100) {
    HingeSpec h;
    const double R = radius(rng);
    const auto sides = both(rng) ? CutSides::Both : CutSides::One;
    h.profile = ThicknessProfile::arc(std::min(len(rng), 2 * R), tmin(rng) * um, R, sides);
    h.width = 100e-6;
    if (h.profile.max_thickness() > h.sheet_t) continue;
    const auto maps = planner::profile_to_depthmap(h, 5.0, sides, 2);
    worst = std::max(worst, planner::verify_plan(planner::slice(maps.top, set), maps.top).max_abs_error_um);
    ++done;
  }
  report(8, "slicing 90 um at 5 um/layer and random round trips",
         plan.layers.size() == 18 && nested && flat_err == 0.0 && worst <= 2.5,
         fmt::format("{} layers, nested {}, error {}; 100 random profiles max error {:.4f} um (<= 2.5)",
                     plan.layers.size(), nested ? "yes" : "no", flat_err, worst));
}

void criterion9() {
  planner::DepthMap designed(100, 100, 5.0);
  for (std::size_t ix = 0; ix < 100; ++ix) {
    for (std::size_t iy = 0; iy < 100; ++iy) {
      const double x = (static_cast<double>(ix) - 49.5) / 49.5;
      designed.at(ix, iy) = 90.0 * (1.0 - x * x);
    }
  }
  auto measured = designed;
  std::mt19937_64 rng(9);
  std::vector<std::size_t> idx(designed.depths.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::shuffle(idx.begin(), idx.end(), rng);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    measured.depths[idx[i]] += i < 300 ? 12.0 : std::clamp(noise(rng), -4.0, 4.0);
  }
  for (double& d : measured.depths) d = std::max(d, 0.0);
  const auto r = planner::tolerance_report(designed, measured, 5.0);
  report(9, "tolerance report with 3% outliers at +12 um", std::abs(r.fraction_within - 0.97) <= 0.005,
         fmt::format("fraction within +-5 um {:.4f} (0.97 +- 0.005), max deviation {:.2f} um = {:.1f}% of depth",
                     r.fraction_within, r.max_deviation_um, r.max_deviation_pct_of_depth));
}

void criterion10() {
  std::vector<double> x(1000, 0.0);
  std::mt19937_64 rng(10);
  std::uniform_int_distribution<std::size_t> pos(0, 999);
  for (int k = 0; k < 5; ++k) x[pos(rng)] = 10.0;
  const auto y = bench::median_filter(x, 101);
  std::vector<double> brute(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::size_t h = std::min({std::size_t{50}, i, x.size() - 1 - i});
    std::vector<double> w(x.begin() + static_cast<long>(i - h), x.begin() + static_cast<long>(i + h + 1));
    std::sort(w.begin(), w.end());
    brute[i] = w[h];
  }
  const bool impulses_gone = y == brute && std::all_of(y.begin(), y.end(), [](double v) { return v == 0.0; });

  const auto model = torque_curve(arc(20 * um), 40 * deg, 401);
  bench::TorqueTrial trial;
  for (const auto& s : model.samples) trial.points.push_back({s.theta, s.torque});
  const std::vector<bench::TorqueTrial> trials(5, trial);
  const auto agg = bench::aggregate(trials, 0.5 * deg);
  const double max_std = *std::max_element(agg.std.begin(), agg.std.end());
  const auto cmp = bench::compare(model, agg);
  const double peak = model.samples.back().torque;
  report(10, "median filter, aggregate and compare round trip",
         impulses_gone && max_std == 0.0 && cmp.rmse <= 1e-12 * peak,
         fmt::format("impulses removed {}, matches sort oracle {}; 5 identical trials max std {}; "
                     "compare RMSE {:.2e} N m ({} points)",
                     impulses_gone ? "yes" : "no", y == brute ? "yes" : "no", max_std, cmp.rmse, cmp.n_points));
}

void criterion11() {
  const double slopes[] = {0.5, 0.65, 0.8, 1.0, 1.2};
  const double rates[] = {150, 175, 200, 225, 250};
  int covered = 0, total = 0;
  int per_rate[5] = {};
  for (unsigned seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(1000 + seed);
    std::normal_distribution<double> noise(0.0, 0.3);
    std::vector<lasercal::EtchSample> s;
    for (int r = 0; r < 5; ++r) {
      for (int p = 1; p <= 14; ++p) s.push_back({rates[r], p, std::max(0.0, slopes[r] * p + noise(rng))});
    }
    const auto fits = lasercal::fit_etch_rates(s);
    for (int r = 0; r < 5; ++r) {
      const bool in = std::abs(fits[static_cast<std::size_t>(r)].rate_um_per_pass - slopes[r]) <=
                      fits[static_cast<std::size_t>(r)].rate_ci95;
      covered += in ? 1 : 0;
      per_rate[r] += in ? 1 : 0;
      ++total;
    }
  }
  const int min_rate = *std::min_element(std::begin(per_rate), std::end(per_rate));
  report(11, "slope CI95 coverage over 100 synthetic datasets", min_rate >= 90,
         fmt::format("per-rate coverage {}/{}/{}/{}/{} of 100 (each >= 90), pooled {}/{}", per_rate[0],
                     per_rate[1], per_rate[2], per_rate[3], per_rate[4], covered, total));
}

void criterion12(Clock::time_point start) {
  const double own = seconds_since(start);
  const auto t0 = Clock::now();
  int bad = 0;
  for (const char* cmd : {NITIFLEX_SUITE_COMMANDS}) {
    const std::string line = std::string(cmd) + " > /dev/null 2>&1";
    bad += std::system(line.c_str()) != 0 ? 1 : 0;
  }
  const double others = seconds_since(t0);
  const double total = own + others;
  report(12, "full test suite under 2 minutes", total < 120.0 && bad == 0,
         fmt::format("unit and CLI tests {:.2f} s ({} failing), acceptance checks {:.2f} s, total {:.2f} s (limit 120 s)",
                     others, bad, own, total));
}

void guarded(int id, const std::function<void()>& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    report(id, "criterion threw", false, e.what());
  }
}

}  // namespace

int main() {
  const auto start = Clock::now();
  fmt::print("active fiber kernel: {}\n", kernels::isa_name(kernels::active_isa()));
  guarded(1, criterion1);
  guarded(2, criterion2);
  guarded(3, criterion3);
  guarded(4, criterion4);
  guarded(5, criterion5);
  guarded(6, criterion6);
  guarded(7, criterion7);
  guarded(8, criterion8);
  guarded(9, criterion9);
  guarded(10, criterion10);
  guarded(11, criterion11);
  guarded(12, [&] { criterion12(start); });
  fmt::print("{} of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
