// nitiflex: command-line front end for the hinge, laser, planning and bench
// workflows. Exit status: 0 success, 1 domain or solver error, 2 usage error.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "nitiflex/bench.hpp"
#include "nitiflex/error.hpp"
#include "nitiflex/io.hpp"
#include "nitiflex/lasercal.hpp"
#include "nitiflex/mechanics.hpp"
#include "nitiflex/planner.hpp"

namespace fs = std::filesystem;
using namespace nitiflex;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Optional project file (key = value) supplying defaults for the subcommands.
struct ProjectConfig {
  std::optional<fs::path> material;
  std::optional<fs::path> spec;
  std::optional<lasercal::AblationSetting> setting;
  std::optional<double> pitch_um;
  std::optional<fs::path> output_dir;

  static ProjectConfig load(const fs::path& path) {
    const auto kv = io::parse_key_values(io::read_text_file(path), path.string());
    const fs::path base = path.parent_path();
    auto resolve = [&](const std::string& v) {
      const fs::path p(v);
      return p.is_absolute() ? p : base / p;
    };
    auto number = [&](const std::string& key) {
      double v = 0.0;
      const auto& s = kv.at(key);
      std::istringstream ss(s);
      if (!(ss >> v) || !(ss >> std::ws).eof()) {
        throw Error(ErrorKind::Parse, fmt::format("{}: {} is not a number", path.string(), key));
      }
      return v;
    };

    ProjectConfig c;
    for (const auto& [k, v] : kv) {
      if (k != "material" && k != "spec" && k != "rep_rate_khz" && k != "passes_per_layer" &&
          k != "depth_per_layer_um" && k != "pitch_um" && k != "output_dir") {
        throw Error(ErrorKind::Parse, fmt::format("{}: unknown key '{}'", path.string(), k));
      }
    }
    for (const char* key : {"material", "spec"}) {
      if (!kv.contains(key)) continue;
      const fs::path p = resolve(kv.at(key));
      if (!fs::exists(p)) {
        throw Error(ErrorKind::Io, fmt::format("{}: {} file '{}' does not exist", path.string(), key,
                                               p.string()));
      }
      (std::string(key) == "material" ? c.material : c.spec) = p;
    }
    const bool any_laser = kv.contains("rep_rate_khz") || kv.contains("passes_per_layer") ||
                           kv.contains("depth_per_layer_um");
    if (any_laser) {
      for (const char* key : {"rep_rate_khz", "passes_per_layer", "depth_per_layer_um"}) {
        if (!kv.contains(key)) {
          throw Error(ErrorKind::Parse, fmt::format("{}: laser setting needs {}", path.string(), key));
        }
      }
      lasercal::AblationSetting s;
      s.rep_rate_khz = number("rep_rate_khz");
      const double passes = number("passes_per_layer");
      s.depth_per_layer_um = number("depth_per_layer_um");
      if (!(s.rep_rate_khz > 0.0) || passes < 1.0 || passes != std::floor(passes) ||
          !(s.depth_per_layer_um > 0.0)) {
        throw Error(ErrorKind::Domain, fmt::format("{}: invalid laser setting", path.string()));
      }
      s.passes_per_layer = static_cast<int>(passes);
      c.setting = s;
    }
    if (kv.contains("pitch_um")) {
      c.pitch_um = number("pitch_um");
      if (!(*c.pitch_um > 0.0)) {
        throw Error(ErrorKind::Domain, fmt::format("{}: pitch_um must be positive", path.string()));
      }
    }
    if (kv.contains("output_dir")) c.output_dir = resolve(kv.at("output_dir"));
    return c;
  }
};

struct Context {
  ProjectConfig config;

  fs::path out(const fs::path& p) const {
    fs::path r = (config.output_dir && p.is_relative()) ? *config.output_dir / p : p;
    if (r.has_parent_path()) fs::create_directories(r.parent_path());
    return r;
  }

  std::optional<BilinearMaterial> material() const {
    if (!config.material) return std::nullopt;
    return io::parse_material(io::parse_key_values(io::read_text_file(*config.material)),
                              config.material->string());
  }

  HingeSpec hinge(const std::string& spec_flag) const {
    fs::path p;
    if (!spec_flag.empty()) {
      p = spec_flag;
    } else if (config.spec) {
      p = *config.spec;
    } else {
      throw UsageError("--spec is required (or set spec in --config)");
    }
    return io::read_hinge_spec(p, material());
  }
};

void write_text(const fs::path& path, const std::string& text) { io::write_file_atomic(path, text); }

template <class F>
std::string render(F&& f) {
  std::ostringstream os;
  f(os);
  return os.str();
}

std::ifstream open_in(const fs::path& p) {
  std::ifstream f(p);
  if (!f) throw Error(ErrorKind::Io, fmt::format("cannot open '{}'", p.string()));
  return f;
}

SolverOptions solver_options(int stations, int fibers) {
  SolverOptions o;
  o.stations = stations;
  o.fibers = fibers;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nitiflex: nitinol living hinge modelling and laser process planning"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "Project file with default paths and laser setting")
      ->check(CLI::ExistingFile);

  Context ctx;
  std::function<void()> action;

  // ---- material ----
  auto* material = app.add_subcommand("material", "Constitutive law fitting");
  material->require_subcommand(1);
  std::string mf_csv, mf_out;
  double mf_eps_max = 0.06;
  auto* mfit = material->add_subcommand("fit", "Fit the bilinear law to stress-strain data");
  mfit->add_option("--csv", mf_csv, "CSV with strain,stress_pa")->required()->check(CLI::ExistingFile);
  mfit->add_option("--eps-max", mf_eps_max, "Strain limit recorded with the fit");
  mfit->add_option("--out", mf_out, "Write the fitted material file");
  mfit->callback([&] {
    action = [&] {
      auto f = open_in(mf_csv);
      const auto samples = io::read_stress_strain_csv(f);
      const auto fit = fit_bilinear(samples, mf_eps_max);
      fmt::print("E_gpa = {:.4f}\nEn_gpa = {:.4f}\neps_l = {:.6f}\nrms_mpa = {:.4f}\nn = {}\n",
                 fit.material.E / 1e9, fit.material.En / 1e9, fit.material.eps_l,
                 fit.residual_rms / 1e6, fit.n_samples);
      if (!mf_out.empty()) write_text(ctx.out(mf_out), io::format_material(fit.material, fit.residual_rms));
    };
  });

  // ---- hinge ----
  auto* hinge = app.add_subcommand("hinge", "Torque-angle prediction and sizing");
  hinge->require_subcommand(1);
  std::string h_spec;
  int h_stations = 201, h_fibers = 2000;
  auto solver_flags = [&](CLI::App* sub) {
    sub->add_option("--spec", h_spec, "Hinge specification file")->check(CLI::ExistingFile);
    sub->add_option("--stations", h_stations, "Stations along the hinge (numerical path)");
    sub->add_option("--fibers", h_fibers, "Fibers through the thickness (numerical path)");
  };

  double ht_theta = 0.0;
  auto* htorque = hinge->add_subcommand("torque", "Torque at one angle");
  solver_flags(htorque);
  htorque->add_option("--theta-deg", ht_theta, "Bend angle, degrees")->required();
  htorque->callback([&] {
    action = [&] {
      const auto h = ctx.hinge(h_spec);
      const auto r = hinge_response(h, ht_theta * kDeg, solver_options(h_stations, h_fibers));
      fmt::print("theta_deg = {}\ntorque_nm = {:.9e}\ntorque_num = {:.6f}\nenergy_j = {:.9e}\n"
                 "eps_peak = {:.6f}\nover_limit = {}\n",
                 ht_theta, r.torque, r.torque * 1e6, r.energy, r.eps_peak,
                 r.over_limit ? "yes" : "no");
    };
  });

  double hs_max = 40.0;
  int hs_n = 41;
  std::string hs_out, hs_plot;
  auto* hsweep = hinge->add_subcommand("sweep", "Torque curve from 0 to a maximum angle");
  solver_flags(hsweep);
  hsweep->add_option("--theta-max-deg", hs_max, "Largest angle, degrees");
  hsweep->add_option("--n", hs_n, "Number of samples including 0")->check(CLI::Range(2, 100000));
  hsweep->add_option("--out", hs_out, "Torque curve CSV")->required();
  hsweep->add_option("--plot", hs_plot, "Also write <stem>.svg and <stem>.csv");
  hsweep->callback([&] {
    action = [&] {
      const auto h = ctx.hinge(h_spec);
      const auto curve = torque_curve(h, hs_max * kDeg, hs_n, solver_options(h_stations, h_fibers));
      write_text(ctx.out(hs_out), render([&](std::ostream& os) { io::write_torque_curve_csv(os, curve); }));
      std::size_t over = 0;
      for (const auto& s : curve.samples) over += s.over_limit ? 1 : 0;
      const auto& last = curve.samples.back();
      fmt::print("samples = {}\ntorque_max_num = {:.6f}\neps_peak_max = {:.6f}\nover_limit_samples = {}\n",
                 curve.samples.size(), last.torque * 1e6, last.eps_peak, over);
      if (!hs_plot.empty()) {
        const std::vector<bench::PlotSeries> s{bench::series_from("model", curve)};
        bench::emit_plot(s, ctx.out(hs_plot), "torque-angle");
      }
    };
  });

  double hl_eps = -1.0;
  std::optional<double> hl_theta;
  auto* hlimit = hinge->add_subcommand("limit", "Elastic-range angle and thickness sizing");
  solver_flags(hlimit);
  hlimit->add_option("--eps", hl_eps, "Strain limit (default: material eps_max)");
  hlimit->add_option("--theta-deg", hl_theta, "Target angle for thickness sizing, degrees");
  hlimit->callback([&] {
    action = [&] {
      const auto h = ctx.hinge(h_spec);
      const double eps = hl_eps > 0.0 ? hl_eps : h.material.eps_max;
      const double lim = elastic_limit(h, eps, solver_options(h_stations, h_fibers));
      fmt::print("eps_limit = {:.6f}\nelastic_limit_deg = {:.4f}\n", eps, lim / kDeg);
      if (hl_theta) {
        const double t = max_thickness_for(*hl_theta * kDeg, h.profile.length(), eps);
        fmt::print("length_um = {:.4f}\nmax_thickness_um = {:.4f}\n", h.profile.length() * 1e6, t * 1e6);
      }
    };
  });

  // ---- laser ----
  auto* laser = app.add_subcommand("laser", "Etch-rate calibration");
  laser->require_subcommand(1);
  std::string lf_csv, lf_out;
  std::optional<double> lf_target, lf_pulse;
  double lf_spot = 8.0;
  auto* lfit = laser->add_subcommand("fit", "Fit etch rates and optionally pick a setting");
  lfit->add_option("--csv", lf_csv, "CSV with rep_rate_khz,passes,depth_um")->required()->check(CLI::ExistingFile);
  lfit->add_option("--out", lf_out, "Fit report CSV");
  lfit->add_option("--target-um", lf_target, "Depth per layer to select a setting for");
  lfit->add_option("--pulse-energy-uj", lf_pulse, "Pulse energy at the selected rate, uJ");
  lfit->add_option("--spot-um", lf_spot, "Spot diameter, um");
  lfit->callback([&] {
    action = [&] {
      auto f = open_in(lf_csv);
      const auto fits = lasercal::fit_etch_rates(io::read_etch_csv(f));
      for (const auto& x : fits) {
        fmt::print("{} kHz: rate {:.3f} um/pass (CI95 +-{:.3f}), intercept {:.3f} um, r2 {:.4f}, n {}{}\n",
                   x.rep_rate_khz, x.rate_um_per_pass, x.rate_ci95, x.intercept_um, x.r2, x.n,
                   x.accepted() ? "" : " [rejected]");
      }
      if (!lf_out.empty()) {
        write_text(ctx.out(lf_out), render([&](std::ostream& os) { io::write_fit_csv(os, fits); }));
      }
      if (lf_target) {
        lasercal::PulseEnergyFn pe;
        if (lf_pulse) pe = [&](double) { return lf_pulse; };
        const auto s = lasercal::select_setting(fits, *lf_target, pe, lf_spot);
        fmt::print("selected: {} kHz x {} passes = {:.3f} um/layer", s.rep_rate_khz,
                   s.passes_per_layer, s.depth_per_layer_um);
        if (s.fluence_j_cm2) fmt::print(", fluence {:.3f} J/cm^2", *s.fluence_j_cm2);
        fmt::print("\n");
      }
    };
  });

  std::vector<double> lg_rates{150, 175, 200, 225, 250};
  int lg_first = 1, lg_last = 14;
  double lg_side = 200.0, lg_pitch = 5.0, lg_gap = 100.0;
  std::string lg_out, lg_dxf;
  auto* lgrid = laser->add_subcommand("grid", "Characterization array toolpath");
  lgrid->add_option("--rates", lg_rates, "Repetition rates, kHz")->delimiter(',');
  lgrid->add_option("--passes-first", lg_first, "Smallest pass count");
  lgrid->add_option("--passes-last", lg_last, "Largest pass count");
  lgrid->add_option("--side-um", lg_side, "Square side, um");
  lgrid->add_option("--pitch-um", lg_pitch, "Raster line spacing, um");
  lgrid->add_option("--gap-um", lg_gap, "Gap between squares, um");
  lgrid->add_option("--out", lg_out, "Toolpath file")->required();
  lgrid->add_option("--dxf", lg_dxf, "Also write DXF");
  lgrid->callback([&] {
    action = [&] {
      const auto g = lasercal::calibration_grid(lg_rates, lg_first, lg_last, lg_side, lg_pitch, lg_gap);
      write_text(ctx.out(lg_out), render([&](std::ostream& os) { write_toolpath(os, g.toolpath); }));
      if (!lg_dxf.empty()) {
        write_text(ctx.out(lg_dxf), render([&](std::ostream& os) { write_dxf(os, g.toolpath); }));
      }
      fmt::print("cells = {}\nlines_per_cell = {}\npath_length_mm = {:.4f}\n", g.cells.size(),
                 g.cells.front().raster_lines, g.toolpath.total_length());
    };
  });

  // ---- plan ----
  auto* plan = app.add_subcommand("plan", "Depth maps, slicing and toolpaths");
  plan->require_subcommand(1);

  std::string pd_spec, pd_out, pd_bottom, pd_sides = "one";
  std::optional<double> pd_pitch;
  std::size_t pd_margin = 0;
  auto* pdepth = plan->add_subcommand("depthmap", "Target depth map from a hinge spec");
  pdepth->add_option("--spec", pd_spec, "Hinge specification file")->check(CLI::ExistingFile);
  pdepth->add_option("--pitch-um", pd_pitch, "Grid pitch, um");
  pdepth->add_option("--sides", pd_sides, "one or both")->check(CLI::IsMember({"one", "both"}));
  pdepth->add_option("--margin", pd_margin, "Uncut columns at each end");
  pdepth->add_option("--out", pd_out, "Depth map (top side)")->required();
  pdepth->add_option("--bottom-out", pd_bottom, "Depth map for the bottom side (both-sided cuts)");
  pdepth->callback([&] {
    action = [&] {
      const auto h = ctx.hinge(pd_spec);
      const double pitch = pd_pitch.value_or(ctx.config.pitch_um.value_or(5.0));
      const auto sides = pd_sides == "both" ? CutSides::Both : CutSides::One;
      const auto maps = planner::profile_to_depthmap(h, pitch, sides, pd_margin);
      write_text(ctx.out(pd_out), render([&](std::ostream& os) { planner::write_depthmap(os, maps.top); }));
      if (maps.bottom && !pd_bottom.empty()) {
        write_text(ctx.out(pd_bottom),
                   render([&](std::ostream& os) { planner::write_depthmap(os, *maps.bottom); }));
      }
      fmt::print("grid = {}x{}\npitch_um = {}\nmax_depth_um = {:.4f}\n", maps.top.nx, maps.top.ny,
                 pitch, maps.top.max_depth());
    };
  });

  std::string ps_dm, ps_out;
  std::optional<double> ps_dpl, ps_rate;
  std::optional<int> ps_passes;
  auto* pslice = plan->add_subcommand("slice", "Slice a depth map into nested layers");
  pslice->add_option("--depthmap", ps_dm, "Depth map file")->required()->check(CLI::ExistingFile);
  pslice->add_option("--depth-per-layer", ps_dpl, "Depth removed per layer, um");
  pslice->add_option("--passes", ps_passes, "Passes per layer");
  pslice->add_option("--rate-khz", ps_rate, "Repetition rate, kHz");
  pslice->add_option("--out", ps_out, "Layer plan file");
  pslice->callback([&] {
    action = [&] {
      lasercal::AblationSetting s = ctx.config.setting.value_or(lasercal::AblationSetting{0.0, {}, 1, 0.0});
      if (ps_dpl) s.depth_per_layer_um = *ps_dpl;
      if (ps_passes) s.passes_per_layer = *ps_passes;
      if (ps_rate) s.rep_rate_khz = *ps_rate;
      if (!(s.depth_per_layer_um > 0.0)) {
        throw UsageError("--depth-per-layer is required (or set the laser setting in --config)");
      }
      auto f = open_in(ps_dm);
      const auto dm = planner::read_depthmap(f);
      const auto p = planner::slice(dm, s);
      const auto r = planner::verify_plan(p, dm);
      fmt::print("layers = {}\nmax_depth_um = {:.4f}\nmax_error_um = {:.4f}\n", p.layers.size(),
                 dm.max_depth(), r.max_abs_error_um);
      if (!ps_out.empty()) write_text(ctx.out(ps_out), render([&](std::ostream& os) { planner::write_plan(os, p); }));
    };
  });

  std::string pr_plan, pr_out, pr_dxf;
  int pr_angle = 0;
  bool pr_no_serp = false;
  auto* praster = plan->add_subcommand("raster", "Rasterize a layer plan into a toolpath");
  praster->add_option("--plan", pr_plan, "Layer plan file")->required()->check(CLI::ExistingFile);
  praster->add_option("--angle", pr_angle, "Scan angle, 0 or 90")->check(CLI::IsMember({0, 90}));
  praster->add_flag("--no-serpentine", pr_no_serp, "Scan every line in the same direction");
  praster->add_option("--out", pr_out, "Toolpath file")->required();
  praster->add_option("--dxf", pr_dxf, "Also write DXF");
  praster->callback([&] {
    action = [&] {
      auto f = open_in(pr_plan);
      const auto p = planner::read_plan(f);
      const auto tp = planner::plan_toolpath(p, pr_angle == 90 ? planner::ScanAngle::Deg90
                                                               : planner::ScanAngle::Deg0,
                                             !pr_no_serp);
      write_text(ctx.out(pr_out), render([&](std::ostream& os) { write_toolpath(os, tp); }));
      if (!pr_dxf.empty()) write_text(ctx.out(pr_dxf), render([&](std::ostream& os) { write_dxf(os, tp); }));
      fmt::print("layers = {}\npolylines = {}\npath_length_mm = {:.4f}\n", p.layers.size(),
                 tp.polylines.size(), tp.total_length());
    };
  });

  std::string pv_plan, pv_dm;
  std::optional<double> pv_tol;
  auto* pverify = plan->add_subcommand("verify", "Compare a plan's reconstruction with its target");
  pverify->add_option("--plan", pv_plan, "Layer plan file")->required()->check(CLI::ExistingFile);
  pverify->add_option("--depthmap", pv_dm, "Target depth map")->required()->check(CLI::ExistingFile);
  pverify->add_option("--tol-um", pv_tol, "Tolerance (default half a layer)");
  pverify->callback([&] {
    action = [&] {
      auto fp = open_in(pv_plan);
      auto fd = open_in(pv_dm);
      const auto r = planner::verify_plan(planner::read_plan(fp), planner::read_depthmap(fd), pv_tol);
      fmt::print("max_error_um = {:.4f}\nrms_error_um = {:.4f}\ntolerance_um = {:.4f}\n"
                 "fraction_within = {:.4f}\nwithin_quantization_bound = {}\n",
                 r.max_abs_error_um, r.rms_error_um, r.tolerance_um, r.fraction_within,
                 r.within_quantization_bound ? "yes" : "no");
    };
  });

  std::string pt_design, pt_meas, pt_out;
  double pt_band = 5.0;
  std::optional<std::size_t> pt_row;
  auto* ptol = plan->add_subcommand("tolerance", "Measured surface against the designed cut");
  ptol->add_option("--designed", pt_design, "Designed depth map")->required()->check(CLI::ExistingFile);
  ptol->add_option("--measured", pt_meas, "Measured depth map")->required()->check(CLI::ExistingFile);
  ptol->add_option("--band-um", pt_band, "Tolerance band, um");
  ptol->add_option("--row", pt_row, "Section row (default: middle)");
  ptol->add_option("--out", pt_out, "Section deviation CSV");
  ptol->callback([&] {
    action = [&] {
      auto fd = open_in(pt_design);
      auto fm = open_in(pt_meas);
      const auto d = planner::read_depthmap(fd);
      const auto r = planner::tolerance_report(d, planner::read_depthmap(fm), pt_band, pt_row);
      fmt::print("band_um = {}\nfraction_within = {:.4f}\nmax_deviation_um = {:.4f}\n"
                 "max_cut_depth_um = {:.4f}\nmax_deviation_pct_of_depth = {:.2f}\n"
                 "fraction_within_10pct_of_depth = {:.4f}\nnote = no spot-size compensation of mask edges\n",
                 r.band_um, r.fraction_within, r.max_deviation_um, r.max_cut_depth_um,
                 r.max_deviation_pct_of_depth, r.fraction_within_10pct_of_depth);
      if (!pt_out.empty()) {
        std::string csv = "x_um,deviation_um\n";
        for (std::size_t i = 0; i < r.section_deviation_um.size(); ++i) {
          csv += fmt::format("{},{}\n", static_cast<double>(i) * d.pitch_um, r.section_deviation_um[i]);
        }
        write_text(ctx.out(pt_out), csv);
      }
    };
  });

  // ---- bench ----
  auto* benchc = app.add_subcommand("bench", "Torque trial processing");
  benchc->require_subcommand(1);
  std::string ba_dir, ba_out, ba_plot;
  double ba_step = 0.5;
  int ba_order = 101;
  std::optional<double> ba_arm;
  auto* bagg = benchc->add_subcommand("aggregate", "Filter and average a directory of trials");
  bagg->add_option("--dir", ba_dir, "Directory of trial CSVs")->required()->check(CLI::ExistingDirectory);
  bagg->add_option("--step-deg", ba_step, "Grid step, degrees");
  bagg->add_option("--order", ba_order, "Median filter window (odd)");
  bagg->add_option("--arm-m", ba_arm, "Moment arm for force_n columns, m");
  bagg->add_option("--out", ba_out, "Aggregate CSV")->required();
  bagg->add_option("--plot", ba_plot, "Also write <stem>.svg and <stem>.csv");
  bagg->callback([&] {
    action = [&] {
      const auto trials = bench::read_trial_dir(ba_dir, ba_arm);
      const auto agg = bench::aggregate(trials, ba_step * kDeg, ba_order);
      write_text(ctx.out(ba_out), render([&](std::ostream& os) { bench::write_aggregate_csv(os, agg); }));
      double max_std = 0.0;
      for (double s : agg.std) max_std = std::max(max_std, s);
      fmt::print("trials = {}\ngrid_points = {}\ntheta_range_deg = {:.4f}..{:.4f}\nmax_std_num = {:.6f}\n",
                 agg.n_trials, agg.grid.size(), agg.grid.front() / kDeg, agg.grid.back() / kDeg,
                 max_std * 1e6);
      if (!ba_plot.empty()) {
        const std::vector<bench::PlotSeries> s{bench::series_from(fs::path(ba_dir).filename().string(), agg)};
        bench::emit_plot(s, ctx.out(ba_plot), "aggregate");
      }
    };
  });

  std::string bc_model, bc_exp, bc_out, bc_plot;
  auto* bcmp = benchc->add_subcommand("compare", "Score a model curve against an aggregate");
  bcmp->add_option("--model", bc_model, "Torque curve CSV")->required()->check(CLI::ExistingFile);
  bcmp->add_option("--experiment", bc_exp, "Aggregate CSV")->required()->check(CLI::ExistingFile);
  bcmp->add_option("--out", bc_out, "Report CSV");
  bcmp->add_option("--plot", bc_plot, "Also write <stem>.svg and <stem>.csv");
  bcmp->callback([&] {
    action = [&] {
      auto fm = open_in(bc_model);
      auto fe = open_in(bc_exp);
      const auto model = io::read_torque_curve_csv(fm);
      const auto agg = bench::read_aggregate_csv(fe);
      const auto r = bench::compare(model, agg);
      fmt::print("points = {}\nrmse_num = {:.6f}\nmax_abs_error_num = {:.6f}\nnrmse_pct = {:.3f}\n"
                 "fraction_in_band = {:.4f}\n",
                 r.n_points, r.rmse * 1e6, r.max_abs_error * 1e6, r.nrmse_pct, r.fraction_in_band);
      if (!bc_out.empty()) write_text(ctx.out(bc_out), render([&](std::ostream& os) { bench::write_compare_csv(os, r); }));
      if (!bc_plot.empty()) {
        const std::vector<bench::PlotSeries> s{bench::series_from("model", model),
                                               bench::series_from("experiment", agg)};
        bench::emit_plot(s, ctx.out(bc_plot), "model vs experiment");
      }
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n\n";
    const CLI::App* sub = &app;
    while (true) {
      const auto subs = sub->get_subcommands();
      if (subs.empty()) break;
      sub = subs.front();
    }
    std::cerr << sub->help();
    return 2;
  }

  try {
    if (!config_path.empty()) ctx.config = ProjectConfig::load(config_path);
    if (action) action();
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.kind_name() << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
