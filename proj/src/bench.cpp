#include "nitiflex/bench.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "nitiflex/error.hpp"
#include "nitiflex/io.hpp"

namespace nitiflex::bench {

namespace {

constexpr double kDeg = 180.0 / std::numbers::pi;
constexpr double kNum = 1e6;  // N m -> N um

// x must lie within [xs.front(), xs.back()]; xs nondecreasing.
double interp(std::span<const double> xs, std::span<const double> ys, double x) {
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  if (it == xs.begin()) return ys.front();
  if (it == xs.end()) return ys.back();
  const auto j = static_cast<std::size_t>(it - xs.begin());
  const double x0 = xs[j - 1], x1 = xs[j];
  return ys[j - 1] + (ys[j] - ys[j - 1]) * (x - x0) / (x1 - x0);
}

}  // namespace

std::vector<double> median_filter(std::span<const double> series, int order) {
  if (order < 1 || order % 2 == 0) {
    throw Error(ErrorKind::Domain, fmt::format("median_filter: order must be odd and >= 1 (got {})", order));
  }
  if (series.empty()) throw Error(ErrorKind::Domain, "median_filter: empty series");
  const std::size_t n = series.size();
  const auto half = static_cast<std::size_t>(order / 2);
  std::vector<double> out(n);
  std::vector<double> window;
  window.reserve(static_cast<std::size_t>(order));
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t h = std::min({half, i, n - 1 - i});
    window.assign(series.begin() + static_cast<std::ptrdiff_t>(i - h),
                  series.begin() + static_cast<std::ptrdiff_t>(i + h + 1));
    auto mid = window.begin() + static_cast<std::ptrdiff_t>(h);
    std::nth_element(window.begin(), mid, window.end());
    out[i] = *mid;
  }
  return out;
}

AggregateCurve aggregate(std::span<const TorqueTrial> trials, double grid_step, int order) {
  if (trials.size() < 2) {
    throw Error(ErrorKind::InsufficientData, "aggregate: need at least 2 trials");
  }
  if (!(grid_step > 0.0)) throw Error(ErrorKind::Domain, "aggregate: grid step must be positive");

  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> thetas, torques;
  for (const auto& t : trials) {
    if (t.points.empty()) throw Error(ErrorKind::Domain, "aggregate: empty trial");
    std::vector<double> th, tq;
    for (const auto& p : t.points) {
      if (!th.empty() && p.theta < th.back()) {
        throw Error(ErrorKind::Domain,
                    fmt::format("aggregate: trial {} of '{}' has decreasing theta", t.trial_index,
                                t.hinge_id));
      }
      th.push_back(p.theta);
      tq.push_back(p.torque);
    }
    lo = std::max(lo, th.front());
    hi = std::min(hi, th.back());
    torques.push_back(median_filter(tq, order));
    thetas.push_back(std::move(th));
  }
  if (!(lo <= hi)) {
    throw Error(ErrorKind::EmptyOverlap,
                fmt::format("aggregate: trial angle ranges do not overlap ([{}, {}])", lo, hi));
  }

  AggregateCurve agg;
  agg.n_trials = trials.size();
  const double slack = 1e-12 * std::max(std::abs(hi), 1.0);
  for (std::size_t k = 0;; ++k) {
    const double x = lo + static_cast<double>(k) * grid_step;
    if (x > hi + slack) break;
    agg.grid.push_back(std::min(x, hi));
  }
  const auto n = static_cast<double>(trials.size());
  std::vector<double> vals(trials.size());
  for (double x : agg.grid) {
    // Sums are taken about the first trial's value, so identical trials give
    // exactly that value and a zero spread.
    for (std::size_t i = 0; i < trials.size(); ++i) vals[i] = interp(thetas[i], torques[i], x);
    const double ref = vals[0];
    double shift = 0.0;
    for (double v : vals) shift += v - ref;
    shift /= n;
    double ss = 0.0;
    for (double v : vals) ss += (v - ref - shift) * (v - ref - shift);
    agg.mean.push_back(ref + shift);
    agg.std.push_back(std::sqrt(ss / (n - 1.0)));
  }
  return agg;
}

CompareReport compare(const TorqueCurve& model, const AggregateCurve& experiment) {
  if (model.samples.size() < 2 || experiment.grid.empty()) {
    throw Error(ErrorKind::Domain, "compare: model and experiment must be nonempty");
  }
  std::vector<double> mt, mm;
  for (const auto& s : model.samples) {
    mt.push_back(s.theta);
    mm.push_back(s.torque);
  }
  double peak = 0.0;
  for (double m : experiment.mean) peak = std::max(peak, std::abs(m));
  const double slack = 1e-12 * peak;

  CompareReport r;
  double sq = 0.0;
  std::size_t in_band = 0;
  for (std::size_t i = 0; i < experiment.grid.size(); ++i) {
    const double x = experiment.grid[i];
    if (x < mt.front() || x > mt.back()) continue;
    const double d = interp(mt, mm, x) - experiment.mean[i];
    sq += d * d;
    r.max_abs_error = std::max(r.max_abs_error, std::abs(d));
    const double band = 2.0 * (i < experiment.std.size() ? experiment.std[i] : 0.0);
    if (std::abs(d) <= band * (1.0 + 1e-12) + slack) ++in_band;
    ++r.n_points;
  }
  if (r.n_points == 0) {
    throw Error(ErrorKind::Domain, "compare: model does not cover any experimental grid point");
  }
  r.rmse = std::sqrt(sq / static_cast<double>(r.n_points));
  r.nrmse_pct = peak > 0.0 ? 100.0 * r.rmse / peak : 0.0;
  r.fraction_in_band = static_cast<double>(in_band) / static_cast<double>(r.n_points);
  return r;
}

PlotSeries series_from(const std::string& label, const TorqueCurve& curve) {
  PlotSeries s{label, {}, {}, {}};
  for (const auto& p : curve.samples) {
    s.theta.push_back(p.theta);
    s.torque.push_back(p.torque);
  }
  return s;
}

PlotSeries series_from(const std::string& label, const AggregateCurve& agg) {
  return PlotSeries{label, agg.grid, agg.mean, agg.std};
}

std::vector<std::filesystem::path> emit_plot(std::span<const PlotSeries> series,
                                             const std::filesystem::path& stem,
                                             const std::string& title) {
  if (series.empty()) throw Error(ErrorKind::Domain, "emit_plot: no series");
  double xmax = 0.0, ymin = 0.0, ymax = 0.0;
  for (const auto& s : series) {
    if (s.theta.size() != s.torque.size() || (!s.std.empty() && s.std.size() != s.theta.size())) {
      throw Error(ErrorKind::Dimension, fmt::format("emit_plot: series '{}' has ragged columns", s.label));
    }
    for (std::size_t i = 0; i < s.theta.size(); ++i) {
      const double sd = s.std.empty() ? 0.0 : s.std[i];
      xmax = std::max(xmax, s.theta[i] * kDeg);
      ymax = std::max(ymax, (s.torque[i] + sd) * kNum);
      ymin = std::min(ymin, (s.torque[i] - sd) * kNum);
    }
  }
  if (xmax <= 0.0) xmax = 1.0;
  if (ymax <= ymin) ymax = ymin + 1.0;

  constexpr double W = 640, H = 420, ml = 60, mr = 150, mt = 30, mb = 50;
  const double pw = W - ml - mr, ph = H - mt - mb;
  auto px = [&](double deg) { return ml + pw * deg / xmax; };
  auto py = [&](double num) { return mt + ph * (1.0 - (num - ymin) / (ymax - ymin)); };
  static constexpr const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                           "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

  std::ostringstream svg;
  fmt::print(svg,
             "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" "
             "viewBox=\"0 0 {} {}\">\n",
             W, H, W, H);
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty()) {
    fmt::print(svg, "<text x=\"{}\" y=\"18\" font-size=\"14\" text-anchor=\"middle\">{}</text>\n",
               ml + pw / 2, title);
  }
  fmt::print(svg,
             "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n"
             "<line x1=\"{0}\" y1=\"{3}\" x2=\"{0}\" y2=\"{1}\" stroke=\"black\"/>\n",
             ml, mt + ph, ml + pw, mt);
  for (int k = 0; k <= 4; ++k) {
    const double xd = xmax * k / 4, yv = ymin + (ymax - ymin) * k / 4;
    fmt::print(svg, "<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"10\" text-anchor=\"middle\">{:.3g}</text>\n",
               px(xd), mt + ph + 14, xd);
    fmt::print(svg, "<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"10\" text-anchor=\"end\">{:.3g}</text>\n",
               ml - 4, py(yv) + 3, yv);
  }
  fmt::print(svg, "<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"12\" text-anchor=\"middle\">Angle (deg)</text>\n",
             ml + pw / 2, H - 12);
  fmt::print(svg,
             "<text x=\"14\" y=\"{:.2f}\" font-size=\"12\" text-anchor=\"middle\" "
             "transform=\"rotate(-90 14 {:.2f})\">Torque (N-um)</text>\n",
             mt + ph / 2, mt + ph / 2);

  std::ostringstream csv;
  csv << "series,theta_deg,torque_num,std_num\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = colors[k % std::size(colors)];
    if (!s.std.empty()) {
      svg << "<polygon class=\"band\" fill=\"" << color << "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
      for (std::size_t i = 0; i < s.theta.size(); ++i) {
        fmt::print(svg, "{:.2f},{:.2f} ", px(s.theta[i] * kDeg), py((s.torque[i] + s.std[i]) * kNum));
      }
      for (std::size_t i = s.theta.size(); i-- > 0;) {
        fmt::print(svg, "{:.2f},{:.2f} ", px(s.theta[i] * kDeg), py((s.torque[i] - s.std[i]) * kNum));
      }
      svg << "\"/>\n";
    }
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.theta.size(); ++i) {
      fmt::print(svg, "{:.2f},{:.2f} ", px(s.theta[i] * kDeg), py(s.torque[i] * kNum));
      fmt::print(csv, "{},{},{},{}\n", s.label, s.theta[i] * kDeg, s.torque[i] * kNum,
                 s.std.empty() ? 0.0 : s.std[i] * kNum);
    }
    svg << "\"/>\n";
    fmt::print(svg, "<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"11\" fill=\"{}\">{}</text>\n",
               ml + pw + 8, mt + 14.0 * static_cast<double>(k + 1), color, s.label);
  }
  svg << "</svg>\n";

  auto svg_path = stem;
  svg_path += ".svg";
  auto csv_path = stem;
  csv_path += ".csv";
  io::write_file_atomic(svg_path, svg.str());
  io::write_file_atomic(csv_path, csv.str());
  return {svg_path, csv_path};
}

TorqueTrial read_trial_csv(const std::filesystem::path& path, std::optional<double> arm_m) {
  const io::CsvTable t = io::read_csv_file(path);
  const auto ct = t.column("theta_rad");
  std::size_t cv;
  double scale = 1.0;
  if (t.has_column("torque_nm")) {
    cv = t.column("torque_nm");
  } else if (t.has_column("force_n")) {
    if (!arm_m) {
      throw Error(ErrorKind::Domain,
                  fmt::format("'{}' records force; a moment arm is required", path.string()));
    }
    cv = t.column("force_n");
    scale = *arm_m;
  } else {
    throw Error(ErrorKind::Parse,
                fmt::format("'{}': expected a torque_nm or force_n column", path.string()));
  }
  TorqueTrial trial;
  trial.hinge_id = path.parent_path().filename().string();
  for (const auto& r : t.rows) trial.points.push_back({r[ct], r[cv] * scale});
  return trial;
}

std::vector<TorqueTrial> read_trial_dir(const std::filesystem::path& dir,
                                        std::optional<double> arm_m) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorKind::Io, fmt::format("'{}' is not a directory", dir.string()));
  }
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<TorqueTrial> trials;
  for (std::size_t i = 0; i < files.size(); ++i) {
    auto t = read_trial_csv(files[i], arm_m);
    t.trial_index = static_cast<int>(i);
    trials.push_back(std::move(t));
  }
  return trials;
}

void write_aggregate_csv(std::ostream& os, const AggregateCurve& agg) {
  os << "theta_rad,mean_nm,std_nm,n_trials\n";
  for (std::size_t i = 0; i < agg.grid.size(); ++i) {
    fmt::print(os, "{},{},{},{}\n", agg.grid[i], agg.mean[i], agg.std[i], agg.n_trials);
  }
}

AggregateCurve read_aggregate_csv(std::istream& is) {
  const io::CsvTable t = io::read_csv(is, "aggregate csv");
  const auto ct = t.column("theta_rad");
  const auto cm = t.column("mean_nm");
  const auto cs = t.column("std_nm");
  AggregateCurve agg;
  for (const auto& r : t.rows) {
    agg.grid.push_back(r[ct]);
    agg.mean.push_back(r[cm]);
    agg.std.push_back(r[cs]);
    if (t.has_column("n_trials")) agg.n_trials = static_cast<std::size_t>(r[t.column("n_trials")]);
  }
  return agg;
}

void write_compare_csv(std::ostream& os, const CompareReport& r) {
  os << "rmse_nm,max_abs_error_nm,nrmse_pct,fraction_in_band,n_points\n";
  fmt::print(os, "{},{},{},{},{}\n", r.rmse, r.max_abs_error, r.nrmse_pct, r.fraction_in_band,
             r.n_points);
}

}  // namespace nitiflex::bench
