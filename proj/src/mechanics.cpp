#include "nitiflex/mechanics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nitiflex/error.hpp"
#include "nitiflex/fiber_kernels.hpp"

namespace nitiflex {

namespace {

void require(bool cond, ErrorKind kind, const std::string& msg) {
  if (!cond) throw Error(kind, msg);
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

// ---- ThicknessProfile ------------------------------------------------------

ThicknessProfile ThicknessProfile::rectangular(double length, double thickness) {
  require(finite_positive(length) && finite_positive(thickness), ErrorKind::Domain,
          "rectangular profile: length and thickness must be positive");
  ThicknessProfile p;
  p.kind_ = Kind::Rectangular;
  p.length_ = length;
  p.t_ = thickness;
  return p;
}

ThicknessProfile ThicknessProfile::arc(double length, double t_min, double radius, CutSides sides) {
  require(finite_positive(length) && finite_positive(t_min) && finite_positive(radius),
          ErrorKind::Domain, "arc profile: length, t_min and radius must be positive");
  require(length <= 2.0 * radius, ErrorKind::Domain,
          "arc profile: the arc must span the hinge (L <= 2R)");
  ThicknessProfile p;
  p.kind_ = Kind::Arc;
  p.length_ = length;
  p.t_ = t_min;
  p.radius_ = radius;
  p.sides_ = sides;
  return p;
}

ThicknessProfile ThicknessProfile::sampled(std::vector<std::pair<double, double>> points) {
  require(points.size() >= 2, ErrorKind::Domain, "sampled profile: need at least 2 points");
  require(points.front().first == 0.0, ErrorKind::Domain, "sampled profile: first s must be 0");
  for (std::size_t i = 0; i < points.size(); ++i) {
    require(finite_positive(points[i].second), ErrorKind::Domain,
            "sampled profile: thickness must be positive");
    if (i > 0) {
      require(points[i].first > points[i - 1].first, ErrorKind::Domain,
              "sampled profile: s must be strictly increasing");
    }
  }
  ThicknessProfile p;
  p.kind_ = Kind::Sampled;
  p.length_ = points.back().first;
  p.samples_ = std::move(points);
  return p;
}

double ThicknessProfile::thickness_at(double s) const {
  switch (kind_) {
    case Kind::Rectangular:
      return t_;
    case Kind::Arc: {
      const double d = std::clamp(s, 0.0, length_) - 0.5 * length_;
      const double sag = radius_ - std::sqrt(std::max(radius_ * radius_ - d * d, 0.0));
      return t_ + (sides_ == CutSides::Both ? 2.0 : 1.0) * sag;
    }
    case Kind::Sampled: {
      const double x = std::clamp(s, 0.0, length_);
      auto it = std::upper_bound(samples_.begin(), samples_.end(), x,
                                 [](double v, const auto& p) { return v < p.first; });
      if (it == samples_.end()) return samples_.back().second;
      if (it == samples_.begin()) return samples_.front().second;
      const auto& [s1, t1] = *it;
      const auto& [s0, t0] = *(it - 1);
      return t0 + (t1 - t0) * (x - s0) / (s1 - s0);
    }
  }
  return t_;
}

double ThicknessProfile::min_thickness() const {
  switch (kind_) {
    case Kind::Rectangular:
    case Kind::Arc:
      return t_;
    case Kind::Sampled: {
      double m = samples_.front().second;
      for (const auto& p : samples_) m = std::min(m, p.second);
      return m;
    }
  }
  return t_;
}

double ThicknessProfile::max_thickness() const {
  switch (kind_) {
    case Kind::Rectangular:
      return t_;
    case Kind::Arc:
      return thickness_at(0.0);
    case Kind::Sampled: {
      double m = samples_.front().second;
      for (const auto& p : samples_) m = std::max(m, p.second);
      return m;
    }
  }
  return t_;
}

void HingeSpec::validate() const {
  material.validate();
  require(finite_positive(width), ErrorKind::Domain, "hinge: width must be positive");
  require(finite_positive(sheet_t), ErrorKind::Domain, "hinge: sheet thickness must be positive");
  if (profile.max_thickness() > sheet_t * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "hinge: profile thickness " << profile.max_thickness() << " m exceeds sheet thickness "
        << sheet_t << " m";
    throw Error(ErrorKind::InfeasibleProfile, msg.str());
  }
}

// ---- closed-form rectangle --------------------------------------------------

double section_moment(const BilinearMaterial& mat, double t, double w, double kappa) {
  require(t >= 0.0 && w >= 0.0 && std::isfinite(t) && std::isfinite(w), ErrorKind::Domain,
          "section_moment: negative geometry");
  require(std::isfinite(kappa), ErrorKind::Domain, "section_moment: non-finite curvature");
  const double k = std::abs(kappa);
  const double c = 0.5 * t;
  double m;
  if (k * c <= mat.eps_l) {
    m = mat.E * (w * t * t * t / 12.0) * k;
  } else {
    const double yl = mat.eps_l / k;
    m = 2.0 * w *
        (mat.E * k * yl * yl * yl / 3.0 + (mat.E - mat.En) * mat.eps_l * (c * c - yl * yl) / 2.0 +
         mat.En * k * (c * c * c - yl * yl * yl) / 3.0);
  }
  return std::copysign(m, kappa);
}

double section_energy(const BilinearMaterial& mat, double t, double w, double kappa) {
  require(t >= 0.0 && w >= 0.0 && std::isfinite(t) && std::isfinite(w), ErrorKind::Domain,
          "section_energy: negative geometry");
  const double k = std::abs(kappa);
  const double c = 0.5 * t;
  if (k * c <= mat.eps_l) {
    return 0.5 * mat.E * (w * t * t * t / 12.0) * k * k;
  }
  const double yl = mat.eps_l / k;
  const double z = k * c - mat.eps_l;
  const double el = mat.eps_l;
  return 2.0 * w *
         (mat.E * k * k * yl * yl * yl / 6.0 +
          (0.5 * mat.E * el * el * z + 0.5 * mat.E * el * z * z + mat.En * z * z * z / 6.0) / k);
}

// ---- arbitrary sections ------------------------------------------------------

WidthProfile::WidthProfile(std::vector<std::pair<double, double>> breakpoints)
    : points_(std::move(breakpoints)) {
  require(points_.size() >= 2, ErrorKind::Domain, "width profile: need at least 2 breakpoints");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    require(std::isfinite(points_[i].first) && std::isfinite(points_[i].second) &&
                points_[i].second >= 0.0,
            ErrorKind::Domain, "width profile: widths must be finite and nonnegative");
    if (i > 0) {
      require(points_[i].first >= points_[i - 1].first, ErrorKind::Domain,
              "width profile: heights must be nondecreasing");
    }
  }
  require(points_.back().first > points_.front().first, ErrorKind::Domain,
          "width profile: zero depth");
}

WidthProfile WidthProfile::rectangle(double t, double w) {
  return WidthProfile({{-0.5 * t, w}, {0.5 * t, w}});
}

double WidthProfile::width_at(double y) const {
  if (y <= points_.front().first) return points_.front().second;
  if (y >= points_.back().first) return points_.back().second;
  // Last breakpoint with height <= y, so a step takes the upper piece.
  auto it = std::upper_bound(points_.begin(), points_.end(), y,
                             [](double v, const auto& p) { return v < p.first; });
  const auto& [y1, w1] = *it;
  const auto& [y0, w0] = *(it - 1);
  if (y1 == y0) return w1;
  return w0 + (w1 - w0) * (y - y0) / (y1 - y0);
}

FiberSection FiberSection::discretize(const WidthProfile& profile, int n_fibers) {
  require(n_fibers >= 1, ErrorKind::Domain, "fiber section: need at least one fiber");
  FiberSection f;
  f.bottom = profile.bottom();
  f.top = profile.top();
  const double h = (f.top - f.bottom) / n_fibers;
  f.y.resize(static_cast<std::size_t>(n_fibers));
  f.area.resize(static_cast<std::size_t>(n_fibers));
  for (int i = 0; i < n_fibers; ++i) {
    const double y = f.bottom + (i + 0.5) * h;
    f.y[static_cast<std::size_t>(i)] = y;
    f.area[static_cast<std::size_t>(i)] = profile.width_at(y) * h;
  }
  return f;
}

double FiberSection::total_area() const {
  double a = 0.0;
  for (double v : area) a += v;
  return a;
}

SectionState section_moment_general(const BilinearMaterial& mat, const FiberSection& section,
                                    double kappa) {
  require(std::isfinite(kappa), ErrorKind::Domain, "section_moment_general: non-finite curvature");
  const double area = section.total_area();
  require(area > 0.0, ErrorKind::DegenerateSection,
          "section_moment_general: section has zero area");
  SectionState st;
  st.kappa = kappa;
  if (kappa == 0.0) return st;

  // sign(kappa) * axial(y0) is nonincreasing in y0: positive at the bottom
  // (all fibers stretched), negative at the top.
  const double dir = kappa > 0.0 ? 1.0 : -1.0;
  double lo = section.bottom;
  double hi = section.top;
  const double span = hi - lo;
  for (int it = 0; it < 200 && (hi - lo) > 1e-15 * span; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double n = dir * kernels::axial_sum(mat, section.y, section.area, kappa, mid);
    if (n > 0.0) {
      lo = mid;
    } else if (n < 0.0) {
      hi = mid;
    } else {
      lo = hi = mid;
    }
  }
  st.y0 = 0.5 * (lo + hi);
  const auto sums = kernels::fiber_sums(mat, section.y, section.area, kappa, st.y0);
  st.axial = sums.axial;
  st.moment = sums.moment;
  st.energy = sums.energy;
  return st;
}

// ---- RectangularFiberTable ---------------------------------------------------

RectangularFiberTable::RectangularFiberTable(const BilinearMaterial& mat, int n_fibers)
    : mat_(mat) {
  require(n_fibers >= 2, ErrorKind::Domain, "fiber table: need at least 2 fibers");
  half_ = (n_fibers + 1) / 2;
  dxi_ = 1.0 / half_;
  p1_.assign(static_cast<std::size_t>(half_) + 1, 0.0);
  p2_.assign(static_cast<std::size_t>(half_) + 1, 0.0);
  for (int j = 0; j < half_; ++j) {
    const double xi = (j + 0.5) * dxi_;
    p1_[static_cast<std::size_t>(j) + 1] = p1_[static_cast<std::size_t>(j)] + xi;
    p2_[static_cast<std::size_t>(j) + 1] = p2_[static_cast<std::size_t>(j)] + xi * xi;
  }
}

std::size_t RectangularFiberTable::elastic_count(double eps_peak) const {
  if (eps_peak <= mat_.eps_l) return static_cast<std::size_t>(half_);
  // Fiber j is elastic when eps_peak * (j + 0.5) / half <= eps_l.
  const double x = half_ * (mat_.eps_l / eps_peak) - 0.5;
  if (x < 0.0) return 0;
  const auto k = static_cast<std::size_t>(std::floor(x)) + 1;
  return std::min(k, static_cast<std::size_t>(half_));
}

double RectangularFiberTable::moment_factor(double eps_peak) const {
  const double e = std::abs(eps_peak);
  const std::size_t k = elastic_count(e);
  const double s1 = p1_.back(), s2 = p2_.back();
  const double g = mat_.E * e * p2_[k] + mat_.En * e * (s2 - p2_[k]) +
                   (mat_.E - mat_.En) * mat_.eps_l * (s1 - p1_[k]);
  return std::copysign(dxi_ * g, eps_peak);
}

double RectangularFiberTable::energy_factor(double eps_peak) const {
  const double e = std::abs(eps_peak);
  const std::size_t k = elastic_count(e);
  const double s1 = p1_.back(), s2 = p2_.back();
  const double plateau = static_cast<double>(static_cast<std::size_t>(half_) - k);
  const double el = mat_.eps_l;
  const double h = 0.5 * mat_.E * e * e * p2_[k] + 0.5 * mat_.En * e * e * (s2 - p2_[k]) +
                   (mat_.E - mat_.En) * (el * e * (s1 - p1_[k]) - 0.5 * el * el * plateau);
  return dxi_ * h;
}

double RectangularFiberTable::peak_strain_for(double target) const {
  require(target >= 0.0 && std::isfinite(target), ErrorKind::Domain,
          "fiber table: moment factor must be nonnegative");
  if (target == 0.0) return 0.0;
  // E*e*S2 >= g(e) >= En*e*S2 brackets the root.
  const double s2 = dxi_ * p2_.back();
  double lo = target / (mat_.E * s2);
  double hi = target / (mat_.En * s2);
  double glo = moment_factor(lo);
  double ghi = moment_factor(hi);
  for (int it = 0; it < 200 && (hi - lo) > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double g = moment_factor(mid);
    if (g < target) {
      lo = mid;
      glo = g;
    } else {
      hi = mid;
      ghi = g;
    }
  }
  // g is affine between fiber transitions; finish with one secant step.
  if (ghi > glo) return lo + (target - glo) * (hi - lo) / (ghi - glo);
  return 0.5 * (lo + hi);
}

double RectangularFiberTable::moment(double t, double w, double kappa) const {
  const double c = 0.5 * t;
  return 2.0 * w * c * c * moment_factor(kappa * c);
}

double RectangularFiberTable::energy(double t, double w, double kappa) const {
  const double c = 0.5 * t;
  return 2.0 * w * c * energy_factor(kappa * c);
}

// ---- hinge solvers -----------------------------------------------------------

namespace {

HingeResponse negate_if(HingeResponse r, bool negative) {
  if (negative) {
    r.torque = -r.torque;
    r.kappa_ref = -r.kappa_ref;
  }
  return r;
}

struct StationGrid {
  std::vector<double> half_t;  // c_i = t(s_i)/2
  double ds = 0.0;
  std::size_t thinnest = 0;
};

StationGrid make_stations(const ThicknessProfile& profile, int n) {
  StationGrid g;
  g.ds = profile.length() / n;
  g.half_t.resize(static_cast<std::size_t>(n));
  double tmin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double t = profile.thickness_at((i + 0.5) * g.ds);
    g.half_t[static_cast<std::size_t>(i)] = 0.5 * t;
    if (t < tmin) {
      tmin = t;
      g.thinnest = static_cast<std::size_t>(i);
    }
  }
  return g;
}

struct StationSums {
  double theta = 0.0;
  double energy = 0.0;
  double eps_peak = 0.0;
  double kappa_ref = 0.0;
};

StationSums evaluate_stations(const RectangularFiberTable& table, const StationGrid& grid,
                              double w, double moment) {
  StationSums out;
  for (std::size_t i = 0; i < grid.half_t.size(); ++i) {
    const double c = grid.half_t[i];
    const double e = table.peak_strain_for(moment / (2.0 * w * c * c));
    const double kappa = e / c;
    out.theta += kappa * grid.ds;
    out.energy += 2.0 * w * c * table.energy_factor(e) * grid.ds;
    out.eps_peak = std::max(out.eps_peak, e);
    if (i == grid.thinnest) out.kappa_ref = kappa;
  }
  return out;
}

}  // namespace

HingeResponse torque_rect_analytical(const HingeSpec& hinge, double theta) {
  require(hinge.profile.kind() == ThicknessProfile::Kind::Rectangular, ErrorKind::WrongProfile,
          "torque_rect_analytical: profile is not rectangular; use the numerical solver");
  require(std::isfinite(theta), ErrorKind::Domain, "torque_rect_analytical: non-finite angle");
  const double a = std::abs(theta);
  const double L = hinge.profile.length();
  const double t = hinge.profile.rect_thickness();
  const double kappa = a / L;
  HingeResponse r;
  r.kappa_ref = kappa;
  r.torque = section_moment(hinge.material, t, hinge.width, kappa);
  r.energy = L * section_energy(hinge.material, t, hinge.width, kappa);
  r.eps_peak = 0.5 * kappa * t;
  r.over_limit = over_limit(hinge.material, r.eps_peak);
  return negate_if(r, theta < 0.0);
}

HingeResponse torque_profile_numerical(const HingeSpec& hinge, double theta,
                                       const SolverOptions& opts) {
  require(std::isfinite(theta), ErrorKind::Domain, "torque_profile_numerical: non-finite angle");
  require(opts.stations >= 101, ErrorKind::Domain,
          "torque_profile_numerical: need at least 101 stations");
  const double target = std::abs(theta);
  if (target == 0.0) return {};

  const RectangularFiberTable table(hinge.material, opts.fibers);
  const StationGrid grid = make_stations(hinge.profile, opts.stations);
  const double w = hinge.width;
  const double L = hinge.profile.length();

  // Seed: the thinnest station bent uniformly to theta/L. Every other station
  // needs less curvature at that moment, so theta(seed) <= target.
  double m_lo = 0.0, th_lo = 0.0;
  double m_hi = table.moment(2.0 * grid.half_t[grid.thinnest], w, target / L);
  double th_hi = evaluate_stations(table, grid, w, m_hi).theta;
  int doublings = 0;
  while (th_hi < target) {
    if (++doublings > 60) {
      std::ostringstream msg;
      msg << "torque_profile_numerical: no moment bracket after 60 doublings (last bracket ["
          << m_lo << ", " << m_hi << "] N m)";
      throw Error(ErrorKind::SolverFailure, msg.str());
    }
    m_lo = m_hi;
    th_lo = th_hi;
    m_hi *= 2.0;
    th_hi = evaluate_stations(table, grid, w, m_hi).theta;
  }

  for (int it = 0; it < 200 && (m_hi - m_lo) > 1e-15 * m_hi; ++it) {
    const double mid = 0.5 * (m_lo + m_hi);
    const double th = evaluate_stations(table, grid, w, mid).theta;
    if (th < target) {
      m_lo = mid;
      th_lo = th;
    } else {
      m_hi = mid;
      th_hi = th;
    }
  }
  const double m = th_hi > th_lo ? m_lo + (target - th_lo) * (m_hi - m_lo) / (th_hi - th_lo)
                                 : 0.5 * (m_lo + m_hi);
  const StationSums sums = evaluate_stations(table, grid, w, m);
  if (std::abs(sums.theta - target) > 1e-8 * std::max(target, 1e-6)) {
    std::ostringstream msg;
    msg << "torque_profile_numerical: angle residual " << sums.theta - target
        << " rad exceeds tolerance (bracket [" << m_lo << ", " << m_hi << "] N m)";
    throw Error(ErrorKind::SolverFailure, msg.str());
  }

  HingeResponse r;
  r.torque = m;
  // First-order correction of the residual angle mismatch (dU/dtheta = M).
  r.energy = sums.energy + m * (target - sums.theta);
  r.eps_peak = sums.eps_peak;
  r.kappa_ref = sums.kappa_ref;
  r.over_limit = over_limit(hinge.material, r.eps_peak);
  return negate_if(r, theta < 0.0);
}

HingeResponse hinge_response(const HingeSpec& hinge, double theta, const SolverOptions& opts) {
  if (hinge.profile.kind() == ThicknessProfile::Kind::Rectangular) {
    return torque_rect_analytical(hinge, theta);
  }
  return torque_profile_numerical(hinge, theta, opts);
}

TorqueCurve torque_curve(const HingeSpec& hinge, double theta_max, int n,
                         const SolverOptions& opts) {
  require(n >= 2, ErrorKind::Domain, "torque_curve: need at least 2 samples");
  require(finite_positive(theta_max), ErrorKind::Domain, "torque_curve: theta_max must be positive");
  hinge.validate();
  TorqueCurve curve;
  curve.samples.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double theta = theta_max * i / (n - 1);
    try {
      const HingeResponse r = hinge_response(hinge, theta, opts);
      curve.samples.push_back({theta, r.kappa_ref, r.torque, r.energy, r.eps_peak, r.over_limit});
    } catch (const Error& e) {
      std::ostringstream msg;
      msg << e.what() << " [at theta=" << theta << " rad]";
      throw Error(e.kind(), msg.str());
    }
  }
  return curve;
}

double max_strain(const HingeSpec& hinge, double theta, const SolverOptions& opts) {
  const double a = std::abs(theta);
  if (a == 0.0) return 0.0;
  if (hinge.profile.kind() == ThicknessProfile::Kind::Rectangular) {
    return a * hinge.profile.rect_thickness() / (2.0 * hinge.profile.length());
  }
  return torque_profile_numerical(hinge, a, opts).eps_peak;
}

double elastic_limit(const HingeSpec& hinge, double eps_limit, const SolverOptions& opts) {
  require(eps_limit > 0.0 && eps_limit <= 0.12, ErrorKind::Domain,
          "elastic_limit: eps_limit must be in (0, 0.12]");
  const double L = hinge.profile.length();
  if (hinge.profile.kind() == ThicknessProfile::Kind::Rectangular) {
    return 2.0 * L * eps_limit / hinge.profile.rect_thickness();
  }
  double lo = 0.0;
  double hi = 2.0 * L * eps_limit / hinge.profile.min_thickness();
  for (int i = 0; i < 60 && max_strain(hinge, hi, opts) < eps_limit; ++i) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 200 && (hi - lo) > 1e-13 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double e = max_strain(hinge, mid, opts);
    if (std::abs(e - eps_limit) <= 1e-10 * eps_limit) return mid;
    if (e < eps_limit) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double max_thickness_for(double theta, double length, double eps_limit) {
  require(eps_limit > 0.0 && eps_limit <= 0.12, ErrorKind::Domain,
          "max_thickness_for: eps_limit must be in (0, 0.12]");
  require(finite_positive(theta) && finite_positive(length), ErrorKind::Domain,
          "max_thickness_for: theta and length must be positive");
  return 2.0 * length * eps_limit / theta;
}

double castigliano_residual(const HingeSpec& hinge, double theta, double h,
                            const SolverOptions& opts) {
  require(h >= 1e-7 && h <= 1e-3, ErrorKind::Domain,
          "castigliano_residual: step must be in [1e-7, 1e-3] rad");
  require(theta - h >= 0.0, ErrorKind::Domain, "castigliano_residual: theta - h must be >= 0");
  const double m = hinge_response(hinge, theta, opts).torque;
  const double up = hinge_response(hinge, theta + h, opts).energy;
  const double dn = hinge_response(hinge, theta - h, opts).energy;
  const double fd = (up - dn) / (2.0 * h);
  return std::abs(fd - m) / std::max(m, std::numeric_limits<double>::epsilon());
}

}  // namespace nitiflex
