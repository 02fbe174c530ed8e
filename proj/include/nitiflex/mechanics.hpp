#pragma once

// Torque-angle response of living hinges in pure bending.
//
// Units are SI throughout: metres, radians, pascals, newton-metres, joules.
// The hinge carries a constant moment along its length and plane sections
// stay plane. Rectangular hinges have a closed form; any other thickness
// profile goes through the station solver, which integrates each station's
// section over fibers and root-finds the moment that produces the requested
// total rotation.

#include <span>
#include <utility>
#include <vector>

#include "nitiflex/material.hpp"

namespace nitiflex {

enum class CutSides { One, Both };

/// Hinge thickness as a function of position s in [0, L] along the bending axis.
class ThicknessProfile {
 public:
  enum class Kind { Rectangular, Arc, Sampled };

  static ThicknessProfile rectangular(double length, double thickness);

  /// Circular cutout centred at L/2. The sagitta g(s) = R - sqrt(R^2 - (s - L/2)^2)
  /// is added once (one-sided cut) or twice (both sides). Requires L <= 2R.
  static ThicknessProfile arc(double length, double t_min, double radius, CutSides sides);

  /// (s, t) pairs with s strictly increasing from 0; L is the last s. Linear in between.
  static ThicknessProfile sampled(std::vector<std::pair<double, double>> points);

  Kind kind() const { return kind_; }
  double length() const { return length_; }
  double thickness_at(double s) const;
  double min_thickness() const;
  double max_thickness() const;

  // Parameters; meaningful only for the matching kind.
  double rect_thickness() const { return t_; }
  double arc_t_min() const { return t_; }
  double arc_radius() const { return radius_; }
  CutSides arc_sides() const { return sides_; }
  const std::vector<std::pair<double, double>>& samples() const { return samples_; }

 private:
  ThicknessProfile() = default;

  Kind kind_ = Kind::Rectangular;
  double length_ = 0.0;
  double t_ = 0.0;
  double radius_ = 0.0;
  CutSides sides_ = CutSides::Both;
  std::vector<std::pair<double, double>> samples_;
};

struct HingeSpec {
  ThicknessProfile profile = ThicknessProfile::rectangular(1e-3, 20e-6);
  double width = 2e-3;        // transverse to bending, m
  BilinearMaterial material;
  double sheet_t = 100e-6;    // bulk sheet thickness, m

  void validate() const;
};

struct TorqueSample {
  double theta = 0.0;      // rad
  double kappa_ref = 0.0;  // curvature at the thinnest station, 1/m
  double torque = 0.0;     // N m
  double energy = 0.0;     // J
  double eps_peak = 0.0;
  bool over_limit = false;
};

struct TorqueCurve {
  std::vector<TorqueSample> samples;
};

struct SectionState {
  double kappa = 0.0;
  double y0 = 0.0;       // neutral-axis offset, m
  double moment = 0.0;   // N m
  double axial = 0.0;    // N
  double energy = 0.0;   // strain energy per unit length, J/m
};

struct SolverOptions {
  int stations = 201;  // midpoint stations along the hinge
  int fibers = 2000;   // through-thickness fibers per station (rounded up to even)
};

// ---- rectangular sections, closed form -------------------------------------

/// Bending moment of a w x t rectangle at curvature kappa.
double section_moment(const BilinearMaterial& mat, double t, double w, double kappa);

/// Strain energy per unit length of a w x t rectangle at curvature kappa.
double section_energy(const BilinearMaterial& mat, double t, double w, double kappa);

// ---- arbitrary sections ----------------------------------------------------

/// Width as a function of height y over [y_bottom, y_top], piecewise linear
/// between breakpoints. A repeated y encodes a step.
class WidthProfile {
 public:
  explicit WidthProfile(std::vector<std::pair<double, double>> breakpoints);

  static WidthProfile rectangle(double t, double w);

  double bottom() const { return points_.front().first; }
  double top() const { return points_.back().first; }
  double width_at(double y) const;

 private:
  std::vector<std::pair<double, double>> points_;
};

/// Equal-thickness fiber discretization, structure-of-arrays for the kernels.
struct FiberSection {
  std::vector<double> y;
  std::vector<double> area;
  double bottom = 0.0;
  double top = 0.0;

  static FiberSection discretize(const WidthProfile& profile, int n_fibers);
  double total_area() const;
};

/// Solves axial equilibrium for the neutral-axis offset by bisection, then
/// integrates the moment about it. kappa = 0 returns the stress-free state.
SectionState section_moment_general(const BilinearMaterial& mat, const FiberSection& section,
                                    double kappa);

/// Midpoint fiber quadrature of a symmetric rectangle, reduced to prefix sums.
///
/// With the peak strain e = kappa*t/2 and xi = y/(t/2), a rectangle's moment is
/// M = 2*w*c^2 * g(e) and its energy per length 2*w*c * h(e), where g and h
/// are sums over the half-thickness fibers. For a given e the fibers split
/// into an elastic prefix and a plateau suffix, so each sum is a handful of
/// precomputed prefix moments. The value equals the direct fiber sum.
class RectangularFiberTable {
 public:
  RectangularFiberTable(const BilinearMaterial& mat, int n_fibers);

  double moment_factor(double eps_peak) const;
  double energy_factor(double eps_peak) const;
  /// Inverse of moment_factor for a nonnegative target.
  double peak_strain_for(double moment_factor) const;

  double moment(double t, double w, double kappa) const;
  double energy(double t, double w, double kappa) const;
  int fibers() const { return 2 * half_; }

 private:
  std::size_t elastic_count(double eps_peak) const;

  BilinearMaterial mat_;
  int half_ = 0;
  double dxi_ = 0.0;
  std::vector<double> p1_;  // p1_[k] = sum_{j<k} xi_j
  std::vector<double> p2_;  // p2_[k] = sum_{j<k} xi_j^2
};

// ---- hinges ----------------------------------------------------------------

struct HingeResponse {
  double torque = 0.0;
  double energy = 0.0;
  double eps_peak = 0.0;
  double kappa_ref = 0.0;
  bool over_limit = false;
};

/// Closed form for rectangular hinges; throws Error(WrongProfile) otherwise.
HingeResponse torque_rect_analytical(const HingeSpec& hinge, double theta);

/// Station solver; any profile. stations >= 101.
HingeResponse torque_profile_numerical(const HingeSpec& hinge, double theta,
                                       const SolverOptions& opts = {});

/// Analytical path for rectangular hinges, station solver otherwise.
HingeResponse hinge_response(const HingeSpec& hinge, double theta, const SolverOptions& opts = {});

TorqueCurve torque_curve(const HingeSpec& hinge, double theta_max, int n,
                         const SolverOptions& opts = {});

double max_strain(const HingeSpec& hinge, double theta, const SolverOptions& opts = {});

/// Largest angle whose peak strain stays at eps_limit.
double elastic_limit(const HingeSpec& hinge, double eps_limit, const SolverOptions& opts = {});

/// Thickest rectangular hinge of length L that bends to theta at eps_limit.
double max_thickness_for(double theta, double length, double eps_limit);

/// |(U(theta+h) - U(theta-h))/(2h) - M(theta)| / max(M(theta), machine epsilon).
double castigliano_residual(const HingeSpec& hinge, double theta, double h,
                            const SolverOptions& opts = {});

}  // namespace nitiflex
