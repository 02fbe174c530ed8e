#pragma once

#include <span>
#include <vector>

namespace nitiflex {

/// Piecewise-linear superelastic law, symmetric in tension and compression.
///
/// Below the critical strain `eps_l` the austenite modulus `E` applies; above
/// it the mixed-phase modulus `En` (< E). The law is parameterized, so stress
/// is continuous at +-eps_l by construction. There is no unloading branch.
struct BilinearMaterial {
  double E = 0.0;          // Pa
  double En = 0.0;         // Pa
  double eps_l = 0.0;      // critical strain
  double eps_max = 0.06;   // elastic strain limit used for over-limit flags

  /// Throws Error(Domain) if the invariants 0 < En < E, 0 < eps_l < eps_max <= 0.12 fail.
  void validate() const;

  /// Round-number values for examples and tests. NOT measured data: real
  /// designs must supply their own parameters or fit them from a CSV.
  static BilinearMaterial placeholder();
};

double stress(const BilinearMaterial& mat, double eps);
double strain_energy_density(const BilinearMaterial& mat, double eps);

/// E for |eps| < eps_l, En otherwise (the breakpoint itself returns En).
double tangent_modulus(const BilinearMaterial& mat, double eps);

/// True when |eps| exceeds the material's elastic limit.
bool over_limit(const BilinearMaterial& mat, double eps);

struct StressStrainSample {
  double strain = 0.0;
  double stress = 0.0;  // Pa
};

struct BilinearFit {
  BilinearMaterial material;
  double residual_rms = 0.0;  // Pa
  std::size_t n_samples = 0;
};

/// Continuity-constrained two-segment least squares through the origin.
/// The breakpoint is picked from every interior sample strain plus 50 uniform
/// candidates strictly between the extreme strains.
BilinearFit fit_bilinear(std::span<const StressStrainSample> samples, double eps_max = 0.06);

}  // namespace nitiflex
