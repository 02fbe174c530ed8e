#include "nitiflex/material.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nitiflex/error.hpp"

namespace nitiflex {

namespace {

void require_finite(double eps, const char* op) {
  if (!std::isfinite(eps)) {
    throw Error(ErrorKind::Domain, std::string(op) + ": non-finite strain");
  }
}

}  // namespace

void BilinearMaterial::validate() const {
  std::ostringstream msg;
  if (!(E > 0.0) || !std::isfinite(E)) {
    msg << "material: E must be positive (got " << E << ")";
  } else if (!(En > 0.0) || !(En < E)) {
    msg << "material: require 0 < En < E (got En=" << En << ", E=" << E << ")";
  } else if (!(eps_l > 0.0) || !(eps_l < eps_max) || !(eps_max <= 0.12)) {
    msg << "material: require 0 < eps_l < eps_max <= 0.12 (got eps_l=" << eps_l
        << ", eps_max=" << eps_max << ")";
  } else {
    return;
  }
  throw Error(ErrorKind::Domain, msg.str());
}

BilinearMaterial BilinearMaterial::placeholder() {
  return BilinearMaterial{60e9, 20e9, 0.01, 0.06};
}

double stress(const BilinearMaterial& mat, double eps) {
  require_finite(eps, "stress");
  const double a = std::abs(eps);
  double s;
  if (a <= mat.eps_l) {
    s = mat.E * a;
  } else {
    s = mat.E * mat.eps_l + mat.En * (a - mat.eps_l);
  }
  return std::copysign(s, eps);
}

double strain_energy_density(const BilinearMaterial& mat, double eps) {
  require_finite(eps, "strain_energy_density");
  const double a = std::abs(eps);
  if (a <= mat.eps_l) {
    return 0.5 * mat.E * a * a;
  }
  const double over = a - mat.eps_l;
  return 0.5 * mat.E * mat.eps_l * mat.eps_l + mat.E * mat.eps_l * over + 0.5 * mat.En * over * over;
}

double tangent_modulus(const BilinearMaterial& mat, double eps) {
  require_finite(eps, "tangent_modulus");
  return std::abs(eps) < mat.eps_l ? mat.E : mat.En;
}

bool over_limit(const BilinearMaterial& mat, double eps) {
  return std::abs(eps) > mat.eps_max;
}

namespace {

struct SegmentFit {
  double E = 0.0;
  double En = 0.0;
  double sse = std::numeric_limits<double>::infinity();
  bool ok = false;
};

// For a fixed breakpoint b the model sigma = E*min(eps,b) + En*max(eps-b,0)
// is linear in (E, En); solve the 2x2 normal equations.
SegmentFit fit_at_breakpoint(std::span<const StressStrainSample> s, double b) {
  double a11 = 0, a12 = 0, a22 = 0, r1 = 0, r2 = 0;
  for (const auto& p : s) {
    const double x1 = std::min(p.strain, b);
    const double x2 = std::max(p.strain - b, 0.0);
    a11 += x1 * x1;
    a12 += x1 * x2;
    a22 += x2 * x2;
    r1 += x1 * p.stress;
    r2 += x2 * p.stress;
  }
  SegmentFit f;
  const double det = a11 * a22 - a12 * a12;
  if (!(std::abs(det) > 1e-300) || a22 <= 0.0) return f;
  f.E = (r1 * a22 - r2 * a12) / det;
  f.En = (a11 * r2 - a12 * r1) / det;
  double sse = 0.0;
  for (const auto& p : s) {
    const double model = f.E * std::min(p.strain, b) + f.En * std::max(p.strain - b, 0.0);
    sse += (p.stress - model) * (p.stress - model);
  }
  f.sse = sse;
  f.ok = std::isfinite(f.E) && std::isfinite(f.En);
  return f;
}

}  // namespace

BilinearFit fit_bilinear(std::span<const StressStrainSample> samples, double eps_max) {
  if (samples.size() < 4) {
    throw Error(ErrorKind::InsufficientData,
                "fit_bilinear: need at least 4 samples, got " + std::to_string(samples.size()));
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& p = samples[i];
    if (!std::isfinite(p.strain) || !std::isfinite(p.stress) || p.strain < 0.0) {
      throw Error(ErrorKind::Domain, "fit_bilinear: strains must be finite and nonnegative");
    }
    if (i > 0 && !(p.strain > samples[i - 1].strain)) {
      throw Error(ErrorKind::Domain, "fit_bilinear: strains must be strictly increasing");
    }
  }

  const double lo = samples.front().strain;
  const double hi = samples.back().strain;
  std::vector<double> candidates;
  candidates.reserve(samples.size() + 50);
  for (std::size_t i = 1; i + 1 < samples.size(); ++i) candidates.push_back(samples[i].strain);
  constexpr int kUniform = 50;
  for (int k = 1; k <= kUniform; ++k) {
    candidates.push_back(lo + (hi - lo) * k / (kUniform + 1));
  }
  std::sort(candidates.begin(), candidates.end());

  double best_b = 0.0;
  SegmentFit best;
  for (double b : candidates) {
    const SegmentFit f = fit_at_breakpoint(samples, b);
    if (f.ok && f.sse < best.sse) {
      best = f;
      best_b = b;
    }
  }

  // Both regimes need at least two samples strictly on their side.
  const auto below = std::count_if(samples.begin(), samples.end(),
                                   [&](const auto& p) { return p.strain < best_b; });
  const auto above = std::count_if(samples.begin(), samples.end(),
                                   [&](const auto& p) { return p.strain > best_b; });
  if (!best.ok || below < 2 || above < 2 || !(best.En > 0.0) ||
      !((best.E - best.En) > 1e-6 * std::abs(best.E)) || !(best_b < eps_max)) {
    std::ostringstream msg;
    msg << "fit_bilinear: samples do not show two regimes (E=" << best.E << ", En=" << best.En
        << ", breakpoint=" << best_b << ")";
    throw Error(ErrorKind::FitDegenerate, msg.str());
  }

  BilinearFit out;
  out.material = BilinearMaterial{best.E, best.En, best_b, eps_max};
  out.material.validate();
  out.residual_rms = std::sqrt(best.sse / static_cast<double>(samples.size()));
  out.n_samples = samples.size();
  return out;
}

}  // namespace nitiflex
