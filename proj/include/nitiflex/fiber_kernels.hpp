#pragma once

// Fiber sums over a discretized cross-section.
//
// Each fiber i sits at height y[i] with area a[i]. For curvature kappa and
// neutral-axis offset y0 the fiber strain is kappa*(y[i]-y0); the kernels
// return
//   axial  = sum sigma(eps_i) * a_i
//   moment = sum sigma(eps_i) * (y_i - y0) * a_i
//   energy = sum u(eps_i) * a_i          (energy per unit length)
//
// The scalar kernel is the reference. Vector variants must agree with it to
// rounding (summation order differs); see tests/test_fiber_kernels.cpp.

#include <span>
#include <string_view>
#include <vector>

#include "nitiflex/material.hpp"

namespace nitiflex::kernels {

struct FiberSums {
  double axial = 0.0;
  double moment = 0.0;
  double energy = 0.0;
};

enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa);

FiberSums fiber_sums_scalar(const BilinearMaterial& mat, std::span<const double> y,
                            std::span<const double> area, double kappa, double y0);

/// Axial force only; used by the neutral-axis search.
double axial_sum_scalar(const BilinearMaterial& mat, std::span<const double> y,
                        std::span<const double> area, double kappa, double y0);

#if defined(__x86_64__) || defined(_M_X64)
#define NITIFLEX_HAVE_AVX2_KERNEL 1
FiberSums fiber_sums_avx2(const BilinearMaterial& mat, std::span<const double> y,
                          std::span<const double> area, double kappa, double y0);
double axial_sum_avx2(const BilinearMaterial& mat, std::span<const double> y,
                      std::span<const double> area, double kappa, double y0);
#else
#define NITIFLEX_HAVE_AVX2_KERNEL 0
#endif

/// ISAs compiled in and supported by the running CPU, best last.
std::vector<Isa> available_isas();

/// Currently selected ISA (best available unless overridden).
Isa active_isa();

/// Force an ISA (tests, benchmarking). Throws Error(Domain) when unavailable.
void set_active_isa(Isa isa);

/// Dispatching entry points.
FiberSums fiber_sums(const BilinearMaterial& mat, std::span<const double> y,
                     std::span<const double> area, double kappa, double y0);
double axial_sum(const BilinearMaterial& mat, std::span<const double> y,
                 std::span<const double> area, double kappa, double y0);

}  // namespace nitiflex::kernels
