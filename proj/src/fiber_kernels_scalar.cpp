#include <algorithm>
#include <cmath>

#include "nitiflex/fiber_kernels.hpp"

namespace nitiflex::kernels {

// Branch-free form of the bilinear law:
//   |sigma| = En*a + (E-En)*min(a, eps_l)
//   u       = En*a^2/2 + (E-En)*(m*a - m^2/2),  m = min(a, eps_l)
// The vector kernels use the same expressions.

FiberSums fiber_sums_scalar(const BilinearMaterial& mat, std::span<const double> y,
                            std::span<const double> area, double kappa, double y0) {
  const double dE = mat.E - mat.En;
  FiberSums s;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double arm = y[i] - y0;
    const double eps = kappa * arm;
    const double a = std::abs(eps);
    const double m = std::min(a, mat.eps_l);
    const double sig = std::copysign(mat.En * a + dE * m, eps);
    const double u = 0.5 * mat.En * a * a + dE * (m * a - 0.5 * m * m);
    s.axial += sig * area[i];
    s.moment += sig * arm * area[i];
    s.energy += u * area[i];
  }
  return s;
}

double axial_sum_scalar(const BilinearMaterial& mat, std::span<const double> y,
                        std::span<const double> area, double kappa, double y0) {
  const double dE = mat.E - mat.En;
  double n = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double eps = kappa * (y[i] - y0);
    const double a = std::abs(eps);
    n += std::copysign(mat.En * a + dE * std::min(a, mat.eps_l), eps) * area[i];
  }
  return n;
}

}  // namespace nitiflex::kernels
