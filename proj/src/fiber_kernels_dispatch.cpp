#include <atomic>

#include "nitiflex/error.hpp"
#include "nitiflex/fiber_kernels.hpp"

namespace nitiflex::kernels {

namespace {

bool cpu_has_avx2() {
#if NITIFLEX_HAVE_AVX2_KERNEL && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa best_isa() { return cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar; }

std::atomic<Isa>& selected() {
  static std::atomic<Isa> isa{best_isa()};
  return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "unknown";
}

std::vector<Isa> available_isas() {
  std::vector<Isa> out{Isa::Scalar};
  if (cpu_has_avx2()) out.push_back(Isa::Avx2);
  return out;
}

Isa active_isa() { return selected().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (isa == Isa::Avx2 && !cpu_has_avx2()) {
    throw Error(ErrorKind::Domain, "avx2 kernel not available on this machine");
  }
  selected().store(isa, std::memory_order_relaxed);
}

FiberSums fiber_sums(const BilinearMaterial& mat, std::span<const double> y,
                     std::span<const double> area, double kappa, double y0) {
#if NITIFLEX_HAVE_AVX2_KERNEL
  if (active_isa() == Isa::Avx2) return fiber_sums_avx2(mat, y, area, kappa, y0);
#endif
  return fiber_sums_scalar(mat, y, area, kappa, y0);
}

double axial_sum(const BilinearMaterial& mat, std::span<const double> y,
                 std::span<const double> area, double kappa, double y0) {
#if NITIFLEX_HAVE_AVX2_KERNEL
  if (active_isa() == Isa::Avx2) return axial_sum_avx2(mat, y, area, kappa, y0);
#endif
  return axial_sum_scalar(mat, y, area, kappa, y0);
}

}  // namespace nitiflex::kernels
