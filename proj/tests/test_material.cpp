#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "nitiflex/error.hpp"
#include "nitiflex/material.hpp"
#include "oracles.hpp"

using namespace nitiflex;

namespace {

const BilinearMaterial kMat{60e9, 20e9, 0.01, 0.06};

std::vector<StressStrainSample> synthetic(const BilinearMaterial& m, double noise_pa, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, noise_pa);
  std::vector<StressStrainSample> s;
  for (int k = 1; k <= 20; ++k) {
    const double eps = 0.002 * k;
    s.push_back({eps, stress(m, eps) + (noise_pa > 0 ? noise(rng) : 0.0)});
  }
  return s;
}

}  // namespace

TEST_CASE("stress at the origin and around the breakpoint") {
  CHECK(stress(kMat, 0.0) == 0.0);
  CHECK(stress(kMat, 0.01) == doctest::Approx(600e6).epsilon(1e-12));
  CHECK(stress(kMat, 0.02) == doctest::Approx(800e6).epsilon(1e-12));

  // Cross-check 0.02 by integrating the tangent modulus.
  const double integrated = oracle::trapezoid([](double e) { return tangent_modulus(kMat, e); }, 0.0,
                                              0.02, 200000);
  CHECK(integrated == doctest::Approx(800e6).epsilon(1e-4));
}

TEST_CASE("stress is odd and continuous") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> eps(-0.06, 0.06);
  for (int i = 0; i < 1000; ++i) {
    const double e = eps(rng);
    CHECK(stress(kMat, -e) == -stress(kMat, e));
  }
  const double below = stress(kMat, 0.01 - 1e-12);
  const double above = stress(kMat, 0.01 + 1e-12);
  CHECK(std::abs(above - below) < 1e-12 * 60e9 * 3);
}

TEST_CASE("non-finite strain is a domain error") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(stress(kMat, nan), Error);
  CHECK_THROWS_AS(strain_energy_density(kMat, std::numeric_limits<double>::infinity()), Error);
  CHECK_THROWS_AS(tangent_modulus(kMat, nan), Error);
}

TEST_CASE("strain energy density values") {
  CHECK(strain_energy_density(kMat, 0.0) == 0.0);
  CHECK(strain_energy_density(kMat, 0.005) == doctest::Approx(750e3).epsilon(1e-12));
  // Hand value: E eps_l^2/2 + E eps_l (0.01) + En (0.01)^2/2 = 3 + 6 + 1 MJ/m^3.
  CHECK(strain_energy_density(kMat, 0.02) == doctest::Approx(10e6).epsilon(1e-12));

  const double quad5 = oracle::trapezoid([](double e) { return stress(kMat, e); }, 0.0, 0.005, 100000);
  const double quad20 = oracle::trapezoid([](double e) { return stress(kMat, e); }, 0.0, 0.02, 100000);
  CHECK(strain_energy_density(kMat, 0.005) == doctest::Approx(quad5).epsilon(1e-8));
  CHECK(strain_energy_density(kMat, 0.02) == doctest::Approx(quad20).epsilon(1e-8));
}

TEST_CASE("energy density derivative matches stress") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> eps(1e-4, 0.06);
  const double h = 1e-8;
  for (int i = 0; i < 100; ++i) {
    const double e = eps(rng);
    const double fd = (strain_energy_density(kMat, e + h) - strain_energy_density(kMat, e - h)) / (2 * h);
    CHECK(fd == doctest::Approx(stress(kMat, e)).epsilon(1e-4));
  }
}

TEST_CASE("energy density is even and convex") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> eps(-0.06, 0.06);
  for (int i = 0; i < 500; ++i) {
    const double a = eps(rng), b = eps(rng);
    CHECK(strain_energy_density(kMat, -a) == strain_energy_density(kMat, a));
    const double mid = strain_energy_density(kMat, 0.5 * (a + b));
    const double avg = 0.5 * (strain_energy_density(kMat, a) + strain_energy_density(kMat, b));
    CHECK(mid <= avg * (1 + 1e-12) + 1e-9);
  }
}

TEST_CASE("tangent modulus regimes") {
  CHECK(tangent_modulus(kMat, 0.0) == 60e9);
  CHECK(tangent_modulus(kMat, -0.02) == 20e9);
  CHECK(tangent_modulus(kMat, 0.01) == 20e9);
  CHECK(tangent_modulus(kMat, -0.01) == 20e9);
  CHECK(tangent_modulus(kMat, 0.0099) == 60e9);
}

TEST_CASE("material invariants are enforced") {
  CHECK_NOTHROW(kMat.validate());
  CHECK_THROWS_AS((BilinearMaterial{60e9, 60e9, 0.01, 0.06}.validate()), Error);
  CHECK_THROWS_AS((BilinearMaterial{60e9, 20e9, 0.07, 0.06}.validate()), Error);
  CHECK_THROWS_AS((BilinearMaterial{60e9, 20e9, 0.01, 0.2}.validate()), Error);
  CHECK_THROWS_AS((BilinearMaterial{-1, 20e9, 0.01, 0.06}.validate()), Error);
}

TEST_CASE("fit_bilinear recovers noiseless generator") {
  const auto samples = synthetic(kMat, 0.0, 0);
  const auto fit = fit_bilinear(samples);
  CHECK(fit.material.E == doctest::Approx(60e9).epsilon(1e-9));
  CHECK(fit.material.En == doctest::Approx(20e9).epsilon(1e-9));
  CHECK(fit.material.eps_l == doctest::Approx(0.01).epsilon(1e-9));
  CHECK(fit.residual_rms < 1e-3);
}

TEST_CASE("fit_bilinear with 5 MPa noise") {
  int good = 0;
  for (unsigned seed = 0; seed < 100; ++seed) {
    const auto fit = fit_bilinear(synthetic(kMat, 5e6, seed));
    const bool ok = std::abs(fit.material.E / 60e9 - 1) <= 0.05 &&
                    std::abs(fit.material.En / 20e9 - 1) <= 0.05 &&
                    std::abs(fit.material.eps_l / 0.01 - 1) <= 0.10;
    good += ok ? 1 : 0;
  }
  MESSAGE("noisy fits within tolerance: " << good << "/100");
  CHECK(good >= 90);
}

TEST_CASE("fit_bilinear error paths") {
  std::vector<StressStrainSample> linear;
  for (int k = 1; k <= 10; ++k) linear.push_back({0.0009 * k, 60e9 * 0.0009 * k});
  try {
    fit_bilinear(linear);
    FAIL("expected FitDegenerate");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::FitDegenerate);
  }

  std::vector<StressStrainSample> three{{0.001, 1}, {0.002, 2}, {0.003, 3}};
  try {
    fit_bilinear(three);
    FAIL("expected InsufficientData");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InsufficientData);
  }

  std::vector<StressStrainSample> unsorted{{0.002, 1}, {0.001, 2}, {0.003, 3}, {0.004, 4}};
  CHECK_THROWS_AS(fit_bilinear(unsorted), Error);
}
