#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "gkdv/spacetime.hpp"
#include "gkdv/spectral.hpp"

using namespace gkdv;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> random_samples(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  std::vector<double> u(n);
  for (auto& v : u) v = d(rng);
  return u;
}

// Random real field supported in |xi| <= kx, |tau| <= kt.
SpaceTimeField random_band(const GridSpec& g, std::size_t nt, double t_extent, long jx, long jt, unsigned seed) {
  SpaceTimeField f(g, nt, t_extent);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  for (long l = -jt; l <= jt; ++l)
    for (long j = -jx; j <= jx; ++j) {
      if (l < 0 || (l == 0 && j < 0)) continue;
      const cplx c{d(rng), (l == 0 && j == 0) ? 0.0 : d(rng)};
      f.at(f.time_slot(l), g.slot(j)) = c;
      f.at(f.time_slot(-l), g.slot(-j)) = std::conj(c);
    }
  return f;
}

}  // namespace

TEST(SpaceTime, ShapeValidation) {
  const GridSpec g(kPi, 16);
  EXPECT_THROW(SpaceTimeField(g, 12, 1.0), ConfigurationError);
  EXPECT_THROW(SpaceTimeField(g, 8, 1.0), ConfigurationError);
  EXPECT_THROW(SpaceTimeField(g, 16, 0.0), ConfigurationError);
  const SpaceTimeField f(g, 32, 4.0);
  EXPECT_DOUBLE_EQ(f.dt(), 0.125);
  EXPECT_DOUBLE_EQ(f.dtau(), kPi / 2.0);
  EXPECT_DOUBLE_EQ(f.t(0), -2.0);
  EXPECT_EQ(f.time_index(17), -15);
  EXPECT_EQ(f.time_slot(-15), 17u);
}

TEST(SpaceTime, TravellingCosineHasClosedFormCoefficients) {
  // cos(xi1 x + tau1 t) puts L T / (2 pi) at (+-xi1, +-tau1).
  const GridSpec g(2.0 * kPi, 32);
  const std::size_t nt = 64;
  const double big_t = 3.0;
  SpaceTimeField probe(g, nt, big_t);
  const long j = 3, l = -5;
  const double xi1 = j * g.dxi(), tau1 = l * probe.dtau();
  std::vector<double> u;
  for (std::size_t m = 0; m < nt; ++m)
    for (std::size_t n = 0; n < g.size(); ++n) u.push_back(std::cos(xi1 * g.x(n) + tau1 * probe.t(m)));
  const auto f = spacetime_forward(u, g, nt, big_t);
  const double expect = g.half_length() * big_t / (2.0 * kPi);
  for (std::size_t m = 0; m < nt; ++m)
    for (std::size_t i = 0; i < g.size(); ++i) {
      const bool hit = (f.time_index(m) == l && g.index(i) == j) || (f.time_index(m) == -l && g.index(i) == -j);
      EXPECT_NEAR(std::abs(f.at(m, i) - cplx(hit ? expect : 0.0, 0.0)), 0.0, 1e-12 * expect);
    }
}

TEST(SpaceTime, ParsevalAndRoundTrip) {
  const GridSpec g(3.0, 64);
  const std::size_t nt = 32;
  const double big_t = 5.0;
  const auto u = random_samples(g.size() * nt, 3);
  const auto f = spacetime_forward(u, g, nt, big_t);
  double phys = 0.0;
  for (double v : u) phys += v * v;
  phys *= g.dx() * f.dt();
  EXPECT_NEAR(spacetime_l2(f) * spacetime_l2(f), phys, 1e-12 * phys);
  EXPECT_LT(spacetime_hermitian_defect(f), 1e-14);
  const auto back = spacetime_inverse(f);
  for (std::size_t k = 0; k < u.size(); ++k) EXPECT_NEAR(back[k], u[k], 1e-12);
}

TEST(SpaceTime, InverseRejectsComplexField) {
  const GridSpec g(kPi, 16);
  SpaceTimeField f(g, 16, 1.0);
  f.at(1, 2) = cplx{1.0, 0.0};
  EXPECT_GT(spacetime_hermitian_defect(f), 0.5);
  EXPECT_THROW(spacetime_inverse(f), IntegrityError);
}

TEST(SpaceTime, NormIsMonotoneInEveryExponent) {
  const GridSpec g(kPi, 32);
  const auto f = random_band(g, 32, 2.0, 8, 8, 5);
  double prev = 0.0;
  for (double b : {-0.5, 0.0, 0.25, 0.5, 0.75}) {
    const double v = xsb_norm(f, 0.0, 0.0, b);
    EXPECT_GT(v, prev);
    prev = v;
  }
  EXPECT_LT(xsb_norm(f, 0.0, 0.0, 0.5), xsb_norm(f, 0.0, 1.0, 0.5));
  EXPECT_LT(xsb_norm(f, 0.0, 1.0, 0.5), xsb_norm(f, 0.3, 1.0, 0.5));
  EXPECT_THROW(xsb_norm(f, -0.1, 0.0, 0.5), ConfigurationError);
}

TEST(SpaceTime, NormWeightsModulationOffCharacteristic) {
  // A single mode at (xi, tau) has ||.||_{X^{0,b}} = |c| <tau - xi^3>^b sqrt(dxi dtau) per mode.
  const GridSpec g(kPi, 16);
  SpaceTimeField f(g, 16, 2.0 * kPi);
  const long j = 2, l = 3;
  f.at(f.time_slot(l), g.slot(j)) = cplx{1.0, 0.0};
  f.at(f.time_slot(-l), g.slot(-j)) = cplx{1.0, 0.0};
  const double w = 1.0 + std::abs(l * f.dtau() - std::pow(j * g.dxi(), 3));
  EXPECT_NEAR(xsb_norm(f, 0.0, 0.0, 0.7), std::sqrt(2.0 * g.dxi() * f.dtau()) * std::pow(w, 0.7), 1e-13);
}

TEST(SpaceTime, BandLimitedProductMatchesConvolution) {
  // u v has coefficients (1/2pi) sum c_u(a) c_v(b - a) dxi dtau.
  const GridSpec g(kPi, 16);
  const std::size_t nt = 16;
  const double big_t = 2.0;
  const auto a = random_band(g, nt, big_t, 3, 3, 1);
  const auto b = random_band(g, nt, big_t, 3, 3, 2);
  EXPECT_TRUE(band_limited(a, 2));
  const SpaceTimeField* factors[] = {&a, &b};
  const auto p = spacetime_product(factors);
  const double w = g.dxi() * a.dtau() / (2.0 * kPi);
  double worst = 0.0, scale = 0.0;
  for (long l = -6; l <= 6; ++l)
    for (long j = -6; j <= 6; ++j) {
      cplx acc{0.0, 0.0};
      for (long l1 = -3; l1 <= 3; ++l1)
        for (long j1 = -3; j1 <= 3; ++j1) {
          if (std::abs(l - l1) > 3 || std::abs(j - j1) > 3) continue;
          acc += a.at(a.time_slot(l1), g.slot(j1)) * b.at(b.time_slot(l - l1), g.slot(j - j1));
        }
      acc *= w;
      scale = std::max(scale, std::abs(acc));
      worst = std::max(worst, std::abs(acc - p.at(p.time_slot(l), g.slot(j))));
    }
  EXPECT_LT(worst, 1e-12 * scale);
}

TEST(SpaceTime, BandLimitDetection) {
  const GridSpec g(kPi, 16);
  SpaceTimeField f(g, 16, 2.0);
  EXPECT_TRUE(band_limited(f, 5));
  f.at(f.time_slot(0), g.slot(5)) = cplx{1.0, 0.0};
  EXPECT_TRUE(band_limited(f, 1));
  EXPECT_FALSE(band_limited(f, 2));
}

TEST(SpaceTime, DerivativeIsMultiplier) {
  const GridSpec g(kPi, 32);
  const auto f = random_band(g, 16, 2.0, 5, 4, 9);
  const auto d = spacetime_dx(f);
  for (std::size_t m = 0; m < 16; ++m)
    for (std::size_t i = 0; i < g.size(); ++i)
      EXPECT_EQ(d.at(m, i), cplx(0.0, g.wavenumber(i)) * f.at(m, i));
}

TEST(SpaceTime, SnapshotAssemblyMatchesDirectTransform) {
  const GridSpec g(kPi, 32);
  const std::size_t nt = 16;
  const auto u = random_samples(g.size() * nt, 11);
  std::vector<SpectralField> snaps;
  std::vector<double> window(nt);
  std::vector<double> windowed(u.size());
  for (std::size_t m = 0; m < nt; ++m) {
    const std::vector<double> row(u.begin() + m * g.size(), u.begin() + (m + 1) * g.size());
    snaps.push_back(forward_transform(row, g));
    window[m] = m % 3 == 0 ? 0.0 : 0.5 + 0.01 * m;
    for (std::size_t n = 0; n < g.size(); ++n) windowed[m * g.size() + n] = window[m] * row[n];
  }
  const auto a = assemble_snapshots(snaps, window, nt, 3.0);
  const auto b = spacetime_forward(windowed, g, nt, 3.0);
  for (std::size_t k = 0; k < a.coeffs().size(); ++k) EXPECT_NEAR(std::abs(a.coeffs()[k] - b.coeffs()[k]), 0.0, 1e-13);
}
