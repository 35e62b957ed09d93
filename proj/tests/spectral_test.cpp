#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "gkdv/spectral.hpp"

using namespace gkdv;

namespace {

constexpr double kPi = std::numbers::pi;

// Direct O(N^2) evaluation of c_j = dx/sqrt(2 pi) sum_n u_n e^{-i xi_j x_n}.
std::vector<cplx> naive_coefficients(const std::vector<double>& u, const GridSpec& g) {
  std::vector<cplx> c(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    cplx acc{0.0, 0.0};
    for (std::size_t n = 0; n < g.size(); ++n) acc += u[n] * std::polar(1.0, -g.wavenumber(i) * g.x(n));
    c[i] = acc * g.dx() / std::sqrt(2.0 * kPi);
  }
  return c;
}

// Band-limited interpolant of `f` evaluated at arbitrary x by direct summation.
// The Nyquist term enters as a cosine so the value stays real.
double evaluate(const SpectralField& f, double x) {
  const GridSpec& g = f.grid();
  double acc = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double xi = g.wavenumber(i);
    if (i == g.nyquist_index()) {
      acc += (f[i] * std::cos(xi * x)).real();
    } else {
      acc += (f[i] * std::polar(1.0, xi * x)).real();
    }
  }
  return acc * g.dxi() / std::sqrt(2.0 * kPi);
}

std::vector<double> random_samples(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> d;
  std::vector<double> u(n);
  for (auto& v : u) v = d(rng);
  return u;
}

// Smooth random field occupying the lowest `band` modes.
SpectralField smooth_random(const GridSpec& g, long band, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> d;
  SpectralField f(g);
  for (long j = 0; j <= band; ++j) {
    const cplx c = j == 0 ? cplx{d(rng), 0.0} : cplx{d(rng), d(rng)};
    f[g.slot(j)] = c;
    f[g.slot(-j)] = std::conj(c);
  }
  return f;
}

double max_diff(const SpectralField& a, const SpectralField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST(GridSpec, RejectsBadSizes) {
  EXPECT_THROW(GridSpec(1.0, 8), ConfigurationError);
  EXPECT_THROW(GridSpec(1.0, 100), ConfigurationError);
  EXPECT_THROW(GridSpec(-1.0, 64), ConfigurationError);
  EXPECT_NO_THROW(GridSpec(1.0, 16));
}

TEST(GridSpec, WavenumbersSymmetricExceptNyquist) {
  const GridSpec g(3.0, 64);
  EXPECT_NEAR(g.dx() * 64, 6.0, 1e-14);
  const auto xi = g.wavenumbers();
  for (long j = 1; j < 32; ++j) EXPECT_EQ(xi[g.slot(j)], -xi[g.slot(-j)]);
  EXPECT_DOUBLE_EQ(xi[g.nyquist_index()], -32.0 * g.dxi());
}

TEST(Transform, MatchesDirectSum) {
  const GridSpec g(2.5, 32);
  const auto u = random_samples(32, 3);
  const auto f = forward_transform(u, g);
  const auto c = naive_coefficients(u, g);
  for (std::size_t i = 0; i < 32; ++i) EXPECT_NEAR(std::abs(f[i] - c[i]), 0.0, 1e-12);
}

TEST(Transform, ZeroInZeroOut) {
  const GridSpec g(kPi, 16);
  const auto f = forward_transform(std::vector<double>(16, 0.0), g);
  EXPECT_EQ(f.max_abs(), 0.0);
  for (double v : inverse_transform(SpectralField(g))) EXPECT_EQ(v, 0.0);
}

TEST(Transform, CosineHasTwoModes) {
  const GridSpec g(kPi, 32);
  std::vector<double> u(32);
  for (std::size_t n = 0; n < 32; ++n) u[n] = std::cos(g.x(n));
  const auto f = forward_transform(u, g);
  for (std::size_t i = 0; i < 32; ++i) {
    const long j = g.index(i);
    if (j == 1 || j == -1) {
      EXPECT_GT(std::abs(f[i]), 0.1);
    } else {
      EXPECT_LT(std::abs(f[i]), 1e-14);
    }
  }
}

TEST(Transform, PairOfModesGivesCosine) {
  // With this normalization a unit-amplitude cosine has c_{+-1} = sqrt(2 pi) / (2 dxi).
  const GridSpec g(kPi, 32);
  SpectralField f(g);
  const double c = std::sqrt(2.0 * kPi) / (2.0 * g.dxi());
  f[g.slot(1)] = c;
  f[g.slot(-1)] = c;
  const auto u = inverse_transform(f);
  for (std::size_t n = 0; n < 32; ++n) EXPECT_NEAR(u[n], std::cos(g.x(n)), 1e-14);
}

TEST(Transform, RoundTripUpTo16384) {
  for (std::size_t n = 16; n <= (1u << 14); n *= 4) {
    const GridSpec g(10.0, n);
    const auto u = random_samples(n, static_cast<unsigned>(n));
    const auto back = inverse_transform(forward_transform(u, g));
    double err = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      err = std::max(err, std::abs(back[i] - u[i]));
      scale = std::max(scale, std::abs(u[i]));
    }
    EXPECT_LE(err, 1e-12 * scale) << "n = " << n;
  }
}

TEST(Transform, RandomSamplesAreHermitian) {
  const GridSpec g(4.0, 128);
  const auto f = forward_transform(random_samples(128, 11), g);
  EXPECT_LT(hermitian_defect(f), 1e-14 * f.max_abs());
}

TEST(Transform, Parseval) {
  const GridSpec g(7.0, 256);
  const auto u = random_samples(256, 5);
  const auto f = forward_transform(u, g);
  const double phys = physical_l2_squared(u, g.dx());
  EXPECT_NEAR(inner_product(f, f), phys, 1e-12 * phys);
}

TEST(Transform, InverseRejectsNonHermitian) {
  const GridSpec g(kPi, 16);
  SpectralField f(g);
  f[g.slot(2)] = cplx{1.0, 0.0};
  EXPECT_THROW(inverse_transform(f), IntegrityError);
}

TEST(Transform, LengthMismatchRejected) {
  const GridSpec g(kPi, 16);
  EXPECT_THROW(forward_transform(std::vector<double>(15, 0.0), g), ConfigurationError);
}

TEST(Derivative, CosineToMinusSine) {
  const GridSpec g(kPi, 32);
  std::vector<double> u(32);
  for (std::size_t n = 0; n < 32; ++n) u[n] = std::cos(3.0 * g.x(n));
  const auto du = inverse_transform(spectral_derivative(forward_transform(u, g), 1));
  for (std::size_t n = 0; n < 32; ++n) EXPECT_NEAR(du[n], -3.0 * std::sin(3.0 * g.x(n)), 1e-13);
}

TEST(Derivative, ThirdOrderMultiplier) {
  const GridSpec g(2.0, 32);
  SpectralField f(g);
  f[g.slot(2)] = cplx{1.0, 0.0};
  const auto d3 = spectral_derivative(f, 3);
  const double xi = g.wavenumber(g.slot(2));
  EXPECT_NEAR(std::abs(d3[g.slot(2)] - cplx{0.0, -xi * xi * xi}), 0.0, 1e-12);
}

TEST(Derivative, CompositionMatchesSecondOrder) {
  // No Nyquist content: d/dx drops that mode while d^2/dx^2 keeps it.
  const GridSpec g(5.0, 128);
  const auto f = smooth_random(g, 63, 9);
  const auto twice = spectral_derivative(spectral_derivative(f, 1), 1);
  const auto once = spectral_derivative(f, 2);
  EXPECT_LE(max_diff(twice, once), 1e-12 * once.max_abs());
}

TEST(Derivative, OddOrdersZeroNyquistAndStayReal) {
  const GridSpec g(5.0, 64);
  const auto f = forward_transform(random_samples(64, 4), g);
  for (int order : {1, 3}) {
    const auto d = spectral_derivative(f, order);
    EXPECT_EQ(d[g.nyquist_index()], cplx(0.0, 0.0));
    EXPECT_LT(hermitian_defect(d), 1e-12 * d.max_abs());
  }
  EXPECT_THROW(spectral_derivative(f, 5), ConfigurationError);
}

TEST(Airy, IdentityUnitarityAndGroupLaw) {
  // Phase roundoff scales like eps * t * max|xi|^3, about 3e-13 here.
  const GridSpec g = GridSpec::standard(1024);
  const auto f = forward_transform(random_samples(1024, 21), g);
  EXPECT_EQ(max_diff(airy_propagator(f, 0.0), f), 0.0);
  EXPECT_NEAR(l2_norm(airy_propagator(f, 0.7)), l2_norm(f), 1e-13 * l2_norm(f));
  const auto composed = airy_propagator(airy_propagator(f, 0.3), 0.4);
  EXPECT_LE(max_diff(composed, airy_propagator(f, 0.7)), 1e-12 * f.max_abs());
}

TEST(Airy, CommutesWithDerivative) {
  const GridSpec g(6.0, 128);
  const auto f = smooth_random(g, 20, 8);
  const auto a = airy_propagator(spectral_derivative(f, 2), 0.25);
  const auto b = spectral_derivative(airy_propagator(f, 0.25), 2);
  EXPECT_LE(max_diff(a, b), 1e-12 * a.max_abs());
}

TEST(Power, PaddedSizeFollowsGeneralizedThreeHalvesRule) {
  EXPECT_EQ(padded_size(64, 2), 128u);  // ceil(3/2) = 2
  EXPECT_EQ(padded_size(64, 3), 128u);
  EXPECT_EQ(padded_size(64, 5), 192u);
  EXPECT_EQ(padded_size(64, 6), 256u);  // ceil(7/2) = 4
}

TEST(Power, SquareOfCosineIsDoubleAngle) {
  const GridSpec g(kPi, 32);
  std::vector<double> u(32);
  for (std::size_t n = 0; n < 32; ++n) u[n] = std::cos(g.x(n));
  const auto sq = inverse_transform(dealiased_power(forward_transform(u, g), 2));
  for (std::size_t n = 0; n < 32; ++n) EXPECT_NEAR(sq[n], 0.5 + 0.5 * std::cos(2.0 * g.x(n)), 1e-14);
}

TEST(Power, ZeroField) {
  const GridSpec g(kPi, 32);
  EXPECT_EQ(dealiased_power(SpectralField(g), 2).max_abs(), 0.0);
  EXPECT_THROW(dealiased_power(SpectralField(g), 1), ConfigurationError);
}

TEST(Power, FifthPowerAgreesWithFineGridQuadrature) {
  const GridSpec g(3.0, 64);
  auto f = smooth_random(g, 16, 17);  // occupies <= N/4 modes
  f *= 1.0 / f.max_abs();
  const auto p5 = dealiased_power(f, 5);

  // Sample the interpolant on a 4x finer grid, take u^5 pointwise and project
  // back with the trapezoid rule. u^5 has bandwidth 80 < 128, so the fine
  // quadrature is exact for every retained mode.
  const GridSpec fine(3.0, 256);
  std::vector<double> u5(256);
  for (std::size_t n = 0; n < 256; ++n) u5[n] = std::pow(evaluate(f, fine.x(n)), 5);
  const auto c = naive_coefficients(u5, fine);
  double err = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (i == g.nyquist_index()) continue;
    err = std::max(err, std::abs(p5[i] - c[fine.slot(g.index(i))]));
  }
  EXPECT_LE(err, 1e-11 * p5.max_abs());
}

TEST(Power, ProductMatchesPower) {
  const GridSpec g(3.0, 64);
  const auto f = smooth_random(g, 10, 2);
  EXPECT_LE(max_diff(dealiased_product(f, f, 3), dealiased_power(f, 4)), 1e-12 * dealiased_power(f, 4).max_abs());
}

TEST(Power, MemoryCapRaisesResourceError) {
  const GridSpec g(3.0, 1024);
  PowerOptions opt;
  opt.max_padded_points = 2048;
  try {
    dealiased_power(SpectralField(g), 5, opt);
    FAIL() << "expected ResourceError";
  } catch (const ResourceError& e) {
    EXPECT_EQ(e.required(), 3072u);
    EXPECT_NE(std::string(e.what()).find("3072"), std::string::npos);
  }
}

TEST(Integrals, IntegralOfPowerMatchesQuadrature) {
  const GridSpec g(3.0, 64);
  const auto f = smooth_random(g, 12, 6);
  const auto u = inverse_transform(f);
  // u^6 has bandwidth 72 > 32 so the N-point trapezoid aliases; use 4N points.
  const GridSpec fine(3.0, 256);
  double q = 0.0;
  for (std::size_t n = 0; n < 256; ++n) q += std::pow(evaluate(f, fine.x(n)), 6) * fine.dx();
  EXPECT_NEAR(integral_of_power(f, 6), q, 1e-11 * std::abs(q));
  (void)u;
}
