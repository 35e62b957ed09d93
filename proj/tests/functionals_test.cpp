#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "gkdv/energy.hpp"
#include "gkdv/functionals.hpp"
#include "gkdv/initial_data.hpp"
#include "gkdv/solver.hpp"

using namespace gkdv;

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

TEST(Mass, ZeroAndCosine) {
  const GridSpec g(kPi, 32);
  EXPECT_EQ(mass(SpectralField(g)), 0.0);
  std::vector<double> u(32);
  for (std::size_t n = 0; n < 32; ++n) u[n] = std::cos(g.x(n));
  EXPECT_NEAR(mass(forward_transform(u, g)), kPi, 1e-13);
}

TEST(Mass, QuarticSolitonClosedForm) {
  // u^2 = sqrt(15 c) sech(2 sqrt(c) y), and int sech = pi / (2 sqrt(c)).
  // Faster (narrower) solitons need a finer grid than this one.
  const double closed = 0.5 * kPi * std::sqrt(15.0);
  const GridSpec g = GridSpec::standard(1024);
  for (double c : {0.25, 0.5, 1.0}) EXPECT_NEAR(mass(soliton_exact(4, c, 0.0, 0.0, g)), closed, 1e-8);
}

TEST(Energy, ZeroField) {
  const GridSpec g(kPi, 32);
  EXPECT_EQ(energy(SpectralField(g), 4, -1), 0.0);
}

TEST(Energy, DefocusingDominatesGradient) {
  const GridSpec g = GridSpec::standard(512);
  const auto u = random_analytic_data(g, 4, 0.8, 1.5);
  const double grad = inner_product(spectral_derivative(u, 1), spectral_derivative(u, 1));
  EXPECT_GT(grad, 0.0);
  EXPECT_GE(energy(u, 4, -1), grad);
  EXPECT_LE(energy(u, 4, +1), grad);
}

TEST(ModifiedEnergy, SigmaZeroIsMassPlusEnergy) {
  const GridSpec g = GridSpec::standard(512);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto u = random_analytic_data(g, seed, 0.7, 1.2);
    const double me = mass(u) + energy(u, 4, -1);
    EXPECT_NEAR(modified_energy(u, 0.0, 4, -1), me, 1e-12 * me);
  }
}

TEST(ModifiedEnergy, DefocusingLowerBound) {
  const GridSpec g = GridSpec::standard(512);
  const auto u = random_analytic_data(g, 7, 0.5, 1.5);
  for (double sigma : {0.1, 0.4, 0.7}) {
    const double e = modified_energy(u, sigma, 4, -1);
    EXPECT_GE(e, quadratic_energy(u, sigma));
    const double gn = gevrey_norm(u, {sigma, 1.0});
    EXPECT_GE(e, 0.5 * gn * gn);
  }
}

TEST(ModifiedEnergy, PowerTermScalesWithAmplitude) {
  // E_sigma(a u) - Q(a u) = a^{k+2} (E_sigma(u) - Q(u)).
  const GridSpec g = GridSpec::standard(512);
  const auto base = random_analytic_data(g, 5, 1.0, 1.5);
  std::vector<double> amps, gaps;
  for (double a : {0.05, 0.1, 0.2, 0.4}) {
    const auto u = a * base;
    amps.push_back(a);
    gaps.push_back(modified_energy(u, 0.5, 4, -1) - quadratic_energy(u, 0.5));
  }
  EXPECT_NEAR(loglog_fit(amps, gaps).first, 6.0, 1e-6);
}

TEST(ModifiedEnergy, RejectsSigmaBeyondRadius) {
  const GridSpec g = GridSpec::standard(2048);
  EXPECT_THROW(modified_energy(sech_data(g), 2.0, 4, -1), AnalyticityExceeded);
}

TEST(Commutator, VanishesAtSigmaZero) {
  const GridSpec g = GridSpec::standard(512);
  const auto u = random_analytic_data(g, 3, 0.5, 1.5);
  EXPECT_EQ(commutator_remainder(u, 0.0, 4, -1).max_abs(), 0.0);
  EXPECT_EQ(modified_energy_rate(u, 0.0, 4, -1), 0.0);
}

TEST(Commutator, SingleModeHasNoMean) {
  const GridSpec g(kPi, 64);
  std::vector<double> u(64);
  for (std::size_t n = 0; n < 64; ++n) u[n] = 0.5 * std::cos(2.0 * g.x(n));
  const auto f = commutator_remainder(forward_transform(u, g), 0.3, 4, -1);
  EXPECT_EQ(f[0], cplx(0.0, 0.0));
  EXPECT_GT(f.max_abs(), 0.0);
}

TEST(Commutator, VanishesLinearlyInSigma) {
  const GridSpec g = GridSpec::standard(1024);
  const auto u = random_analytic_data(g, 11, 0.5, 1.5);
  std::vector<double> sigmas, norms;
  for (double s : log_spaced_sigmas(0.05, 6, 3.0)) {
    sigmas.push_back(s);
    norms.push_back(l2_norm(commutator_remainder(u, s, 4, -1)));
  }
  EXPECT_GE(loglog_fit(sigmas, norms).first, 0.9);
}

TEST(Commutator, RateMatchesTimeDerivativeOfModifiedEnergy) {
  // Central difference of E_sigma along the discrete flow; the RK4 and
  // difference errors are far below the rate itself.
  SolverConfig cfg;
  cfg.k = 4;
  cfg.mu = -1;
  cfg.grid = GridSpec::standard(512);
  cfg.dt = 1e-4;
  const double sigma = 0.5;
  const auto u0 = random_analytic_data(cfg.grid, 2, 1.0, 1.5);
  const Stepper fwd(cfg, cfg.dt), bwd(cfg, -cfg.dt);
  const SimulationState s0{0.0, u0, 0};
  const auto plus = fwd.advance(s0);
  const auto minus = bwd.advance(s0);
  const double fd = (modified_energy(plus.field, sigma, 4, -1) - modified_energy(minus.field, sigma, 4, -1)) /
                    (2.0 * cfg.dt);
  const double rate = modified_energy_rate(u0, sigma, 4, -1);
  EXPECT_GT(std::abs(rate), 1e-6);
  EXPECT_NEAR(fd, rate, 1e-4 * std::abs(rate));
}

TEST(GagliardoNirenberg, FittedConstantBelowSobolevBound) {
  // For k = 4, mu = -1: E_sigma - Q = (1/15) int U^6 <= (1/15) |U|_inf^4 |U|_2^2
  // and |U|_inf^2 <= |U|_2 |U_x|_2 <= Q / 2, so C <= 1/60.
  const GridSpec g = GridSpec::standard(512);
  double c_fit = 0.0;
  std::vector<std::pair<double, double>> samples;
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    const auto u = random_analytic_data(g, seed, 0.8, 1.5);
    const double q = quadratic_energy(u, 0.5);
    const double e = modified_energy(u, 0.5, 4, -1);
    samples.emplace_back(q, e);
    c_fit = std::max(c_fit, (e - q) / std::pow(q, 3.0));
  }
  EXPECT_GT(c_fit, 0.0);
  EXPECT_LE(c_fit, 1.0 / 60.0);
  for (const auto& [q, e] : samples) EXPECT_LE(e, q + c_fit * std::pow(q, 3.0) * (1.0 + 1e-12));
}
