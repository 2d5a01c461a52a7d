#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "hooke/errors.hpp"
#include "hooke/exact_atom.hpp"

using namespace hooke;
using namespace hooke::exact;

namespace {

// Lowest eigenvalue of -u'' + (w^2 s^2/4 + 1/s) u by three-point differences, Richardson on h and h/2.
double fd_relative_energy(double w, bool interacting) {
  auto lowest = [&](std::size_t n) {
    const double s_max = 12.0 / std::sqrt(w) + 2.0 * std::cbrt(2.0 / (w * w));
    const double h = s_max / static_cast<double>(n + 1);
    Eigen::VectorXd d(n), e(n - 1);
    for (std::size_t k = 0; k < n; ++k) {
      const double s = (k + 1) * h;
      d[k] = 2.0 / (h * h) + w * w * s * s / 4.0 + (interacting ? 1.0 / s : 0.0);
    }
    e.setConstant(-1.0 / (h * h));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(d, e, Eigen::EigenvaluesOnly);
    return es.eigenvalues()[0];
  };
  const double a = lowest(3000), b = lowest(6001);
  return (4.0 * b - a) / 3.0;
}

}  // namespace

TEST_CASE("magic omega 0.5: closed form, E = 2") {
  const auto rel = solve_relative_motion({0.5, true});
  CHECK(rel.closed_form);
  CHECK(rel.polynomial_degree == 1);
  CHECK(rel.nodes == 0);
  CHECK(rel.epsilon_rel == doctest::Approx(1.25).epsilon(1e-12));
  CHECK(std::abs(shoot_relative_energy({0.5, true}) - 1.25) < 1e-8);
  CHECK(std::abs(fd_relative_energy(0.5, true) - 1.25) < 1e-5);
  // u ~ s (1 + s/2) exp(-s^2/8)
  const double s1 = rel.grid.r(100), s2 = rel.grid.r(700);
  auto model = [](double s) { return s * (1.0 + 0.5 * s) * std::exp(-s * s / 8.0); };
  CHECK(rel.u_rel[100] / rel.u_rel[700] == doctest::Approx(model(s1) / model(s2)).epsilon(1e-9));
  const auto psi = assemble_exact_wavefunction(rel);
  CHECK(std::abs(psi.total_energy - 2.0) < 1e-6);
}

TEST_CASE("magic omega values and termination") {
  CHECK(magic_omega(1) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(magic_omega(2) == doctest::Approx(0.1).epsilon(1e-10));
  CHECK(terminating_degree(0.5) == 1);
  CHECK(terminating_degree(0.1) == 2);
  CHECK_FALSE(terminating_degree(0.3).has_value());
  for (int n = 1; n <= 4; ++n) {
    const double w = magic_omega(n);
    const double shot = shoot_relative_energy({w, true});
    CHECK(std::abs(shot - w * (n + 1.5)) < 1e-8 * std::max(1.0, w * (n + 1.5)) + 1e-10);
  }
}

TEST_CASE("general omega: shooting agrees with grid diagonalization") {
  for (double w : {0.1, 0.3, 1.0, 4.0}) {
    CAPTURE(w);
    const auto rel = solve_relative_motion({w, true});
    CHECK(rel.nodes == 0);
    CHECK(std::abs(rel.epsilon_rel - fd_relative_energy(w, true)) < 2e-5 * rel.epsilon_rel);
    double norm = 0.0;
    for (double u : rel.u_rel) norm += u * u * rel.grid.spacing();
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("interaction disabled reduces to the oscillator") {
  for (double w : {0.2, 1.0, 1000.0}) {
    CAPTURE(w);
    const auto rel = solve_relative_motion({w, false});
    CHECK(std::abs(rel.epsilon_rel - 1.5 * w) < 1e-6 * w);
    const auto psi = assemble_exact_wavefunction(rel);
    CHECK(psi.total_energy == doctest::Approx(3.0 * w).epsilon(1e-10));
    CHECK(interaction_ratio(psi) == 0.0);
    const auto parts = exact_energy_parts(psi);
    CHECK(std::abs(parts.kinetic - parts.external) < 1e-6 * parts.total());
  }
  const auto psi = assemble_exact_wavefunction(solve_relative_motion({0.7, false}));
  const auto sn = psi.sectors.sector_norms();
  CHECK(sn[0] == doctest::Approx(1.0).epsilon(1e-6));
  for (std::size_t l = 1; l < sn.size(); ++l) CHECK(sn[l] < 1e-10);
  const auto g = numerics::RadialGrid::for_omega(0.7);
  const auto n = exact_density(psi, g);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double r = g.r(i);
    worst = std::max(worst, std::abs(n[i] - 2.0 * std::pow(0.7 / std::numbers::pi, 1.5) * std::exp(-0.7 * r * r)));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("exact wavefunction at omega 0.5: normalization, density and Q") {
  const auto psi = assemble_exact_wavefunction(solve_relative_motion({0.5, true}));
  CHECK(std::abs(psi.sectors.norm() - 1.0) < 1e-6);
  CHECK_FALSE(psi.truncation_deficit.has_value());
  for (const auto& f : psi.sectors.sectors) CHECK((f - f.transpose()).cwiseAbs().maxCoeff() == 0.0);

  const auto g = numerics::RadialGrid::for_omega(0.5);
  const auto n = exact_density(psi, g);
  CHECK(numerics::integrate_radial(n, 2) * 4.0 * std::numbers::pi == doctest::Approx(2.0).epsilon(1e-6));
  std::size_t peak = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(n[i] >= 0.0);
    if (n[i] > n[peak]) peak = i;
  }
  for (std::size_t i = peak + 1; i < g.size(); ++i) CHECK(n[i] <= n[i - 1]);

  const auto parts = exact_energy_parts(psi);
  CHECK(parts.total() == doctest::Approx(2.0).epsilon(1e-6));
  const double q = expectation_T_plus_Vee(psi.sectors);
  CHECK(std::abs(q - (psi.total_energy - parts.external)) < 1e-5);
  // Virial theorem for the interacting system: 2T = 2 V_ext - V_ee.
  CHECK(std::abs(2.0 * parts.kinetic - 2.0 * parts.external + parts.coulomb) < 1e-6);

  auto scaled = psi.sectors;
  scaled.scale(-1.0);
  CHECK(expectation_T_plus_Vee(scaled) == doctest::Approx(q).epsilon(1e-14));
}

TEST_CASE("Coulomb multipole sum of a Gaussian product") {
  const auto psi = assemble_exact_wavefunction(solve_relative_motion({1.0, false}));
  const double q = sector_kinetic(psi.sectors) + sector_coulomb(psi.sectors);
  CHECK(std::abs(q - (1.5 + std::sqrt(2.0 / std::numbers::pi))) < 1e-4);
}

TEST_CASE("interaction ratio decreases with omega") {
  double prev = 1e300;
  for (double w : {0.001, 0.01, 0.1, 0.5, 2.0, 10.0}) {
    const double r = interaction_ratio(assemble_exact_wavefunction(solve_relative_motion({w, true}), {.l_max = 0, .l_cap = 0}));
    CHECK(r < prev);
    prev = r;
  }
  const double mid = interaction_ratio(assemble_exact_wavefunction(solve_relative_motion({0.5, true})));
  CHECK(mid > 0.1);
  CHECK(mid < 1.5);
}

TEST_CASE("invalid input") {
  CHECK_THROWS_AS(solve_relative_motion({-1.0, true}), InvalidInputError);
  CHECK_THROWS_AS(solve_relative_motion({0.0, true}), InvalidInputError);
  CHECK_THROWS_AS(magic_omega(0), InvalidInputError);
}
