#include <doctest.h>

#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <random>

#include "hooke/errors.hpp"
#include "hooke/exact_atom.hpp"
#include "hooke/ks_dft.hpp"
#include "hooke/perturbation.hpp"
#include "oracles.hpp"

using namespace hooke;
using namespace hooke::pert;

namespace {

constexpr double kPi = std::numbers::pi;

const KsSpectrum& bare(double w) {
  static std::map<double, KsSpectrum> cache;
  auto it = cache.find(w);
  if (it == cache.end()) it = cache.emplace(w, ks_spectrum({w, true}, ZerothOrder::kBareOscillator, 4, 8)).first;
  return it->second;
}

}  // namespace

TEST_CASE("bare oscillator spectrum") {
  const double w = 0.7;
  const auto& s = bare(w);
  for (int l = 0; l <= s.l_max(); ++l)
    for (int n = 0; n <= s.n_max(); ++n) CHECK(std::abs(s.energy(n, l) - (2 * n + l + 1.5) * w) < 1e-5);
  CHECK(s.max_orthonormality_deviation() < 1e-7);
}

TEST_CASE("KS-LDA spectrum has no accidental degeneracies") {
  const auto s = ks_spectrum({0.5, true}, ZerothOrder::kLdaVxc, 4, 6);
  CHECK(s.max_orthonormality_deviation() < 1e-7);
  for (int l = 0; l <= 4; ++l)
    for (int n = 0; n <= 6; ++n)
      for (int l2 = l + 2; l2 <= 4; l2 += 2) {
        const int n2 = n - (l2 - l) / 2;
        if (n2 < 0) continue;
        CHECK(std::abs(s.energy(n, l) - s.energy(n2, l2)) > 1e-4);
      }
}

TEST_CASE("Coulomb radial integrals") {
  const double w = 0.5;
  const auto& s = bare(w);
  const auto c = coulomb_radial_integrals(s, 0, 0, 0);
  CHECK(c.A == doctest::Approx(std::sqrt(2.0 * w / kPi)).epsilon(1e-5));
  for (int l = 0; l <= 3; ++l)
    for (int n = 0; n <= 3; ++n) {
      const auto m = coulomb_radial_integrals(s, l, n, n);
      CHECK(m.B == doctest::Approx(2.0 * m.A).epsilon(1e-14));
    }
}

TEST_CASE("standard first-order energy") {
  for (double w : {0.01, 0.1, 0.5, 1.0, 10.0}) {
    const auto e = first_order_expansion(ks_spectrum({w, true}, ZerothOrder::kBareOscillator, 2, 4), {w, true});
    CHECK(std::abs(e.first_order_energy() - (3.0 * w + std::sqrt(2.0 * w / kPi))) < 1e-4 * std::max(1.0, w));
    CHECK(e.E2 <= 0.0);
  }
  const auto e = first_order_expansion(bare(0.5), {0.5, true});
  CHECK(e.first_order_energy() == doctest::Approx(2.06419).epsilon(1e-5));
  CHECK(energy_percent_error(e.first_order_energy(), 2.0) == doctest::Approx(3.21).epsilon(1e-3));
}

TEST_CASE("energy percent error") {
  CHECK(energy_percent_error(2.0, 2.0) == 0.0);
  CHECK(energy_percent_error(1.05 * 3.0, 3.0) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK_THROWS_AS(energy_percent_error(1.0, 0.0), InvalidInputError);
}

TEST_CASE("vanishing perturbation") {
  const exact::HookeProblem off{0.5, false};
  const auto s = ks_spectrum(off, ZerothOrder::kLdaVxc, 3, 5);
  const auto e = first_order_expansion(s, off);
  CHECK(e.E1 == 0.0);
  CHECK(e.E2 == 0.0);
  for (const auto& c : e.coefficients) CHECK(c.coefficient == 0.0);
  const auto st = perturbed_density_and_rdm(e, default_sector_grid(0.5, 120));
  const auto& u = s.orbital(0, 0);
  for (std::size_t i = 0; i < s.grid.size(); i += 37)
    CHECK(st.density[i] == doctest::Approx(2.0 * u[i] * u[i] / (4.0 * kPi * s.grid.r(i) * s.grid.r(i))).epsilon(1e-12));
  CHECK(std::abs(ent::linear_entropy(st.rdm)) < 1e-8);
}

TEST_CASE("selection rules: excluded configurations vanish") {
  const auto s = ks_spectrum({0.5, true}, ZerothOrder::kLdaVxc, 3, 4);
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> ln(0, 3), nn(0, 4);
  int tested = 0;
  while (tested < 200) {
    const int la = ln(rng), lb = ln(rng);
    std::uniform_int_distribution<int> ma(-la, la), mb(-lb, lb);
    const Orbital a{nn(rng), la, ma(rng)}, b{nn(rng), lb, mb(rng)};
    const bool allowed_coulomb = la == lb && a.m == -b.m;
    const bool single = (a.n == 0 && a.l == 0 && b.l == 0) || (b.n == 0 && b.l == 0 && a.l == 0);
    if (allowed_coulomb || single) continue;
    CHECK(std::abs(matrix_element(s, {a, b, PairSymmetry::kProduct})) < 1e-12);
    ++tested;
  }
  // Doubly excited pairs carry no one-body part.
  for (int n1 = 1; n1 <= 4; ++n1)
    for (int n2 = 1; n2 <= 4; ++n2) {
      const Orbital a{n1, 0, 0}, b{n2, 0, 0};
      const double full = matrix_element(s, {a, b, PairSymmetry::kProduct});
      CHECK(full == doctest::Approx(coulomb_radial_integral(s, 0, std::min(n1, n2), 0, std::max(n1, n2), 0)).epsilon(1e-14));
    }
}

TEST_CASE("selection rules: included configurations match angular quadrature") {
  const auto& s = bare(0.5);
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> ln(0, 2), nn(0, 3);
  int tested = 0;
  while (tested < 20) {
    const int l = ln(rng);
    std::uniform_int_distribution<int> md(-l, l);
    const int m = md(rng);
    const Orbital a{nn(rng), l, m}, b{nn(rng), l, -m};
    if (a.n == 0 && b.n == 0 && l == 0) continue;
    const double lib = matrix_element(s, {a, b, PairSymmetry::kProduct});
    const double ref = oracle::brute_force_element(s, a, b);
    CAPTURE(a.n);
    CAPTURE(b.n);
    CAPTURE(l);
    CAPTURE(m);
    CHECK(std::abs(lib - ref) < 1e-8);
    ++tested;
  }
  // Mismatched m is excluded by the quadrature as well.
  CHECK(std::abs(oracle::brute_force_element(s, {1, 1, 1}, {1, 1, 1})) < 1e-12);
}

TEST_CASE("second-order energy against exact asymptotics") {
  auto correlation = [](double w) {
    const auto psi = exact::assemble_exact_wavefunction(exact::solve_relative_motion({w, true}), {.l_max = 0, .l_cap = 0});
    return psi.total_energy - 3.0 * w - std::sqrt(2.0 * w / kPi);
  };
  // E - E0 - E1 = E2 + c / sqrt(w) + ...
  const double e2_exact = 2.0 * correlation(100.0) - correlation(25.0);
  const double w = 100.0;
  const auto e = first_order_expansion(ks_spectrum({w, true}, ZerothOrder::kBareOscillator, 6, 20), {w, true});
  CHECK(std::abs(e.E2 - e2_exact) < 2e-3);
}

TEST_CASE("basis cutoff convergence") {
  const double w = 1.0;
  const auto e10 = first_order_expansion(ks_spectrum({w, true}, ZerothOrder::kBareOscillator, 6, 10), {w, true});
  const auto e20 = first_order_expansion(ks_spectrum({w, true}, ZerothOrder::kBareOscillator, 6, 20), {w, true});
  CHECK(std::abs(e20.E2 - e10.E2) < 2e-3);
  CHECK(e20.E2 <= e10.E2);
  CHECK(e20.tail_share < 1e-2);
}

TEST_CASE("perturbed density approaches the exact one at strong confinement") {
  double prev = 1e300;
  for (double w : {10.0, 40.0}) {
    const auto s = ks_spectrum({w, true}, ZerothOrder::kBareOscillator, 4, 12);
    const auto e = first_order_expansion(s, {w, true});
    const auto st = perturbed_density_and_rdm(e, default_sector_grid(w, 160));
    const auto psi = exact::assemble_exact_wavefunction(exact::solve_relative_motion({w, true}), {.l_max = 0, .l_cap = 0});
    const auto n = exact::exact_density(psi, s.grid);
    const double err = ks::density_percent_error(st.density, n).percent;
    CHECK(err < 1.0);
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("mismatched spectrum is rejected") {
  CHECK_THROWS_AS(first_order_expansion(bare(0.5), {0.6, true}), InvalidInputError);
  CHECK_THROWS_AS(matrix_element(bare(0.5), {{0, 0, 0}, {0, 0, 0}, PairSymmetry::kProduct}), InvalidInputError);
  CHECK_THROWS_AS(matrix_element(bare(0.5), {{0, 9, 0}, {0, 0, 0}, PairSymmetry::kProduct}), InvalidInputError);
}
