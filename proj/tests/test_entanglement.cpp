#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hooke/entanglement.hpp"
#include "hooke/errors.hpp"
#include "hooke/exact_atom.hpp"
#include "oracles.hpp"

using namespace hooke;
using namespace hooke::ent;

namespace {

// Reduced functions u = sqrt(4 pi) r eta of an orthonormal basis.
std::vector<std::vector<double>> reduced_basis(const numerics::OrthonormalBasis& b) {
  std::vector<std::vector<double>> out;
  const double c = std::sqrt(4.0 * std::numbers::pi);
  for (std::size_t a = 0; a < b.order(); ++a) {
    std::vector<double> u(b.grid().size());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = c * b.grid().r(i) * b.function(a)[i];
    out.push_back(std::move(u));
  }
  return out;
}

PairExpansion schmidt_state(const numerics::OrthonormalBasis& b, std::vector<std::pair<int, std::vector<double>>> spec) {
  PairExpansion psi{b.grid(), {}};
  for (auto& [l, weights] : spec) {
    PairSector sec;
    sec.l = l;
    sec.reduced = reduced_basis(b);
    sec.coefficients = Eigen::MatrixXd::Zero(b.order(), b.order());
    for (std::size_t a = 0; a < weights.size(); ++a) sec.coefficients(a, a) = (2.0 * l + 1.0) * std::sqrt(weights[a]);
    psi.sectors.push_back(std::move(sec));
  }
  psi.normalize();
  return psi;
}

const exact::ExactWavefunction& exact_half() {
  static const auto psi = exact::assemble_exact_wavefunction(exact::solve_relative_motion({0.5, true}));
  return psi;
}

}  // namespace

TEST_CASE("product state has no entanglement") {
  const auto g = numerics::RadialGrid(12.0, 300);
  const auto b = numerics::build_orthonormal_basis(0.8, 2, g);
  const auto psi = schmidt_state(b, {{0, {1.0}}});
  const auto rdm = build_rdm(psi.to_sectors(g));
  CHECK(rdm.sectors.size() == 1);
  CHECK(rdm.trace() == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(std::abs(linear_entropy(rdm)) < 1e-8);
  const auto vn = von_neumann_entropy(rdm);
  CHECK(vn.entropy_bits < 1e-6);
  CHECK(vn.spectrum.eigenvalues[0][0] == doctest::Approx(1.0).epsilon(1e-8));
  const auto by_basis = von_neumann_by_basis(rdm, 0, b);
  CHECK(by_basis.eigenvalues[0][0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(by_basis.eigenvalues[0][1]) < 1e-10);
}

TEST_CASE("two-term Schmidt state") {
  const auto g = numerics::RadialGrid(12.0, 300);
  const auto b = numerics::build_orthonormal_basis(0.8, 3, g);
  const auto psi = schmidt_state(b, {{0, {0.9, 0.1}}});
  const double S_exact = -0.9 * std::log2(0.9) - 0.1 * std::log2(0.1);

  const auto cs = coefficient_spectrum(psi);
  CHECK(cs.eigenvalues[0][0] == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(cs.eigenvalues[0][1] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(cs.linear_entropy() == doctest::Approx(0.18).epsilon(1e-12));
  CHECK(cs.entropy_bits() == doctest::Approx(S_exact).epsilon(1e-12));
  CHECK(S_exact == doctest::Approx(0.46900).epsilon(1e-4));

  const auto rdm = build_rdm(psi.to_sectors(g));
  CHECK(linear_entropy(rdm) == doctest::Approx(0.18).epsilon(1e-7));
  const auto vn = von_neumann_entropy(rdm);
  CHECK(vn.entropy_bits == doctest::Approx(S_exact).epsilon(1e-7));
  const auto bb = von_neumann_by_basis(rdm, 0, b);
  CHECK(std::abs(bb.eigenvalues[0][0] - 0.9) < 1e-10);
  CHECK(std::abs(bb.eigenvalues[0][1] - 0.1) < 1e-10);
}

TEST_CASE("Schmidt state spread over angular sectors") {
  const auto g = numerics::RadialGrid(12.0, 300);
  const auto b = numerics::build_orthonormal_basis(0.8, 3, g);
  // 0.7 + 3 * 0.1 = 1 with the l = 1 level threefold degenerate.
  const auto psi = schmidt_state(b, {{0, {0.7}}, {1, {0.1}}});
  const double purity = 0.49 + 3 * 0.01;
  const auto rdm = build_rdm(psi.to_sectors(g));
  CHECK(linear_entropy(rdm) == doctest::Approx(1.0 - purity).epsilon(1e-7));
  CHECK(coefficient_spectrum(psi).linear_entropy() == doctest::Approx(1.0 - purity).epsilon(1e-12));
  const double S = -0.7 * std::log2(0.7) - 3 * 0.1 * std::log2(0.1);
  CHECK(von_neumann_entropy(rdm).entropy_bits == doctest::Approx(S).epsilon(1e-7));
}

TEST_CASE("unnormalized state is rejected") {
  const auto g = numerics::RadialGrid(12.0, 300);
  const auto b = numerics::build_orthonormal_basis(0.8, 1, g);
  auto s = schmidt_state(b, {{0, {1.0}}}).to_sectors(g);
  s.scale(1.1);
  CHECK_THROWS_AS(build_rdm(s), NormalizationError);
}

TEST_CASE("eigenvalue clipping") {
  const auto ev = clip_eigenvalues({0.2, -1e-8, 0.8});
  CHECK(ev == std::vector<double>{0.8, 0.2, 0.0});
  CHECK_THROWS_AS(clip_eigenvalues({0.5, -1e-5}), NonPhysicalKernelError);
}

TEST_CASE("exact state at omega 0.5") {
  const auto& psi = exact_half();
  const auto rdm = build_rdm(psi.sectors);
  CHECK(std::abs(rdm.trace() - 1.0) < 1e-6);
  const double L = linear_entropy(rdm);
  const auto vn = von_neumann_entropy(rdm);
  CHECK(std::abs(L - vn.spectrum.linear_entropy()) < 1e-6);
  CHECK(L > 0.0);
  const double ratio = vn.entropy_bits / L;
  CHECK(ratio > 1.0);
  CHECK(ratio < 10.0);

  const auto basis = numerics::build_orthonormal_basis(0.5, 20, rdm.grid);
  const auto bb = von_neumann_by_basis(rdm, 0, basis);
  for (std::size_t k = 0; k < 5; ++k)
    CHECK(std::abs(bb.eigenvalues[0][k] - vn.spectrum.eigenvalues[0][k]) < 1e-5);

  const auto brute = oracle::brute_force_entanglement(psi);
  CHECK(std::abs(brute.L - L) < 2e-3);
  CHECK(std::abs(brute.S - vn.entropy_bits) < 2e-3);
}

TEST_CASE("information entropy of a Gaussian density") {
  const double w = std::numbers::pi;
  const auto g = numerics::RadialGrid::for_omega(w);
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) v[i] = 2.0 * std::pow(w / std::numbers::pi, 1.5) * std::exp(-w * g.r(i) * g.r(i));
  const numerics::RadialFunction n{g, v, numerics::Interpretation::kDensity};
  const double sn = information_entropy(n);
  CHECK(sn == doctest::Approx(3.0 - 2.0 * std::log(2.0)).epsilon(1e-8));
  CHECK(diagonal_approx_S(n, 2) == doctest::Approx(1.61371 / (2.0 * std::log(2.0)) + 1.0).epsilon(1e-5));
  CHECK(diagonal_approx_S(n, 2) == doctest::Approx(2.16404).epsilon(1e-5));
  CHECK(diagonal_approx_S(0.0, 2) == doctest::Approx(1.0));

  // Halving the density: S_n -> S_n / 2 + ln 2.
  std::vector<double> half(v);
  for (double& x : half) x *= 0.5;
  CHECK(information_entropy({g, half, numerics::Interpretation::kDensity}) == doctest::Approx(0.5 * sn + std::log(2.0)).epsilon(1e-8));
  CHECK_THROWS_AS(diagonal_approx_S(1.0, 0), InvalidInputError);
}
