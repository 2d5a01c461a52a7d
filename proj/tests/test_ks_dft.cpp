#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hooke/errors.hpp"
#include "hooke/exact_atom.hpp"
#include "hooke/ks_dft.hpp"

using namespace hooke;
using namespace hooke::ks;
using numerics::Interpretation;
using numerics::RadialFunction;
using numerics::RadialGrid;

namespace {

constexpr double kPi = std::numbers::pi;

RadialFunction gaussian_density(const RadialGrid& g, double w) {
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) v[i] = 2.0 * std::pow(w / kPi, 1.5) * std::exp(-w * g.r(i) * g.r(i));
  return {g, v, Interpretation::kDensity};
}

// Published unpolarized PW92 form, written out independently.
double pw92_reference(double rs) {
  const double A = 0.031091, a1 = 0.21370, b1 = 7.5957, b2 = 3.5876, b3 = 1.6382, b4 = 0.49294;
  const double den = 2.0 * A * (b1 * std::sqrt(rs) + b2 * rs + b3 * std::pow(rs, 1.5) + b4 * rs * rs);
  return -2.0 * A * (1.0 + a1 * rs) * std::log(1.0 + 1.0 / den);
}

const ScfState& lda_half() {
  static const auto st = scf_solve({0.5, true}, RadialGrid::for_omega(0.5), LdaFunctional{});
  return st;
}

}  // namespace

TEST_CASE("Hartree potential of a Gaussian density") {
  const double w = 0.8;
  const auto g = RadialGrid::for_omega(w);
  const auto n = gaussian_density(g, w);
  const auto vh = hartree_potential(n);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double r = g.r(i);
    worst = std::max(worst, std::abs(vh[i] - 2.0 / r * std::erf(std::sqrt(w) * r)));
    if (i > 0) CHECK(vh[i] <= vh[i - 1]);
  }
  CHECK(worst < 1e-6);
  CHECK(g.r_max() * vh[g.size() - 1] == doctest::Approx(2.0).epsilon(1e-3));
  // Two electrons in the same Gaussian orbital: E_H = 2 J, J = sqrt(2w/pi).
  CHECK(hartree_energy(n) == doctest::Approx(2.0 * std::sqrt(2.0 * w / kPi)).epsilon(1e-8));
}

TEST_CASE("narrow density looks like a point charge") {
  const auto g = RadialGrid(10.0, 4000);
  const auto n = gaussian_density(g, 400.0);
  const auto vh = hartree_potential(n);
  for (std::size_t i = 800; i < g.size(); i += 400) CHECK(vh[i] * g.r(i) == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("local density functional") {
  LdaFunctional pw;
  LdaFunctional wig{CorrelationVariant::kWigner};
  const double n1 = 3.0 / (4.0 * kPi);  // r_s = 1
  CHECK(pw.eps_c(n1) == doctest::Approx(pw92_reference(1.0)).epsilon(1e-12));
  CHECK(pw.eps_c(n1) == doctest::Approx(-0.0598).epsilon(1e-3));
  for (double rs : {0.1, 0.5, 2.0, 5.0, 20.0}) CHECK(pw.eps_c_rs(rs) == doctest::Approx(pw92_reference(rs)).epsilon(1e-12));
  const double vx = -0.75 * std::cbrt(3.0 / kPi) * (4.0 / 3.0) * std::cbrt(n1);
  CHECK(std::abs(pw.v_x(n1) - vx) < 1e-10);
  CHECK(pw.eps_xc(0.0) == 0.0);
  CHECK(pw.v_xc(0.0) == 0.0);
  CHECK(std::abs(pw.eps_xc(1e-25)) < 1e-7);
  CHECK(wig.eps_c_rs(1.0) == doctest::Approx(-0.44 / 8.8));
  // v = d(n eps)/dn by central differences.
  for (const auto* f : {&pw, &wig})
    for (double n : {1e-4, 1e-2, 0.3, 5.0}) {
      const double h = 1e-5 * n;
      const double fd = ((n + h) * f->eps_xc(n + h) - (n - h) * f->eps_xc(n - h)) / (2.0 * h);
      CHECK(f->v_xc(n) == doctest::Approx(fd).epsilon(1e-7));
    }
  const auto g = RadialGrid(5.0, 100);
  std::vector<double> zero(g.size(), 0.0);
  const auto v = lda_vxc({g, zero, Interpretation::kDensity}, pw);
  for (double x : v.values) CHECK(x == 0.0);
  CHECK(pw.constants()["correlation"]["form"] == "pw92");
}

TEST_CASE("SCF without interaction is the bare oscillator") {
  for (double w : {0.3, 2.0}) {
    const exact::HookeProblem p{w, false};
    const auto st = scf_solve(p, RadialGrid::for_omega(w), LdaFunctional{});
    CHECK(std::abs(st.eigenvalue - 1.5 * w) < 1e-5 * w);
    CHECK(lda_total_energy(st, LdaFunctional{}, p) == doctest::Approx(3.0 * w).epsilon(1e-5));
    CHECK(lda_xc_record(st, LdaFunctional{}, p).E_xc == 0.0);
  }
}

TEST_CASE("LDA at omega 0.5") {
  const auto& st = lda_half();
  const exact::HookeProblem p{0.5, true};
  CHECK(st.residual < 1e-9);
  const double e = lda_total_energy(st, LdaFunctional{}, p);
  CHECK(std::abs(e - 2.0) / 2.0 < 0.06);
  CHECK(std::abs(e - lda_energy_audit(st, LdaFunctional{}, p)) < 1e-6);
  CHECK(numerics::integrate_radial(st.density, 2) * 4.0 * kPi == doctest::Approx(2.0).epsilon(1e-8));

  const auto psi = exact::assemble_exact_wavefunction(exact::solve_relative_motion(p));
  const auto n_exact = exact::exact_density(psi, st.density.grid);
  CHECK(st.density[0] < n_exact[0]);
  CHECK(lda_xc_record(st, LdaFunctional{}, p).E_xc < 0.0);
}

TEST_CASE("SCF fixed point does not depend on the starting density") {
  const exact::HookeProblem p{0.5, true};
  const auto g = RadialGrid::for_omega(0.5);
  ScfOptions a, b;
  a.tolerance = b.tolerance = 1e-10;
  b.initial_density = gaussian_density(g, 1.5);
  const auto s1 = scf_solve(p, g, LdaFunctional{}, a);
  const auto s2 = scf_solve(p, g, LdaFunctional{}, b);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) worst = std::max(worst, std::abs(s1.density[i] - s2.density[i]));
  CHECK(worst < 1e-8);
}

TEST_CASE("SCF iteration cap") {
  ScfOptions o;
  o.max_iterations = 2;
  o.anderson_depth = 0;
  try {
    scf_solve({0.05, true}, RadialGrid::for_omega(0.05), LdaFunctional{}, o);
    FAIL("expected non-convergence");
  } catch (const NonConvergenceError& e) {
    CHECK(e.residual_history().size() == 2);
  }
}

TEST_CASE("inversion of a non-interacting Gaussian gives no xc potential") {
  const double w = 1.0;
  const auto g = RadialGrid::for_omega(w);
  InversionOptions o;
  o.subtract_hartree = false;
  o.density_floor = 1e-10;
  const auto inv = invert_ks(gaussian_density(g, w), {w, true}, o);
  double worst = 0.0;
  for (std::size_t i = 0; i < inv.window_end; ++i) worst = std::max(worst, std::abs(inv.v_xc[i]));
  CHECK(worst < 1e-6);
  CHECK(inv.eigenvalue == doctest::Approx(1.5 * w).epsilon(1e-5));
  CHECK(inv.truncated);
}

TEST_CASE("inversion round trip of the LDA density") {
  const auto& st = lda_half();
  InversionOptions o;
  o.gauge = Gauge::kFixedEigenvalue;
  o.eigenvalue = st.raw_eigenvalue;
  o.stencil = Stencil::kThreePoint;
  o.density_floor = 1e-10;
  const auto inv = invert_ks(st.density, {0.5, true}, o);
  const auto vh = hartree_potential(st.density);
  double worst = 0.0;
  for (std::size_t i = 0; i < inv.window_end; ++i)
    worst = std::max(worst, std::abs(inv.v_xc[i] + vh[i] - st.potential_hxc[i]));
  CHECK(worst < 1e-5);

}

TEST_CASE("exact exchange-correlation energy") {
  for (double w : {0.1, 0.5, 2.0}) {
    const exact::HookeProblem p{w, true};
    const auto psi = exact::assemble_exact_wavefunction(exact::solve_relative_motion(p));
    const auto g = RadialGrid::for_omega(w);
    const auto n = exact::exact_density(psi, g);
    const auto rec = exact_exc(psi, n, invert_ks(n, p));
    CHECK(rec.E_xc < 0.0);
    CHECK(rec.indicator > 0.0);
    // v_xc -> -1/r, and the eigenvalue equals E(2) - E(1) = E - 3 w / 2.
    const auto inv = invert_ks(n, p);
    CHECK(inv.tail_coefficient < -0.9);
    CHECK(inv.tail_coefficient > -1.2);
    for (std::size_t i = inv.window_end / 2; i < inv.window_end; ++i) CHECK(std::abs(inv.v_xc[i] * g.r(i) + 1.0) < 0.2);
    CHECK(std::abs(inv.eigenvalue - (psi.total_energy - 1.5 * w)) < 0.05 * w);
    CHECK(std::isfinite(inv.v_xc[0]));
  }
  const exact::HookeProblem off{0.5, false};
  const auto psi = exact::assemble_exact_wavefunction(exact::solve_relative_motion(off));
  const auto g = RadialGrid::for_omega(0.5);
  const auto n = exact::exact_density(psi, g);
  CHECK(std::abs(exact_exc(psi, n, invert_ks(n, off)).E_xc) < 1e-6);
}

TEST_CASE("density percent error") {
  const auto g = RadialGrid::for_omega(1.0);
  const auto n = gaussian_density(g, 1.0);
  CHECK(density_percent_error(n, n).percent == 0.0);
  auto scaled = n.values;
  for (double& x : scaled) x *= 1.01;
  const auto e = density_percent_error({g, scaled, Interpretation::kDensity}, n);
  CHECK(e.percent == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(e.weighted_percent == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(density_percent_error(gaussian_density(RadialGrid(5.0, 100), 1.0), n), InvalidInputError);
}
