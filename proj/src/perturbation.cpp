#include "hooke/perturbation.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "hooke/errors.hpp"

namespace hooke::pert {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

bool is_ground(const Orbital& o) { return o.n == 0 && o.l == 0 && o.m == 0; }

void check_orbital(const KsSpectrum& s, const Orbital& o) {
  if (o.l < 0 || o.l > s.l_max() || o.n < 0 || o.n > s.n_max() || std::abs(o.m) > o.l)
    throw InvalidInputError("orbital outside the spectrum");
}

// <phi_a(1) phi_b(2) | 1/r12 - w(1) - w(2) | phi_00 phi_00>.
double ordered_element(const KsSpectrum& s, const Orbital& a, const Orbital& b) {
  double v = 0.0;
  // Angular factor of the multipole sum: only L = l_a = l_b, m_a = -m_b survives.
  if (s.interacting && a.l == b.l && a.m == -b.m) {
    const double sign = (a.m % 2 == 0) ? 1.0 : -1.0;
    // Canonical order keeps I(a, b) and I(b, a) bitwise identical.
    const int n_lo = std::min(a.n, b.n), n_hi = std::max(a.n, b.n);
    v += sign * coulomb_radial_integral(s, a.l, n_lo, a.l, n_hi, b.l) / (2.0 * a.l + 1.0);
  }
  if (is_ground(b) && a.l == 0 && a.m == 0) v -= one_body_element(s, a.n);
  if (is_ground(a) && b.l == 0 && b.m == 0) v -= one_body_element(s, b.n);
  return v;
}

}  // namespace

const char* to_string(ZerothOrder z) {
  switch (z) {
    case ZerothOrder::kExactVxc:
      return "ks-exact";
    case ZerothOrder::kLdaVxc:
      return "ks-lda";
    case ZerothOrder::kBareOscillator:
      return "standard";
  }
  return "unknown";
}

double KsSpectrum::max_orthonormality_deviation() const {
  const auto wts = numerics::radial_weights(grid);
  double worst = 0.0;
  for (const auto& set : reduced)
    for (std::size_t a = 0; a < set.size(); ++a)
      for (std::size_t b = a; b < set.size(); ++b) {
        double s = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) s += wts[i] * set[a][i] * set[b][i];
        worst = std::max(worst, std::abs(s - (a == b ? 1.0 : 0.0)));
      }
  return worst;
}

KsSpectrum ks_spectrum_from_potential(const exact::HookeProblem& problem, const numerics::RadialGrid& grid,
                                      std::vector<double> w, ZerothOrder source, int l_max, int n_max) {
  problem.validate();
  if (l_max < 0 || n_max < 0) throw InvalidInputError("ks_spectrum: negative cutoff");
  if (w.size() != grid.size()) throw InvalidInputError("ks_spectrum: potential size mismatch");
  KsSpectrum s{grid, source, problem.omega, problem.interacting, std::move(w), {}, {}};
  const double om = problem.omega;
  std::vector<double> v(grid.size());
  for (int l = 0; l <= l_max; ++l) {
    const double cf = 0.5 * l * (l + 1.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double r = grid.r(i);
      v[i] = 0.5 * om * om * r * r + s.w[i] + cf / (r * r);
    }
    auto st = numerics::radial_eigenstates(grid, v, static_cast<std::size_t>(n_max) + 1);
    s.energies.push_back(std::move(st.energies));
    s.reduced.push_back(std::move(st.reduced));
  }
  return s;
}

KsSpectrum ks_spectrum(const exact::HookeProblem& problem, ZerothOrder source, int l_max, int n_max,
                       const SpectrumOptions& opt) {
  problem.validate();
  const auto grid = opt.grid ? *opt.grid : numerics::RadialGrid::for_omega(problem.omega);
  std::vector<double> w(grid.size(), 0.0);
  if (problem.interacting && source == ZerothOrder::kLdaVxc) {
    const auto st = ks::scf_solve(problem, grid, opt.functional, opt.scf);
    const auto vh = ks::hartree_potential(st.density);
    const auto vxc = ks::lda_vxc(st.density, opt.functional);
    for (std::size_t i = 0; i < grid.size(); ++i) w[i] = vh[i] + vxc[i];
  } else if (problem.interacting && source == ZerothOrder::kExactVxc) {
    const auto rel = exact::solve_relative_motion(problem);
    const auto n = relcom_density(RelComState{rel.profile(), 0.5 * problem.omega}, grid);
    const auto inv = ks::invert_ks(n, problem);
    const auto vh = ks::hartree_potential(n);
    for (std::size_t i = 0; i < grid.size(); ++i) w[i] = vh[i] + inv.v_xc[i];
  }
  return ks_spectrum_from_potential(problem, grid, std::move(w), source, l_max, n_max);
}

double coulomb_radial_integral(const KsSpectrum& s, int L, int na, int la, int nb, int lb) {
  if (L < 0) throw InvalidInputError("coulomb_radial_integral: negative multipole");
  const auto& g = s.grid;
  const std::size_t m = g.size();
  const double h = g.spacing();
  const auto& u0 = s.orbital(0, 0);
  const auto& ua = s.orbital(na, la);
  const auto& ub = s.orbital(nb, lb);
  // Lengths in oscillator units keep r^L and r^-(L+1) well scaled.
  const double k = std::sqrt(s.omega);
  std::vector<double> inner(m + 1, 0.0), outer(m + 1, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const double x = k * g.r(i);
    const double rho = u0[i] * ua[i];
    inner[i + 1] = rho * std::pow(x, L);
    outer[i + 1] = rho * std::pow(x, -L - 1);
  }
  const auto ci = numerics::cumulative_integral(inner, h);
  const auto co = numerics::cumulative_integral(outer, h);
  std::vector<double> f(m + 1, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const double x = k * g.r(i);
    const double y = ci[i + 1] * std::pow(x, -L - 1) + (co.back() - co[i + 1]) * std::pow(x, L);
    f[i + 1] = k * y * u0[i] * ub[i];
  }
  return numerics::integrate_uniform(f, h);
}

double one_body_element(const KsSpectrum& s, int n) {
  const auto& u0 = s.orbital(0, 0);
  const auto& un = s.orbital(n, 0);
  std::vector<double> f(s.grid.size() + 1, 0.0);
  for (std::size_t i = 0; i < s.grid.size(); ++i) f[i + 1] = un[i] * s.w[i] * u0[i];
  return numerics::integrate_uniform(f, s.grid.spacing());
}

CoulombMultipole coulomb_radial_integrals(const KsSpectrum& s, int l, int n1, int n2) {
  CoulombMultipole c{l, n1, n2, 0.0, 0.0};
  const double i12 = coulomb_radial_integral(s, l, n1, l, n2, l);
  const double i21 = coulomb_radial_integral(s, l, n2, l, n1, l);
  c.A = i12;
  c.B = i12 + i21;
  return c;
}

double matrix_element(const KsSpectrum& s, const Configuration& k) {
  check_orbital(s, k.a);
  check_orbital(s, k.b);
  const bool same = k.a.n == k.b.n && k.a.l == k.b.l && k.a.m == k.b.m;
  if (same && is_ground(k.a)) throw InvalidInputError("matrix_element: ground configuration");
  switch (k.symmetry) {
    case PairSymmetry::kProduct:
      return ordered_element(s, k.a, k.b);
    case PairSymmetry::kSinglet:
    case PairSymmetry::kTriplet: {
      if (same) throw InvalidInputError("matrix_element: symmetrized pair needs distinct orbitals");
      const double ab = ordered_element(s, k.a, k.b);
      const double ba = ordered_element(s, k.b, k.a);
      const double sign = k.symmetry == PairSymmetry::kSinglet ? 1.0 : -1.0;
      return (ab + sign * ba) / std::numbers::sqrt2;
    }
  }
  return 0.0;
}

PerturbationExpansion first_order_expansion(const KsSpectrum& s, const exact::HookeProblem& problem,
                                            const PerturbationOptions& opt) {
  problem.validate();
  if (std::abs(problem.omega - s.omega) > 1e-12 * s.omega)
    throw InvalidInputError("first_order_expansion: spectrum built for a different omega");
  PerturbationExpansion e;
  e.source = s.source;
  e.omega = s.omega;
  e.first_order_psi.grid = s.grid;
  const int lmax = s.l_max(), nmax = s.n_max();
  const double e0 = 2.0 * s.energy(0, 0);
  e.E0 = e0;
  e.E1 = 0.0;
  if (problem.interacting) e.E1 = coulomb_radial_integral(s, 0, 0, 0, 0, 0) - 2.0 * one_body_element(s, 0);
  e.sector_weight.assign(lmax + 1, 0.0);
  const std::size_t k = static_cast<std::size_t>(nmax) + 1;

  for (int l = 0; l <= lmax; ++l) {
    Eigen::MatrixXd mm = Eigen::MatrixXd::Zero(k, k);
    if (l == 0) mm(0, 0) = 1.0 / kFourPi;
    const double deg = 2.0 * l + 1.0;
    for (int n1 = 0; n1 <= nmax; ++n1)
      for (int n2 = n1; n2 <= nmax; ++n2) {
        if (l == 0 && n1 == 0 && n2 == 0) continue;
        const double den = e0 - s.energy(n1, l) - s.energy(n2, l);
        if (std::abs(den) < 1e-10) throw DegenerateDenominatorError("first_order_expansion: vanishing denominator");
        const bool product = n1 == n2;
        const Configuration cfg{{n1, l, 0}, {n2, l, 0}, product ? PairSymmetry::kProduct : PairSymmetry::kSinglet};
        const double elem = problem.interacting ? matrix_element(s, cfg) : 0.0;
        const double a = elem / den;
        e.coefficients.push_back({n1, n2, l, cfg.symmetry, a, den, static_cast<int>(deg)});
        e.E2 += deg * elem * elem / den;
        e.sector_weight[l] += deg * a * a;
        // Sum over m: sum_m (-1)^m Y_lm Y_l-m = (2l+1)/(4 pi) P_l.
        if (product) {
          mm(n1, n1) += deg * a / kFourPi;
        } else {
          const double c = deg * a / (kFourPi * std::numbers::sqrt2);
          mm(n1, n2) += c;
          mm(n2, n1) += c;
        }
      }
    e.first_order_psi.sectors.push_back(PairSector{l, s.reduced[l], std::move(mm)});
  }
  e.first_order_norm = std::sqrt(e.first_order_psi.norm());
  double total = 0.0;
  for (double x : e.sector_weight) total += x;
  e.tail_share = total > 0.0 ? e.sector_weight.back() / total : 0.0;
  if (e.tail_share > opt.tail_share_tolerance) {
    std::ostringstream os;
    os << "last sector l=" << lmax << " carries " << e.tail_share << " of sum a^2; tail estimate "
       << e.sector_weight.back();
    e.warnings.push_back(os.str());
  }
  return e;
}

PerturbedState perturbed_density_and_rdm(const PerturbationExpansion& e, const numerics::RadialGrid& sector_grid) {
  PairExpansion psi = e.first_order_psi;
  psi.normalize();
  auto density = psi.density();
  auto rdm = ent::build_rdm(psi.to_sectors(sector_grid));
  return {std::move(density), std::move(rdm), std::move(psi)};
}

double energy_percent_error(double approx, double exact_value) {
  if (exact_value == 0.0 || !std::isfinite(exact_value))
    throw InvalidInputError("energy_percent_error: exact energy must be finite and nonzero");
  return 100.0 * (approx - exact_value) / exact_value;
}

}  // namespace hooke::pert
