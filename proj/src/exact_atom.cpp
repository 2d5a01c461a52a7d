#include "hooke/exact_atom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "hooke/errors.hpp"

namespace hooke::exact {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

double relative_potential(double omega, bool interacting, double s) {
  return 0.25 * omega * omega * s * s + (interacting ? 1.0 / s : 0.0);
}

// Series value v(s) = sum a_k s^{k+1}, times exp(-omega s^2 / 4).
double series_value(const std::vector<double>& a, double omega, double s) {
  double v = 0.0, p = s;
  for (double c : a) {
    v += c * p;
    p *= s;
  }
  return v * std::exp(-0.25 * omega * s * s);
}

struct Outward {
  std::vector<double> u;  // index k <-> s = k h, u[0] = 0
  int nodes = 0;
};

Outward integrate_outward(double omega, bool interacting, double eps, double h, std::size_t n,
                          std::size_t terms) {
  const auto a = series_coefficients(omega, eps, interacting, terms);
  Outward out;
  out.u.assign(n + 1, 0.0);
  out.u[1] = series_value(a, omega, h);
  out.u[2] = series_value(a, omega, 2.0 * h);
  const double h12 = h * h / 12.0;
  auto g = [&](std::size_t k) { return relative_potential(omega, interacting, h * k) - eps; };
  double gm = g(1), g0 = g(2);
  for (std::size_t k = 2; k < n; ++k) {
    const double gp = g(k + 1);
    const double next =
        (2.0 * out.u[k] * (1.0 + 5.0 * h12 * g0) - out.u[k - 1] * (1.0 - h12 * gm)) / (1.0 - h12 * gp);
    out.u[k + 1] = next;
    if ((next < 0.0) != (out.u[k] < 0.0) && out.u[k] != 0.0) ++out.nodes;
    if (std::abs(next) > 1e100) {
      for (std::size_t j = 0; j <= k + 1; ++j) out.u[j] *= 1e-100;
    }
    gm = g0;
    g0 = gp;
  }
  return out;
}

double relative_extent(double omega) { return std::cbrt(2.0 / (omega * omega)) + 14.0 / std::sqrt(omega); }

}  // namespace

void HookeProblem::validate() const {
  if (!(omega > 0.0) || !std::isfinite(omega)) throw InvalidInputError("HookeProblem: omega must be positive");
}

RelativeProfile RelativeMotionSolution::profile() const {
  RelativeProfile p;
  p.h = grid.spacing();
  p.phi.resize(grid.size() + 1);
  p.phi[0] = phi_origin;
  const double c = 1.0 / std::sqrt(kFourPi);
  for (std::size_t k = 0; k < grid.size(); ++k) p.phi[k + 1] = c * u_rel[k] / grid.r(k);
  return p;
}

std::vector<double> series_coefficients(double omega, double epsilon, bool interacting, std::size_t terms) {
  const double lambda = interacting ? 1.0 : 0.0;
  std::vector<double> a(std::max<std::size_t>(terms, 2), 0.0);
  a[0] = 1.0;
  a[1] = 0.5 * lambda;
  for (std::size_t j = 1; j + 1 < a.size(); ++j) {
    const double jj = static_cast<double>(j);
    a[j + 1] = (lambda * a[j] + (omega * (jj + 0.5) - epsilon) * a[j - 1]) / ((jj + 1.0) * (jj + 2.0));
  }
  return a;
}

namespace {

// a_{n+1} at eps = omega (n + 3/2), scaled to oscillator units.
double termination_residual(double omega, int n, double* scale) {
  const auto a = series_coefficients(omega, omega * (n + 1.5), true, static_cast<std::size_t>(n) + 2);
  const double len = 1.0 / std::sqrt(omega);
  double big = 0.0;
  for (int k = 0; k <= n; ++k) big = std::max(big, std::abs(a[k]) * std::pow(len, k));
  if (scale) *scale = big;
  return a[n + 1] * std::pow(len, n + 1);
}

}  // namespace

std::optional<int> terminating_degree(double omega, int max_degree) {
  for (int n = 1; n <= max_degree; ++n) {
    double big = 0.0;
    const double res = termination_residual(omega, n, &big);
    if (std::abs(res) > 1e-10 * big) continue;
    // Ground state requires a node-less polynomial on s > 0.
    const auto a = series_coefficients(omega, omega * (n + 1.5), true, static_cast<std::size_t>(n) + 1);
    bool positive = true;
    const double len = 1.0 / std::sqrt(omega);
    for (int k = 1; k <= 4000 && positive; ++k) {
      const double s = 0.01 * k * len;
      double v = 0.0, p = 1.0;
      for (int j = 0; j <= n; ++j) {
        v += a[j] * p;
        p *= s;
      }
      positive = v > 0.0;
    }
    if (positive) return n;
  }
  return std::nullopt;
}

double magic_omega(int degree) {
  if (degree < 1) throw InvalidInputError("magic_omega: degree must be >= 1");
  // Scan downward for sign changes of a_{n+1}(omega); roots with nodes are excited states.
  double hi = 10.0;
  double f_hi = termination_residual(hi, degree, nullptr);
  for (double lo = hi / 1.05; lo > 1e-8; lo /= 1.05) {
    const double f_lo = termination_residual(lo, degree, nullptr);
    if ((f_lo < 0.0) != (f_hi < 0.0)) {
      double a = lo, b = hi;
      for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = termination_residual(m, degree, nullptr);
        if ((fm < 0.0) == (f_hi < 0.0))
          b = m;
        else
          a = m;
      }
      const double root = 0.5 * (a + b);
      if (terminating_degree(root, degree) == degree) return root;
    }
    hi = lo;
    f_hi = f_lo;
  }
  throw SearchFailureError("magic_omega: no root found", 1e-8, 10.0);
}

double shoot_relative_energy(const HookeProblem& p, const RelativeSolverOptions& opt) {
  p.validate();
  const double w = p.omega;
  const double s_max = relative_extent(w);
  const double h = s_max / static_cast<double>(opt.n_points);
  double lo = 1.5 * w * (1.0 - 1e-9);
  double hi = 1.5 * w + (p.interacting ? std::sqrt(2.0 * w / std::numbers::pi) : 0.0) + 1e-6 * w;
  if (integrate_outward(w, p.interacting, hi, h, opt.n_points, opt.max_terms).nodes == 0 ||
      integrate_outward(w, p.interacting, lo, h, opt.n_points, opt.max_terms).nodes != 0)
    throw SearchFailureError("shoot_relative_energy: eigenvalue not bracketed", lo, hi);
  const double tol = std::max(opt.energy_tolerance * w, 1e-15);
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (integrate_outward(w, p.interacting, mid, h, opt.n_points, opt.max_terms).nodes == 0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

RelativeMotionSolution solve_relative_motion(const HookeProblem& p, const RelativeSolverOptions& opt) {
  p.validate();
  if (opt.n_points < 100) throw InvalidInputError("solve_relative_motion: too few points");
  const double w = p.omega;
  const double s_max = relative_extent(w);
  RelativeMotionSolution sol;
  sol.omega = w;
  sol.interacting = p.interacting;
  sol.grid = numerics::RadialGrid(s_max, opt.n_points);
  const double h = sol.grid.spacing();
  const std::size_t n = opt.n_points;

  std::optional<int> degree;
  if (p.interacting)
    degree = terminating_degree(w, opt.max_closed_form_degree);
  else
    degree = 0;

  std::vector<double> u(n + 1, 0.0);
  if (degree) {
    sol.closed_form = true;
    sol.polynomial_degree = *degree;
    sol.epsilon_rel = w * (*degree + 1.5);
    sol.series_coefficients = series_coefficients(w, sol.epsilon_rel, p.interacting,
                                                  static_cast<std::size_t>(*degree) + 1);
    if (!p.interacting) sol.series_coefficients = {1.0};
    for (std::size_t k = 1; k <= n; ++k) u[k] = series_value(sol.series_coefficients, w, h * k);
    sol.series_coefficients.resize(opt.max_terms, 0.0);
  } else {
    sol.epsilon_rel = shoot_relative_energy(p, opt);
    sol.series_coefficients = series_coefficients(w, sol.epsilon_rel, p.interacting, opt.max_terms);
    const auto out = integrate_outward(w, p.interacting, sol.epsilon_rel, h, n, opt.max_terms);
    // Classical turning point beyond the potential minimum.
    std::size_t km = n / 2;
    for (std::size_t k = n; k >= 2; --k)
      if (relative_potential(w, true, h * k) < sol.epsilon_rel) {
        km = k;
        break;
      }
    km = std::min(km, n - 2);
    std::vector<double> in(n + 2, 0.0);
    in[n + 1] = 0.0;
    in[n] = 1e-200;
    const double h12 = h * h / 12.0;
    auto g = [&](std::size_t k) { return relative_potential(w, p.interacting, h * k) - sol.epsilon_rel; };
    for (std::size_t k = n; k > km; --k) {
      const double gp = g(k + 1 <= n ? k + 1 : n), g0 = g(k), gm = g(k - 1);
      const double up = k + 1 <= n ? in[k + 1] : 0.0;
      in[k - 1] = (2.0 * in[k] * (1.0 + 5.0 * h12 * g0) - up * (1.0 - h12 * gp)) / (1.0 - h12 * gm);
      if (std::abs(in[k - 1]) > 1e100)
        for (std::size_t j = k - 1; j <= n; ++j) in[j] *= 1e-100;
    }
    const double scale = out.u[km] / in[km];
    for (std::size_t k = 0; k <= n; ++k) u[k] = k < km ? out.u[k] : in[k] * scale;
  }
  // phi(0) from the leading series term a_0 = 1 relative to u(h).
  const double lead = series_value(series_coefficients(w, sol.epsilon_rel, p.interacting, opt.max_terms), w, h);
  double norm2 = 0.0;
  {
    std::vector<double> sq(n + 1);
    for (std::size_t k = 0; k <= n; ++k) sq[k] = u[k] * u[k];
    norm2 = numerics::integrate_uniform(sq, h);
  }
  const double c = 1.0 / std::sqrt(norm2);
  if (u[1] < 0.0) throw NumericFailureError("solve_relative_motion: negative wavefunction near origin", u[1]);
  sol.u_rel.resize(n);
  int nodes = 0;
  for (std::size_t k = 1; k <= n; ++k) {
    sol.u_rel[k - 1] = u[k] * c;
    if (k > 1 && (u[k] < 0.0) != (u[k - 1] < 0.0) && std::abs(u[k]) > 1e-12 * c) ++nodes;
  }
  sol.nodes = nodes;
  sol.phi_origin = (u[1] * c / lead) / std::sqrt(kFourPi);
  return sol;
}

RelComState ExactWavefunction::state() const { return {rel.profile(), omega_com}; }

ExactWavefunction assemble_exact_wavefunction(const RelativeMotionSolution& rel, const SectorOptions& opt) {
  ExactWavefunction psi{HookeProblem{rel.omega, rel.interacting}, rel, 0.5 * rel.omega, 0.0,
                        SectorWavefunction{numerics::RadialGrid(1.0, 4), {}}, std::nullopt, {}};
  psi.problem.validate();
  psi.total_energy = rel.epsilon_rel + 1.5 * rel.omega;
  const auto grid = opt.grid ? *opt.grid : default_sector_grid(rel.omega);
  const auto st = psi.state();
  int lmax = std::max(0, opt.l_max);
  while (true) {
    psi.sectors = project_relcom(st, grid, {lmax, opt.s_nodes});
    const auto norms = psi.sectors.sector_norms();
    double total = 0.0;
    for (double x : norms) total += x;
    const double last = norms.back() / total;
    if (last < opt.share_tolerance || lmax >= opt.l_cap) {
      if (last >= opt.share_tolerance) {
        std::ostringstream os;
        os << "sector share " << last << " at l_max=" << lmax << " exceeds tolerance";
        psi.warnings.push_back(os.str());
      }
      const double deficit = 1.0 - total;
      if (std::abs(deficit) > 1e-6) {
        psi.truncation_deficit = deficit;
        std::ostringstream os;
        os << "sector norm deficit " << deficit;
        psi.warnings.push_back(os.str());
      }
      break;
    }
    lmax = std::min(opt.l_cap, std::max(lmax + 4, 2 * lmax));
  }
  return psi;
}

numerics::RadialFunction exact_density(const ExactWavefunction& psi, const numerics::RadialGrid& grid) {
  return relcom_density(psi.state(), grid);
}

EnergyParts exact_energy_parts(const ExactWavefunction& psi) {
  const auto e = relcom_energies(psi.state(), psi.problem.omega);
  return {e.kinetic_rel + e.kinetic_com, psi.problem.interacting ? e.coulomb : 0.0, e.external};
}

double interaction_ratio(const ExactWavefunction& psi) {
  if (!psi.problem.interacting) return 0.0;
  const auto e = relcom_energies(psi.state(), psi.problem.omega);
  return e.coulomb / e.external;
}

double expectation_T_plus_Vee(const SectorWavefunction& psi) { return sector_kinetic(psi) + sector_coulomb(psi); }

}  // namespace hooke::exact
