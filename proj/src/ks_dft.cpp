#include "hooke/ks_dft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hooke/errors.hpp"
#include <Eigen/Dense>

namespace hooke::ks {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFourPi = 4.0 * std::numbers::pi;
constexpr double kTinyDensity = 1e-30;

double rs_of(double n) { return std::cbrt(3.0 / (kFourPi * n)); }

std::vector<double> with_origin(const numerics::RadialFunction& f, std::span<const double> g) {
  std::vector<double> s(f.size() + 1, 0.0);
  std::copy(g.begin(), g.end(), s.begin() + 1);
  return s;
}

}  // namespace

double LdaFunctional::eps_x(double n) const {
  if (n <= kTinyDensity) return 0.0;
  return -0.75 * std::cbrt(3.0 / kPi) * std::cbrt(n);
}

double LdaFunctional::v_x(double n) const { return 4.0 / 3.0 * eps_x(n); }

double LdaFunctional::eps_c_rs(double rs, double* deps) const {
  if (correlation == CorrelationVariant::kWigner) {
    const double d = rs + 7.8;
    if (deps) *deps = 0.44 / (d * d);
    return -0.44 / d;
  }
  using C = Pw92Constants;
  const double srs = std::sqrt(rs);
  const double q0 = -2.0 * C::A * (1.0 + C::alpha1 * rs);
  const double q1 = 2.0 * C::A * (C::beta1 * srs + C::beta2 * rs + C::beta3 * rs * srs + C::beta4 * rs * rs);
  const double q1p = C::A * (C::beta1 / srs + 2.0 * C::beta2 + 3.0 * C::beta3 * srs + 4.0 * C::beta4 * rs);
  const double lg = std::log1p(1.0 / q1);
  if (deps) *deps = -2.0 * C::A * C::alpha1 * lg - q0 * q1p / (q1 * q1 + q1);
  return q0 * lg;
}

double LdaFunctional::eps_c(double n) const {
  if (n <= kTinyDensity) return 0.0;
  return eps_c_rs(rs_of(n));
}

double LdaFunctional::v_c(double n) const {
  if (n <= kTinyDensity) return 0.0;
  const double rs = rs_of(n);
  double d = 0.0;
  const double e = eps_c_rs(rs, &d);
  return e - rs / 3.0 * d;
}

nlohmann::json LdaFunctional::constants() const {
  nlohmann::json j;
  j["exchange"] = {{"form", "eps_x = -(3/4)(3/pi)^(1/3) n^(1/3)"}, {"v_x", "(4/3) eps_x"}};
  if (correlation == CorrelationVariant::kPerdewWang92) {
    using C = Pw92Constants;
    // Unpolarized branch of the Perdew-Wang 1992 fit, p = 1.
    j["correlation"] = {{"form", "pw92"},     {"A", C::A},         {"alpha1", C::alpha1}, {"beta1", C::beta1},
                        {"beta2", C::beta2}, {"beta3", C::beta3}, {"beta4", C::beta4},   {"p", 1}};
  } else {
    j["correlation"] = {{"form", "wigner"}, {"a", -0.44}, {"b", 7.8}};
  }
  return j;
}

double volume_integral(const numerics::RadialFunction& a, std::span<const double> b) {
  if (b.size() != a.size()) throw InvalidInputError("volume_integral: size mismatch");
  const auto w = numerics::radial_weights(a.grid);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += w[i] * a.values[i] * b[i] * a.grid.r(i) * a.grid.r(i);
  return kFourPi * s;
}

numerics::RadialFunction hartree_potential(const numerics::RadialFunction& n) {
  const auto& g = n.grid;
  const std::size_t m = g.size();
  std::vector<double> q(m), p(m);
  for (std::size_t i = 0; i < m; ++i) {
    q[i] = kFourPi * n.values[i] * g.r(i) * g.r(i);
    p[i] = kFourPi * n.values[i] * g.r(i);
  }
  const auto cq = numerics::cumulative_integral(with_origin(n, q), g.spacing());
  const auto cp = numerics::cumulative_integral(with_origin(n, p), g.spacing());
  std::vector<double> v(m);
  for (std::size_t i = 0; i < m; ++i) v[i] = cq[i + 1] / g.r(i) + (cp.back() - cp[i + 1]);
  return {g, std::move(v), numerics::Interpretation::kPotential};
}

double hartree_energy(const numerics::RadialFunction& n) {
  return 0.5 * volume_integral(n, hartree_potential(n).values);
}

numerics::RadialFunction lda_vxc(const numerics::RadialFunction& n, const LdaFunctional& f) {
  std::vector<double> v(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (n.values[i] < 0.0) throw InvalidInputError("lda_vxc: negative density");
    v[i] = f.v_xc(n.values[i]);
  }
  return {n.grid, std::move(v), numerics::Interpretation::kPotential};
}

double lda_exc(const numerics::RadialFunction& n, const LdaFunctional& f) {
  std::vector<double> e(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) e[i] = f.eps_xc(n.values[i]);
  return volume_integral(n, e);
}

double orbital_kinetic(const numerics::RadialFunction& u) {
  std::vector<double> s(u.size() + 1, 0.0);
  std::copy(u.values.begin(), u.values.end(), s.begin() + 1);
  auto d = numerics::derivative_uniform(s, u.grid.spacing());
  for (double& x : d) x *= x;
  return numerics::integrate_uniform(d, u.grid.spacing());
}

namespace {

numerics::RadialFunction density_from_orbital(const numerics::RadialGrid& g, const std::vector<double>& u) {
  std::vector<double> n(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) n[i] = 2.0 * u[i] * u[i] / (kFourPi * g.r(i) * g.r(i));
  return {g, std::move(n), numerics::Interpretation::kDensity};
}

std::vector<double> hxc_potential(const numerics::RadialFunction& n, const LdaFunctional& f, bool interacting) {
  std::vector<double> v(n.size(), 0.0);
  if (!interacting) return v;
  const auto vh = hartree_potential(n);
  for (std::size_t i = 0; i < n.size(); ++i) v[i] = vh.values[i] + f.v_xc(n.values[i]);
  return v;
}

}  // namespace

ScfState scf_solve(const exact::HookeProblem& problem, const numerics::RadialGrid& grid, const LdaFunctional& f,
                   const ScfOptions& opt) {
  problem.validate();
  if (!(opt.mixing > 0.0 && opt.mixing <= 1.0)) throw InvalidInputError("scf_solve: mixing must be in (0, 1]");
  const double w = problem.omega;
  std::vector<double> vext(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) vext[i] = 0.5 * w * w * grid.r(i) * grid.r(i);

  std::vector<double> n_old(grid.size());
  if (opt.initial_density) {
    if (!(opt.initial_density->grid == grid)) throw InvalidInputError("scf_solve: initial density grid mismatch");
    n_old = opt.initial_density->values;
  } else {
    const double c = 2.0 * std::pow(w / kPi, 1.5);
    for (std::size_t i = 0; i < grid.size(); ++i) n_old[i] = c * std::exp(-w * grid.r(i) * grid.r(i));
  }
  const auto wts = numerics::radial_weights(grid);
  std::vector<double> history;
  std::vector<double> v(grid.size());
  const std::size_t m_pts = grid.size();
  Eigen::VectorXd metric(m_pts), x_prev, f_prev;
  for (std::size_t i = 0; i < m_pts; ++i) metric[i] = std::sqrt(wts[i]) * grid.r(i);
  std::vector<Eigen::VectorXd> d_x, d_f;
  bool have_prev = false;
  for (int it = 1; it <= opt.max_iterations; ++it) {
    const numerics::RadialFunction n_in(grid, n_old, numerics::Interpretation::kDensity);
    const auto hxc = hxc_potential(n_in, f, problem.interacting);
    for (std::size_t i = 0; i < grid.size(); ++i) v[i] = vext[i] + hxc[i];
    auto states = numerics::radial_eigenstates(grid, v, 1);
    const auto n_new = density_from_orbital(grid, states.reduced[0]);
    double diff = 0.0, total = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double m = wts[i] * grid.r(i) * grid.r(i);
      diff += m * std::abs(n_new.values[i] - n_old[i]);
      total += m * n_new.values[i];
    }
    const double res = diff / total;
    history.push_back(res);
    if (res < opt.tolerance) {
      ScfState st{n_new,
                  numerics::RadialFunction(grid, states.reduced[0], numerics::Interpretation::kReduced),
                  numerics::RadialFunction(grid, hxc, numerics::Interpretation::kPotential),
                  states.energies[0],
                  states.raw_energies[0],
                  it,
                  res,
                  history};
      return st;
    }
    // Anderson mixing on the density residual in the r^2 dr metric.
    Eigen::VectorXd x(m_pts), fres(m_pts);
    for (std::size_t i = 0; i < m_pts; ++i) {
      x[i] = n_old[i];
      fres[i] = n_new.values[i] - n_old[i];
    }
    if (have_prev) {
      d_x.push_back(x - x_prev);
      d_f.push_back(fres - f_prev);
      if (d_x.size() > static_cast<std::size_t>(opt.anderson_depth)) {
        d_x.erase(d_x.begin());
        d_f.erase(d_f.begin());
      }
    }
    x_prev = x;
    f_prev = fres;
    have_prev = true;
    Eigen::VectorXd next = x + opt.mixing * fres;
    if (!d_f.empty()) {
      const Eigen::Index k = static_cast<Eigen::Index>(d_f.size());
      Eigen::MatrixXd df(m_pts, k), dx(m_pts, k);
      for (Eigen::Index j = 0; j < k; ++j) {
        df.col(j) = metric.cwiseProduct(d_f[j]);
        dx.col(j) = d_x[j];
      }
      const Eigen::VectorXd gamma = df.colPivHouseholderQr().solve(metric.cwiseProduct(fres));
      Eigen::MatrixXd dfr(m_pts, k);
      for (Eigen::Index j = 0; j < k; ++j) dfr.col(j) = d_f[j];
      next -= (dx + opt.mixing * dfr) * gamma;
    }
    // A residual jump discards the history.
    if (history.size() > 1 && res > 2.0 * history[history.size() - 2]) {
      d_x.clear();
      d_f.clear();
      next = x + opt.mixing * fres;
    }
    for (std::size_t i = 0; i < m_pts; ++i) n_old[i] = std::max(next[i], 0.0);
  }
  throw NonConvergenceError("scf_solve: iteration cap reached", history);
}

double lda_total_energy(const ScfState& st, const LdaFunctional& f, const exact::HookeProblem& problem) {
  if (!problem.interacting) return 2.0 * st.eigenvalue;
  const auto& n = st.density;
  const double eh = hartree_energy(n);
  const auto vxc = lda_vxc(n, f);
  return 2.0 * st.eigenvalue - eh - volume_integral(n, vxc.values) + lda_exc(n, f);
}

double lda_energy_audit(const ScfState& st, const LdaFunctional& f, const exact::HookeProblem& problem) {
  const auto& g = st.density.grid;
  const double w = problem.omega;
  std::vector<double> vext(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) vext[i] = 0.5 * w * w * g.r(i) * g.r(i);
  // Kinetic part of the corrected eigenvalue: eps - <u|v_s|u> for the potential used in the last solve.
  std::vector<double> vs(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) vs[i] = vext[i] + st.potential_hxc.values[i];
  const auto& u = st.orbital.values;
  const auto wts = numerics::radial_weights(g);
  double pot = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) pot += wts[i] * u[i] * u[i] * vs[i];
  const double ts = 2.0 * (st.eigenvalue - pot);
  double e = ts + volume_integral(st.density, vext);
  if (problem.interacting) e += hartree_energy(st.density) + lda_exc(st.density, f);
  return e;
}

Inversion invert_ks(const numerics::RadialFunction& n, const exact::HookeProblem& problem,
                    const InversionOptions& opt) {
  const auto& g = n.grid;
  const std::size_t m = g.size();
  const double h = g.spacing();
  const double peak = *std::max_element(n.values.begin(), n.values.end());
  if (!(peak > 0.0)) throw InvalidInputError("invert_ks: empty density");
  std::vector<double> u(m + 2, 0.0);  // u[0] at the origin, u[m+1] beyond r_max
  for (std::size_t i = 0; i < m; ++i) u[i + 1] = g.r(i) * std::sqrt(std::max(n.values[i], 0.0) * 0.5 * kFourPi);
  std::size_t end = m;
  for (std::size_t i = 0; i < m; ++i)
    if (!(n.values[i] > opt.density_floor * peak)) {
      end = i;
      break;
    }
  Inversion inv{numerics::RadialFunction(g, std::vector<double>(m, 0.0), numerics::Interpretation::kPotential),
                numerics::RadialFunction(g, std::vector<double>(m, 0.0), numerics::Interpretation::kPotential),
                0.0, end, end < m, 0.0, 0.0};
  if (end < 16) throw InvalidInputError("invert_ks: trusted window too small");
  // Kinetic part of v_s at eps = 0; u is odd about the origin.
  auto at = [&](long k) { return k < 0 ? -u[static_cast<std::size_t>(-k)] : (k <= static_cast<long>(m) + 1 ? u[static_cast<std::size_t>(k)] : 0.0); };
  std::vector<double> kin(m, 0.0);
  for (std::size_t i = 0; i < end; ++i) {
    const long k = static_cast<long>(i) + 1;
    const double d2 = opt.stencil == Stencil::kThreePoint
                          ? (at(k + 1) - 2.0 * at(k) + at(k - 1)) / (h * h)
                          : (-at(k + 2) + 16.0 * at(k + 1) - 30.0 * at(k) + 16.0 * at(k - 1) - at(k - 2)) / (12.0 * h * h);
    kin[i] = 0.5 * d2 / u[i + 1];
  }

  const auto vh = opt.subtract_hartree && problem.interacting
                      ? hartree_potential(n)
                      : numerics::RadialFunction(g, std::vector<double>(m, 0.0), numerics::Interpretation::kPotential);
  const double w = problem.omega;
  std::vector<double> raw(m, 0.0);  // v_xc at eps = 0
  for (std::size_t i = 0; i < end; ++i) raw[i] = kin[i] - 0.5 * w * w * g.r(i) * g.r(i) - vh.values[i];

  double eps = opt.eigenvalue;
  double a = 0.0;
  if (opt.gauge == Gauge::kAsymptotic) {
    // Least squares raw ~ c + a / r over the outer part of the window; eps = -c.
    const std::size_t start = static_cast<std::size_t>(static_cast<double>(end) * (1.0 - opt.tail_fraction));
    double s1 = 0, sx = 0, sxx = 0, sy = 0, sxy = 0;
    for (std::size_t i = start; i < end; ++i) {
      const double x = 1.0 / g.r(i);
      s1 += 1;
      sx += x;
      sxx += x * x;
      sy += raw[i];
      sxy += x * raw[i];
    }
    const double det = s1 * sxx - sx * sx;
    a = (s1 * sxy - sx * sy) / det;
    const double c = (sy - a * sx) / s1;
    eps = -c;
  }
  inv.eigenvalue = eps;
  inv.tail_coefficient = a;
  for (std::size_t i = 0; i < m; ++i) {
    if (i < end) {
      inv.v_s.values[i] = eps + kin[i];
      inv.v_xc.values[i] = eps + raw[i];
    } else {
      inv.v_xc.values[i] = opt.gauge == Gauge::kAsymptotic ? a / g.r(i) : inv.v_xc.values[end - 1];
      inv.v_s.values[i] = inv.v_xc.values[i] + 0.5 * w * w * g.r(i) * g.r(i) + vh.values[i];
    }
  }
  inv.kinetic_s = orbital_kinetic(numerics::RadialFunction(
      g, std::vector<double>(u.begin() + 1, u.begin() + 1 + static_cast<long>(m)), numerics::Interpretation::kReduced));
  return inv;
}

XcRecord exact_exc(const exact::ExactWavefunction& psi, const numerics::RadialFunction& n, const Inversion& inv) {
  const auto parts = exact::exact_energy_parts(psi);
  const double eh = psi.problem.interacting ? hartree_energy(n) : 0.0;
  XcRecord r{0.0, inv.v_xc, XcSource::kExactInversion, psi.total_energy, 0.0};
  r.E_xc = (parts.kinetic - inv.kinetic_s) + (parts.coulomb - eh);
  r.indicator = std::abs(r.E_xc / r.E_total);
  return r;
}

XcRecord lda_xc_record(const ScfState& st, const LdaFunctional& f, const exact::HookeProblem& problem) {
  XcRecord r{lda_exc(st.density, f), lda_vxc(st.density, f), XcSource::kLda, lda_total_energy(st, f, problem), 0.0};
  if (!problem.interacting) {
    r.E_xc = 0.0;
    std::fill(r.v_xc.values.begin(), r.v_xc.values.end(), 0.0);
  }
  r.indicator = std::abs(r.E_xc / r.E_total);
  return r;
}

DensityErrorMetric density_percent_error(const numerics::RadialFunction& a, const numerics::RadialFunction& b) {
  if (!(a.grid == b.grid)) throw InvalidInputError("density_percent_error: grid mismatch");
  const auto w = numerics::radial_weights(a.grid);
  double num = 0.0, den = 0.0, wnum = 0.0, wden = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = std::abs(a.values[i] - b.values[i]);
    const double m = w[i] * a.grid.r(i) * a.grid.r(i);
    num += d;
    den += b.values[i];
    wnum += m * d;
    wden += m * b.values[i];
  }
  if (!(den > 0.0)) throw InvalidInputError("density_percent_error: reference density is zero");
  return {100.0 * num / den, 100.0 * wnum / wden};
}

}  // namespace hooke::ks
