#include "hooke/two_electron.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hooke/errors.hpp"

namespace hooke {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFourPi = 4.0 * std::numbers::pi;

// Outer Simpson weight times inner weights split at the diagonal, W(i, j).
Eigen::MatrixXd split_weights(const numerics::RadialGrid& g) {
  const std::size_t n = g.size();
  const double h = g.spacing();
  const auto outer = numerics::radial_weights(g);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto left = numerics::closed_weights(i + 2, h);  // origin, r_0..r_i
    for (std::size_t j = 0; j <= i; ++j) w(i, j) += left[j + 1];
    if (n - i >= 2) {
      const auto right = numerics::closed_weights(n - i, h);  // r_i..r_{n-1}
      for (std::size_t j = i; j < n; ++j) w(i, j) += right[j - i];
    }
    w.row(i) *= outer[i];
  }
  return w;
}

}  // namespace

std::vector<double> SectorWavefunction::sector_norms() const {
  const auto w = numerics::radial_weights(grid);
  Eigen::VectorXd m(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) m[i] = w[i] * grid.r(i) * grid.r(i);
  std::vector<double> out;
  for (std::size_t l = 0; l < sectors.size(); ++l) {
    const double s = (m.asDiagonal() * sectors[l].cwiseAbs2() * m.asDiagonal()).sum();
    out.push_back(kFourPi * kFourPi / (2.0 * l + 1.0) * s);
  }
  return out;
}

double SectorWavefunction::norm() const {
  double s = 0.0;
  for (double x : sector_norms()) s += x;
  return s;
}

void SectorWavefunction::scale(double c) {
  for (auto& f : sectors) f *= c;
}

numerics::RadialFunction sector_density(const SectorWavefunction& psi) {
  const auto& g = psi.grid;
  const auto w = numerics::radial_weights(g);
  Eigen::VectorXd m(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) m[i] = w[i] * g.r(i) * g.r(i);
  Eigen::VectorXd n = Eigen::VectorXd::Zero(g.size());
  for (std::size_t l = 0; l < psi.sectors.size(); ++l)
    n += 2.0 * kFourPi / (2.0 * l + 1.0) * (psi.sectors[l].cwiseAbs2() * m);
  return {g, std::vector<double>(n.data(), n.data() + n.size()), numerics::Interpretation::kDensity};
}

double sector_kinetic(const SectorWavefunction& psi) {
  const auto& g = psi.grid;
  const std::size_t n = g.size();
  const double h = g.spacing();
  const auto w = numerics::radial_weights(g);
  double total = 0.0;
  for (std::size_t l = 0; l < psi.sectors.size(); ++l) {
    const auto& f = psi.sectors[l];
    const double parity = (l % 2 == 0) ? -1.0 : 1.0;  // U(-h) = (-1)^{l+1} U(h)
    double t = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double r2 = g.r(j);
      auto u = [&](long i) -> double {
        if (i == -1) return 0.0;
        if (i == -2) return parity * g.r(0) * r2 * f(0, j);
        if (i >= static_cast<long>(n)) return 0.0;
        return g.r(static_cast<std::size_t>(i)) * r2 * f(static_cast<std::size_t>(i), j);
      };
      double row = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const long k = static_cast<long>(i);
        const double ui = u(k);
        const double d2 = (-u(k - 2) + 16.0 * u(k - 1) - 30.0 * ui + 16.0 * u(k + 1) - u(k + 2)) / (12.0 * h * h);
        const double r1 = g.r(i);
        row += w[i] * ui * (-0.5 * d2 + 0.5 * l * (l + 1.0) / (r1 * r1) * ui);
      }
      t += w[j] * row;
    }
    total += 2.0 * kFourPi * kFourPi / (2.0 * l + 1.0) * t;
  }
  return total;
}

double sector_coulomb(const SectorWavefunction& psi) {
  const auto& g = psi.grid;
  const std::size_t n = g.size();
  const int lmax = psi.l_max();
  if (lmax < 0) return 0.0;
  const Eigen::MatrixXd w = split_weights(g);
  Eigen::VectorXd r2(n);
  for (std::size_t i = 0; i < n; ++i) r2[i] = g.r(i) * g.r(i);
  const auto table = numerics::legendre_table(2 * lmax, static_cast<std::size_t>(2 * lmax + 2));
  auto gaunt = [&](int a, int b, int c) {
    double s = 0.0;
    for (std::size_t k = 0; k < table.nodes.size(); ++k)
      s += table.weights[k] * table.values[a][k] * table.values[b][k] * table.values[c][k];
    return s;
  };
  // Weighted pair products P_ab = W o F_a o F_b o r1^2 r2^2.
  std::vector<std::vector<Eigen::MatrixXd>> prod(lmax + 1, std::vector<Eigen::MatrixXd>(lmax + 1));
  for (int a = 0; a <= lmax; ++a)
    for (int b = a; b <= lmax; ++b)
      prod[a][b] = (r2.asDiagonal() * psi.sectors[a].cwiseProduct(psi.sectors[b]) * r2.asDiagonal()).cwiseProduct(w);

  Eigen::MatrixXd ratio(n, n), kern(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double lo = std::min(g.r(i), g.r(j)), hi = std::max(g.r(i), g.r(j));
      ratio(i, j) = lo / hi;
      kern(i, j) = 1.0 / hi;
    }
  double total = 0.0;
  for (int L = 0; L <= 2 * lmax; ++L) {
    if (L > 0) kern = kern.cwiseProduct(ratio);
    for (int a = 0; a <= lmax; ++a)
      for (int b = a; b <= lmax; ++b) {
        if ((a + b + L) % 2 != 0 || L < std::abs(a - b) || L > a + b) continue;
        const double gl = gaunt(a, b, L);
        if (std::abs(gl) < 1e-15) continue;
        const double s = prod[a][b].cwiseProduct(kern).sum();
        total += (a == b ? 1.0 : 2.0) * 8.0 * kPi * kPi * gl * s;
      }
  }
  return total;
}

double RelativeProfile::evaluate(double s) const { return numerics::interpolate_uniform(phi, 0.0, h, s); }

std::vector<double> RelativeProfile::reduced() const {
  std::vector<double> u(phi.size());
  const double c = std::sqrt(kFourPi);
  for (std::size_t k = 0; k < phi.size(); ++k) u[k] = c * h * static_cast<double>(k) * phi[k];
  return u;
}

RelComEnergies relcom_energies(const RelComState& st, double omega) {
  const auto u = st.rel.reduced();
  const std::size_t m = u.size();
  const double h = st.rel.h;
  if (m < 6) throw InvalidInputError("relcom_energies: relative profile too short");
  auto du = numerics::derivative_uniform(u, h);
  std::vector<double> vee(m), s2(m);
  for (std::size_t k = 0; k < m; ++k) {
    du[k] *= du[k];
    const double s = h * static_cast<double>(k);
    vee[k] = kFourPi * st.rel.phi[k] * st.rel.phi[k] * s;
    s2[k] = u[k] * u[k] * s * s;
  }
  RelComEnergies e;
  e.kinetic_rel = numerics::integrate_uniform(du, h);
  e.kinetic_com = 1.5 * st.omega_com;
  e.coulomb = numerics::integrate_uniform(vee, h);
  e.external = omega * omega * (3.0 / (8.0 * st.omega_com) + 0.25 * numerics::integrate_uniform(s2, h));
  return e;
}

numerics::RadialFunction relcom_density(const RelComState& st, const numerics::RadialGrid& grid,
                                        std::size_t max_s_samples) {
  const double wr = st.omega_com;
  if (!(wr > 0.0)) throw InvalidInputError("relcom_density: centre-of-mass exponent must be positive");
  const std::size_t stride = std::max<std::size_t>(1, (st.rel.phi.size() + max_s_samples - 1) / max_s_samples);
  const std::size_t m = (st.rel.phi.size() - 1) / stride + 1;
  const double hs = st.rel.h * static_cast<double>(stride);
  const auto ws = numerics::closed_weights(m, hs);
  std::vector<double> u2(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double s = hs * static_cast<double>(k);
    const double p = st.rel.phi[k * stride];
    u2[k] = ws[k] * kFourPi * p * p * s * s;
  }
  const double pref = std::pow(4.0 * wr / kPi, 1.5);
  const double cut = std::sqrt(40.0 / wr);
  std::vector<double> n(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r = grid.r(i);
    // exp(-wr (s - 2r)^2) is negligible outside |s - 2r| < cut.
    const double s_lo = std::max(0.0, 2.0 * r - cut), s_hi = 2.0 * r + cut;
    const std::size_t k0 = static_cast<std::size_t>(s_lo / hs);
    const std::size_t k1 = std::min(m - 1, static_cast<std::size_t>(s_hi / hs) + 1);
    double acc = 0.0;
    for (std::size_t k = std::max<std::size_t>(k0, 1); k <= k1; ++k) {
      const double s = hs * static_cast<double>(k);
      const double c = 4.0 * wr * r * s;
      const double d = r - 0.5 * s;
      acc += u2[k] * std::exp(-4.0 * wr * d * d) * (-std::expm1(-2.0 * c)) / c;
    }
    n[i] = pref * acc;
  }
  return {grid, std::move(n), numerics::Interpretation::kDensity};
}

SectorWavefunction project_relcom(const RelComState& st, const numerics::RadialGrid& grid,
                                  const ProjectionOptions& opt) {
  if (opt.l_max < 0) throw InvalidInputError("project_relcom: l_max must be >= 0");
  const int lmax = opt.l_max;
  const std::size_t ns = opt.s_nodes ? opt.s_nodes : static_cast<std::size_t>(std::max(48, 2 * lmax + 32));
  const auto gl = numerics::gauss_legendre(ns);
  const std::size_t n = grid.size();
  const double wr = st.omega_com;
  const double com = std::pow(4.0 * wr / kPi, 0.75);
  SectorWavefunction out{grid, std::vector<Eigen::MatrixXd>(lmax + 1, Eigen::MatrixXd::Zero(n, n))};
  std::vector<double> p(lmax + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double r1 = grid.r(i);
    for (std::size_t j = 0; j <= i; ++j) {
      const double r2 = grid.r(j);
      const double a = r1 - r2, b = r1 + r2;
      if (a > st.rel.s_max()) continue;
      const double half = 0.5 * (b - a), mid = 0.5 * (b + a);
      const double rr = r1 * r1 + r2 * r2;
      std::vector<double> acc(lmax + 1, 0.0);
      for (std::size_t k = 0; k < ns; ++k) {
        const double s = mid + half * gl.nodes[k];
        const double phi = st.rel.evaluate(s);
        if (phi == 0.0) continue;
        const double x = std::clamp((rr - s * s) / (2.0 * r1 * r2), -1.0, 1.0);
        const double big_r2 = 0.5 * rr - 0.25 * s * s;
        const double val = phi * com * std::exp(-2.0 * wr * big_r2) * half * gl.weights[k] * s / (r1 * r2);
        p[0] = 1.0;
        if (lmax >= 1) p[1] = x;
        for (int l = 2; l <= lmax; ++l) p[l] = ((2.0 * l - 1.0) * x * p[l - 1] - (l - 1.0) * p[l - 2]) / l;
        for (int l = 0; l <= lmax; ++l) acc[l] += val * p[l];
      }
      for (int l = 0; l <= lmax; ++l) {
        const double f = 0.5 * (2.0 * l + 1.0) * acc[l];
        out.sectors[l](i, j) = f;
        out.sectors[l](j, i) = f;
      }
    }
  }
  return out;
}

numerics::RadialGrid default_sector_grid(double omega, std::size_t n_points) {
  if (!(omega > 0.0)) throw InvalidInputError("default_sector_grid: omega must be positive");
  const double r_max = 0.5 * std::cbrt(2.0 / (omega * omega)) + 10.0 / std::sqrt(omega);
  return numerics::RadialGrid(r_max, n_points);
}

double PairExpansion::norm() const {
  double s = 0.0;
  for (const auto& sec : sectors)
    s += kFourPi * kFourPi / (2.0 * sec.l + 1.0) * sec.coefficients.squaredNorm();
  return s;
}

void PairExpansion::normalize() {
  const double nrm = norm();
  if (!(nrm > 0.0)) throw NormalizationError("PairExpansion: zero norm", nrm);
  for (auto& sec : sectors) sec.coefficients /= std::sqrt(nrm);
}

numerics::RadialFunction PairExpansion::density() const {
  std::vector<double> n(grid.size(), 0.0);
  for (const auto& sec : sectors) {
    const Eigen::MatrixXd mm = sec.coefficients * sec.coefficients.transpose();
    const double c = 2.0 * kFourPi / (2.0 * sec.l + 1.0);
    const std::size_t k = sec.reduced.size();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double r = grid.r(i);
      double s = 0.0;
      for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b) s += mm(a, b) * sec.reduced[a][i] * sec.reduced[b][i];
      n[i] += c * s / (r * r);
    }
  }
  return {grid, std::move(n), numerics::Interpretation::kDensity};
}

SectorWavefunction PairExpansion::to_sectors(const numerics::RadialGrid& target) const {
  int lmax = 0;
  for (const auto& sec : sectors) lmax = std::max(lmax, sec.l);
  const std::size_t n = target.size();
  SectorWavefunction out{target, std::vector<Eigen::MatrixXd>(lmax + 1, Eigen::MatrixXd::Zero(n, n))};
  for (const auto& sec : sectors) {
    const std::size_t k = sec.reduced.size();
    Eigen::MatrixXd radial(n, k);
    for (std::size_t a = 0; a < k; ++a) {
      const auto u = target == grid ? sec.reduced[a] : numerics::resample(grid, sec.reduced[a], target, 0.0);
      for (std::size_t i = 0; i < n; ++i) radial(i, a) = u[i] / target.r(i);
    }
    out.sectors[sec.l] += radial * sec.coefficients * radial.transpose();
  }
  return out;
}

std::vector<double> PairExpansion::sector_spectrum(std::size_t index) const {
  const auto& sec = sectors.at(index);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sec.coefficients * sec.coefficients.transpose(),
                                                    Eigen::EigenvaluesOnly);
  const double c = kFourPi * kFourPi / ((2.0 * sec.l + 1.0) * (2.0 * sec.l + 1.0));
  std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  for (double& x : ev) x *= c;
  std::sort(ev.rbegin(), ev.rend());
  return ev;
}

}  // namespace hooke
