#pragma once

// Independent reference computations shared by the unit and acceptance tests.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <numbers>
#include <vector>

#include "hooke/exact_atom.hpp"
#include "hooke/numerics.hpp"
#include "hooke/perturbation.hpp"

namespace oracle {

// Ground relative energy of -u'' + (w^2 s^2 / 4 + 1/s) u = eps u by Numerov shooting from the origin,
// bisecting on the node count of u over [0, s_max].
inline double shoot_relative_energy(double w, std::size_t steps = 200000) {
  const double s_max = 14.0 / std::sqrt(w) + 2.0 * std::cbrt(2.0 / (w * w));
  const double h = s_max / static_cast<double>(steps);
  auto nodes = [&](double eps) {
    auto g = [&](double s) { return 0.25 * w * w * s * s + 1.0 / s - eps; };
    // u ~ s + s^2/2 near the origin; (g u)(0) = 1.
    double prev_u = 0.0, prev_gu = 1.0;
    double u = h + 0.5 * h * h, gu = g(h) * u;
    int count = 0;
    for (std::size_t k = 1; k < steps; ++k) {
      const double s_next = static_cast<double>(k + 1) * h;
      const double c = h * h / 12.0;
      const double next = (2.0 * u + 10.0 * c * gu - prev_u + c * prev_gu) / (1.0 - c * g(s_next));
      if ((next < 0.0) != (u < 0.0)) ++count;
      prev_u = u;
      prev_gu = gu;
      u = next;
      gu = g(s_next) * next;
      if (std::abs(u) > 1e200) break;
    }
    return count;
  };
  double lo = 0.0, hi = 1.5 * w + 3.0 * std::cbrt(w * w / 4.0) + 1.0;
  while (nodes(hi) == 0) hi *= 2.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (nodes(mid) == 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Brute-force angular quadrature for two-electron matrix elements between KS orbital pairs.
inline std::complex<double> ylm(int l, int m, double theta, double phi) {
  const double p = std::sph_legendre(l, std::abs(m), theta);
  const std::complex<double> e = std::polar(1.0, m * phi);
  return (m < 0 && (m % 2 != 0) ? -1.0 : 1.0) * p * e;
}

// \int\int Y*_a(1) Y*_b(2) P_L(cos gamma_12) dOmega_1 dOmega_2 by direct quadrature.
inline double angular_factor(int L, const hooke::pert::Orbital& a, const hooke::pert::Orbital& b) {
  const auto gt = hooke::numerics::gauss_legendre(12, -1.0, 1.0);
  const int nphi = 16;
  std::complex<double> s = 0.0;
  for (std::size_t i = 0; i < gt.nodes.size(); ++i)
    for (std::size_t j = 0; j < gt.nodes.size(); ++j)
      for (int p = 0; p < nphi; ++p)
        for (int q = 0; q < nphi; ++q) {
          const double t1 = std::acos(gt.nodes[i]), t2 = std::acos(gt.nodes[j]);
          const double f1 = 2.0 * std::numbers::pi * p / nphi, f2 = 2.0 * std::numbers::pi * q / nphi;
          const double cg = gt.nodes[i] * gt.nodes[j] + std::sin(t1) * std::sin(t2) * std::cos(f1 - f2);
          const double w = gt.weights[i] * gt.weights[j] * (2.0 * std::numbers::pi / nphi) * (2.0 * std::numbers::pi / nphi);
          s += w * std::conj(ylm(a.l, a.m, t1, f1)) * std::conj(ylm(b.l, b.m, t2, f2)) * std::legendre(L, cg);
        }
  if (std::abs(s.imag()) > 1e-12) throw std::runtime_error("angular_factor: complex result");
  return s.real();
}

// \int\int u_00 u_a (r1) u_00 u_b (r2) r_<^L / r_>^(L+1) with the kink on a grid line.
inline double radial_factor(const hooke::pert::KsSpectrum& s, int L, const hooke::pert::Orbital& a, const hooke::pert::Orbital& b) {
  const auto& g = s.grid;
  const std::size_t m = g.size();
  const auto& u0 = s.orbital(0, 0);
  const auto& ua = s.orbital(a.n, a.l);
  const auto& ub = s.orbital(b.n, b.l);
  const double h = g.spacing();
  std::vector<double> outer(m + 1, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const double r1 = g.r(i);
    std::vector<double> lo(i + 2, 0.0), hi(m - i, 0.0);
    for (std::size_t j = 0; j <= i; ++j) lo[j + 1] = u0[j] * ub[j] * std::pow(g.r(j) / r1, L) / r1;
    for (std::size_t j = i; j < m; ++j) hi[j - i] = u0[j] * ub[j] * std::pow(r1 / g.r(j), L) / g.r(j);
    double inner = hooke::numerics::integrate_uniform(lo, h);
    if (hi.size() >= 2) inner += hooke::numerics::integrate_uniform(hi, h);
    outer[i + 1] = u0[i] * ua[i] * inner;
  }
  return hooke::numerics::integrate_uniform(outer, h);
}

inline double brute_force_element(const hooke::pert::KsSpectrum& s, const hooke::pert::Orbital& a, const hooke::pert::Orbital& b) {
  double v = 0.0;
  for (int L = 0; L <= 2 * s.l_max(); ++L) {
    const double ang = angular_factor(L, a, b);
    if (std::abs(ang) > 1e-13) v += ang * radial_factor(s, L, a, b) / (4.0 * std::numbers::pi);
  }
  return v;
}

struct Entanglement {
  double L = 0.0;
  double S = 0.0;
  double trace = 0.0;
};

// RDM of psi(r1, r2) = phi_rel(|r1 - r2|) exp(-omega |r1 + r2|^2 / 4) by direct 3-D quadrature over r2
// on a coarse Gauss-Legendre mesh, then projected on Legendre polynomials of the angle between r and r'.
inline Entanglement brute_force_entanglement(const hooke::exact::ExactWavefunction& psi, std::size_t n_r = 40,
                                             std::size_t n_theta = 14, std::size_t n_phi = 14,
                                             std::size_t n_gamma = 24, int l_max = 10) {
  using hooke::numerics::gauss_legendre;
  const double w = psi.problem.omega;
  const auto prof = psi.rel.profile();
  const double r_max = std::min(prof.s_max(), 0.5 * std::cbrt(2.0 / (w * w)) + 7.0 / std::sqrt(w));
  const auto gr = gauss_legendre(n_r, 0.0, r_max);
  const auto gt = gauss_legendre(n_theta, -1.0, 1.0);
  const auto gp = gauss_legendre(n_phi, 0.0, std::numbers::pi);
  const auto gg = gauss_legendre(n_gamma, -1.0, 1.0);

  auto wave = [&](double ax, double ay, double az, double bx, double by, double bz) {
    const double dx = ax - bx, dy = ay - by, dz = az - bz;
    const double sx = ax + bx, sy = ay + by, sz = az + bz;
    const double s = std::sqrt(dx * dx + dy * dy + dz * dz);
    return prof.evaluate(s) * std::exp(-0.25 * w * (sx * sx + sy * sy + sz * sz));
  };

  // r2 quadrature points (phi in [0, pi], doubled by mirror symmetry).
  struct P {
    double x, y, z, wt;
  };
  std::vector<P> pts;
  for (std::size_t a = 0; a < n_r; ++a)
    for (std::size_t b = 0; b < n_theta; ++b)
      for (std::size_t c = 0; c < n_phi; ++c) {
        const double r = gr.nodes[a], ct = gt.nodes[b], st = std::sqrt(1.0 - ct * ct), ph = gp.nodes[c];
        pts.push_back({r * st * std::cos(ph), r * st * std::sin(ph), r * ct,
                       2.0 * gr.weights[a] * r * r * gt.weights[b] * gp.weights[c]});
      }
  const auto np = static_cast<Eigen::Index>(pts.size());
  const auto nr = static_cast<Eigen::Index>(n_r);

  Eigen::MatrixXd A(nr, np);
  for (Eigen::Index i = 0; i < nr; ++i)
    for (Eigen::Index p = 0; p < np; ++p) A(i, p) = std::sqrt(pts[p].wt) * wave(0, 0, gr.nodes[i], pts[p].x, pts[p].y, pts[p].z);

  // rho_l(r, r') = 2 pi \int rho(r, r', x) P_l(x) dx.
  std::vector<Eigen::MatrixXd> rho_l(l_max + 1, Eigen::MatrixXd::Zero(nr, nr));
  Eigen::MatrixXd B(nr, np);
  for (std::size_t g = 0; g < n_gamma; ++g) {
    const double cg = gg.nodes[g], sg = std::sqrt(1.0 - cg * cg);
    for (Eigen::Index j = 0; j < nr; ++j) {
      const double r = gr.nodes[j];
      for (Eigen::Index p = 0; p < np; ++p)
        B(j, p) = std::sqrt(pts[p].wt) * wave(r * sg, 0, r * cg, pts[p].x, pts[p].y, pts[p].z);
    }
    const Eigen::MatrixXd rho = A * B.transpose();
    double p0 = 1.0, p1 = cg;
    for (int l = 0; l <= l_max; ++l) {
      const double pl = l == 0 ? 1.0 : (l == 1 ? cg : ((2.0 * l - 1.0) * cg * p1 - (l - 1.0) * p0) / l);
      if (l >= 2) {
        p0 = p1;
        p1 = pl;
      }
      rho_l[l] += 2.0 * std::numbers::pi * gg.weights[g] * pl * rho;
    }
  }

  // Eigenvalues on the r^2 dr measure; multiplicity 2l+1.
  Eigen::VectorXd m(nr);
  for (Eigen::Index i = 0; i < nr; ++i) m[i] = std::sqrt(gr.weights[i]) * gr.nodes[i];
  std::vector<std::pair<int, double>> ev;
  double trace = 0.0;
  for (int l = 0; l <= l_max; ++l) {
    Eigen::MatrixXd k = m.asDiagonal() * rho_l[l] * m.asDiagonal();
    k = 0.5 * (k + k.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k, Eigen::EigenvaluesOnly);
    for (Eigen::Index a = 0; a < nr; ++a) {
      ev.emplace_back(l, es.eigenvalues()[a]);
      trace += (2.0 * l + 1.0) * es.eigenvalues()[a];
    }
  }
  Entanglement out;
  out.trace = trace;
  double purity = 0.0;
  for (auto [l, x] : ev) {
    const double lam = x / trace;
    purity += (2.0 * l + 1.0) * lam * lam;
    if (lam > 1e-15) out.S -= (2.0 * l + 1.0) * lam * std::log2(lam);
  }
  out.L = 1.0 - purity;
  return out;
}

}  // namespace oracle
