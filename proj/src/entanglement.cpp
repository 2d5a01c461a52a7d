#include "hooke/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hooke/errors.hpp"

namespace hooke::ent {

namespace {
constexpr double kFourPi = 4.0 * std::numbers::pi;

double entropy_term(double x) { return x > 0.0 ? -x * std::log2(x) : 0.0; }
}  // namespace

double ReducedDensityMatrix::trace() const {
  double t = 0.0;
  const auto st = sector_traces();
  for (std::size_t l = 0; l < st.size(); ++l) t += degeneracy(l) * st[l];
  return t;
}

std::vector<double> ReducedDensityMatrix::sector_traces() const {
  std::vector<double> out;
  for (const auto& rho : sectors) {
    double t = 0.0;
    for (std::size_t i = 0; i < measure.size(); ++i) t += measure[i] * rho(i, i);
    out.push_back(t);
  }
  return out;
}

double SchmidtSpectrum::total() const {
  double s = 0.0;
  for (std::size_t l = 0; l < eigenvalues.size(); ++l)
    for (double x : eigenvalues[l]) s += (2.0 * l + 1.0) * x;
  return s;
}

double SchmidtSpectrum::purity() const {
  double s = 0.0;
  for (std::size_t l = 0; l < eigenvalues.size(); ++l)
    for (double x : eigenvalues[l]) s += (2.0 * l + 1.0) * x * x;
  return s;
}

double SchmidtSpectrum::entropy_bits() const {
  double s = 0.0;
  for (std::size_t l = 0; l < eigenvalues.size(); ++l)
    for (double x : eigenvalues[l]) s += (2.0 * l + 1.0) * entropy_term(x);
  return s;
}

ReducedDensityMatrix build_rdm(const SectorWavefunction& psi) {
  const auto& g = psi.grid;
  const auto w = numerics::radial_weights(g);
  ReducedDensityMatrix rdm{g, {}, std::vector<double>(g.size())};
  Eigen::VectorXd m(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    m[i] = w[i] * g.r(i) * g.r(i);
    rdm.measure[i] = kFourPi * m[i];
  }
  for (std::size_t l = 0; l < psi.sectors.size(); ++l) {
    const auto& f = psi.sectors[l];
    const double c = kFourPi / ((2.0 * l + 1.0) * (2.0 * l + 1.0));
    Eigen::MatrixXd k = c * (f * m.asDiagonal() * f.transpose());
    k = 0.5 * (k + k.transpose()).eval();
    rdm.sectors.push_back(std::move(k));
  }
  const double tr = rdm.trace();
  if (std::abs(tr - 1.0) > 1e-4) throw NormalizationError("build_rdm: trace deviates from 1", tr - 1.0);
  return rdm;
}

double linear_entropy(const ReducedDensityMatrix& rdm) {
  Eigen::Map<const Eigen::VectorXd> d(rdm.measure.data(), static_cast<Eigen::Index>(rdm.measure.size()));
  double purity = 0.0;
  for (std::size_t l = 0; l < rdm.sectors.size(); ++l) {
    const Eigen::MatrixXd a = d.asDiagonal() * rdm.sectors[l];
    purity += rdm.degeneracy(l) * (a.cwiseProduct(a.transpose())).sum();
  }
  return 1.0 - purity;
}

std::vector<double> clip_eigenvalues(std::vector<double> ev) {
  for (double& x : ev) {
    if (x < 0.0) {
      if (x < -1e-6) throw NonPhysicalKernelError("negative reduced-density-matrix eigenvalue", x);
      x = 0.0;
    }
  }
  std::sort(ev.rbegin(), ev.rend());
  return ev;
}

VonNeumannResult von_neumann_entropy(const ReducedDensityMatrix& rdm) {
  VonNeumannResult out;
  out.spectrum.source = SpectrumSource::kSectorDiagonalization;
  Eigen::VectorXd sq(rdm.measure.size());
  for (std::size_t i = 0; i < rdm.measure.size(); ++i) sq[i] = std::sqrt(rdm.measure[i]);
  for (const auto& rho : rdm.sectors) {
    const Eigen::MatrixXd a = sq.asDiagonal() * rho * sq.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
    const auto& e = es.eigenvalues();
    std::vector<double> ev(e.data(), e.data() + e.size());
    out.spectrum.eigenvalues.push_back(clip_eigenvalues(std::move(ev)));
  }
  out.entropy_bits = out.spectrum.entropy_bits();
  return out;
}

SchmidtSpectrum von_neumann_by_basis(const ReducedDensityMatrix& rdm, std::size_t l,
                                     const numerics::OrthonormalBasis& basis) {
  if (!(basis.grid() == rdm.grid)) throw InvalidInputError("von_neumann_by_basis: basis grid differs from RDM grid");
  if (l >= rdm.sectors.size()) throw InvalidInputError("von_neumann_by_basis: sector out of range");
  const std::size_t n = rdm.grid.size(), k = basis.order();
  Eigen::MatrixXd eta(n, k);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t i = 0; i < n; ++i) eta(i, a) = rdm.measure[i] * basis.function(a)[i];
  const Eigen::MatrixXd a = eta.transpose() * rdm.sectors[l] * eta;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (a + a.transpose()), Eigen::EigenvaluesOnly);
  const auto& e = es.eigenvalues();
  SchmidtSpectrum s;
  s.source = SpectrumSource::kBasisProjection;
  s.eigenvalues.assign(l + 1, {});
  s.eigenvalues[l] = clip_eigenvalues(std::vector<double>(e.data(), e.data() + e.size()));
  return s;
}

SchmidtSpectrum coefficient_spectrum(const PairExpansion& psi) {
  SchmidtSpectrum s;
  s.source = SpectrumSource::kCoefficients;
  int lmax = 0;
  for (const auto& sec : psi.sectors) lmax = std::max(lmax, sec.l);
  s.eigenvalues.assign(lmax + 1, {});
  for (std::size_t i = 0; i < psi.sectors.size(); ++i) {
    auto ev = clip_eigenvalues(psi.sector_spectrum(i));
    auto& dst = s.eigenvalues[psi.sectors[i].l];
    dst.insert(dst.end(), ev.begin(), ev.end());
    std::sort(dst.rbegin(), dst.rend());
  }
  return s;
}

double information_entropy(const numerics::RadialFunction& n) {
  const std::size_t m = n.size();
  std::vector<double> f(m + 1, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const double x = n.values[i];
    if (x < -1e-12) throw InvalidInputError("information_entropy: negative density");
    const double r = n.grid.r(i);
    f[i + 1] = x > 0.0 ? -kFourPi * x * std::log(x) * r * r : 0.0;
  }
  return numerics::integrate_uniform(f, n.grid.spacing());
}

double diagonal_approx_S(double s_n, int electron_count) {
  if (electron_count < 1) throw InvalidInputError("diagonal_approx_S: electron count must be positive");
  const double big_n = electron_count;
  return s_n / (big_n * std::log(2.0)) + std::log(big_n) / std::log(2.0);
}

double diagonal_approx_S(const numerics::RadialFunction& density, int electron_count) {
  return diagonal_approx_S(information_entropy(density), electron_count);
}

EntropyRecord entropies(const SectorWavefunction& psi, double omega,
                        const std::optional<numerics::RadialFunction>& density) {
  const auto rdm = build_rdm(psi);
  const auto vn = von_neumann_entropy(rdm);
  EntropyRecord r;
  r.omega = omega;
  r.linear = linear_entropy(rdm);
  r.von_neumann_bits = vn.entropy_bits;
  if (density) r.information_nats = information_entropy(*density);
  return r;
}

}  // namespace hooke::ent
