#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "hooke/numerics.hpp"
#include "hooke/two_electron.hpp"

namespace hooke::ent {

// rho(r, r') = sum_l rho_l(r, r') sum_m Y_lm(r) Y_lm*(r'); trace = sum_l (2l+1) 4 pi \int rho_l(r,r) r^2 dr.
struct ReducedDensityMatrix {
  numerics::RadialGrid grid;
  std::vector<Eigen::MatrixXd> sectors;
  std::vector<double> measure;  // 4 pi w_i r_i^2

  int degeneracy(std::size_t l) const noexcept { return static_cast<int>(2 * l + 1); }
  double trace() const;
  std::vector<double> sector_traces() const;
};

enum class SpectrumSource { kSectorDiagonalization, kBasisProjection, kCoefficients };

struct SchmidtSpectrum {
  std::vector<std::vector<double>> eigenvalues;  // per l, descending; multiplicity 2l+1
  SpectrumSource source = SpectrumSource::kSectorDiagonalization;

  double total() const;
  double purity() const;  // sum (2l+1) lambda^2
  double linear_entropy() const { return 1.0 - purity(); }
  double entropy_bits() const;
};

// S in bits, S_n in nats.
struct EntropyRecord {
  double omega = 0.0;
  double linear = 0.0;
  double von_neumann_bits = 0.0;
  std::optional<double> information_nats;
};

ReducedDensityMatrix build_rdm(const SectorWavefunction& psi);

double linear_entropy(const ReducedDensityMatrix& rdm);

struct VonNeumannResult {
  SchmidtSpectrum spectrum;
  double entropy_bits = 0.0;
};

VonNeumannResult von_neumann_entropy(const ReducedDensityMatrix& rdm);

// Eigenvalues of A_nn' = \int\int eta_n rho_l eta_n' (4 pi)^2 r^2 r'^2 for one sector.
SchmidtSpectrum von_neumann_by_basis(const ReducedDensityMatrix& rdm, std::size_t l,
                                     const numerics::OrthonormalBasis& basis);

// Spectrum of a pair expansion straight from its coefficients.
SchmidtSpectrum coefficient_spectrum(const PairExpansion& psi);

// Negative eigenvalues down to -1e-6 are set to zero; below that NonPhysicalKernelError.
std::vector<double> clip_eigenvalues(std::vector<double> ev);

double information_entropy(const numerics::RadialFunction& density);
double diagonal_approx_S(double information_nats, int electron_count);
double diagonal_approx_S(const numerics::RadialFunction& density, int electron_count);

EntropyRecord entropies(const SectorWavefunction& psi, double omega,
                        const std::optional<numerics::RadialFunction>& density = std::nullopt);

}  // namespace hooke::ent
