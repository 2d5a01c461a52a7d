#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hooke/entanglement.hpp"
#include "hooke/exact_atom.hpp"
#include "hooke/ks_dft.hpp"
#include "hooke/numerics.hpp"
#include "hooke/two_electron.hpp"

namespace hooke::pert {

enum class ZerothOrder { kExactVxc, kLdaVxc, kBareOscillator };

const char* to_string(ZerothOrder z);

// Orbitals of h = -1/2 nabla^2 + omega^2 r^2 / 2 + w(r), w = v_H + v_xc of the frozen ground density.
// reduced[l][n] = u_nl with \int u^2 dr = 1, so R_nl = u_nl / r pairs with Y_lm.
struct KsSpectrum {
  numerics::RadialGrid grid;
  ZerothOrder source = ZerothOrder::kBareOscillator;
  double omega = 0.0;
  bool interacting = true;
  std::vector<double> w;  // v_H + v_xc on the grid (zero for the bare oscillator)
  std::vector<std::vector<double>> energies;
  std::vector<std::vector<std::vector<double>>> reduced;

  int l_max() const noexcept { return static_cast<int>(energies.size()) - 1; }
  int n_max() const noexcept { return energies.empty() ? -1 : static_cast<int>(energies[0].size()) - 1; }
  double energy(int n, int l) const { return energies.at(l).at(n); }
  const std::vector<double>& orbital(int n, int l) const { return reduced.at(l).at(n); }

  // max |4 pi \int R_nl R_n'l r^2 dr - delta| with R normalized against P_l (R = u / (r sqrt(4 pi))).
  double max_orthonormality_deviation() const;
};

KsSpectrum ks_spectrum_from_potential(const exact::HookeProblem& problem, const numerics::RadialGrid& grid,
                                      std::vector<double> w, ZerothOrder source, int l_max, int n_max);

struct SpectrumOptions {
  std::optional<numerics::RadialGrid> grid;  // default RadialGrid::for_omega
  ks::LdaFunctional functional;
  ks::ScfOptions scf;
};

// Builds w from the requested source (SCF for LDA, KS inversion of the exact density for exact v_xc).
KsSpectrum ks_spectrum(const exact::HookeProblem& problem, ZerothOrder source, int l_max, int n_max,
                       const SpectrumOptions& opt = {});

struct Orbital {
  int n = 0;
  int l = 0;
  int m = 0;
};

enum class PairSymmetry { kProduct, kSinglet, kTriplet };

// Product: phi_a(1) phi_b(2). Singlet/triplet: (phi_a phi_b +- phi_b phi_a) / sqrt 2.
struct Configuration {
  Orbital a;
  Orbital b;
  PairSymmetry symmetry = PairSymmetry::kProduct;
};

// \int\int u_00 u_a (r1) u_00 u_b (r2) r_<^L / r_>^(L+1) dr1 dr2.
double coulomb_radial_integral(const KsSpectrum& s, int L, int na, int la, int nb, int lb);

// \int u_n0 w u_00 dr.
double one_body_element(const KsSpectrum& s, int n);

struct CoulombMultipole {
  int l = 0;
  int n1 = 0;
  int n2 = 0;
  double A = 0.0;  // I^l(n1, n2)
  double B = 0.0;  // I^l(n1, n2) + I^l(n2, n1)
};

CoulombMultipole coulomb_radial_integrals(const KsSpectrum& s, int l, int n1, int n2);

// <Phi_k | 1/r12 - w(r1) - w(r2) | phi_00 phi_00>.
double matrix_element(const KsSpectrum& s, const Configuration& k);

struct ConfigurationCoefficient {
  int n1 = 0;
  int n2 = 0;
  int l = 0;
  PairSymmetry symmetry = PairSymmetry::kProduct;
  double coefficient = 0.0;  // a_0k for the m = 0 member; other m differ by (-1)^m
  double denominator = 0.0;  // E_0 - E_k
  int multiplicity = 1;
};

struct PerturbationOptions {
  double tail_share_tolerance = 1e-3;
};

struct PerturbationExpansion {
  ZerothOrder source = ZerothOrder::kBareOscillator;
  double omega = 0.0;
  double ground_coefficient = 0.0;  // a_00, fixed by intermediate normalization
  std::vector<ConfigurationCoefficient> coefficients;
  double E0 = 0.0;
  double E1 = 0.0;
  double E2 = 0.0;
  PairExpansion first_order_psi{numerics::RadialGrid(1.0, 4), {}};  // Psi0 + Psi1, not normalized
  double first_order_norm = 1.0;  // ||Psi0 + Psi1||
  std::vector<double> sector_weight;  // sum a^2 per l
  double tail_share = 0.0;
  std::vector<std::string> warnings;

  double first_order_energy() const { return E0 + E1; }
  double second_order_energy() const { return E0 + E1 + E2; }
};

PerturbationExpansion first_order_expansion(const KsSpectrum& s, const exact::HookeProblem& problem,
                                            const PerturbationOptions& opt = {});

struct PerturbedState {
  numerics::RadialFunction density;
  ent::ReducedDensityMatrix rdm;
  PairExpansion normalized;
};

// Renormalizes Psi0 + Psi1; density on the spectrum grid, RDM on `sector_grid`.
PerturbedState perturbed_density_and_rdm(const PerturbationExpansion& e, const numerics::RadialGrid& sector_grid);

double energy_percent_error(double approx, double exact_value);

}  // namespace hooke::pert
