#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "hooke/numerics.hpp"

namespace hooke {

// psi(r1, r2) = sum_l F_l(r1, r2) P_l(cos theta_12), F_l sampled on grid x grid.
struct SectorWavefunction {
  numerics::RadialGrid grid;
  std::vector<Eigen::MatrixXd> sectors;

  int l_max() const noexcept { return static_cast<int>(sectors.size()) - 1; }
  // Contribution of each sector to <psi|psi>.
  std::vector<double> sector_norms() const;
  double norm() const;
  void scale(double c);
};

// n(r) = 2 \int |psi|^2 d^3 r2 on the sector grid.
numerics::RadialFunction sector_density(const SectorWavefunction& psi);
double sector_kinetic(const SectorWavefunction& psi);
double sector_coulomb(const SectorWavefunction& psi);

// phi(s_k) for s_k = k h (origin included), 4 pi \int phi^2 s^2 ds = 1.
struct RelativeProfile {
  double h = 0.0;
  std::vector<double> phi;

  double evaluate(double s) const;
  double s_max() const noexcept { return h * static_cast<double>(phi.size() - 1); }
  // Reduced form u(s) = sqrt(4 pi) s phi(s) at the stored samples.
  std::vector<double> reduced() const;
};

// psi = phi_rel(|r1 - r2|) phi_com(|r1 + r2| / 2), phi_com = (4 w/pi)^{3/4} exp(-2 w R^2).
struct RelComState {
  RelativeProfile rel;
  double omega_com = 0.0;
};

struct RelComEnergies {
  double kinetic_rel = 0.0;
  double kinetic_com = 0.0;
  double coulomb = 0.0;
  double external = 0.0;  // requires omega
};

RelComEnergies relcom_energies(const RelComState& st, double omega);

// Density from the analytic angular integral over the relative direction.
numerics::RadialFunction relcom_density(const RelComState& st, const numerics::RadialGrid& grid,
                                        std::size_t max_s_samples = 2400);

struct ProjectionOptions {
  int l_max = 8;
  std::size_t s_nodes = 0;  // 0: max(48, 2 l_max + 32)
};

SectorWavefunction project_relcom(const RelComState& st, const numerics::RadialGrid& grid,
                                  const ProjectionOptions& opt);

// Default two-dimensional grid used for sector wavefunctions.
numerics::RadialGrid default_sector_grid(double omega, std::size_t n_points = 320);

// Per-sector symmetric orbital-pair expansion:
// F_l(r1, r2) = sum_ab M^l_ab R_a(r1) R_b(r2), R_a = u_a / r, \int u_a u_b dr = delta_ab.
struct PairSector {
  int l = 0;
  std::vector<std::vector<double>> reduced;  // u_a on the expansion grid
  Eigen::MatrixXd coefficients;
};

struct PairExpansion {
  numerics::RadialGrid grid;
  std::vector<PairSector> sectors;

  double norm() const;
  void normalize();
  numerics::RadialFunction density() const;
  SectorWavefunction to_sectors(const numerics::RadialGrid& target) const;
  // Reduced-density-matrix eigenvalues of sector l (multiplicity 2l+1), descending.
  std::vector<double> sector_spectrum(std::size_t index) const;
};

}  // namespace hooke
