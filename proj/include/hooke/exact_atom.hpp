#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hooke/numerics.hpp"
#include "hooke/two_electron.hpp"

namespace hooke::exact {

struct HookeProblem {
  double omega = 0.5;
  bool interacting = true;  // false switches the electron-electron term off
  static constexpr int electron_count = 2;

  void validate() const;
};

struct RelativeSolverOptions {
  std::size_t max_terms = 400;
  std::size_t n_points = 20000;
  double energy_tolerance = 1e-12;
  int max_closed_form_degree = 10;
};

// Relative motion: -u'' + (omega^2 s^2 / 4 + 1/s) u = eps u, \int u^2 ds = 1.
struct RelativeMotionSolution {
  double omega = 0.0;
  bool interacting = true;
  double epsilon_rel = 0.0;
  numerics::RadialGrid grid{1.0, 4};    // s_k = k h, k = 1..N
  std::vector<double> u_rel;           // on grid
  double phi_origin = 0.0;             // phi(0) = u/(s sqrt(4 pi)) as s -> 0
  std::vector<double> series_coefficients;
  bool closed_form = false;
  int polynomial_degree = -1;          // termination degree when closed_form
  int nodes = 0;

  RelativeProfile profile() const;
};

// Degree n at which the series terminates for this omega, if any (n <= max_degree, node-less).
std::optional<int> terminating_degree(double omega, int max_degree = 10);

// Largest omega whose node-less ground state terminates at degree n (bisection on a_{n+1}(omega)).
double magic_omega(int degree);

std::vector<double> series_coefficients(double omega, double epsilon, bool interacting, std::size_t terms);

// Ground relative energy by node-count bisection (no closed-form shortcut).
double shoot_relative_energy(const HookeProblem& p, const RelativeSolverOptions& opt = {});

RelativeMotionSolution solve_relative_motion(const HookeProblem& p, const RelativeSolverOptions& opt = {});

struct SectorOptions {
  std::optional<numerics::RadialGrid> grid;  // default_sector_grid(omega)
  int l_max = 8;
  int l_cap = 32;
  double share_tolerance = 1e-8;
  std::size_t s_nodes = 0;
};

struct ExactWavefunction {
  HookeProblem problem;
  RelativeMotionSolution rel;
  double omega_com = 0.0;
  double total_energy = 0.0;
  SectorWavefunction sectors;
  std::optional<double> truncation_deficit;  // set when the dropped norm exceeds 1e-6
  std::vector<std::string> warnings;

  RelComState state() const;
};

ExactWavefunction assemble_exact_wavefunction(const RelativeMotionSolution& rel, const SectorOptions& opt = {});

numerics::RadialFunction exact_density(const ExactWavefunction& psi, const numerics::RadialGrid& grid);

double interaction_ratio(const ExactWavefunction& psi);

// <T + V_ee> from the sector representation.
double expectation_T_plus_Vee(const SectorWavefunction& psi);

struct EnergyParts {
  double kinetic = 0.0;
  double coulomb = 0.0;
  double external = 0.0;
  double total() const { return kinetic + coulomb + external; }
};

// Energy partition from the relative/centre-of-mass factors.
EnergyParts exact_energy_parts(const ExactWavefunction& psi);

}  // namespace hooke::exact
