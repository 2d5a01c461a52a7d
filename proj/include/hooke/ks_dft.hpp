#pragma once

#include <json.hpp>
#include <optional>
#include <vector>

#include "hooke/exact_atom.hpp"
#include "hooke/numerics.hpp"

namespace hooke::ks {

enum class CorrelationVariant { kPerdewWang92, kWigner };

// Local exchange plus a homogeneous-gas correlation fit (unpolarized).
struct LdaFunctional {
  CorrelationVariant correlation = CorrelationVariant::kPerdewWang92;

  double eps_x(double n) const;
  double eps_c(double n) const;
  double v_x(double n) const;
  double v_c(double n) const;
  double eps_xc(double n) const { return eps_x(n) + eps_c(n); }
  double v_xc(double n) const { return v_x(n) + v_c(n); }

  // Correlation energy per particle and its r_s derivative.
  double eps_c_rs(double rs, double* deps_drs = nullptr) const;

  nlohmann::json constants() const;
};

struct Pw92Constants {
  static constexpr double A = 0.031091;
  static constexpr double alpha1 = 0.21370;
  static constexpr double beta1 = 7.5957;
  static constexpr double beta2 = 3.5876;
  static constexpr double beta3 = 1.6382;
  static constexpr double beta4 = 0.49294;
};

numerics::RadialFunction hartree_potential(const numerics::RadialFunction& n);
double hartree_energy(const numerics::RadialFunction& n);
numerics::RadialFunction lda_vxc(const numerics::RadialFunction& n, const LdaFunctional& f);
double lda_exc(const numerics::RadialFunction& n, const LdaFunctional& f);

// 4 pi \int f g r^2 dr for two samples on the same grid.
double volume_integral(const numerics::RadialFunction& a, std::span<const double> b);

struct ScfOptions {
  double mixing = 0.3;
  double tolerance = 1e-9;
  int max_iterations = 500;
  int anderson_depth = 6;  // 0 gives plain linear mixing
  std::optional<numerics::RadialFunction> initial_density;
};

struct ScfState {
  numerics::RadialFunction density;
  numerics::RadialFunction orbital;  // u_00 with \int u^2 dr = 1
  numerics::RadialFunction potential_hxc;  // v_H + v_xc of the final density
  double eigenvalue = 0.0;
  double raw_eigenvalue = 0.0;  // three-point value, no deferred correction
  int iterations = 0;
  double residual = 0.0;
  std::vector<double> residual_history;
};

ScfState scf_solve(const exact::HookeProblem& problem, const numerics::RadialGrid& grid, const LdaFunctional& f,
                   const ScfOptions& opt = {});

double lda_total_energy(const ScfState& st, const LdaFunctional& f, const exact::HookeProblem& problem);

// T_s + \int v_ext n + E_H + E_xc with T_s taken from the orbital directly.
double lda_energy_audit(const ScfState& st, const LdaFunctional& f, const exact::HookeProblem& problem);

enum class Gauge { kFixedEigenvalue, kAsymptotic };

// Second-derivative stencil; three-point matches the SCF discretization exactly.
enum class Stencil { kThreePoint, kFivePoint };

struct InversionOptions {
  Gauge gauge = Gauge::kAsymptotic;
  double eigenvalue = 0.0;            // used by kFixedEigenvalue
  double density_floor = 1e-14;       // trusted window: n > floor * max n
  double tail_fraction = 0.3;         // part of the window used for the asymptotic fit
  bool subtract_hartree = true;
  Stencil stencil = Stencil::kFivePoint;
};

struct Inversion {
  numerics::RadialFunction v_s;
  numerics::RadialFunction v_xc;
  double eigenvalue = 0.0;
  std::size_t window_end = 0;   // points [0, window_end) are trusted
  bool truncated = false;       // density fell below the floor before r_max
  double tail_coefficient = 0.0;
  double kinetic_s = 0.0;
};

Inversion invert_ks(const numerics::RadialFunction& n, const exact::HookeProblem& problem,
                    const InversionOptions& opt = {});

enum class XcSource { kLda, kExactInversion };

struct XcRecord {
  double E_xc = 0.0;
  numerics::RadialFunction v_xc;
  XcSource source = XcSource::kLda;
  double E_total = 0.0;
  double indicator = 0.0;
};

XcRecord exact_exc(const exact::ExactWavefunction& psi, const numerics::RadialFunction& n_exact,
                   const Inversion& inv);
XcRecord lda_xc_record(const ScfState& st, const LdaFunctional& f, const exact::HookeProblem& problem);

// \int (u')^2 dr, i.e. the non-interacting kinetic energy of a doubly occupied orbital.
double orbital_kinetic(const numerics::RadialFunction& u);

struct DensityErrorMetric {
  double percent = 0.0;           // 100 sum|a - b| / sum b over grid samples
  double weighted_percent = 0.0;  // same with the 4 pi r^2 dr measure
};

DensityErrorMetric density_percent_error(const numerics::RadialFunction& a, const numerics::RadialFunction& b);

}  // namespace hooke::ks
