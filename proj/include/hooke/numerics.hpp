#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hooke::numerics {

// Uniform mesh r_i = i*h, i = 1..N; the origin is excluded.
class RadialGrid {
 public:
  RadialGrid(double r_max, std::size_t n_points);

  // Default mesh scaled with the oscillator length 1/sqrt(omega).
  static RadialGrid for_omega(double omega, std::size_t n_points = 4000, double r_max_scale = 20.0);

  double r_max() const noexcept { return r_max_; }
  std::size_t size() const noexcept { return n_; }
  double spacing() const noexcept { return h_; }
  double r(std::size_t i) const noexcept { return static_cast<double>(i + 1) * h_; }
  std::vector<double> points() const;

  bool operator==(const RadialGrid& o) const noexcept { return n_ == o.n_ && r_max_ == o.r_max_; }

 private:
  double r_max_;
  double h_;
  std::size_t n_;
};

enum class Interpretation { kFull, kReduced, kDensity, kPotential };

struct RadialFunction {
  RadialGrid grid;
  std::vector<double> values;
  Interpretation kind;

  RadialFunction(RadialGrid g, std::vector<double> v, Interpretation k);

  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t i) const noexcept { return values[i]; }
};

// Composite closed Simpson weights for m+1 equally spaced samples x_0..x_m.
// An odd interval count closes with a 3/8 panel.
std::vector<double> closed_weights(std::size_t n_samples, double h);

double integrate_uniform(std::span<const double> samples, double h);

// Weights on r_1..r_N for integrands that vanish at the origin.
std::vector<double> radial_weights(const RadialGrid& grid);

// \int_0^{r_max} f(r) r^p dr.
double integrate_radial(const RadialFunction& f, int weight_power);

// Running integral F_k = \int_0^{x_k} g over samples g_0..g_m (fourth order).
std::vector<double> cumulative_integral(std::span<const double> samples, double h);

// Fourth-order first derivative of equally spaced samples (one-sided at the ends).
std::vector<double> derivative_uniform(std::span<const double> y, double h);

struct TridiagonalSystem {
  std::vector<double> diagonal;
  std::vector<double> off_diagonal;
  double spacing = 1.0;  // eigenvectors normalized so that sum v_i^2 * spacing = 1
};

struct EigenPair {
  double value;
  std::vector<double> vector;
};

struct EigenSolverOptions {
  int max_iterations = 8;
  double residual_tolerance = 1e-9;
};

std::vector<EigenPair> solve_tridiagonal_eigen(const TridiagonalSystem& sys, std::size_t n_states,
                                               const EigenSolverOptions& opt = {});

// Bound states of -u''/2 + V u = e u on the grid with u(0) = u(r_max + h) = 0.
// Reduced functions are normalized to \int u^2 dr = 1.
struct RadialStates {
  std::vector<double> energies;      // with the h^2 deferred correction
  std::vector<double> raw_energies;  // plain three-point eigenvalues
  std::vector<std::vector<double>> reduced;
};

RadialStates radial_eigenstates(const RadialGrid& grid, std::span<const double> potential,
                                std::size_t n_states, bool deferred_correction = true);

TridiagonalSystem radial_hamiltonian(const RadialGrid& grid, std::span<const double> potential);

// eta_i(r) = p_i(r) exp(-omega_r r^2 / 2) with 4 pi \int eta_i eta_j r^2 dr = delta_ij.
class OrthonormalBasis {
 public:
  double omega_r() const noexcept { return omega_r_; }
  std::size_t order() const noexcept { return functions_.size(); }
  const RadialGrid& grid() const noexcept { return grid_; }
  const std::vector<double>& function(std::size_t i) const { return functions_.at(i); }
  const std::vector<std::vector<double>>& functions() const noexcept { return functions_; }

  // Off-grid evaluation through the stored three-term recurrence.
  std::vector<double> evaluate_all(double r) const;
  double evaluate(std::size_t i, double r) const;

  double max_overlap_deviation() const;

 private:
  friend OrthonormalBasis build_orthonormal_basis(double, std::size_t, const RadialGrid&);
  OrthonormalBasis(double w, RadialGrid g) : omega_r_(w), grid_(g) {}

  double omega_r_;
  RadialGrid grid_;
  std::vector<std::vector<double>> functions_;
  double c0_ = 0.0;
  std::vector<double> alpha_, beta_, gamma_;
};

OrthonormalBasis build_orthonormal_basis(double omega_r, std::size_t order, const RadialGrid& grid);

struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussLegendre gauss_legendre(std::size_t n);
GaussLegendre gauss_legendre(std::size_t n, double a, double b);

// P_0..P_lmax at x.
std::vector<double> legendre_values(int l_max, double x);

struct LegendreTable {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<std::vector<double>> values;  // values[l][k] = P_l(x_k)
};

LegendreTable legendre_table(int l_max, std::size_t nodes);

// Six-point Lagrange interpolation of samples y_k = f(x0 + k h); zero outside the table.
double interpolate_uniform(std::span<const double> samples, double x0, double h, double x);

// Resample values given on `from` onto `to` (zero beyond the source range).
std::vector<double> resample(const RadialGrid& from, std::span<const double> values, const RadialGrid& to,
                             double origin_value);

}  // namespace hooke::numerics
