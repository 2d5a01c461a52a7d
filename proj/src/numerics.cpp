#include "hooke/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "hooke/errors.hpp"

namespace hooke::numerics {

RadialGrid::RadialGrid(double r_max, std::size_t n_points) : r_max_(r_max), h_(0.0), n_(n_points) {
  if (!(r_max > 0.0) || !std::isfinite(r_max)) throw InvalidInputError("RadialGrid: r_max must be positive");
  if (n_points < 4) throw InvalidInputError("RadialGrid: need at least 4 points");
  h_ = r_max / static_cast<double>(n_points);
}

RadialGrid RadialGrid::for_omega(double omega, std::size_t n_points, double r_max_scale) {
  if (!(omega > 0.0)) throw InvalidInputError("RadialGrid::for_omega: omega must be positive");
  return RadialGrid(r_max_scale / std::sqrt(omega), n_points);
}

std::vector<double> RadialGrid::points() const {
  std::vector<double> p(n_);
  for (std::size_t i = 0; i < n_; ++i) p[i] = r(i);
  return p;
}

RadialFunction::RadialFunction(RadialGrid g, std::vector<double> v, Interpretation k)
    : grid(g), values(std::move(v)), kind(k) {
  if (values.size() != grid.size()) throw InvalidInputError("RadialFunction: size does not match grid");
  double peak = 0.0;
  for (double x : values) {
    if (!std::isfinite(x)) throw InvalidInputError("RadialFunction: non-finite value");
    peak = std::max(peak, std::abs(x));
  }
  if (kind == Interpretation::kDensity) {
    for (double& x : values) {
      if (x < 0.0) {
        if (x < -1e-12 * std::max(peak, 1.0)) throw InvalidInputError("RadialFunction: negative density");
        x = 0.0;
      }
    }
  }
}

std::vector<double> closed_weights(std::size_t n_samples, double h) {
  if (n_samples < 2) throw InvalidInputError("closed_weights: need at least two samples");
  std::vector<double> w(n_samples, 0.0);
  const std::size_t m = n_samples - 1;
  auto simpson = [&](std::size_t a, std::size_t b) {
    for (std::size_t i = a; i < b; i += 2) {
      w[i] += h / 3.0;
      w[i + 1] += 4.0 * h / 3.0;
      w[i + 2] += h / 3.0;
    }
  };
  auto three_eighths = [&](std::size_t a) {
    w[a] += 3.0 * h / 8.0;
    w[a + 1] += 9.0 * h / 8.0;
    w[a + 2] += 9.0 * h / 8.0;
    w[a + 3] += 3.0 * h / 8.0;
  };
  if (m == 1) {
    w[0] = w[1] = 0.5 * h;
  } else if (m % 2 == 0) {
    simpson(0, m);
  } else {
    simpson(0, m - 3);
    three_eighths(m - 3);
  }
  return w;
}

double integrate_uniform(std::span<const double> samples, double h) {
  const auto w = closed_weights(samples.size(), h);
  double s = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) s += w[i] * samples[i];
  return s;
}

std::vector<double> radial_weights(const RadialGrid& grid) {
  auto w = closed_weights(grid.size() + 1, grid.spacing());
  return {w.begin() + 1, w.end()};
}

double integrate_radial(const RadialFunction& f, int weight_power) {
  if (weight_power < 0) throw InvalidInputError("integrate_radial: negative weight power");
  const auto& g = f.grid;
  std::vector<double> s(g.size() + 1);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!std::isfinite(f.values[i])) throw InvalidInputError("integrate_radial: non-finite sample");
    s[i + 1] = f.values[i] * std::pow(g.r(i), weight_power);
  }
  s[0] = weight_power > 0 ? 0.0 : 4.0 * s[1] - 6.0 * s[2] + 4.0 * s[3] - s[4];
  return integrate_uniform(s, g.spacing());
}

std::vector<double> cumulative_integral(std::span<const double> g, double h) {
  const std::size_t n = g.size();
  std::vector<double> out(n, 0.0);
  if (n < 2) return out;
  if (n < 4) {
    for (std::size_t i = 1; i < n; ++i) out[i] = out[i - 1] + 0.5 * h * (g[i - 1] + g[i]);
    return out;
  }
  const double c = h / 24.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double piece;
    if (i == 0)
      piece = c * (9.0 * g[0] + 19.0 * g[1] - 5.0 * g[2] + g[3]);
    else if (i + 2 >= n)
      piece = c * (9.0 * g[i + 1] + 19.0 * g[i] - 5.0 * g[i - 1] + g[i - 2]);
    else
      piece = c * (-g[i - 1] + 13.0 * g[i] + 13.0 * g[i + 1] - g[i + 2]);
    out[i + 1] = out[i] + piece;
  }
  return out;
}

std::vector<double> derivative_uniform(std::span<const double> u, double h) {
  const std::size_t m = u.size();
  if (m < 5) throw InvalidInputError("derivative_uniform: need at least five samples");
  std::vector<double> d(m);
  for (std::size_t k = 0; k < m; ++k) {
    if (k == 0)
      d[k] = (-25 * u[0] + 48 * u[1] - 36 * u[2] + 16 * u[3] - 3 * u[4]) / (12 * h);
    else if (k == 1)
      d[k] = (-3 * u[0] - 10 * u[1] + 18 * u[2] - 6 * u[3] + u[4]) / (12 * h);
    else if (k == m - 1)
      d[k] = (25 * u[k] - 48 * u[k - 1] + 36 * u[k - 2] - 16 * u[k - 3] + 3 * u[k - 4]) / (12 * h);
    else if (k == m - 2)
      d[k] = (3 * u[k + 1] + 10 * u[k] - 18 * u[k - 1] + 6 * u[k - 2] - u[k - 3]) / (12 * h);
    else
      d[k] = (u[k - 2] - 8 * u[k - 1] + 8 * u[k + 1] - u[k + 2]) / (12 * h);
  }
  return d;
}

namespace {

std::size_t sturm_count(const TridiagonalSystem& s, double x) {
  const std::size_t n = s.diagonal.size();
  const double tiny = std::numeric_limits<double>::min() * 1e10;
  std::size_t count = 0;
  double q = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = i > 0 ? s.off_diagonal[i - 1] : 0.0;
    q = s.diagonal[i] - x - (i > 0 ? e * e / q : 0.0);
    // A vanishing pivot counts as negative.
    if (std::abs(q) < tiny) q = -tiny;
    if (q < 0.0) ++count;
  }
  return count;
}

// Solve (T - shift) x = b with partial pivoting; b is overwritten by x.
void shifted_solve(const TridiagonalSystem& s, double shift, std::vector<double>& b, double floor) {
  const std::size_t n = s.diagonal.size();
  std::vector<double> d(n), u1(n, 0.0), u2(n, 0.0), l(n, 0.0);
  std::vector<char> swapped(n, 0);
  // Row i holds (sub = e_{i-1}, diag, super = e_i) before elimination.
  std::vector<double> diag(n), sup(n, 0.0), sub(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    diag[i] = s.diagonal[i] - shift;
    if (i + 1 < n) sup[i] = s.off_diagonal[i];
    if (i > 0) sub[i] = s.off_diagonal[i - 1];
  }
  // Current pivot row values: (a0, a1, a2) columns (i, i+1, i+2).
  double a0 = diag[0], a1 = n > 1 ? sup[0] : 0.0, a2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i + 1 < n) {
      const double b0 = sub[i + 1], b1 = diag[i + 1], b2 = i + 2 < n ? sup[i + 1] : 0.0;
      if (std::abs(b0) > std::abs(a0)) {
        swapped[i] = 1;
        d[i] = b0;
        u1[i] = b1;
        u2[i] = b2;
        const double m = a0 / b0;
        l[i] = m;
        a0 = a1 - m * b1;
        a1 = a2 - m * b2;
      } else {
        if (std::abs(a0) < floor) a0 = floor;
        d[i] = a0;
        u1[i] = a1;
        u2[i] = a2;
        const double m = b0 / a0;
        l[i] = m;
        a0 = b1 - m * a1;
        a1 = b2 - m * a2;
      }
      a2 = 0.0;
    } else {
      if (std::abs(a0) < floor) a0 = floor;
      d[i] = a0;
    }
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (swapped[i]) std::swap(b[i], b[i + 1]);
    b[i + 1] -= l[i] * b[i];
  }
  for (std::size_t k = n; k-- > 0;) {
    double v = b[k];
    if (k + 1 < n) v -= u1[k] * b[k + 1];
    if (k + 2 < n) v -= u2[k] * b[k + 2];
    b[k] = v / d[k];
  }
}

void multiply(const TridiagonalSystem& s, const std::vector<double>& v, std::vector<double>& out) {
  const std::size_t n = v.size();
  out.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double x = s.diagonal[i] * v[i];
    if (i > 0) x += s.off_diagonal[i - 1] * v[i - 1];
    if (i + 1 < n) x += s.off_diagonal[i] * v[i + 1];
    out[i] = x;
  }
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

std::vector<EigenPair> solve_tridiagonal_eigen(const TridiagonalSystem& sys, std::size_t n_states,
                                               const EigenSolverOptions& opt) {
  const std::size_t n = sys.diagonal.size();
  if (n < 2) throw InvalidInputError("solve_tridiagonal_eigen: dimension must be >= 2");
  if (sys.off_diagonal.size() != n - 1) throw InvalidInputError("solve_tridiagonal_eigen: off-diagonal size");
  if (n_states > n) throw InvalidInputError("solve_tridiagonal_eigen: n_states exceeds dimension");
  if (!(sys.spacing > 0.0)) throw InvalidInputError("solve_tridiagonal_eigen: spacing must be positive");

  double lo = std::numeric_limits<double>::max(), hi = std::numeric_limits<double>::lowest();
  double norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double rad = 0.0;
    if (i > 0) rad += std::abs(sys.off_diagonal[i - 1]);
    if (i + 1 < n) rad += std::abs(sys.off_diagonal[i]);
    lo = std::min(lo, sys.diagonal[i] - rad);
    hi = std::max(hi, sys.diagonal[i] + rad);
    norm = std::max(norm, std::abs(sys.diagonal[i]) + rad);
  }
  const double eps = std::numeric_limits<double>::epsilon();
  const double abs_tol = 4.0 * eps * std::max(norm, 1.0);

  std::vector<double> values(n_states);
  for (std::size_t k = 0; k < n_states; ++k) {
    double a = lo, b = hi;
    if (k > 0) a = std::max(a, values[k - 1] - abs_tol);
    for (int it = 0; it < 200 && b - a > abs_tol + 2.0 * eps * std::abs(a + b); ++it) {
      const double mid = 0.5 * (a + b);
      if (sturm_count(sys, mid) > k)
        b = mid;
      else
        a = mid;
    }
    values[k] = 0.5 * (a + b);
  }

  const double floor = eps * std::max(norm, 1.0);
  const double res_tol = std::max(opt.residual_tolerance, 64.0 * eps * std::max(norm, 1.0));
  std::vector<EigenPair> out;
  out.reserve(n_states);
  std::vector<double> tv;
  for (std::size_t k = 0; k < n_states; ++k) {
    // Cluster members are kept orthogonal to earlier vectors.
    std::vector<std::size_t> cluster;
    for (std::size_t j = 0; j < k; ++j)
      if (std::abs(values[j] - values[k]) < 1e-7 * std::max(norm, 1.0)) cluster.push_back(j);

    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + 0.1 * std::sin(1.0 + 0.7 * static_cast<double>(i * (k + 1)));
    double lambda = values[k];
    double residual = std::numeric_limits<double>::infinity();
    for (int it = 0; it < opt.max_iterations; ++it) {
      shifted_solve(sys, values[k] + floor, v, floor);
      for (std::size_t j : cluster) {
        const double p = dot(v, out[j].vector) / dot(out[j].vector, out[j].vector);
        for (std::size_t i = 0; i < n; ++i) v[i] -= p * out[j].vector[i];
      }
      const double nv = std::sqrt(dot(v, v));
      for (double& x : v) x /= nv;
      multiply(sys, v, tv);
      lambda = dot(v, tv);
      double r2 = 0.0;
      for (std::size_t i = 0; i < n; ++i) r2 += (tv[i] - lambda * v[i]) * (tv[i] - lambda * v[i]);
      residual = std::sqrt(r2);
      if (residual < res_tol && it >= 1) break;
    }
    if (!(residual < res_tol))
      throw NumericFailureError("solve_tridiagonal_eigen: inverse iteration did not converge for state " +
                                    std::to_string(k),
                                residual);
    const double scale = 1.0 / std::sqrt(sys.spacing);
    // Sign convention: first significant component positive.
    double first = 0.0;
    for (double x : v)
      if (std::abs(x) > 1e-8) {
        first = x;
        break;
      }
    const double sgn = first < 0.0 ? -1.0 : 1.0;
    for (double& x : v) x *= sgn * scale;
    out.push_back({lambda, std::move(v)});
  }
  return out;
}

TridiagonalSystem radial_hamiltonian(const RadialGrid& grid, std::span<const double> potential) {
  if (potential.size() != grid.size()) throw InvalidInputError("radial_hamiltonian: potential size mismatch");
  const double h = grid.spacing();
  const double t = 0.5 / (h * h);
  TridiagonalSystem s;
  s.diagonal.resize(grid.size());
  s.off_diagonal.assign(grid.size() - 1, -t);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(potential[i])) throw InvalidInputError("radial_hamiltonian: non-finite potential");
    s.diagonal[i] = 2.0 * t + potential[i];
  }
  s.spacing = h;
  return s;
}

RadialStates radial_eigenstates(const RadialGrid& grid, std::span<const double> potential, std::size_t n_states,
                                bool deferred_correction) {
  const auto sys = radial_hamiltonian(grid, potential);
  auto pairs = solve_tridiagonal_eigen(sys, n_states);
  RadialStates out;
  const double h = grid.spacing();
  const std::size_t n = grid.size();
  for (auto& p : pairs) {
    double corr = 0.0;
    if (deferred_correction) {
      double num = 0.0, den = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double um = i > 0 ? p.vector[i - 1] : 0.0;
        const double up = i + 1 < n ? p.vector[i + 1] : 0.0;
        const double d2 = (up - 2.0 * p.vector[i] + um) / (h * h);
        num += d2 * d2;
        den += p.vector[i] * p.vector[i];
      }
      corr = h * h / 24.0 * num / den;
    }
    out.raw_energies.push_back(p.value);
    out.energies.push_back(p.value + corr);
    // Renormalize with the same Simpson rule used elsewhere.
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) sq[i] = p.vector[i] * p.vector[i];
    const auto w = radial_weights(grid);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += w[i] * sq[i];
    const double c = 1.0 / std::sqrt(s);
    for (double& x : p.vector) x *= c;
    out.reduced.push_back(std::move(p.vector));
  }
  return out;
}

OrthonormalBasis build_orthonormal_basis(double omega_r, std::size_t order, const RadialGrid& grid) {
  if (!(omega_r > 0.0)) throw InvalidInputError("build_orthonormal_basis: omega_r must be positive");
  if (order < 1) throw InvalidInputError("build_orthonormal_basis: order must be >= 1");
  OrthonormalBasis b(omega_r, grid);
  const std::size_t n = grid.size();
  const auto w = radial_weights(grid);
  std::vector<double> mu(n);
  for (std::size_t i = 0; i < n; ++i) mu[i] = 4.0 * std::numbers::pi * w[i] * grid.r(i) * grid.r(i);
  auto inner = [&](const std::vector<double>& a, const std::vector<double>& c) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += mu[i] * a[i] * c[i];
    return s;
  };

  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = std::exp(-0.5 * omega_r * grid.r(i) * grid.r(i));
  b.c0_ = 1.0 / std::sqrt(inner(g, g));
  for (double& x : g) x *= b.c0_;
  b.functions_.push_back(std::move(g));

  for (std::size_t k = 1; k < order; ++k) {
    const auto& prev = b.functions_[k - 1];
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = grid.r(i) * prev[i];
    const double alpha = inner(v, prev);
    const double beta = k >= 2 ? inner(v, b.functions_[k - 2]) : 0.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t j = 0; j < k; ++j) {
        const double p = inner(v, b.functions_[j]);
        for (std::size_t i = 0; i < n; ++i) v[i] -= p * b.functions_[j][i];
      }
    }
    const double gamma = std::sqrt(inner(v, v));
    if (!(gamma > 0.0)) throw DegradedBasisError("build_orthonormal_basis: linear dependence", k, k, 0.0);
    for (double& x : v) x /= gamma;
    b.alpha_.push_back(alpha);
    b.beta_.push_back(beta);
    b.gamma_.push_back(gamma);
    b.functions_.push_back(std::move(v));
  }

  for (std::size_t i = 0; i < order; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      const double o = inner(b.functions_[i], b.functions_[j]) - (i == j ? 1.0 : 0.0);
      if (std::abs(o) > 1e-6)
        throw DegradedBasisError("build_orthonormal_basis: overlap audit failed for pair (" + std::to_string(j) +
                                     "," + std::to_string(i) + ")",
                                 j, i, o);
    }
  return b;
}

std::vector<double> OrthonormalBasis::evaluate_all(double r) const {
  std::vector<double> out(order());
  out[0] = c0_ * std::exp(-0.5 * omega_r_ * r * r);
  for (std::size_t k = 1; k < order(); ++k) {
    double v = (r - alpha_[k - 1]) * out[k - 1];
    if (k >= 2) v -= beta_[k - 1] * out[k - 2];
    out[k] = v / gamma_[k - 1];
  }
  return out;
}

double OrthonormalBasis::evaluate(std::size_t i, double r) const { return evaluate_all(r).at(i); }

double OrthonormalBasis::max_overlap_deviation() const {
  const auto w = radial_weights(grid_);
  double worst = 0.0;
  for (std::size_t i = 0; i < order(); ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < grid_.size(); ++k)
        s += 4.0 * std::numbers::pi * w[k] * grid_.r(k) * grid_.r(k) * functions_[i][k] * functions_[j][k];
      worst = std::max(worst, std::abs(s - (i == j ? 1.0 : 0.0)));
    }
  return worst;
}

GaussLegendre gauss_legendre(std::size_t n) {
  if (n < 1) throw InvalidInputError("gauss_legendre: need at least one node");
  if (n == 1) return {{0.0}, {2.0}};
  GaussLegendre g;
  g.nodes.resize(n);
  g.weights.resize(n);
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = p2;
      }
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = p2;
      }
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    g.nodes[i] = -x;
    g.nodes[n - 1 - i] = x;
    g.weights[i] = g.weights[n - 1 - i] = w;
  }
  return g;
}

GaussLegendre gauss_legendre(std::size_t n, double a, double b) {
  auto g = gauss_legendre(n);
  const double c = 0.5 * (b - a), m = 0.5 * (b + a);
  for (std::size_t i = 0; i < n; ++i) {
    g.nodes[i] = m + c * g.nodes[i];
    g.weights[i] *= c;
  }
  return g;
}

std::vector<double> legendre_values(int l_max, double x) {
  std::vector<double> p(static_cast<std::size_t>(l_max) + 1);
  p[0] = 1.0;
  if (l_max >= 1) p[1] = x;
  for (int l = 2; l <= l_max; ++l) p[l] = ((2.0 * l - 1.0) * x * p[l - 1] - (l - 1.0) * p[l - 2]) / l;
  return p;
}

LegendreTable legendre_table(int l_max, std::size_t nodes) {
  if (l_max < 0) throw InvalidInputError("legendre_table: l_max must be >= 0");
  if (nodes < static_cast<std::size_t>(l_max) + 1) throw InvalidInputError("legendre_table: nodes < l_max + 1");
  auto g = gauss_legendre(nodes);
  LegendreTable t{g.nodes, g.weights, {}};
  t.values.assign(l_max + 1, std::vector<double>(nodes));
  for (std::size_t k = 0; k < nodes; ++k) {
    const auto p = legendre_values(l_max, g.nodes[k]);
    for (int l = 0; l <= l_max; ++l) t.values[l][k] = p[l];
  }
  return t;
}

double interpolate_uniform(std::span<const double> y, double x0, double h, double x) {
  const std::size_t n = y.size();
  const double t = (x - x0) / h;
  if (t < -1e-12 || t > static_cast<double>(n - 1) + 1e-12) return 0.0;
  if (n < 6) {
    const auto i = std::min<std::size_t>(static_cast<std::size_t>(std::max(t, 0.0)), n - 2);
    const double f = t - static_cast<double>(i);
    return (1.0 - f) * y[i] + f * y[i + 1];
  }
  long start = static_cast<long>(std::floor(t)) - 2;
  start = std::clamp(start, 0L, static_cast<long>(n) - 6);
  double s = 0.0;
  for (int j = 0; j < 6; ++j) {
    double l = 1.0;
    const double tj = static_cast<double>(start + j);
    for (int m = 0; m < 6; ++m) {
      if (m == j) continue;
      l *= (t - static_cast<double>(start + m)) / (tj - static_cast<double>(start + m));
    }
    s += l * y[start + j];
  }
  return s;
}

std::vector<double> resample(const RadialGrid& from, std::span<const double> values, const RadialGrid& to,
                             double origin_value) {
  if (values.size() != from.size()) throw InvalidInputError("resample: size mismatch");
  std::vector<double> y(values.size() + 1);
  std::copy(values.begin(), values.end(), y.begin() + 1);
  y[0] = std::isnan(origin_value) ? 4.0 * y[1] - 6.0 * y[2] + 4.0 * y[3] - y[4] : origin_value;
  std::vector<double> out(to.size());
  for (std::size_t i = 0; i < to.size(); ++i) out[i] = interpolate_uniform(y, 0.0, from.spacing(), to.r(i));
  return out;
}

}  // namespace hooke::numerics
