#include "hooke/wf_search.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

#include "hooke/errors.hpp"

namespace hooke::search {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFourPi = 4.0 * std::numbers::pi;
constexpr double kInvalid = 1e3;  // objective assigned to trials that cannot be evaluated

// f enters the f + Q sum in percent, the unit in which the fit quality is quoted.
// |x| with the kink at zero rounded over eps; the descent uses it in place of |x|.
double soft_abs(double x, double eps) { return std::sqrt(x * x + eps * eps) - eps; }

double combine(const SearchConfig& cfg, double f, double q) {
  return cfg.objective == Objective::kFPlusQ ? 100.0 * f + cfg.q_weight * q : f;
}

double poly(const std::vector<double>& a, double s) {
  double v = 0.0;
  for (auto it = a.rbegin(); it != a.rend(); ++it) v = v * s + *it;
  return v;
}

double second_moment(const numerics::RadialFunction& n) {
  double num = 0.0, den = 0.0;
  const auto w = numerics::radial_weights(n.grid);
  for (std::size_t i = 0; i < n.size(); ++i) {
    const double r2 = n.grid.r(i) * n.grid.r(i);
    num += w[i] * n[i] * r2 * r2;
    den += w[i] * n[i] * r2;
  }
  return num / den;
}

double default_s_max(const TrialEA1& t, const numerics::RadialGrid& grid) {
  return std::min(2.0 * grid.r_max(), std::sqrt(200.0 / t.omega_r));
}

void check_target(const numerics::RadialFunction& n) {
  double total = 0.0;
  for (double x : n.values) total += x;
  if (!(total > 0.0) || !std::isfinite(total)) throw InvalidInputError("search: target density has zero weight");
}

// Y-function route for \int\int f(r1) g(r2) r_<^L / r_>^(L+1) dr1 dr2, lengths scaled by k.
double multipole_integral(std::span<const double> f, std::span<const double> g, const numerics::RadialGrid& grid,
                          int L, double k) {
  const std::size_t m = grid.size();
  std::vector<double> inner(m + 1, 0.0), outer(m + 1, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const double x = k * grid.r(i);
    inner[i + 1] = f[i] * std::pow(x, L);
    outer[i + 1] = f[i] * std::pow(x, -L - 1);
  }
  const auto ci = numerics::cumulative_integral(inner, grid.spacing());
  const auto co = numerics::cumulative_integral(outer, grid.spacing());
  std::vector<double> y(m + 1, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const double x = k * grid.r(i);
    y[i + 1] = k * (ci[i + 1] * std::pow(x, -L - 1) + (co.back() - co[i + 1]) * std::pow(x, L)) * g[i];
  }
  return numerics::integrate_uniform(y, grid.spacing());
}

std::mt19937_64 stream(std::uint64_t seed, int generation, int index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(generation), static_cast<std::uint32_t>(index)};
  return std::mt19937_64(seq);
}

int pair_index(int a, int c) {
  if (a > c) std::swap(a, c);
  return a * TrialEA2::kOrder - a * (a - 1) / 2 + (c - a);
}

}  // namespace

const char* to_string(TrialForm f) { return f == TrialForm::kEA1 ? "ea1" : "ea2"; }

void SearchConfig::validate() const {
  if (population < 1 || elite_keep < 1 || elite_keep > population)
    throw InvalidInputError("SearchConfig: need population >= elite_keep >= 1");
  if (generations < 0 || descent_steps < 0 || archive_size < 1)
    throw InvalidInputError("SearchConfig: negative counts");
  if (!(mutation_scale >= 0.0) || !(threshold > 0.0) || !(q_weight >= 0.0))
    throw InvalidInputError("SearchConfig: invalid scale, threshold or weight");
  if (fresh_fraction < 0.0 || fresh_fraction > 1.0) throw InvalidInputError("SearchConfig: fresh_fraction in [0, 1]");
  if (ea1_degree < 0 || target_stride < 1) throw InvalidInputError("SearchConfig: invalid EA1 settings");
}

RelComState ea1_state(const TrialEA1& t, double s_max, std::size_t n_samples) {
  if (!(t.omega_r > 0.0) || !(t.omega_R > 0.0) || !std::isfinite(t.omega_r) || !std::isfinite(t.omega_R))
    throw InvalidTrialError("EA1 trial: exponents must be positive");
  if (t.coeffs.empty()) throw InvalidTrialError("EA1 trial: empty polynomial");
  if (n_samples < 8 || !(s_max > 0.0)) throw InvalidInputError("ea1_state: invalid sampling");
  const double h = s_max / static_cast<double>(n_samples - 1);
  RelativeProfile prof{h, std::vector<double>(n_samples)};
  std::vector<double> w2(n_samples);
  for (std::size_t k = 0; k < n_samples; ++k) {
    const double s = h * static_cast<double>(k);
    prof.phi[k] = poly(t.coeffs, s) * std::exp(-0.5 * t.omega_r * s * s);
    w2[k] = kFourPi * prof.phi[k] * prof.phi[k] * s * s;
  }
  const double nrm = numerics::integrate_uniform(w2, h);
  if (!(nrm > 0.0) || !std::isfinite(nrm)) throw InvalidTrialError("EA1 trial: not normalizable on the grid");
  const double c = 1.0 / std::sqrt(nrm);
  for (double& x : prof.phi) x *= c;
  return {std::move(prof), t.omega_R};
}

numerics::RadialFunction trial_density(const TrialEA1& t, const numerics::RadialGrid& grid) {
  return relcom_density(ea1_state(t, default_s_max(t, grid), 2400), grid);
}

double trial_q(const TrialEA1& t, const numerics::RadialGrid& grid) {
  const auto e = relcom_energies(ea1_state(t, default_s_max(t, grid), 2400), 1.0);
  return e.kinetic_rel + e.kinetic_com + e.coulomb;
}

PairExpansion ea2_expansion(const TrialEA2& t, const numerics::RadialGrid& grid) {
  constexpr int n = TrialEA2::kOrder;
  const auto basis = numerics::build_orthonormal_basis(t.basis_omega, n, grid);
  std::vector<std::vector<double>> u(n, std::vector<double>(grid.size()));
  const double c = std::sqrt(kFourPi);
  for (int a = 0; a < n; ++a)
    for (std::size_t i = 0; i < grid.size(); ++i) u[a][i] = c * grid.r(i) * basis.function(a)[i];
  PairExpansion pe{grid, {}};
  for (int k = 0; k < n; ++k) {
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = 0.5 * (t.at(i, j, k) + t.at(j, i, k)) / kFourPi;
    pe.sectors.push_back({k, u, std::move(m)});
  }
  const double nrm = pe.norm();
  if (!(nrm > 0.0) || !std::isfinite(nrm)) throw InvalidTrialError("EA2 trial: zero norm");
  pe.normalize();
  return pe;
}

numerics::RadialFunction trial_density(const TrialEA2& t, const numerics::RadialGrid& grid) {
  return ea2_expansion(t, grid).density();
}

double trial_q(const TrialEA2& t, const numerics::RadialGrid& grid) {
  SearchConfig cfg;
  Ea2Model m(trial_density(t, grid), cfg, 0.0, 1.0, t.basis_omega);
  return m.evaluate(m.parameters(t)).q;
}

double fitness_f(const numerics::RadialFunction& trial, const numerics::RadialFunction& target) {
  if (!(trial.grid == target.grid)) throw InvalidInputError("fitness_f: grid mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    num += std::abs(target[i] - trial[i]);
    den += target[i];
  }
  if (!(den > 0.0)) throw InvalidInputError("fitness_f: target has zero weight");
  return num / den;
}

double ks_product_energy(const ks::ScfState& st, double omega) {
  std::vector<double> vext(st.density.size());
  for (std::size_t i = 0; i < vext.size(); ++i) vext[i] = 0.5 * omega * omega * st.density.grid.r(i) * st.density.grid.r(i);
  // <1/r12> of phi(1) phi(2) is E_H / 2.
  return ks::orbital_kinetic(st.orbital) + 0.5 * ks::hartree_energy(st.density) +
         ks::volume_integral(st.density, vext);
}

namespace {

bool profile_has_node(const RelativeProfile& p) {
  double peak = 0.0;
  for (double x : p.phi) peak = std::max(peak, std::abs(x));
  int sign = 0;
  for (double x : p.phi) {
    if (std::abs(x) <= 1e-10 * peak) continue;  // numerically empty region
    const int s = x > 0.0 ? 1 : -1;
    if (sign == 0) sign = s;
    if (s != sign) return true;
  }
  return false;
}

}  // namespace

GroundStateCheck ground_state_checks(const TrialEA1& t, const numerics::RadialGrid& grid, double omega,
                                     double reference_energy) {
  GroundStateCheck c;
  const auto st = ea1_state(t, default_s_max(t, grid), 2400);
  const auto e = relcom_energies(st, omega);
  c.nodeless = !profile_has_node(st.rel);
  c.energy = e.kinetic_rel + e.kinetic_com + e.coulomb + e.external;
  c.reference = reference_energy;
  c.below_reference = c.energy <= reference_energy;
  return c;
}

namespace {

bool expansion_has_node(const PairExpansion& pe) {
  const auto& g = pe.grid;
  const std::size_t stride = std::max<std::size_t>(1, g.size() / 80);
  const auto gl = numerics::gauss_legendre(12);
  std::vector<double> xs = gl.nodes;
  xs.push_back(-1.0);
  xs.push_back(1.0);
  const int lmax = static_cast<int>(pe.sectors.size()) - 1;
  std::vector<double> vals;
  double peak = 0.0;
  for (std::size_t i = 0; i < g.size(); i += stride)
    for (std::size_t j = 0; j <= i; j += stride) {
      std::vector<double> f(pe.sectors.size());
      for (std::size_t s = 0; s < pe.sectors.size(); ++s) {
        const auto& sec = pe.sectors[s];
        double acc = 0.0;
        for (std::size_t a = 0; a < sec.reduced.size(); ++a)
          for (std::size_t b = 0; b < sec.reduced.size(); ++b)
            acc += sec.coefficients(a, b) * sec.reduced[a][i] * sec.reduced[b][j];
        f[s] = acc / (g.r(i) * g.r(j));
      }
      for (double x : xs) {
        const auto p = numerics::legendre_values(lmax, x);
        double v = 0.0;
        for (std::size_t s = 0; s < pe.sectors.size(); ++s) v += f[s] * p[pe.sectors[s].l];
        vals.push_back(v);
        peak = std::max(peak, std::abs(v));
      }
    }
  int sign = 0;
  for (double v : vals) {
    if (std::abs(v) <= 1e-6 * peak) continue;  // basis-truncation tails
    const int s = v > 0.0 ? 1 : -1;
    if (sign == 0) sign = s;
    if (s != sign) return true;
  }
  return false;
}

}  // namespace

GroundStateCheck ground_state_checks(const TrialEA2& t, const numerics::RadialGrid& grid, double omega,
                                     double reference_energy) {
  GroundStateCheck c;
  const auto pe = ea2_expansion(t, grid);
  const auto n = pe.density();
  std::vector<double> vext(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) vext[i] = 0.5 * omega * omega * grid.r(i) * grid.r(i);
  c.nodeless = !expansion_has_node(pe);
  c.energy = trial_q(t, grid) + ks::volume_integral(n, vext);
  c.reference = reference_energy;
  c.below_reference = c.energy <= reference_energy;
  return c;
}

DescentResult gradient_descent(const std::function<double(const std::vector<double>&)>& objective,
                               std::vector<double> start, int max_steps, double initial_step) {
  DescentResult r;
  r.params = std::move(start);
  r.value = objective(r.params);
  r.history.push_back(r.value);
  double t = initial_step;
  const std::size_t n = r.params.size();
  std::vector<double> g(n), trial(n);
  for (int step = 0; step < max_steps && !r.converged; ++step) {
    double gn2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = 1e-8 * std::max(1.0, std::abs(r.params[i]));
      auto x = r.params;
      x[i] += d;
      g[i] = (objective(x) - r.value) / d;
      gn2 += g[i] * g[i];
    }
    if (!(gn2 > 0.0) || !std::isfinite(gn2)) {
      r.converged = true;
      break;
    }
    while (true) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = r.params[i] - t * g[i];
      const double v = objective(trial);
      if (std::isfinite(v) && v <= r.value - 1e-4 * t * gn2) {
        r.params = trial;
        r.value = v;
        r.history.push_back(v);
        ++r.accepted_steps;
        t *= 2.0;
        break;
      }
      t *= 0.5;
      if (t * std::sqrt(gn2) < 1e-14) {
        r.converged = true;
        break;
      }
    }
  }
  return r;
}

nlohmann::json Checkpoint::to_json() const {
  nlohmann::json j;
  j["form"] = to_string(form);
  j["seed"] = seed;
  j["generation"] = generation;
  j["population"] = population;
  j["best_history"] = best_history;
  j["archive"] = nlohmann::json::array();
  for (const auto& c : archive)
    j["archive"].push_back({{"params", c.params},
                            {"f", c.f},
                            {"q", c.q},
                            {"objective", c.objective},
                            {"nodeless", c.checks.nodeless},
                            {"below_reference", c.checks.below_reference},
                            {"energy", c.checks.energy},
                            {"reference", c.checks.reference}});
  return j;
}

Checkpoint Checkpoint::from_json(const nlohmann::json& j) {
  Checkpoint c;
  const auto form = j.at("form").get<std::string>();
  if (form != "ea1" && form != "ea2") throw InvalidInputError("checkpoint: unknown trial form");
  c.form = form == "ea1" ? TrialForm::kEA1 : TrialForm::kEA2;
  c.seed = j.at("seed").get<std::uint64_t>();
  c.generation = j.at("generation").get<int>();
  c.population = j.at("population").get<std::vector<std::vector<double>>>();
  c.best_history = j.at("best_history").get<std::vector<double>>();
  for (const auto& a : j.at("archive")) {
    Candidate k;
    k.params = a.at("params").get<std::vector<double>>();
    k.f = a.at("f").get<double>();
    k.q = a.at("q").get<double>();
    k.objective = a.at("objective").get<double>();
    k.checks.nodeless = a.at("nodeless").get<bool>();
    k.checks.below_reference = a.at("below_reference").get<bool>();
    k.checks.energy = a.at("energy").get<double>();
    k.checks.reference = a.at("reference").get<double>();
    c.archive.push_back(std::move(k));
  }
  return c;
}

SearchResult evolutionary_search(TrialModel& model, TrialForm form, const SearchConfig& cfg,
                                 const std::vector<std::vector<double>>& planted,
                                 const std::optional<Checkpoint>& resume) {
  cfg.validate();
  const std::size_t dim = model.dimension();
  const auto pop_n = static_cast<std::size_t>(cfg.population);
  SearchResult res;
  res.form = form;
  res.threshold = cfg.threshold;
  res.seed = cfg.seed;

  std::vector<std::vector<double>> pop;
  std::vector<Candidate> archive;
  int start = 0;
  if (resume) {
    if (resume->form != form || resume->seed != cfg.seed)
      throw InvalidInputError("evolutionary_search: checkpoint does not match form or seed");
    pop = resume->population;
    archive = resume->archive;
    res.best_history = resume->best_history;
    start = resume->generation;
    if (pop.size() != pop_n) throw InvalidInputError("evolutionary_search: checkpoint population size differs");
  } else {
    for (std::size_t i = 0; i < pop_n; ++i) {
      if (i < planted.size()) {
        if (planted[i].size() != dim) throw InvalidInputError("evolutionary_search: planted vector has wrong size");
        pop.push_back(planted[i]);
      } else {
        auto rng = stream(cfg.seed, 0, static_cast<int>(i));
        pop.push_back(model.random_parameters(rng));
      }
    }
  }

  auto search_value = [&](const std::vector<double>& p) {
    const double v = model.search_objective(p);
    return std::isfinite(v) ? v : kInvalid;
  };
  auto archive_add = [&](const std::vector<double>& p) {
    for (const auto& c : archive)
      if (c.params == p) return;
    Candidate c;
    c.params = p;
    try {
      const auto e = model.evaluate(p);
      c.f = e.f;
      c.q = e.q;
      c.objective = e.objective;
      c.checks = model.check(p);
    } catch (const InvalidInputError&) {
      return;
    }
    archive.push_back(std::move(c));
    std::stable_sort(archive.begin(), archive.end(),
                     [](const Candidate& a, const Candidate& b) { return a.objective < b.objective; });
    if (archive.size() > static_cast<std::size_t>(cfg.archive_size)) archive.resize(cfg.archive_size);
  };

  if (cfg.generations == 0 && !resume)
    for (const auto& p : pop) archive_add(p);

  for (int gen = start; gen < cfg.generations; ++gen) {
    std::vector<std::pair<double, std::size_t>> scored;
    for (std::size_t i = 0; i < pop.size(); ++i) {
      auto d = gradient_descent(search_value, pop[i], cfg.descent_steps);
      pop[i] = std::move(d.params);
      scored.emplace_back(d.value, i);
    }
    std::stable_sort(scored.begin(), scored.end());
    for (const auto& s : scored) archive_add(pop[s.second]);
    const double best = scored.front().first;
    res.best_history.push_back(res.best_history.empty() ? best : std::min(best, res.best_history.back()));

    // Elites survive; mutants of the elites and fresh random individuals fill the rest.
    std::vector<std::vector<double>> next;
    const auto keep = static_cast<std::size_t>(cfg.elite_keep);
    for (std::size_t e = 0; e < keep; ++e) next.push_back(pop[scored[e].second]);
    const std::size_t rest = pop_n - keep;
    const auto fresh = static_cast<std::size_t>(std::lround(cfg.fresh_fraction * static_cast<double>(rest)));
    for (std::size_t i = 0; next.size() < pop_n; ++i) {
      auto rng = stream(cfg.seed, gen + 1, static_cast<int>(next.size()));
      if (i < rest - fresh) {
        auto child = next[i % keep];
        std::normal_distribution<double> nd(0.0, 1.0);
        for (double& x : child) x += nd(rng) * cfg.mutation_scale * std::max(std::abs(x), 1e-3);
        next.push_back(std::move(child));
      } else {
        next.push_back(model.random_parameters(rng));
      }
    }
    pop = std::move(next);
    res.generations_run = gen + 1 - start;

    if (!cfg.checkpoint_path.empty()) {
      Checkpoint cp{form, cfg.seed, gen + 1, pop, archive, res.best_history};
      std::ofstream out(cfg.checkpoint_path);
      if (!out) throw InvalidInputError("evolutionary_search: cannot write checkpoint " + cfg.checkpoint_path);
      out << cp.to_json().dump(1) << '\n';
    }
  }

  res.best = archive;
  // Lowest Q among the accepted candidates, preferring those that pass the ground-state checks.
  for (int pass = 0; pass < 2 && !res.selected; ++pass)
    for (std::size_t i = 0; i < res.best.size(); ++i) {
      const auto& c = res.best[i];
      if (c.f > cfg.threshold || (pass == 0 && !c.checks.ok())) continue;
      if (!res.selected || c.q < res.best[*res.selected].q) res.selected = i;
    }
  res.accepted = res.selected.has_value();
  res.selected_passes_checks = res.selected && res.best[*res.selected].checks.ok();
  return res;
}

// ---------------------------------------------------------------- EA1

Ea1Model::Ea1Model(numerics::RadialFunction target, const SearchConfig& cfg, double reference_energy, double omega)
    : target_(std::move(target)), cfg_(cfg), degree_(cfg.ea1_degree), reference_(reference_energy), omega_(omega) {
  cfg_.validate();
  check_target(target_);
  const double r2 = second_moment(target_);
  scale_omega_ = 1.5 / r2;
  length_ = std::sqrt(r2);
  s_max_ = std::min(2.0 * target_.grid.r_max(), 14.0 * std::sqrt(r2));
  soft_eps_ = 1e-4 * *std::max_element(target_.values.begin(), target_.values.end());
  for (std::size_t i = 0; i < target_.size(); i += cfg_.target_stride) {
    sub_.push_back(i);
    sub_total_ += target_[i];
  }
}

TrialEA1 Ea1Model::trial(const std::vector<double>& p) const {
  if (p.size() != dimension()) throw InvalidInputError("Ea1Model: wrong parameter count");
  TrialEA1 t;
  t.omega_r = std::exp(p[0]);
  t.omega_R = std::exp(p[1]);
  t.coeffs.assign(p.begin() + 1, p.end());
  t.coeffs[0] = 1.0;
  for (int i = 1; i <= degree_; ++i) t.coeffs[i] /= std::pow(length_, i);
  return t;
}

std::vector<double> Ea1Model::parameters(const TrialEA1& t) const {
  if (t.coeffs.empty() || t.coeffs[0] == 0.0) throw InvalidInputError("Ea1Model: p(0) must be nonzero");
  std::vector<double> p(dimension(), 0.0);
  p[0] = std::log(t.omega_r);
  p[1] = std::log(t.omega_R);
  for (std::size_t i = 1; i < t.coeffs.size() && i <= static_cast<std::size_t>(degree_); ++i)
    p[1 + i] = t.coeffs[i] / t.coeffs[0] * std::pow(length_, static_cast<double>(i));
  return p;
}

std::vector<double> Ea1Model::random_parameters(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> p(dimension());
  const double base = std::log(0.5 * scale_omega_);
  p[0] = base + u(rng);
  p[1] = base + 0.5 * u(rng);
  for (int i = 1; i <= degree_; ++i) p[1 + i] = 0.5 * u(rng);
  return p;
}

std::vector<double> Ea1Model::gaussian_parameters() const {
  std::vector<double> p(dimension(), 0.0);
  p[0] = p[1] = std::log(0.5 * scale_omega_);
  return p;
}

void Ea1Model::build_kernel(double omega_R) {
  if (omega_R == kernel_omega_R_) return;
  const double hs = s_max_ / static_cast<double>(n_s_ - 1);
  const auto ws = numerics::closed_weights(n_s_, hs);
  const double pref = std::pow(4.0 * omega_R / kPi, 1.5);
  const double cut = std::sqrt(40.0 / omega_R);
  kernel_.setZero(static_cast<Eigen::Index>(sub_.size()), static_cast<Eigen::Index>(n_s_));
  for (std::size_t a = 0; a < sub_.size(); ++a) {
    const double r = target_.grid.r(sub_[a]);
    const double s_lo = std::max(0.0, 2.0 * r - cut), s_hi = 2.0 * r + cut;
    const std::size_t k0 = std::max<std::size_t>(1, static_cast<std::size_t>(s_lo / hs));
    const std::size_t k1 = std::min(n_s_ - 1, static_cast<std::size_t>(s_hi / hs) + 1);
    for (std::size_t k = k0; k <= k1; ++k) {
      const double s = hs * static_cast<double>(k);
      const double c = 4.0 * omega_R * r * s;
      const double d = r - 0.5 * s;
      kernel_(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(k)) =
          pref * ws[k] * kFourPi * s * s * std::exp(-4.0 * omega_R * d * d) * (-std::expm1(-2.0 * c)) / c;
    }
  }
  kernel_omega_R_ = omega_R;
}

std::vector<double> Ea1Model::sub_density(const RelComState& st) {
  build_kernel(st.omega_com);
  Eigen::VectorXd p2(static_cast<Eigen::Index>(n_s_));
  for (std::size_t k = 0; k < n_s_; ++k) p2[static_cast<Eigen::Index>(k)] = st.rel.phi[k] * st.rel.phi[k];
  const Eigen::VectorXd n = kernel_ * p2;
  return std::vector<double>(n.data(), n.data() + n.size());
}

bool Ea1Model::has_node(const TrialEA1& t) const { return profile_has_node(ea1_state(t, s_max_, n_s_).rel); }

double Ea1Model::search_objective(const std::vector<double>& p) {
  if (p[0] > std::log(1e3 * scale_omega_) || p[0] < std::log(1e-3 * scale_omega_) ||
      p[1] > std::log(1e3 * scale_omega_) || p[1] < std::log(1e-3 * scale_omega_))
    return kInvalid;
  RelComState st;
  try {
    st = ea1_state(trial(p), s_max_, n_s_);
  } catch (const InvalidInputError&) {
    return kInvalid;
  }
  const auto n = sub_density(st);
  double diff = 0.0;
  for (std::size_t a = 0; a < sub_.size(); ++a) diff += soft_abs(target_[sub_[a]] - n[a], soft_eps_);
  double f = diff / sub_total_;
  // Nodal trials cannot be ground states; keep the search away from them.
  if (profile_has_node(st.rel)) f += 1.0;
  if (cfg_.objective == Objective::kF) return f;
  const auto e = relcom_energies(st, omega_);
  return combine(cfg_, f, e.kinetic_rel + e.kinetic_com + e.coulomb);
}

TrialModel::Evaluation Ea1Model::evaluate(const std::vector<double>& p) {
  const auto st = ea1_state(trial(p), s_max_, n_s_);
  const auto n = relcom_density(st, target_.grid, n_s_);
  const auto e = relcom_energies(st, omega_);
  Evaluation ev;
  ev.f = fitness_f(n, target_);
  ev.q = e.kinetic_rel + e.kinetic_com + e.coulomb;
  ev.objective = combine(cfg_, ev.f, ev.q);
  return ev;
}

GroundStateCheck Ea1Model::check(const std::vector<double>& p) {
  const auto st = ea1_state(trial(p), s_max_, n_s_);
  const auto e = relcom_energies(st, omega_);
  GroundStateCheck c;
  c.nodeless = !profile_has_node(st.rel);
  c.energy = e.kinetic_rel + e.kinetic_com + e.coulomb + e.external;
  c.reference = reference_;
  c.below_reference = c.energy <= reference_;
  return c;
}

SectorWavefunction ea1_sectors(const TrialEA1& t, double s_max, const numerics::RadialGrid& sector_grid, int l_max) {
  return project_relcom(ea1_state(t, s_max, 2400), sector_grid, {l_max, 0});
}

// ---------------------------------------------------------------- EA2

Ea2Model::Ea2Model(numerics::RadialFunction target, const SearchConfig& cfg, double reference_energy, double omega,
                   double basis_omega)
    : target_(std::move(target)), cfg_(cfg), reference_(reference_energy), omega_(omega), basis_omega_(basis_omega) {
  cfg_.validate();
  check_target(target_);
  constexpr int n = TrialEA2::kOrder;
  const auto& g = target_.grid;
  const std::size_t m = g.size();
  const auto basis = numerics::build_orthonormal_basis(basis_omega_, n, g);
  const double c = std::sqrt(kFourPi);
  u_.assign(n, std::vector<double>(m));
  for (int a = 0; a < n; ++a)
    for (std::size_t i = 0; i < m; ++i) u_[a][i] = c * g.r(i) * basis.function(a)[i];
  for (double x : target_.values) target_total_ += x;
  soft_eps_ = 1e-4 * *std::max_element(target_.values.begin(), target_.values.end());

  std::vector<std::vector<double>> du;
  for (int a = 0; a < n; ++a) {
    std::vector<double> s(m + 1, 0.0);
    std::copy(u_[a].begin(), u_[a].end(), s.begin() + 1);
    du.push_back(numerics::derivative_uniform(s, g.spacing()));
  }
  for (int k = 0; k < n; ++k) {
    Eigen::MatrixXd t(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        std::vector<double> f(m + 1, 0.0);
        for (std::size_t i = 0; i < m; ++i)
          f[i + 1] = du[a][i + 1] * du[b][i + 1] + k * (k + 1.0) * u_[a][i] * u_[b][i] / (g.r(i) * g.r(i));
        // The origin sample of u_a u_b / r^2 is finite; take it from the limit u ~ c r.
        f[0] = du[a][0] * du[b][0] * (1.0 + k * (k + 1.0));
        t(a, b) = 0.5 * numerics::integrate_uniform(f, g.spacing());
      }
    kinetic_.push_back(t);
  }

  constexpr int np = n * (n + 1) / 2;
  constexpr int nl = 2 * n - 1;
  std::vector<std::vector<double>> pairs(np, std::vector<double>(m));
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b)
      for (std::size_t i = 0; i < m; ++i) pairs[pair_index(a, b)][i] = u_[a][i] * u_[b][i];
  coulomb_.assign(static_cast<std::size_t>(nl * np * np), 0.0);
  const double k = std::sqrt(basis_omega_);
  for (int L = 0; L < nl; ++L)
    for (int p = 0; p < np; ++p)
      for (int q = p; q < np; ++q) {
        const double v = multipole_integral(pairs[p], pairs[q], g, L, k);
        coulomb_[(L * np + p) * np + q] = v;
        coulomb_[(L * np + q) * np + p] = v;
      }

  const auto gl = numerics::gauss_legendre(8);
  gaunt_.assign(static_cast<std::size_t>(n * n * nl), 0.0);
  for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
    const auto pv = numerics::legendre_values(nl - 1, gl.nodes[q]);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int L = 0; L < nl; ++L) gaunt_[(a * n + b) * nl + L] += gl.weights[q] * pv[a] * pv[b] * pv[L];
  }
}

TrialEA2 Ea2Model::trial(const std::vector<double>& p) const {
  if (p.size() != dimension()) throw InvalidInputError("Ea2Model: wrong parameter count");
  TrialEA2 t;
  t.basis_omega = basis_omega_;
  std::size_t idx = 0;
  for (int i = 0; i < TrialEA2::kOrder; ++i)
    for (int j = i; j < TrialEA2::kOrder; ++j)
      for (int k = 0; k < TrialEA2::kOrder; ++k) {
        t.at(i, j, k) = p[idx];
        t.at(j, i, k) = p[idx];
        ++idx;
      }
  return t;
}

std::vector<double> Ea2Model::parameters(const TrialEA2& t) const {
  std::vector<double> p;
  for (int i = 0; i < TrialEA2::kOrder; ++i)
    for (int j = i; j < TrialEA2::kOrder; ++j)
      for (int k = 0; k < TrialEA2::kOrder; ++k) p.push_back(0.5 * (t.at(i, j, k) + t.at(j, i, k)));
  return p;
}

std::vector<double> Ea2Model::product_parameters(const numerics::RadialFunction& orbital) const {
  if (!(orbital.grid == target_.grid)) throw InvalidInputError("Ea2Model: orbital grid differs from the target grid");
  const auto w = numerics::radial_weights(target_.grid);
  std::array<double, TrialEA2::kOrder> c{};
  for (int a = 0; a < TrialEA2::kOrder; ++a)
    for (std::size_t i = 0; i < orbital.size(); ++i) c[a] += w[i] * u_[a][i] * orbital[i];
  TrialEA2 t;
  t.basis_omega = basis_omega_;
  for (int i = 0; i < TrialEA2::kOrder; ++i)
    for (int j = 0; j < TrialEA2::kOrder; ++j) t.at(i, j, 0) = c[i] * c[j];
  return parameters(t);
}

std::vector<double> Ea2Model::random_parameters(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  std::vector<double> p;
  for (int i = 0; i < TrialEA2::kOrder; ++i)
    for (int j = i; j < TrialEA2::kOrder; ++j)
      for (int k = 0; k < TrialEA2::kOrder; ++k) {
        const double v = u(rng) * std::pow(0.5, i + j + k);
        p.push_back(i == 0 && j == 0 && k == 0 ? 1.0 + v : v);
      }
  return p;
}

Ea2Model::Parts Ea2Model::parts(const std::vector<double>& p, bool smooth) const {
  constexpr int n = TrialEA2::kOrder;
  constexpr int np = n * (n + 1) / 2;
  constexpr int nl = 2 * n - 1;
  const auto t = trial(p);
  std::vector<Eigen::Matrix4d> mk(n);
  double nrm = 0.0;
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) mk[k](i, j) = t.at(i, j, k) / kFourPi;
    nrm += kFourPi * kFourPi / (2.0 * k + 1.0) * mk[k].squaredNorm();
  }
  if (!(nrm > 0.0) || !std::isfinite(nrm)) return {kInvalid, kInvalid, 0.0};
  for (auto& m : mk) m /= std::sqrt(nrm);

  // Density: 2 * 4 pi / (2k+1) sum_ab (M M^T)_ab u_a u_b / r^2.
  const auto& g = target_.grid;
  std::array<double, np> cp{};
  for (int k = 0; k < n; ++k) {
    const Eigen::Matrix4d mm = mk[k] * mk[k].transpose();
    const double c = 2.0 * kFourPi / (2.0 * k + 1.0);
    for (int a = 0; a < n; ++a)
      for (int b = a; b < n; ++b) cp[pair_index(a, b)] += c * (a == b ? mm(a, a) : 2.0 * mm(a, b));
  }
  double diff = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double v = 0.0;
    for (int a = 0; a < n; ++a)
      for (int b = a; b < n; ++b) v += cp[pair_index(a, b)] * u_[a][i] * u_[b][i];
    v /= g.r(i) * g.r(i);
    diff += smooth ? soft_abs(target_[i] - v, soft_eps_) : std::abs(target_[i] - v);
  }

  double kin = 0.0;
  for (int k = 0; k < n; ++k)
    kin += 2.0 * kFourPi * kFourPi / (2.0 * k + 1.0) * (mk[k].transpose() * kinetic_[k] * mk[k]).trace();
  double vee = 0.0;
  const double ang = 8.0 * kPi * kPi;
  for (int k = 0; k < n; ++k)
    for (int kk = 0; kk < n; ++kk)
      for (int L = 0; L < nl; ++L) {
        const double gt = gaunt_[(k * n + kk) * nl + L];
        if (std::abs(gt) < 1e-14) continue;
        double s = 0.0;
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
              for (int d = 0; d < n; ++d)
                s += mk[k](a, b) * mk[kk](c, d) * coulomb_[(L * np + pair_index(a, c)) * np + pair_index(b, d)];
        vee += ang * gt * s;
      }
  return {diff / target_total_, kin + vee, nrm};
}

double Ea2Model::search_objective(const std::vector<double>& p) {
  const auto pr = parts(p, true);
  if (pr.norm == 0.0) return kInvalid;
  return combine(cfg_, pr.f, pr.q);
}

TrialModel::Evaluation Ea2Model::evaluate(const std::vector<double>& p) {
  const auto pr = parts(p);
  if (pr.norm == 0.0) throw InvalidTrialError("EA2 trial: zero norm");
  Evaluation ev;
  ev.f = pr.f;
  ev.q = pr.q;
  ev.objective = combine(cfg_, pr.f, pr.q);
  return ev;
}

GroundStateCheck Ea2Model::check(const std::vector<double>& p) {
  const auto pe = ea2_expansion(trial(p), target_.grid);
  const auto pr = parts(p);
  const auto n = pe.density();
  std::vector<double> vext(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) vext[i] = 0.5 * omega_ * omega_ * n.grid.r(i) * n.grid.r(i);
  GroundStateCheck c;
  c.nodeless = !expansion_has_node(pe);
  c.energy = pr.q + ks::volume_integral(n, vext);
  c.reference = reference_;
  c.below_reference = c.energy <= reference_;
  return c;
}

}  // namespace hooke::search
