#include "hooke/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "hooke/entanglement.hpp"
#include "hooke/errors.hpp"
#include "hooke/exact_atom.hpp"
#include "hooke/perturbation.hpp"

namespace hooke::app {

namespace {

constexpr double kBohrNm = 0.0529177210903;
constexpr double kVonNeumannPerLinear = 3.75;

struct MethodName {
  Method m;
  const char* name;
};

constexpr MethodName kNames[] = {{Method::kExact, "exact"},
                                 {Method::kLdaScf, "lda-scf"},
                                 {Method::kEa1Search, "ea1-search"},
                                 {Method::kEa2Search, "ea2-search"},
                                 {Method::kKsPertExact, "ks-pert-exact"},
                                 {Method::kKsPertLda, "ks-pert-lda"},
                                 {Method::kStandardPert, "standard-pert"}};

nlohmann::json opt_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

std::string cell(const std::optional<double>& v) { return v ? format_number(*v) : "null"; }

std::optional<double> diag(const RunRecord& r, const char* key) {
  const auto it = r.diagnostics.find(key);
  if (it == r.diagnostics.end() || !it->is_number()) return std::nullopt;
  return it->get<double>();
}

std::string status(const RunRecord& r) {
  if (!r.error) return "ok";
  std::string s = *r.error;
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return "error: " + s;
}

// Shared per-omega state; the exact solution and the LDA run feed several methods.
struct OmegaContext {
  const SweepSpec& spec;
  double omega;
  exact::HookeProblem problem;
  numerics::RadialGrid grid;
  numerics::RadialGrid sector_grid;
  ks::LdaFunctional functional;

  std::optional<exact::ExactWavefunction> psi;
  std::optional<numerics::RadialFunction> n_exact;
  std::optional<std::string> exact_error;
  bool exact_tried = false;

  std::optional<ks::ScfState> lda;
  std::optional<std::string> lda_error;
  std::vector<double> lda_history;
  bool lda_tried = false;

  OmegaContext(const SweepSpec& s, double w)
      : spec(s),
        omega(w),
        problem{w, true},
        grid(numerics::RadialGrid::for_omega(w, s.grid.n_points, s.grid.r_max_scale)),
        sector_grid(default_sector_grid(w, s.grid.sector_points)) {
    functional.correlation = s.functional;
  }

  const exact::ExactWavefunction* exact_solution() {
    if (!exact_tried) {
      exact_tried = true;
      try {
        exact::SectorOptions so;
        so.grid = sector_grid;
        psi = exact::assemble_exact_wavefunction(exact::solve_relative_motion(problem), so);
        n_exact = relcom_density(psi->state(), grid);
      } catch (const std::exception& e) {
        exact_error = e.what();
      }
    }
    return psi ? &*psi : nullptr;
  }

  const ks::ScfState* lda_state() {
    if (!lda_tried) {
      lda_tried = true;
      try {
        lda = ks::scf_solve(problem, grid, functional, {});
      } catch (const NonConvergenceError& e) {
        lda_error = std::string("LDA self-consistency not reached: ") + e.what();
        lda_history = e.residual_history();
      } catch (const std::exception& e) {
        lda_error = e.what();
      }
    }
    return lda ? &*lda : nullptr;
  }

  // Errors against the exact solution, when it is available.
  void compare(RunRecord& r, const numerics::RadialFunction* n) {
    const auto* ex = exact_solution();
    if (!ex) return;
    if (r.E) r.energy_error_pct = pert::energy_percent_error(*r.E, ex->total_energy);
    if (n) {
      const auto d = ks::density_percent_error(*n, *n_exact);
      r.density_error_pct = d.percent;
      r.diagnostics["density_error_weighted_pct"] = d.weighted_percent;
    }
  }
};

void run_exact(OmegaContext& c, RunRecord& r) {
  const auto* psi = c.exact_solution();
  if (!psi) throw NumericFailureError(c.exact_error.value_or("exact solver failed"), 0.0);
  const auto ent = ent::entropies(psi->sectors, c.omega, *c.n_exact);
  r.E = psi->total_energy;
  r.L = ent.linear;
  r.S = ent.von_neumann_bits;
  r.S_n = ent.information_nats;
  r.energy_error_pct = 0.0;
  r.density_error_pct = 0.0;
  r.interaction_ratio = exact::interaction_ratio(*psi);
  const auto inv = ks::invert_ks(*c.n_exact, c.problem);
  const auto xc = ks::exact_exc(*psi, *c.n_exact, inv);
  r.E_xc = xc.E_xc;
  r.indicator = std::abs(xc.E_xc / psi->total_energy);
  r.diagnostics["epsilon_rel"] = psi->rel.epsilon_rel;
  r.diagnostics["sector_l_max"] = psi->sectors.l_max();
  r.diagnostics["inversion_tail_coefficient"] = inv.tail_coefficient;
  if (psi->truncation_deficit) r.diagnostics["truncation_deficit"] = *psi->truncation_deficit;
  if (!psi->warnings.empty()) r.diagnostics["warnings"] = psi->warnings;
}

void run_lda(OmegaContext& c, RunRecord& r) {
  const auto* st = c.lda_state();
  if (!st) {
    if (!c.lda_history.empty()) r.diagnostics["residual_tail"] = c.lda_history.back();
    r.diagnostics["converged"] = false;
    throw NumericFailureError(*c.lda_error, 0.0);
  }
  r.E = ks::lda_total_energy(*st, c.functional, c.problem);
  const auto xc = ks::lda_xc_record(*st, c.functional, c.problem);
  r.E_xc = xc.E_xc;
  r.indicator = std::abs(xc.E_xc / *r.E);
  r.S_n = ent::information_entropy(st->density);
  r.diagnostics["converged"] = true;
  r.diagnostics["iterations"] = st->iterations;
  r.diagnostics["residual"] = st->residual;
  r.diagnostics["eigenvalue"] = st->eigenvalue;
  r.diagnostics["functional"] = c.functional.constants();
  // The other correlation fit, for the exchange-form comparison.
  ks::LdaFunctional other;
  other.correlation = c.functional.correlation == ks::CorrelationVariant::kWigner
                          ? ks::CorrelationVariant::kPerdewWang92
                          : ks::CorrelationVariant::kWigner;
  try {
    const auto st2 = ks::scf_solve(c.problem, c.grid, other, {});
    r.diagnostics["E_other_variant"] = ks::lda_total_energy(st2, other, c.problem);
  } catch (const std::exception&) {
    r.diagnostics["E_other_variant"] = nullptr;
  }
  c.compare(r, &st->density);
}

void fill_search(RunRecord& r, const search::SearchResult& res) {
  r.diagnostics["accepted"] = res.accepted;
  r.diagnostics["threshold"] = res.threshold;
  r.diagnostics["seed"] = res.seed;
  r.diagnostics["generations"] = res.generations_run;
  r.diagnostics["best_history"] = res.best_history;
  if (!res.best.empty()) r.diagnostics["best_f"] = res.best.front().f;
  if (!res.selected) return;
  const auto& best = res.best[*res.selected];
  r.diagnostics["f"] = best.f;
  r.diagnostics["Q"] = best.q;
  r.diagnostics["nodeless"] = best.checks.nodeless;
  r.diagnostics["below_reference"] = best.checks.below_reference;
  r.diagnostics["reference_energy"] = best.checks.reference;
  r.diagnostics["params"] = best.params;
  r.E = best.checks.energy;
}

void run_search(OmegaContext& c, RunRecord& r, search::TrialForm form) {
  const auto* st = c.lda_state();
  if (!st) throw NumericFailureError("no LDA target: " + c.lda_error.value_or("unknown"), 0.0);
  const double ref = search::ks_product_energy(*st, c.omega);
  auto cfg = form == search::TrialForm::kEA1 ? c.spec.ea1 : c.spec.ea2;
  cfg.seed = c.spec.seed;
  if (form == search::TrialForm::kEA1) {
    search::Ea1Model model(st->density, cfg, ref, c.omega);
    const auto res = search::evolutionary_search(model, form, cfg);
    fill_search(r, res);
    if (!res.selected) return;
    const auto t = model.trial(res.best[*res.selected].params);
    const auto n = relcom_density(search::ea1_state(t, model.s_max()), c.grid);
    const auto ent = ent::entropies(search::ea1_sectors(t, model.s_max(), c.sector_grid), c.omega, n);
    r.L = ent.linear;
    r.S = ent.von_neumann_bits;
    r.S_n = ent.information_nats;
    c.compare(r, &n);
  } else {
    search::Ea2Model model(st->density, cfg, ref, c.omega, c.omega);
    const auto res = search::evolutionary_search(model, form, cfg);
    fill_search(r, res);
    if (!res.selected) return;
    const auto pe = search::ea2_expansion(model.trial(res.best[*res.selected].params), c.grid);
    const auto n = pe.density();
    const auto ent = ent::entropies(pe.to_sectors(c.sector_grid), c.omega, n);
    r.L = ent.linear;
    r.S = ent.von_neumann_bits;
    r.S_n = ent.information_nats;
    c.compare(r, &n);
  }
}

void run_pert(OmegaContext& c, RunRecord& r, pert::ZerothOrder source) {
  pert::SpectrumOptions so;
  so.grid = c.grid;
  so.functional = c.functional;
  const auto spec = pert::ks_spectrum(c.problem, source, c.spec.perturbation.l_max, c.spec.perturbation.n_max, so);
  const auto e = pert::first_order_expansion(spec, c.problem);
  const auto st = pert::perturbed_density_and_rdm(e, c.sector_grid);
  r.E = e.first_order_energy();
  r.L = ent::linear_entropy(st.rdm);
  r.S = ent::von_neumann_entropy(st.rdm).entropy_bits;
  r.S_n = ent::information_entropy(st.density);
  r.diagnostics["E0"] = e.E0;
  r.diagnostics["E1"] = e.E1;
  r.diagnostics["E2"] = e.E2;
  r.diagnostics["E_second_order"] = e.second_order_energy();
  r.diagnostics["first_order_norm"] = e.first_order_norm;
  r.diagnostics["tail_share"] = e.tail_share;
  r.diagnostics["orthonormality_deviation"] = spec.max_orthonormality_deviation();
  if (!e.warnings.empty()) r.diagnostics["warnings"] = e.warnings;
  c.compare(r, &st.density);
  if (const auto* ex = c.exact_solution())
    r.diagnostics["second_order_error_pct"] = pert::energy_percent_error(e.second_order_energy(), ex->total_energy);
}

RunRecord run_cell(OmegaContext& c, Method m) {
  RunRecord r;
  r.omega = c.omega;
  r.method = m;
  r.diagnostics["grid_points"] = c.spec.grid.n_points;
  try {
    switch (m) {
      case Method::kExact:
        run_exact(c, r);
        break;
      case Method::kLdaScf:
        run_lda(c, r);
        break;
      case Method::kEa1Search:
        run_search(c, r, search::TrialForm::kEA1);
        break;
      case Method::kEa2Search:
        run_search(c, r, search::TrialForm::kEA2);
        break;
      case Method::kKsPertExact:
        run_pert(c, r, pert::ZerothOrder::kExactVxc);
        break;
      case Method::kKsPertLda:
        run_pert(c, r, pert::ZerothOrder::kLdaVxc);
        break;
      case Method::kStandardPert:
        run_pert(c, r, pert::ZerothOrder::kBareOscillator);
        break;
    }
  } catch (const std::exception& e) {
    // Partial values from a failed cell are not trustworthy.
    RunRecord failed;
    failed.omega = r.omega;
    failed.method = m;
    failed.diagnostics = r.diagnostics;
    failed.error = e.what();
    return failed;
  }
  return r;
}

}  // namespace

const char* to_string(Method m) {
  for (const auto& n : kNames)
    if (n.m == m) return n.name;
  return "unknown";
}

Method parse_method(const std::string& name) {
  for (const auto& n : kNames)
    if (name == n.name) return n.m;
  throw InvalidInputError("unknown method '" + name + "'");
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> all{Method::kExact,       Method::kLdaScf,     Method::kEa1Search,
                                       Method::kEa2Search,   Method::kKsPertExact, Method::kKsPertLda,
                                       Method::kStandardPert};
  return all;
}

SweepSpec::SweepSpec() {
  ea1.threshold = 0.041;
  ea2.threshold = 0.01;
}

void SweepSpec::validate() const {
  if (omegas.empty()) throw InvalidInputError("sweep: no omega values");
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    if (!(omegas[i] > 0.0) || !std::isfinite(omegas[i])) throw InvalidInputError("sweep: omega values must be positive");
    if (i > 0 && !(omegas[i] > omegas[i - 1])) throw InvalidInputError("sweep: omega values must be strictly increasing");
  }
  if (methods.empty()) throw InvalidInputError("sweep: no methods");
  if (grid.n_points < 100 || !(grid.r_max_scale > 0.0) || grid.sector_points < 16)
    throw InvalidInputError("sweep: grid too small");
  if (perturbation.l_max < 0 || perturbation.n_max < 1) throw InvalidInputError("sweep: invalid perturbation cutoffs");
  if (workers < 1) throw InvalidInputError("sweep: workers must be >= 1");
  ea1.validate();
  ea2.validate();
}

std::vector<double> log_omegas(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2) throw InvalidInputError("log_omegas: need 0 < lo < hi and n >= 2");
  std::vector<double> w(n);
  const double a = std::log10(lo), b = std::log10(hi);
  for (int i = 0; i < n; ++i) w[i] = std::pow(10.0, a + (b - a) * i / (n - 1.0));
  w.front() = lo;
  w.back() = hi;
  return w;
}

std::vector<double> default_omegas() {
  auto w = log_omegas(1e-3, 1e2, 25);
  w.push_back(0.5);
  std::sort(w.begin(), w.end());
  w.erase(std::unique(w.begin(), w.end()), w.end());
  return w;
}

nlohmann::json RunRecord::to_json() const {
  return {{"omega", omega},
          {"method", to_string(method)},
          {"E", opt_json(E)},
          {"L", opt_json(L)},
          {"S", opt_json(S)},
          {"S_n", opt_json(S_n)},
          {"density_error_pct", opt_json(density_error_pct)},
          {"energy_error_pct", opt_json(energy_error_pct)},
          {"E_xc", opt_json(E_xc)},
          {"indicator", opt_json(indicator)},
          {"interaction_ratio", opt_json(interaction_ratio)},
          {"diagnostics", diagnostics},
          {"error", error ? nlohmann::json(*error) : nlohmann::json(nullptr)}};
}

std::vector<RunRecord> run_sweep(const SweepSpec& spec) {
  spec.validate();
  const std::size_t n = spec.omegas.size();
  std::vector<std::vector<RunRecord>> rows(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      OmegaContext ctx(spec, spec.omegas[i]);
      for (Method m : spec.methods) rows[i].push_back(run_cell(ctx, m));
    }
  };
  const auto pool = static_cast<std::size_t>(std::min<int>(spec.workers, static_cast<int>(n)));
  if (pool <= 1) {
    work();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < pool; ++t) threads.emplace_back(work);
    for (auto& t : threads) t.join();
  }
  std::vector<RunRecord> out;
  for (auto& r : rows)
    for (auto& x : r) out.push_back(std::move(x));
  return out;
}

std::string format_number(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string entropy_csv(const std::vector<RunRecord>& records) {
  std::ostringstream os;
  os << "omega,method,L,S,S_n,status\n";
  for (const auto& r : records)
    os << format_number(r.omega) << ',' << to_string(r.method) << ',' << cell(r.L) << ',' << cell(r.S) << ','
       << cell(r.S_n) << ',' << status(r) << '\n';
  return os.str();
}

std::string energy_error_csv(const std::vector<RunRecord>& records) {
  std::ostringstream os;
  os << "omega,method,E,energy_error_pct,E_second_order,second_order_error_pct,status\n";
  for (const auto& r : records)
    os << format_number(r.omega) << ',' << to_string(r.method) << ',' << cell(r.E) << ',' << cell(r.energy_error_pct)
       << ',' << cell(diag(r, "E_second_order")) << ',' << cell(diag(r, "second_order_error_pct")) << ','
       << status(r) << '\n';
  return os.str();
}

std::string density_error_csv(const std::vector<RunRecord>& records) {
  std::ostringstream os;
  os << "omega,method,density_error_pct,density_error_weighted_pct,status\n";
  for (const auto& r : records)
    os << format_number(r.omega) << ',' << to_string(r.method) << ',' << cell(r.density_error_pct) << ','
       << cell(diag(r, "density_error_weighted_pct")) << ',' << status(r) << '\n';
  return os.str();
}

std::string indicator_csv(const std::vector<RunRecord>& records) {
  std::ostringstream os;
  os << "omega,method,E_xc,E,indicator,status\n";
  for (const auto& r : records)
    os << format_number(r.omega) << ',' << to_string(r.method) << ',' << cell(r.E_xc) << ',' << cell(r.E) << ','
       << cell(r.indicator) << ',' << status(r) << '\n';
  return os.str();
}

std::string ratio_csv(const std::vector<RunRecord>& records) {
  std::ostringstream os;
  os << "omega,method,interaction_ratio,status\n";
  for (const auto& r : records)
    os << format_number(r.omega) << ',' << to_string(r.method) << ',' << cell(r.interaction_ratio) << ','
       << status(r) << '\n';
  return os.str();
}

std::vector<std::string> write_outputs(const std::vector<RunRecord>& records, const std::string& output_dir) {
  namespace fs = std::filesystem;
  if (output_dir.empty()) throw InvalidInputError("write_outputs: empty output directory");
  fs::create_directories(output_dir);
  std::vector<std::string> written;
  auto put = [&](const std::string& name, const std::string& body) {
    const auto path = (fs::path(output_dir) / name).string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInputError("cannot write " + path);
    out << body;
    written.push_back(path);
  };
  put("entropy_vs_omega.csv", entropy_csv(records));
  put("energy_error.csv", energy_error_csv(records));
  put("density_error.csv", density_error_csv(records));
  put("indicator.csv", indicator_csv(records));
  put("ratio.csv", ratio_csv(records));
  try {
    put("overview.csv", compare_report(records).to_csv());
  } catch (const AlignmentError&) {
    // Overview needs a common omega grid; the per-family tables are still valid.
  }
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : records) j.push_back(r.to_json());
  put("records.json", j.dump(1) + "\n");
  return written;
}

MaterialConstants material_constants(Material m) {
  switch (m) {
    case Material::kGaAs:
      return {0.067, 12.1};
    case Material::kCdSe:
      return {0.13, 10.2};
    case Material::kCustom:
      break;
  }
  throw InvalidInputError("material_constants: custom material needs explicit constants");
}

EffectiveUnits convert_units(Material m, std::optional<double> dot_width_nm, std::optional<double> omega,
                             std::optional<MaterialConstants> custom) {
  if (dot_width_nm.has_value() == omega.has_value())
    throw InvalidInputError("convert_units: give exactly one of dot width and omega");
  EffectiveUnits u;
  u.material = m;
  u.constants = m == Material::kCustom ? custom.value_or(MaterialConstants{}) : material_constants(m);
  if (!(u.constants.m_star > 0.0) || !(u.constants.epsilon_r > 0.0))
    throw InvalidInputError("convert_units: material constants must be positive");
  const double a_star = kBohrNm * u.constants.epsilon_r / u.constants.m_star;
  if (dot_width_nm) {
    if (!(*dot_width_nm > 0.0)) throw InvalidInputError("convert_units: dot width must be positive");
    const double lambda = 0.5 * *dot_width_nm / a_star;
    u.dot_width_nm = *dot_width_nm;
    u.omega_eff = 1.0 / (lambda * lambda);
  } else {
    if (!(*omega > 0.0)) throw InvalidInputError("convert_units: omega must be positive");
    u.omega_eff = *omega;
    u.dot_width_nm = 2.0 * a_star / std::sqrt(*omega);
  }
  return u;
}

OverviewTable compare_report(const std::vector<RunRecord>& records) {
  std::vector<Method> order;
  std::map<Method, std::vector<const RunRecord*>> by;
  for (const auto& r : records) {
    if (!by.count(r.method)) order.push_back(r.method);
    by[r.method].push_back(&r);
  }
  OverviewTable t;
  if (order.empty()) return t;
  for (const auto* r : by[order.front()]) t.omegas.push_back(r->omega);
  std::vector<std::string> bad;
  for (Method m : order) {
    const auto& rs = by[m];
    bool same = rs.size() == t.omegas.size();
    for (std::size_t i = 0; same && i < rs.size(); ++i) same = rs[i]->omega == t.omegas[i];
    if (!same) bad.push_back(to_string(m));
  }
  if (!bad.empty()) {
    bad.insert(bad.begin(), to_string(order.front()));
    throw AlignmentError("compare_report: omega grids differ from the first method's", bad);
  }
  for (Method m : order) {
    t.methods.push_back(to_string(m));
    std::vector<std::optional<double>> l, s;
    for (const auto* r : by[m]) {
      l.push_back(r->L);
      s.push_back(r->S);
    }
    t.L.push_back(std::move(l));
    t.S.push_back(std::move(s));
  }
  if (by.count(Method::kExact))
    for (const auto* r : by[Method::kExact])
      t.exact_L_scaled.push_back(r->L ? std::optional<double>(kVonNeumannPerLinear * *r->L) : std::nullopt);
  return t;
}

std::string OverviewTable::to_csv() const {
  std::ostringstream os;
  os << "omega";
  for (const auto& m : methods) os << ",L_" << m;
  for (const auto& m : methods) os << ",S_" << m;
  if (!exact_L_scaled.empty()) os << ",exact_L_x3.75";
  os << '\n';
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    os << format_number(omegas[i]);
    for (const auto& col : L) os << ',' << cell(col[i]);
    for (const auto& col : S) os << ',' << cell(col[i]);
    if (!exact_L_scaled.empty()) os << ',' << cell(exact_L_scaled[i]);
    os << '\n';
  }
  return os.str();
}

}  // namespace hooke::app
