#pragma once

#include <cstdint>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "hooke/ks_dft.hpp"
#include "hooke/wf_search.hpp"

namespace hooke::app {

enum class Method { kExact, kLdaScf, kEa1Search, kEa2Search, kKsPertExact, kKsPertLda, kStandardPert };

const char* to_string(Method m);
Method parse_method(const std::string& name);
const std::vector<Method>& all_methods();

struct GridConfig {
  std::size_t n_points = 4000;
  double r_max_scale = 20.0;
  std::size_t sector_points = 320;
};

struct PerturbationConfig {
  int l_max = 6;
  int n_max = 20;
};

struct SweepSpec {
  std::vector<double> omegas;
  std::vector<Method> methods;
  GridConfig grid;
  PerturbationConfig perturbation;
  search::SearchConfig ea1;
  search::SearchConfig ea2;
  ks::CorrelationVariant functional = ks::CorrelationVariant::kPerdewWang92;
  std::uint64_t seed = 20240601;
  std::string output_dir;
  int workers = 1;

  SweepSpec();
  void validate() const;
};

// 25 logarithmic points on [1e-3, 1e2] plus 0.5.
std::vector<double> default_omegas();
std::vector<double> log_omegas(double lo, double hi, int n);

struct RunRecord {
  double omega = 0.0;
  Method method = Method::kExact;
  std::optional<double> E;
  std::optional<double> L;
  std::optional<double> S;
  std::optional<double> S_n;
  std::optional<double> density_error_pct;
  std::optional<double> energy_error_pct;
  std::optional<double> E_xc;
  std::optional<double> indicator;  // |E_xc / E|
  std::optional<double> interaction_ratio;
  nlohmann::json diagnostics = nlohmann::json::object();
  std::optional<std::string> error;

  nlohmann::json to_json() const;
};

// One (omega, method) cell; failures are caught and stored in the record.
std::vector<RunRecord> run_sweep(const SweepSpec& spec);

// CSV tables and records.json under spec.output_dir; returns the written paths.
std::vector<std::string> write_outputs(const std::vector<RunRecord>& records, const std::string& output_dir);

// Individual tables (12 significant digits, "null" for absent values).
std::string entropy_csv(const std::vector<RunRecord>& records);
std::string energy_error_csv(const std::vector<RunRecord>& records);
std::string density_error_csv(const std::vector<RunRecord>& records);
std::string indicator_csv(const std::vector<RunRecord>& records);
std::string ratio_csv(const std::vector<RunRecord>& records);

enum class Material { kGaAs, kCdSe, kCustom };

struct MaterialConstants {
  double m_star = 0.0;     // effective mass / m_e
  double epsilon_r = 0.0;  // static dielectric constant
};

MaterialConstants material_constants(Material m);

struct EffectiveUnits {
  Material material = Material::kCustom;
  MaterialConstants constants;
  double dot_width_nm = 0.0;  // 2 lambda
  double omega_eff = 0.0;     // effective Hartrees
};

// Exactly one of dot_width_nm / omega must be given; lambda = 1/sqrt(omega) in effective Bohr.
EffectiveUnits convert_units(Material m, std::optional<double> dot_width_nm, std::optional<double> omega,
                             std::optional<MaterialConstants> custom = std::nullopt);

struct OverviewTable {
  std::vector<double> omegas;
  std::vector<std::string> methods;
  std::vector<std::vector<std::optional<double>>> L;  // [method][omega]
  std::vector<std::vector<std::optional<double>>> S;
  std::vector<std::optional<double>> exact_L_scaled;  // 3.75 L of the exact solution, when present

  std::string to_csv() const;
};

OverviewTable compare_report(const std::vector<RunRecord>& records);

std::string format_number(double v);

}  // namespace hooke::app
