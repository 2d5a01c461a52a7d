#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <optional>
#include <cstdlib>
#include <iostream>
#include <sstream>

#include "hooke/errors.hpp"
#include "hooke/sweep.hpp"

namespace {

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

hooke::app::Material parse_material(const std::string& s) {
  if (s == "GaAs" || s == "gaas") return hooke::app::Material::kGaAs;
  if (s == "CdSe" || s == "cdse") return hooke::app::Material::kCdSe;
  if (s == "custom") return hooke::app::Material::kCustom;
  throw hooke::InvalidInputError("unknown material '" + s + "'");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace hooke::app;
  CLI::App app{"Hooke's atom entanglement: exact solution, LDA and perturbative approximations"};
  app.set_version_flag("--version", "hooke 1.0");

  std::vector<double> omega_list;
  std::vector<double> omega_log;
  std::string methods = "all";
  std::size_t grid_points = 4000;
  double r_max_scale = 20.0;
  std::uint64_t seed = 20240601;
  const char* env_out = std::getenv("HOOKE_OUTPUT_DIR");
  std::string out = env_out ? env_out : "hooke_out";
  int l_max = 6, n_max = 20;
  double thr1 = 0.041, thr2 = 0.01;
  std::string variant = "pw92";
  int workers = 1;
  int generations = 30;

  app.add_option("--omega-list", omega_list, "Confinement frequencies (a.u.)")->delimiter(',');
  app.add_option("--omega-log", omega_log, "Logarithmic grid: min,max,n")->delimiter(',')->expected(3);
  app.add_option("--methods", methods,
                 "Comma list of exact,lda-scf,ea1-search,ea2-search,ks-pert-exact,ks-pert-lda,standard-pert or all");
  app.add_option("--grid-points", grid_points, "Radial grid points")->capture_default_str();
  app.add_option("--r-max-scale", r_max_scale, "r_max in oscillator lengths")->capture_default_str();
  app.add_option("--seed", seed, "Search seed")->capture_default_str();
  app.add_option("--out", out, "Output directory (default $HOOKE_OUTPUT_DIR or hooke_out)");
  app.add_option("--l-max", l_max, "Perturbation angular cutoff")->capture_default_str();
  app.add_option("--n-max", n_max, "Perturbation radial cutoff")->capture_default_str();
  app.add_option("--threshold-ea1", thr1, "EA1 acceptance threshold on f")->capture_default_str();
  app.add_option("--threshold-ea2", thr2, "EA2 acceptance threshold on f")->capture_default_str();
  app.add_option("--functional-variant", variant, "LDA correlation: pw92 or wigner")->capture_default_str();
  app.add_option("--workers", workers, "Concurrent omega cells")->capture_default_str();
  app.add_option("--generations", generations, "Search generations")->capture_default_str();

  auto* units = app.add_subcommand("units", "Convert between dot width and effective confinement");
  std::string material = "GaAs";
  std::optional<double> width, omega;
  double m_star = 0.0, eps = 0.0;
  units->add_option("--material", material, "GaAs, CdSe or custom")->capture_default_str();
  units->add_option("--width-nm", width, "Dot width 2 lambda in nm");
  units->add_option("--omega", omega, "Confinement in effective Hartrees");
  units->add_option("--m-star", m_star, "Effective mass (custom)");
  units->add_option("--epsilon", eps, "Dielectric constant (custom)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (units->parsed()) {
      const auto m = parse_material(material);
      std::optional<MaterialConstants> custom;
      if (m == Material::kCustom) custom = MaterialConstants{m_star, eps};
      const auto u = convert_units(m, width, omega, custom);
      std::cout << "material " << material << " m*=" << u.constants.m_star << " eps=" << u.constants.epsilon_r
                << "\ndot_width_nm " << format_number(u.dot_width_nm) << "\nomega_eff " << format_number(u.omega_eff)
                << '\n';
      return 0;
    }

    SweepSpec spec;
    if (!omega_list.empty() && !omega_log.empty())
      throw hooke::InvalidInputError("use either --omega-list or --omega-log");
    if (!omega_list.empty()) {
      spec.omegas = omega_list;
      std::sort(spec.omegas.begin(), spec.omegas.end());
    } else if (!omega_log.empty()) {
      const double n = omega_log[2];
      if (n != std::floor(n)) throw hooke::InvalidInputError("--omega-log point count must be an integer");
      spec.omegas = log_omegas(omega_log[0], omega_log[1], static_cast<int>(n));
    } else {
      spec.omegas = default_omegas();
    }
    if (methods == "all") {
      spec.methods = all_methods();
    } else {
      for (const auto& m : split(methods)) spec.methods.push_back(parse_method(m));
    }
    spec.grid.n_points = grid_points;
    spec.grid.r_max_scale = r_max_scale;
    spec.seed = seed;
    spec.output_dir = out;
    spec.perturbation.l_max = l_max;
    spec.perturbation.n_max = n_max;
    spec.ea1.threshold = thr1;
    spec.ea2.threshold = thr2;
    spec.ea1.generations = spec.ea2.generations = generations;
    if (variant == "pw92") {
      spec.functional = hooke::ks::CorrelationVariant::kPerdewWang92;
    } else if (variant == "wigner") {
      spec.functional = hooke::ks::CorrelationVariant::kWigner;
    } else {
      throw hooke::InvalidInputError("unknown functional variant '" + variant + "'");
    }
    spec.workers = workers;
    spec.validate();

    const auto records = run_sweep(spec);
    const auto files = write_outputs(records, spec.output_dir);
    int failed = 0;
    for (const auto& r : records)
      if (r.error) {
        ++failed;
        std::cerr << "omega=" << format_number(r.omega) << " " << to_string(r.method) << ": " << *r.error << '\n';
      }
    for (const auto& f : files) std::cout << f << '\n';
    std::cout << records.size() - failed << "/" << records.size() << " cells succeeded\n";
    return failed ? 2 : 0;
  } catch (const hooke::InvalidInputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
