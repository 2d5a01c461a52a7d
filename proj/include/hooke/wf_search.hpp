#pragma once

#include <cstdint>
#include <functional>
#include <json.hpp>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hooke/ks_dft.hpp"
#include "hooke/numerics.hpp"
#include "hooke/two_electron.hpp"

namespace hooke::search {

// psi = p(s) exp(-omega_r s^2 / 2) exp(-2 omega_R R^2), p(s) = sum_i a_i s^i.
struct TrialEA1 {
  double omega_r = 0.5;
  double omega_R = 0.5;
  std::vector<double> coeffs{1.0};
};

// psi = sum_ijk a_ijk eta_i(r1) eta_j(r2) P_k(cos theta), a_ijk = a_jik.
struct TrialEA2 {
  static constexpr int kOrder = 4;
  double basis_omega = 1.0;                     // eta_i = p_i(r) exp(-basis_omega r^2 / 2)
  std::vector<double> coeffs = std::vector<double>(kOrder * kOrder * kOrder, 0.0);  // index (i*4 + j)*4 + k

  double& at(int i, int j, int k) { return coeffs[(i * kOrder + j) * kOrder + k]; }
  double at(int i, int j, int k) const { return coeffs[(i * kOrder + j) * kOrder + k]; }
};

// Relative profile of an EA1 trial on s_k = k * s_max / (n - 1), normalized.
RelComState ea1_state(const TrialEA1& t, double s_max, std::size_t n_samples = 1200);

numerics::RadialFunction trial_density(const TrialEA1& t, const numerics::RadialGrid& grid);
numerics::RadialFunction trial_density(const TrialEA2& t, const numerics::RadialGrid& grid);

// Normalized pair expansion of an EA2 trial (orthonormal eta basis on `grid`).
PairExpansion ea2_expansion(const TrialEA2& t, const numerics::RadialGrid& grid);

// Q = <T + V_ee>.
double trial_q(const TrialEA1& t, const numerics::RadialGrid& grid);
double trial_q(const TrialEA2& t, const numerics::RadialGrid& grid);

// f = sum_i |n_target - n_trial| / sum_i n_target over the grid samples.
double fitness_f(const numerics::RadialFunction& trial, const numerics::RadialFunction& target);

// <T + V_ee + V_ext> of the doubly occupied KS orbital product.
double ks_product_energy(const ks::ScfState& st, double omega);

struct GroundStateCheck {
  bool nodeless = false;
  bool below_reference = false;
  double energy = 0.0;     // Q + \int v_ext n
  double reference = 0.0;  // KS product value
  bool ok() const { return nodeless && below_reference; }
};

GroundStateCheck ground_state_checks(const TrialEA1& t, const numerics::RadialGrid& grid, double omega,
                                     double reference_energy);
GroundStateCheck ground_state_checks(const TrialEA2& t, const numerics::RadialGrid& grid, double omega,
                                     double reference_energy);

enum class TrialForm { kEA1, kEA2 };
enum class Objective { kF, kFPlusQ };

const char* to_string(TrialForm f);

struct SearchConfig {
  int population = 12;
  int generations = 30;
  int elite_keep = 4;
  double mutation_scale = 0.1;
  int descent_steps = 10;
  Objective objective = Objective::kFPlusQ;
  double q_weight = 1.0;
  double threshold = 0.041;
  std::uint64_t seed = 20240601;
  int archive_size = 10;
  double fresh_fraction = 0.25;  // share of each new generation drawn at random
  int ea1_degree = 6;
  std::size_t target_stride = 8;  // EA1 fits on every k-th target sample during descent
  std::string checkpoint_path;    // written after every generation when non-empty

  void validate() const;
};

// Parametrized family searched by the evolutionary loop.
class TrialModel {
 public:
  virtual ~TrialModel() = default;
  virtual std::size_t dimension() const = 0;
  virtual std::vector<double> random_parameters(std::mt19937_64& rng) const = 0;
  // Objective used during the search (may use a reduced grid).
  virtual double search_objective(const std::vector<double>& p) = 0;
  struct Evaluation {
    double f = 0.0;
    double q = 0.0;
    double objective = 0.0;
  };
  // Final evaluation on the full target grid.
  virtual Evaluation evaluate(const std::vector<double>& p) = 0;
  virtual GroundStateCheck check(const std::vector<double>& p) = 0;
};

struct DescentResult {
  std::vector<double> params;
  double value = 0.0;
  int accepted_steps = 0;
  bool converged = false;  // step collapsed below 1e-14
  std::vector<double> history;
};

// Forward-difference gradient with backtracking (Armijo) line search.
DescentResult gradient_descent(const std::function<double(const std::vector<double>&)>& objective,
                               std::vector<double> start, int max_steps, double initial_step = 1.0);

struct Candidate {
  std::vector<double> params;
  double f = 0.0;
  double q = 0.0;
  double objective = 0.0;
  GroundStateCheck checks;
};

struct SearchResult {
  TrialForm form = TrialForm::kEA1;
  std::vector<Candidate> best;  // sorted by objective
  bool accepted = false;  // some candidate has f <= threshold
  double threshold = 0.0;
  std::optional<std::size_t> selected;  // lowest Q among accepted candidates, checked ones first
  bool selected_passes_checks = false;
  std::uint64_t seed = 0;
  std::vector<double> best_history;  // best objective after each generation
  int generations_run = 0;
};

struct Checkpoint {
  TrialForm form = TrialForm::kEA1;
  std::uint64_t seed = 0;
  int generation = 0;  // next generation to run
  std::vector<std::vector<double>> population;
  std::vector<Candidate> archive;
  std::vector<double> best_history;

  nlohmann::json to_json() const;
  static Checkpoint from_json(const nlohmann::json& j);
};

SearchResult evolutionary_search(TrialModel& model, TrialForm form, const SearchConfig& cfg,
                                 const std::vector<std::vector<double>>& planted = {},
                                 const std::optional<Checkpoint>& resume = std::nullopt);

// Parameter layout [log omega_r, log omega_R, b_1..b_d] with a_0 = 1 and a_i = b_i / l^i,
// l the rms radius of the target.
class Ea1Model : public TrialModel {
 public:
  Ea1Model(numerics::RadialFunction target, const SearchConfig& cfg, double reference_energy, double omega);

  TrialEA1 trial(const std::vector<double>& p) const;
  std::vector<double> parameters(const TrialEA1& t) const;

  std::size_t dimension() const override { return 2 + static_cast<std::size_t>(degree_); }
  std::vector<double> random_parameters(std::mt19937_64& rng) const override;
  double search_objective(const std::vector<double>& p) override;
  Evaluation evaluate(const std::vector<double>& p) override;
  GroundStateCheck check(const std::vector<double>& p) override;

  double s_max() const noexcept { return s_max_; }
  // Gaussian product with the target's rms radius (omega_r = omega_R, p = 1).
  std::vector<double> gaussian_parameters() const;

 private:
  void build_kernel(double omega_R);
  std::vector<double> sub_density(const RelComState& st);
  bool has_node(const TrialEA1& t) const;

  numerics::RadialFunction target_;
  SearchConfig cfg_;
  int degree_;
  double reference_;
  double omega_;
  double scale_omega_;  // 3 / (2 <r^2>) of the target
  double length_;       // sqrt(<r^2>) of the target
  double s_max_;
  std::size_t n_s_ = 1200;
  std::vector<std::size_t> sub_;  // target indices used during descent
  double sub_total_ = 0.0;
  double soft_eps_ = 0.0;  // rounding of |n_target - n| in the search objective
  double kernel_omega_R_ = -1.0;
  Eigen::MatrixXd kernel_;  // sub points x s samples
};

// Parameter layout: a_ijk for i <= j, k = 0..3 (40 values).
class Ea2Model : public TrialModel {
 public:
  Ea2Model(numerics::RadialFunction target, const SearchConfig& cfg, double reference_energy, double omega,
           double basis_omega);

  TrialEA2 trial(const std::vector<double>& p) const;
  std::vector<double> parameters(const TrialEA2& t) const;
  // phi(r1) phi(r2) projected on the basis; `orbital` is the reduced orbital u = sqrt(4 pi) r phi.
  std::vector<double> product_parameters(const numerics::RadialFunction& orbital) const;

  std::size_t dimension() const override { return 40; }
  std::vector<double> random_parameters(std::mt19937_64& rng) const override;
  double search_objective(const std::vector<double>& p) override;
  Evaluation evaluate(const std::vector<double>& p) override;
  GroundStateCheck check(const std::vector<double>& p) override;

 private:
  struct Parts {
    double f, q, norm;
  };
  Parts parts(const std::vector<double>& p, bool smooth = false) const;

  numerics::RadialFunction target_;
  SearchConfig cfg_;
  double reference_;
  double omega_;
  double basis_omega_;
  std::vector<std::vector<double>> u_;       // sqrt(4 pi) r eta_a on the target grid
  std::vector<Eigen::MatrixXd> kinetic_;     // per k: 1/2 \int (u_a' u_b' + k(k+1) u_a u_b / r^2)
  std::vector<double> coulomb_;              // J^L(ac, bd), flattened
  std::vector<double> gaunt_;                // \int P_k P_k' P_L dx
  double target_total_ = 0.0;
  double soft_eps_ = 0.0;  // rounding of |n_target - n| in the search objective
};

// Sector wavefunction of a trial on a two-dimensional grid (for the RDM).
SectorWavefunction ea1_sectors(const TrialEA1& t, double s_max, const numerics::RadialGrid& sector_grid,
                               int l_max = 12);

}  // namespace hooke::search
