#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "projbandit/decision_sets.hpp"
#include "projbandit/environment.hpp"
#include "projbandit/policies.hpp"
#include "projbandit/wine.hpp"

namespace projbandit {

enum class Setting { a, b, c, wine };

std::string_view to_string(Setting s);
Setting parse_setting(std::string_view name);

struct ExperimentConfig {
  Setting setting = Setting::a;
  int d = 10;
  int K = 45;
  int u = 5;
  double vartheta = 0.5;
  std::map<Strategy, double> alpha_per_strategy;
  double lambda = 1.0;
  long horizon = 10000;
  int trials = 2000;
  std::uint64_t base_seed = 20190101;
  std::vector<Strategy> strategies;
  ScheduleKind schedule = ScheduleKind::finite;
  double entropy_budget = 5.0;
  int ue_candidate_pool = 64;
  std::string output_dir = "results";
  std::string wine_csv;
  bool wine_noise = false;
  bool standardize_features = false;
  bool ue_projected_reward = true;

  /// Settings used for each experiment: (a)/(b) d=10, K=45, u=5; (c) d=4,
  /// u=2 over the entropy ball; wine d=13, K=200, u=12. All with
  /// vartheta=0.5, lambda=1, 2000 trials of 10^4 steps.
  static ExperimentConfig defaults(Setting setting);

  double alpha(Strategy s) const;
  /// Throws std::invalid_argument on an inconsistent configuration.
  void validate() const;
  /// "<setting>_<schedule>", e.g. "a_finite".
  std::string label() const;
};

nlohmann::json to_json(const ExperimentConfig& config);
/// Starts from ExperimentConfig::defaults(setting) and overlays every key
/// present. Unknown keys are rejected; manifest-only keys are ignored.
ExperimentConfig config_from_json(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Counter-based seed splitting (SplitMix64 finalizer).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);
std::uint64_t trial_seed(const ExperimentConfig& config, int trial);

/// Independent streams within one trial. The instance and noise streams are
/// shared by all strategies so they face identical problems and noise; the
/// policy stream depends on the strategy.
enum class TrialStream : std::uint64_t { instance = 0, noise = 1, policy = 2 };
Rng make_stream(std::uint64_t trial_seed, TrialStream stream, Strategy strategy = Strategy::gentry);

struct ProblemInstance {
  Environment environment;
  DecisionSet decision_set;
  Projector projector;
};

/// Draws one instance. Arms, theta and the basis of U have U(-1,1) entries;
/// instances with ||P theta|| <= 1e-8 are redrawn (at most 100 times).
/// `wine` must be provided for Setting::wine.
ProblemInstance generate_setting(const ExperimentConfig& config, Rng& rng,
                                 const std::vector<WineRecord>* wine = nullptr);

/// delta_{D_k}: min over unit y in span(D) of y^T (sum_{x in D_k} x x^T) y.
double delta_dk(const DecisionSet& set);

struct StepLog {
  /// Index in a finite set, or a hash of the arm vector for a continuous set.
  std::uint64_t arm_id = 0;
  bool explored = false;
  double observed_return = 0.0;
  double projection_regret = 0.0;
  double standard_regret = 0.0;
};

struct TrialRecord {
  std::vector<StepLog> steps;
  bool finite = true;
  int best_arm_index = -1;
  double best_projection_value = 0.0;
  double delta_dk = 0.0;
  int k = 0;
};

std::uint64_t hash_vector(const Vector& x);

TrialRecord run_trial(const ExperimentConfig& config, Strategy strategy, std::uint64_t seed,
                      const std::vector<WineRecord>* wine = nullptr);

inline constexpr int kBestArmWindow = 200;
inline constexpr double kBestArmFraction = 0.9;
inline constexpr double kOptimalSlack = 1e-10;

/// True iff optimal arms (zero projection regret) make up more than 90% of
/// the final min(200, n) steps.
bool best_arm_found(const TrialRecord& record);

struct TrialSummary {
  std::vector<double> cumulative_projection_regret;
  double final_standard_regret = 0.0;
  std::optional<bool> best_arm_found;
  double delta_dk = 0.0;
  int k = 0;
};

TrialSummary summarize(const TrialRecord& record);

struct AggregateCurve {
  std::string strategy;
  int trials = 0;
  std::vector<double> mean;
  std::vector<double> standard_error;
  double final_standard_regret = 0.0;
  /// Percentage in [0, 100]; absent for continuous decision sets.
  std::optional<double> best_arm_percentage;
  double delta_dk_min = 0.0;
  double delta_dk_mean = 0.0;
  double delta_dk_max = 0.0;
  int k_min = 0;
  int k_max = 0;
};

/// Order-sensitive streaming reduction; feeding trials in index order makes
/// the result independent of how the trials were scheduled.
class Aggregator {
 public:
  explicit Aggregator(std::string strategy) : strategy_(std::move(strategy)) {}
  void add(const TrialSummary& summary);
  AggregateCurve finish() const;

 private:
  std::string strategy_;
  long count_ = 0;
  std::vector<double> mean_;
  std::vector<double> m2_;
  double standard_sum_ = 0.0;
  long best_found_ = 0;
  long best_eligible_ = 0;
  double delta_min_ = 0.0;
  double delta_max_ = 0.0;
  double delta_sum_ = 0.0;
  int k_min_ = 0;
  int k_max_ = 0;
};

/// Requires at least one summary, all of the same length.
AggregateCurve aggregate(std::span<const TrialSummary> summaries, const std::string& strategy);

class UndefinedSlopeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Least-squares slope of log(curve[t-1]) on log(t) over integer t in
/// [t_min, t_max].
double fit_regret_slope(std::span<const double> curve, long t_min, long t_max);

struct SlopeWindow {
  long t_min = 1000;
  long t_max = 10000;
};

/// [10^3, 10^4] clipped to the horizon; nullopt when too short to fit.
std::optional<SlopeWindow> default_slope_window(long horizon);

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<std::uint64_t> trial_seeds;
  std::vector<AggregateCurve> curves;
};

struct RunOptions {
  int threads = 1;
  /// Trials held in memory between ordered reductions.
  int chunk_trials = 64;
};

/// Runs every configured strategy over all trials on a worker pool.
ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

/// Writes curve_<strategy>.csv, summary.csv and manifest.json into out_dir.
void emit_results(const ExperimentResult& result, const std::filesystem::path& out_dir);

/// Reads a curve CSV written by emit_results into strategy -> mean curve
/// (entry t-1 holds step t). Rows must be in increasing t starting at 1.
std::map<std::string, std::vector<double>> read_curve_csv(const std::filesystem::path& path);

std::string format_double(double v);

}  // namespace projbandit
