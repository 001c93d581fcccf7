// Command-line front end: run experiments, fit regret slopes, self-check.

#include <cstdio>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "projbandit/experiments.hpp"
#include "projbandit/validation.hpp"

using namespace projbandit;

namespace {

constexpr int kQuickTrials = 200;

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct CommonFlags {
  std::string config_path;
  std::string setting;
  int trials = 0;
  long horizon = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string strategies;
  std::string schedule;
  int threads = 1;
  std::string out;
  bool quick = false;
  std::string wine_csv;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "JSON config or manifest file");
  cmd->add_option("--setting", f.setting, "Experiment setting")->check(CLI::IsMember({"a", "b", "c", "wine"}));
  cmd->add_option("--trials", f.trials, "Number of trials")->check(CLI::PositiveNumber);
  cmd->add_option("--horizon", f.horizon, "Steps per trial")->check(CLI::PositiveNumber);
  cmd->add_option_function<std::uint64_t>(
      "--seed", [&f](const std::uint64_t& v) { f.seed = v; f.seed_set = true; }, "Base seed");
  cmd->add_option("--strategies", f.strategies, "Comma-separated list: gentry,curse,regret,ue");
  cmd->add_option("--schedule", f.schedule, "Exploration schedule")
      ->check(CLI::IsMember({"finite", "infinite", "smooth"}));
  cmd->add_option("--threads", f.threads, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_flag("--quick", f.quick, "Use 200 trials");
  cmd->add_option("--wine-csv", f.wine_csv, "Path to winequality-white.csv");
}

ExperimentConfig resolve_config(const CommonFlags& f) {
  ExperimentConfig cfg;
  if (!f.config_path.empty()) {
    cfg = load_config(f.config_path);
    if (!f.setting.empty() && parse_setting(f.setting) != cfg.setting) {
      throw std::invalid_argument("--setting conflicts with the config file");
    }
  } else {
    cfg = ExperimentConfig::defaults(f.setting.empty() ? Setting::a : parse_setting(f.setting));
  }
  if (f.quick) cfg.trials = kQuickTrials;
  if (f.trials > 0) cfg.trials = f.trials;
  if (f.horizon > 0) cfg.horizon = f.horizon;
  if (f.seed_set) cfg.base_seed = f.seed;
  if (!f.strategies.empty()) {
    cfg.strategies.clear();
    for (const auto& s : split_list(f.strategies)) cfg.strategies.push_back(parse_strategy(s));
  }
  if (!f.schedule.empty()) cfg.schedule = parse_schedule(f.schedule);
  if (!f.out.empty()) cfg.output_dir = f.out;
  if (!f.wine_csv.empty()) cfg.wine_csv = f.wine_csv;
  return cfg;
}

void print_summary(const ExperimentResult& result) {
  const auto window = default_slope_window(result.config.horizon);
  std::printf("%-8s %14s %10s %8s %10s\n", "strategy", "final_regret", "stderr", "slope", "best_arm%");
  for (const auto& c : result.curves) {
    double slope = std::nan("");
    if (window) {
      try {
        slope = fit_regret_slope(c.mean, window->t_min, window->t_max);
      } catch (const UndefinedSlopeError&) {
      }
    }
    std::printf("%-8s %14.4f %10.4f %8.4f %10.2f\n", c.strategy.c_str(), c.mean.back(),
                c.standard_error.back(), slope, c.best_arm_percentage.value_or(std::nan("")));
  }
}

int cmd_run(const CommonFlags& f) {
  const auto cfg = resolve_config(f);
  std::cerr << "running " << cfg.label() << ": " << cfg.trials << " trials x " << cfg.horizon
            << " steps, " << f.threads << " thread(s)\n";
  const auto result = run_experiment(cfg, RunOptions{f.threads});
  emit_results(result, cfg.output_dir);
  print_summary(result);
  std::cerr << "results written to " << cfg.output_dir << "\n";
  return 0;
}

int cmd_sweep(const CommonFlags& f, const std::string& alphas) {
  const auto base = resolve_config(f);
  const std::filesystem::path out_dir = base.output_dir;
  std::filesystem::create_directories(out_dir);
  const auto path = out_dir / "sweep.csv";
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << "experiment,strategy,alpha,final_mean_cum_proj_regret,final_stderr\n";
  for (const auto& a : split_list(alphas)) {
    auto cfg = base;
    const double alpha = std::stod(a);
    for (auto s : cfg.strategies) cfg.alpha_per_strategy[s] = alpha;
    const auto result = run_experiment(cfg, RunOptions{f.threads});
    for (const auto& c : result.curves) {
      out << cfg.label() << ',' << c.strategy << ',' << format_double(alpha) << ','
          << format_double(c.mean.back()) << ',' << format_double(c.standard_error.back()) << '\n';
      std::printf("alpha=%-8g %-8s %12.4f\n", alpha, c.strategy.c_str(), c.mean.back());
    }
  }
  return 0;
}

int cmd_slope(const std::string& curve_path, long t_min, long t_max, const std::string& only) {
  const auto curves = read_curve_csv(curve_path);
  for (const auto& [name, curve] : curves) {
    if (!only.empty() && name != only) continue;
    const long hi = std::min<long>(t_max, static_cast<long>(curve.size()));
    std::printf("%s,%s\n", name.c_str(), format_double(fit_regret_slope(curve, t_min, hi)).c_str());
  }
  return 0;
}

int cmd_validate(std::uint64_t seed) {
  bool ok = true;
  for (const auto& r : run_self_checks(seed)) {
    std::printf("[%s] %-32s worst=%.3e tol=%.1e\n", r.passed ? "PASS" : "FAIL", r.name.c_str(),
                r.worst, r.tolerance);
    ok = ok && r.passed;
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Projection-reward linear bandit experiments"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  auto* run = app.add_subcommand("run", "Run an experiment by setting name or config file");
  add_common(run, run_flags);

  CommonFlags sweep_flags;
  std::string alphas = "0.01,0.1,1,10";
  auto* sweep = app.add_subcommand("sweep", "Final regret over a grid of alpha values");
  add_common(sweep, sweep_flags);
  sweep->add_option("--alphas", alphas, "Comma-separated alpha values");

  std::string curve_path;
  long t_min = 1000;
  long t_max = 10000;
  std::string only;
  auto* slope = app.add_subcommand("slope", "Fit log-log regret slopes from a curve CSV");
  slope->add_option("curve", curve_path, "curve_<strategy>.csv")->required()->check(CLI::ExistingFile);
  slope->add_option("--t-min", t_min, "Window start")->check(CLI::PositiveNumber);
  slope->add_option("--t-max", t_max, "Window end")->check(CLI::PositiveNumber);
  slope->add_option("--strategy", only, "Only this strategy");

  std::uint64_t validate_seed = 7;
  auto* validate = app.add_subcommand("validate", "Numerical self-checks");
  validate->add_option("--seed", validate_seed, "Seed for random inputs");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_flags);
    if (sweep->parsed()) return cmd_sweep(sweep_flags, alphas);
    if (slope->parsed()) return cmd_slope(curve_path, t_min, t_max, only);
    if (validate->parsed()) return cmd_validate(validate_seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
