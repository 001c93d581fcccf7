#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "projbandit/experiments.hpp"
#include "support.hpp"

using namespace projbandit;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config(Setting s) {
  auto cfg = ExperimentConfig::defaults(s);
  cfg.trials = 6;
  cfg.horizon = 300;
  cfg.base_seed = 77;
  return cfg;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("projbandit_test_" + name);
  fs::remove_all(dir);
  return dir;
}

TrialSummary summary_of(std::vector<double> cum) {
  TrialSummary s;
  s.cumulative_projection_regret = std::move(cum);
  return s;
}

// Slope of y on x by the two-pass centered formula in long double.
double ols_slope(const std::vector<long double>& x, const std::vector<long double>& y) {
  long double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  long double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return static_cast<double>(sxy / sxx);
}

}  // namespace

TEST_CASE("setting defaults") {
  const auto a = ExperimentConfig::defaults(Setting::a);
  CHECK(a.d == 10);
  CHECK(a.K == 45);
  CHECK(a.u == 5);
  CHECK(a.vartheta == 0.5);
  CHECK(a.horizon == 10000);
  CHECK(a.trials == 2000);
  CHECK(a.alpha(Strategy::gentry) == 1.0);
  CHECK(a.alpha(Strategy::ue) == 0.1);
  const auto c = ExperimentConfig::defaults(Setting::c);
  CHECK(c.d == 4);
  CHECK(c.u == 2);
  CHECK(c.vartheta == 0.5);
  CHECK(c.schedule == ScheduleKind::infinite);
  CHECK(c.alpha(Strategy::gentry) == 0.01);
  CHECK(c.alpha(Strategy::regret) == 0.1);
  CHECK(a.label() == "a_finite");
  CHECK(parse_setting("wine") == Setting::wine);
  CHECK_THROWS_AS(parse_setting("d"), std::invalid_argument);
}

TEST_CASE("config validation") {
  auto cfg = ExperimentConfig::defaults(Setting::a);
  CHECK_NOTHROW(cfg.validate());
  cfg.u = 11;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = ExperimentConfig::defaults(Setting::a);
  cfg.horizon = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = ExperimentConfig::defaults(Setting::a);
  cfg.alpha_per_strategy[Strategy::curse] = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = ExperimentConfig::defaults(Setting::wine);
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("generated instances") {
  Rng rng(1);
  auto b = ExperimentConfig::defaults(Setting::b);
  const auto inst_b = generate_setting(b, rng);
  CHECK(inst_b.projector.matrix() == diagonal_projector(10, 5).matrix());
  CHECK(inst_b.decision_set.size() == 45);

  auto a = ExperimentConfig::defaults(Setting::a);
  for (int i = 0; i < 20; ++i) {
    const auto inst = generate_setting(a, rng);
    CHECK(inst.projector.subspace_dim() == 5);
    CHECK(inst.projector.apply(inst.environment.theta()).norm() > 1e-8);
    CHECK(inst.decision_set.span_dim() == 10);
    for (const auto& x : inst.decision_set.finite().arms()) CHECK(x.cwiseAbs().maxCoeff() <= 1.0);
    CHECK(delta_dk(inst.decision_set) > 0.0);
  }

  const auto inst_c = generate_setting(ExperimentConfig::defaults(Setting::c), rng);
  CHECK_FALSE(inst_c.decision_set.is_finite());
  CHECK(inst_c.decision_set.dim() == 4);
  CHECK(delta_dk(inst_c.decision_set) == doctest::Approx(1.0));
}

TEST_CASE("seed derivation") {
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(derive_seed(5, 9) == derive_seed(5, 9));
  const auto cfg = ExperimentConfig::defaults(Setting::a);
  CHECK(trial_seed(cfg, 3) == derive_seed(cfg.base_seed, 3));
}

TEST_CASE("run_trial is deterministic") {
  const auto cfg = small_config(Setting::a);
  for (auto s : {Strategy::gentry, Strategy::ue}) {
    const auto r1 = run_trial(cfg, s, 123);
    const auto r2 = run_trial(cfg, s, 123);
    REQUIRE(r1.steps.size() == 300u);
    bool same = true;
    for (std::size_t i = 0; i < r1.steps.size(); ++i) {
      same = same && r1.steps[i].arm_id == r2.steps[i].arm_id &&
             r1.steps[i].observed_return == r2.steps[i].observed_return &&
             r1.steps[i].projection_regret == r2.steps[i].projection_regret &&
             r1.steps[i].explored == r2.steps[i].explored;
    }
    CHECK(same);
  }
  auto c = small_config(Setting::c);
  const auto e1 = run_trial(c, Strategy::ue, 9);
  const auto e2 = run_trial(c, Strategy::ue, 9);
  CHECK(e1.steps.back().arm_id == e2.steps.back().arm_id);
  CHECK_FALSE(e1.finite);
}

TEST_CASE("a one-step trial is a single exploration pull") {
  auto cfg = small_config(Setting::a);
  cfg.horizon = 1;
  const auto rec = run_trial(cfg, Strategy::gentry, 5);
  REQUIRE(rec.steps.size() == 1u);
  CHECK(rec.steps[0].explored);
  // Regenerate the instance to compute the pulled arm's gap independently.
  Rng rng = make_stream(5, TrialStream::instance);
  const auto inst = generate_setting(cfg, rng);
  const auto& arms = inst.decision_set.finite().arms();
  const Vector pt = inst.projector.matrix() * inst.environment.theta();
  double best = -INFINITY;
  for (const auto& x : arms) best = std::max(best, x.dot(pt));
  const auto idx = static_cast<std::size_t>(rec.steps[0].arm_id);
  CHECK(rec.steps[0].projection_regret == doctest::Approx(best - arms[idx].dot(pt)).epsilon(1e-12));
  const auto& dk = inst.decision_set.finite().dk_indices();
  CHECK(std::find(dk.begin(), dk.end(), static_cast<int>(idx)) != dk.end());
}

TEST_CASE("noise-free two-arm trials lock onto the best arm") {
  auto cfg = ExperimentConfig::defaults(Setting::b);
  cfg.d = 2;
  cfg.u = 2;
  cfg.K = 2;
  cfg.vartheta = 0.0;
  cfg.horizon = 100;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto rec = run_trial(cfg, Strategy::gentry, seed);
    // epsilon_t = min(1, 2/t): steps 1 and 2 explore. Each noise-free
    // observation pins theta in the pulled direction, and once both arms are
    // seen the greedy choice is stable.
    double late = 0.0;
    for (std::size_t i = 50; i < rec.steps.size(); ++i) {
      if (!rec.steps[i].explored) late += rec.steps[i].projection_regret;
    }
    CHECK(late == 0.0);
    CHECK(rec.steps[0].explored);
    CHECK(rec.steps[1].explored);
  }
}

TEST_CASE("property: finite trials reconcile with per-arm gaps") {
  const auto cfg = small_config(Setting::a);
  for (auto s : {Strategy::gentry, Strategy::curse, Strategy::regret, Strategy::ue}) {
    const auto rec = run_trial(cfg, s, 31);
    Rng rng = make_stream(31, TrialStream::instance);
    const auto inst = generate_setting(cfg, rng);
    const auto& arms = inst.decision_set.finite().arms();
    const Vector pt = inst.projector.matrix() * inst.environment.theta();
    double best = -INFINITY;
    for (const auto& x : arms) best = std::max(best, x.dot(pt));
    std::vector<long> counts(arms.size(), 0);
    double logged = 0.0;
    for (const auto& st : rec.steps) {
      ++counts[static_cast<std::size_t>(st.arm_id)];
      logged += st.projection_regret;
    }
    double by_arm = 0.0;
    long total = 0;
    for (std::size_t i = 0; i < arms.size(); ++i) {
      by_arm += counts[i] * (best - arms[i].dot(pt));
      total += counts[i];
    }
    CHECK(total == cfg.horizon);
    CHECK(std::abs(logged - by_arm) <= 1e-9 * std::max(1.0, logged));
    const auto sum = summarize(rec);
    for (std::size_t i = 1; i < sum.cumulative_projection_regret.size(); ++i) {
      CHECK(sum.cumulative_projection_regret[i] >= sum.cumulative_projection_regret[i - 1]);
    }
  }
}

TEST_CASE("aggregate mean and standard error") {
  const std::vector<TrialSummary> two{summary_of({1.0}), summary_of({3.0})};
  const auto agg = aggregate(two, "gentry");
  CHECK(agg.trials == 2);
  CHECK(agg.mean[0] == doctest::Approx(2.0));
  CHECK(agg.standard_error[0] == doctest::Approx(1.0));
  CHECK_FALSE(agg.best_arm_percentage.has_value());

  const std::vector<TrialSummary> one{summary_of({0.5, 1.5, 4.0})};
  const auto single = aggregate(one, "curse");
  CHECK(single.mean == one[0].cumulative_projection_regret);
  CHECK(single.standard_error[2] == 0.0);
  CHECK_THROWS(aggregate(std::span<const TrialSummary>{}, "x"));
}

TEST_CASE("property: streaming aggregate matches a two-pass computation") {
  testsupport::Gen gen(51);
  std::vector<TrialSummary> trials;
  for (int i = 0; i < 37; ++i) {
    std::vector<double> cum;
    double c = 0.0;
    for (int t = 0; t < 20; ++t) cum.push_back(c += gen.uniform(0.0, 3.0));
    trials.push_back(summary_of(cum));
  }
  const auto agg = aggregate(trials, "g");
  for (int t = 0; t < 20; ++t) {
    double mean = 0.0;
    for (const auto& s : trials) mean += s.cumulative_projection_regret[t];
    mean /= trials.size();
    double ss = 0.0;
    for (const auto& s : trials) ss += std::pow(s.cumulative_projection_regret[t] - mean, 2);
    const double se = std::sqrt(ss / (trials.size() - 1)) / std::sqrt(double(trials.size()));
    CHECK(agg.mean[t] == doctest::Approx(mean).epsilon(1e-12));
    CHECK(agg.standard_error[t] == doctest::Approx(se).epsilon(1e-10));
  }
}

TEST_CASE("best-arm metric threshold") {
  auto record_with_hits = [](int hits) {
    TrialRecord rec;
    for (int i = 0; i < 300; ++i) {
      StepLog s;
      // The final 200 steps: the first `hits` of them are optimal.
      s.projection_regret = (i >= 100 && i < 100 + hits) ? 0.0 : 1.0;
      rec.steps.push_back(s);
    }
    return rec;
  };
  CHECK(best_arm_found(record_with_hits(185)));
  CHECK_FALSE(best_arm_found(record_with_hits(180)));
  CHECK(best_arm_found(record_with_hits(181)));

  std::vector<TrialSummary> sums;
  for (int h : {185, 10, 190, 0}) sums.push_back(summarize(record_with_hits(h)));
  CHECK(aggregate(sums, "g").best_arm_percentage.value() == doctest::Approx(50.0));
}

TEST_CASE("regret slope of exact power laws") {
  std::vector<double> linear, two_thirds, logt;
  for (int t = 1; t <= 10000; ++t) {
    linear.push_back(t);
    two_thirds.push_back(std::pow(t, 2.0 / 3.0));
    logt.push_back(std::log(static_cast<double>(t)));
  }
  CHECK(std::abs(fit_regret_slope(linear, 1000, 10000) - 1.0) <= 0.01);
  CHECK(std::abs(fit_regret_slope(two_thirds, 1000, 10000) - 0.667) <= 0.01);

  std::vector<long double> x, y;
  for (long t = 1000; t <= 10000; ++t) {
    x.push_back(std::log(static_cast<long double>(t)));
    y.push_back(std::log(std::log(static_cast<long double>(t))));
  }
  const double oracle = ols_slope(x, y);
  CHECK(std::abs(oracle - 0.12186252954844584) <= 1e-9);
  CHECK(std::abs(fit_regret_slope(logt, 1000, 10000) - oracle) <= 1e-9);
}

TEST_CASE("regret slope errors and windows") {
  std::vector<double> with_zero(100, 1.0);
  with_zero[50] = 0.0;
  CHECK_THROWS_AS(fit_regret_slope(with_zero, 10, 90), UndefinedSlopeError);
  CHECK_THROWS(fit_regret_slope(with_zero, 10, 10));
  CHECK_THROWS(fit_regret_slope(with_zero, 10, 200));
  CHECK(default_slope_window(10000)->t_min == 1000);
  CHECK(default_slope_window(10000)->t_max == 10000);
  CHECK(default_slope_window(5000)->t_max == 5000);
}

TEST_CASE("config JSON round trip") {
  auto cfg = ExperimentConfig::defaults(Setting::c);
  cfg.trials = 17;
  cfg.alpha_per_strategy[Strategy::ue] = 0.25;
  cfg.strategies = {Strategy::gentry, Strategy::ue};
  cfg.output_dir = "out/x";
  const auto back = config_from_json(to_json(cfg));
  CHECK(to_json(back) == to_json(cfg));
  CHECK(back.trials == 17);
  CHECK(back.alpha(Strategy::ue) == 0.25);

  auto doc = to_json(cfg);
  doc["no_such_key"] = 1;
  CHECK_THROWS_AS(config_from_json(doc), std::invalid_argument);

  // Only the setting is required; everything else falls back to its defaults.
  const auto minimal = config_from_json(nlohmann::json{{"setting", "b"}});
  CHECK(to_json(minimal) == to_json(ExperimentConfig::defaults(Setting::b)));
}

TEST_CASE("emitted results are reproducible from the manifest at any pool width") {
  auto cfg = small_config(Setting::a);
  cfg.trials = 9;
  const auto dir1 = scratch("emit1");
  const auto dir2 = scratch("emit2");
  emit_results(run_experiment(cfg, RunOptions{1, 4}), dir1);

  const auto again = load_config(dir1 / "manifest.json");
  emit_results(run_experiment(again, RunOptions{3, 2}), dir2);
  for (const char* name : {"curve_gentry.csv", "curve_curse.csv", "curve_regret.csv",
                           "curve_ue.csv", "summary.csv", "manifest.json"}) {
    INFO(name);
    CHECK(slurp(dir1 / name) == slurp(dir2 / name));
  }

  std::istringstream curve(slurp(dir1 / "curve_gentry.csv"));
  std::string header;
  std::getline(curve, header);
  CHECK(header == "strategy,t,mean_cum_proj_regret,stderr");
  const auto curves = read_curve_csv(dir1 / "curve_gentry.csv");
  CHECK(curves.at("gentry").size() == 300u);

  std::istringstream summary(slurp(dir1 / "summary.csv"));
  int rows = 0;
  for (std::string line; std::getline(summary, line);) ++rows;
  CHECK(rows == 5);

  const auto manifest = nlohmann::json::parse(slurp(dir1 / "manifest.json"));
  CHECK(manifest["resolved_seeds"]["trial_seeds"].size() == 9u);
  CHECK(manifest["resolved_seeds"]["trial_seeds"][2] == trial_seed(cfg, 2));
  fs::remove_all(dir1);
  fs::remove_all(dir2);
}

TEST_CASE("emit_results reports unwritable paths") {
  auto cfg = small_config(Setting::a);
  cfg.trials = 1;
  cfg.horizon = 5;
  cfg.strategies = {Strategy::gentry};
  const auto file = fs::temp_directory_path() / "projbandit_test_blocker";
  { std::ofstream(file) << "x"; }
  CHECK_THROWS_WITH(emit_results(run_experiment(cfg), file / "sub"),
                    doctest::Contains("projbandit_test_blocker"));
  fs::remove(file);
}

TEST_CASE("vector hash distinguishes nearby points") {
  Vector a = Vector::Ones(4);
  Vector b = a;
  b(3) = std::nextafter(1.0, 2.0);
  CHECK(hash_vector(a) != hash_vector(b));
  CHECK(hash_vector(a) == hash_vector(Vector::Ones(4)));
  CHECK(format_double(0.1) == "0.10000000000000001");
}
