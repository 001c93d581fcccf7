#include "projbandit/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

namespace projbandit {

namespace {

constexpr std::array kAllStrategies = {Strategy::gentry, Strategy::curse, Strategy::regret,
                                       Strategy::ue};
constexpr int kMaxRedraws = 100;
constexpr double kMinProjectedTheta = 1e-8;

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t strategy_id(Strategy s) { return static_cast<std::uint64_t>(s); }

Vector uniform_vector(Eigen::Index n, Rng& rng) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = unif(rng);
  return v;
}

Matrix uniform_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = unif(rng);
  }
  return m;
}

// U subset of span(D) iff P_span P = P.
bool subspace_in_span(const Projector& projector, const DecisionSet& set) {
  if (set.span_dim() == set.dim()) return true;
  const auto dk = set.dk_vectors();
  Matrix basis(set.dim(), static_cast<Eigen::Index>(dk.size()));
  for (std::size_t j = 0; j < dk.size(); ++j) basis.col(static_cast<Eigen::Index>(j)) = dk[j];
  const Projector span = projector_from_basis(basis);
  return (span.matrix() * projector.matrix() - projector.matrix()).cwiseAbs().maxCoeff() <= 1e-8;
}

std::string file_error(const std::filesystem::path& path, const std::string& what) {
  return "cannot " + what + " '" + path.string() + "': " + std::strerror(errno);
}

}  // namespace

std::string_view to_string(Setting s) {
  switch (s) {
    case Setting::a: return "a";
    case Setting::b: return "b";
    case Setting::c: return "c";
    case Setting::wine: return "wine";
  }
  return "unknown";
}

Setting parse_setting(std::string_view name) {
  if (name == "a") return Setting::a;
  if (name == "b") return Setting::b;
  if (name == "c") return Setting::c;
  if (name == "wine") return Setting::wine;
  throw std::invalid_argument("unknown setting '" + std::string(name) + "' (expected a, b, c or wine)");
}

ExperimentConfig ExperimentConfig::defaults(Setting setting) {
  ExperimentConfig cfg;
  cfg.setting = setting;
  cfg.strategies.assign(kAllStrategies.begin(), kAllStrategies.end());
  switch (setting) {
    case Setting::a:
    case Setting::b:
      cfg.d = 10;
      cfg.K = 45;
      cfg.u = 5;
      cfg.schedule = ScheduleKind::finite;
      cfg.alpha_per_strategy = {{Strategy::gentry, 1.0}, {Strategy::curse, 1.0},
                                {Strategy::regret, 1.0}, {Strategy::ue, 0.1}};
      break;
    case Setting::c:
      cfg.d = 4;
      cfg.K = 0;
      cfg.u = 2;
      cfg.schedule = ScheduleKind::infinite;
      cfg.alpha_per_strategy = {{Strategy::gentry, 0.01}, {Strategy::curse, 0.01},
                                {Strategy::regret, 0.1}, {Strategy::ue, 0.01}};
      break;
    case Setting::wine:
      cfg.d = kWineArmDim;
      cfg.K = kWineArmsPerTrial;
      cfg.u = kWineArmDim - 1;
      cfg.schedule = ScheduleKind::finite;
      cfg.alpha_per_strategy = {{Strategy::gentry, 1.0}, {Strategy::curse, 1.0},
                                {Strategy::regret, 1.0}, {Strategy::ue, 0.1}};
      break;
  }
  return cfg;
}

double ExperimentConfig::alpha(Strategy s) const {
  const auto it = alpha_per_strategy.find(s);
  if (it == alpha_per_strategy.end()) {
    throw std::invalid_argument("no alpha configured for strategy " + std::string(to_string(s)));
  }
  return it->second;
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("config: " + msg); };
  if (horizon < 1) fail("horizon must be >= 1");
  if (trials < 1) fail("trials must be >= 1");
  if (!(vartheta >= 0.0)) fail("vartheta must be >= 0");
  if (!(lambda > 0.0)) fail("lambda must be positive");
  if (strategies.empty()) fail("strategies must not be empty");
  for (std::size_t i = 0; i < strategies.size(); ++i) {
    for (std::size_t j = i + 1; j < strategies.size(); ++j) {
      if (strategies[i] == strategies[j]) fail("duplicate strategy " + std::string(to_string(strategies[i])));
    }
    const double a = alpha(strategies[i]);
    if (!(a > 0.0) || !std::isfinite(a)) fail("alpha must be positive and finite");
  }
  if (ue_candidate_pool < 0) fail("ue_candidate_pool must be >= 0");
  switch (setting) {
    case Setting::a:
    case Setting::b:
      if (d < 1) fail("d must be >= 1");
      if (K < 1) fail("K must be >= 1");
      if (u < 1 || u > d) fail("u must lie in [1, d]");
      break;
    case Setting::c:
      if (d < 1) fail("d must be >= 1");
      if (u < 1 || u > d) fail("u must lie in [1, d]");
      if (!(entropy_budget >= 0.0)) fail("entropy_budget must be >= 0");
      break;
    case Setting::wine:
      if (d != kWineArmDim || u != kWineArmDim - 1 || K != kWineArmsPerTrial) {
        fail("wine setting requires d=13, u=12, K=200");
      }
      if (wine_csv.empty()) fail("wine setting requires wine_csv");
      break;
  }
}

std::string ExperimentConfig::label() const {
  return std::string(to_string(setting)) + "_" + std::string(to_string(schedule));
}

nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json alphas = nlohmann::json::object();
  for (const auto& [s, a] : c.alpha_per_strategy) alphas[std::string(to_string(s))] = a;
  nlohmann::json strategies = nlohmann::json::array();
  for (auto s : c.strategies) strategies.push_back(std::string(to_string(s)));
  return nlohmann::json{
      {"setting", std::string(to_string(c.setting))},
      {"d", c.d},
      {"K", c.K},
      {"u", c.u},
      {"vartheta", c.vartheta},
      {"alpha_per_strategy", alphas},
      {"lambda", c.lambda},
      {"horizon", c.horizon},
      {"trials", c.trials},
      {"base_seed", c.base_seed},
      {"strategies", strategies},
      {"schedule", std::string(to_string(c.schedule))},
      {"entropy_budget", c.entropy_budget},
      {"ue_candidate_pool", c.ue_candidate_pool},
      {"output_dir", c.output_dir},
      {"wine_csv", c.wine_csv},
      {"wine_noise", c.wine_noise},
      {"standardize_features", c.standardize_features},
      {"ue_projected_reward", c.ue_projected_reward},
  };
}

ExperimentConfig config_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("config: expected a JSON object");
  const Setting setting =
      doc.contains("setting") ? parse_setting(doc.at("setting").get<std::string>()) : Setting::a;
  ExperimentConfig c = ExperimentConfig::defaults(setting);
  for (const auto& [key, value] : doc.items()) {
    try {
      if (key == "setting" || key == "experiment" || key == "resolved_seeds") continue;
      if (key == "d") c.d = value.get<int>();
      else if (key == "K") c.K = value.get<int>();
      else if (key == "u") c.u = value.get<int>();
      else if (key == "vartheta") c.vartheta = value.get<double>();
      else if (key == "lambda") c.lambda = value.get<double>();
      else if (key == "horizon") c.horizon = value.get<long>();
      else if (key == "trials") c.trials = value.get<int>();
      else if (key == "base_seed") c.base_seed = value.get<std::uint64_t>();
      else if (key == "schedule") c.schedule = parse_schedule(value.get<std::string>());
      else if (key == "entropy_budget") c.entropy_budget = value.get<double>();
      else if (key == "ue_candidate_pool") c.ue_candidate_pool = value.get<int>();
      else if (key == "output_dir") c.output_dir = value.get<std::string>();
      else if (key == "wine_csv") c.wine_csv = value.get<std::string>();
      else if (key == "wine_noise") c.wine_noise = value.get<bool>();
      else if (key == "standardize_features") c.standardize_features = value.get<bool>();
      else if (key == "ue_projected_reward") c.ue_projected_reward = value.get<bool>();
      else if (key == "strategies") {
        c.strategies.clear();
        for (const auto& s : value) c.strategies.push_back(parse_strategy(s.get<std::string>()));
      } else if (key == "alpha_per_strategy") {
        for (const auto& [name, a] : value.items()) c.alpha_per_strategy[parse_strategy(name)] = a.get<double>();
      } else {
        throw std::invalid_argument("unknown key");
      }
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument("config: key '" + key + "': " + e.what());
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config: key '" + key + "': " + e.what());
    }
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(file_error(path, "open config"));
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("config '" + path.string() + "': " + e.what());
  }
  return config_from_json(doc);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return splitmix64(base ^ splitmix64(stream ^ 0xD1B54A32D192ED03ULL));
}

std::uint64_t trial_seed(const ExperimentConfig& config, int trial) {
  return derive_seed(config.base_seed, static_cast<std::uint64_t>(trial));
}

Rng make_stream(std::uint64_t seed, TrialStream stream, Strategy strategy) {
  auto id = static_cast<std::uint64_t>(stream);
  if (stream == TrialStream::policy) id += strategy_id(strategy);
  return Rng(derive_seed(seed, id));
}

ProblemInstance generate_setting(const ExperimentConfig& config, Rng& rng,
                                 const std::vector<WineRecord>* wine) {
  if (config.setting == Setting::wine) {
    if (wine == nullptr) throw std::invalid_argument("generate_setting: wine records required");
    auto inst = build_wine_decision_set(*wine, rng, WineOptions{config.standardize_features});
    auto env = Environment::tabular(std::move(inst.arms), inst.projector, config.vartheta,
                                    config.wine_noise);
    return ProblemInstance{std::move(env), DecisionSet(std::move(inst.set)), inst.projector};
  }

  const double arm_bound = std::sqrt(static_cast<double>(config.d));
  for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
    std::optional<DecisionSet> set;
    if (config.setting == Setting::c) {
      set.emplace(EntropyBall(config.d, config.entropy_budget));
    } else {
      std::vector<Vector> arms;
      arms.reserve(static_cast<std::size_t>(config.K));
      for (int i = 0; i < config.K; ++i) arms.push_back(uniform_vector(config.d, rng));
      set.emplace(FiniteSet(std::move(arms), arm_bound));
    }
    Vector theta = uniform_vector(config.d, rng);

    std::optional<Projector> projector;
    if (config.setting == Setting::b) {
      projector.emplace(diagonal_projector(config.d, config.u));
    } else {
      try {
        projector.emplace(projector_from_basis(uniform_matrix(config.d, config.u, rng)));
      } catch (const DegenerateBasisError&) {
        continue;
      }
    }
    if (projector->apply(theta).norm() <= kMinProjectedTheta) continue;
    if (!subspace_in_span(*projector, *set)) continue;

    auto env = Environment::synthetic(std::move(theta), *projector, config.vartheta, arm_bound);
    return ProblemInstance{std::move(env), std::move(*set), std::move(*projector)};
  }
  throw std::runtime_error("generate_setting: no valid instance after " +
                           std::to_string(kMaxRedraws) +
                           " draws (need U inside span(D) and ||P theta|| > 1e-8)");
}

double delta_dk(const DecisionSet& set) {
  const auto dk = set.dk_vectors();
  Matrix gram = Matrix::Zero(set.dim(), set.dim());
  for (const auto& x : dk) gram.noalias() += x * x.transpose();
  return min_eigen_in_span(gram, dk);
}

std::uint64_t hash_vector(const Vector& x) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    unsigned char bytes[sizeof(double)];
    const double v = x(i);
    std::memcpy(bytes, &v, sizeof v);
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

TrialRecord run_trial(const ExperimentConfig& config, Strategy strategy, std::uint64_t seed,
                      const std::vector<WineRecord>* wine) {
  Rng instance_rng = make_stream(seed, TrialStream::instance);
  Rng noise_rng = make_stream(seed, TrialStream::noise);
  Rng policy_rng = make_stream(seed, TrialStream::policy, strategy);

  const ProblemInstance inst = generate_setting(config, instance_rng, wine);
  const DecisionSet& set = inst.decision_set;
  const Environment& env = inst.environment;

  PolicyOptions options;
  options.strategy = strategy;
  options.schedule = config.schedule;
  options.alpha = config.alpha(strategy);
  options.lambda = config.lambda;
  options.ue_candidate_pool = config.ue_candidate_pool;
  options.ue_projected_reward = config.ue_projected_reward;
  Policy policy(options, set, inst.projector);

  const Oracle oracle = compute_oracle(env, set);

  TrialRecord record;
  record.finite = set.is_finite();
  record.best_arm_index = oracle.best_projection_arm.index;
  record.best_projection_value = oracle.best_projection_value;
  record.delta_dk = delta_dk(set);
  record.k = set.span_dim();
  record.steps.reserve(static_cast<std::size_t>(config.horizon));

  for (long t = 1; t <= config.horizon; ++t) {
    const Selection choice = policy.select(set, policy_rng, t);
    const double r = env.observe_return(choice.arm, noise_rng);
    const StepRegret regret = step_regrets(env, oracle, choice.arm);
    policy.update(choice, r);
    StepLog log;
    log.arm_id = choice.arm.index >= 0 ? static_cast<std::uint64_t>(choice.arm.index)
                                       : hash_vector(choice.arm.x);
    log.explored = choice.explored;
    log.observed_return = r;
    log.projection_regret = regret.projection;
    log.standard_regret = regret.standard;
    record.steps.push_back(log);
  }
  return record;
}

bool best_arm_found(const TrialRecord& record) {
  const auto n = record.steps.size();
  const auto window = std::min<std::size_t>(n, kBestArmWindow);
  if (window == 0) return false;
  std::size_t hits = 0;
  for (std::size_t i = n - window; i < n; ++i) {
    if (record.steps[i].projection_regret <= kOptimalSlack) ++hits;
  }
  return static_cast<double>(hits) > kBestArmFraction * static_cast<double>(window);
}

TrialSummary summarize(const TrialRecord& record) {
  TrialSummary s;
  s.cumulative_projection_regret.reserve(record.steps.size());
  double cum = 0.0;
  double cum_standard = 0.0;
  for (const auto& step : record.steps) {
    cum += step.projection_regret;
    cum_standard += step.standard_regret;
    s.cumulative_projection_regret.push_back(cum);
  }
  s.final_standard_regret = cum_standard;
  if (record.finite) s.best_arm_found = best_arm_found(record);
  s.delta_dk = record.delta_dk;
  s.k = record.k;
  return s;
}

void Aggregator::add(const TrialSummary& summary) {
  const auto& x = summary.cumulative_projection_regret;
  if (count_ == 0) {
    mean_.assign(x.size(), 0.0);
    m2_.assign(x.size(), 0.0);
    delta_min_ = delta_max_ = summary.delta_dk;
    k_min_ = k_max_ = summary.k;
  } else if (x.size() != mean_.size()) {
    throw std::invalid_argument("aggregate: trials have different horizons");
  }
  ++count_;
  const double n = static_cast<double>(count_);
  for (std::size_t t = 0; t < x.size(); ++t) {
    const double delta = x[t] - mean_[t];
    mean_[t] += delta / n;
    m2_[t] += delta * (x[t] - mean_[t]);
  }
  standard_sum_ += summary.final_standard_regret;
  if (summary.best_arm_found.has_value()) {
    ++best_eligible_;
    if (*summary.best_arm_found) ++best_found_;
  }
  delta_min_ = std::min(delta_min_, summary.delta_dk);
  delta_max_ = std::max(delta_max_, summary.delta_dk);
  delta_sum_ += summary.delta_dk;
  k_min_ = std::min(k_min_, summary.k);
  k_max_ = std::max(k_max_, summary.k);
}

AggregateCurve Aggregator::finish() const {
  if (count_ == 0) throw std::invalid_argument("aggregate: no trials");
  AggregateCurve c;
  c.strategy = strategy_;
  c.trials = static_cast<int>(count_);
  c.mean = mean_;
  c.standard_error.assign(mean_.size(), 0.0);
  if (count_ > 1) {
    const double n = static_cast<double>(count_);
    for (std::size_t t = 0; t < mean_.size(); ++t) {
      c.standard_error[t] = std::sqrt(m2_[t] / (n - 1.0) / n);
    }
  }
  c.final_standard_regret = standard_sum_ / static_cast<double>(count_);
  if (best_eligible_ > 0) {
    c.best_arm_percentage = 100.0 * static_cast<double>(best_found_) / static_cast<double>(best_eligible_);
  }
  c.delta_dk_min = delta_min_;
  c.delta_dk_max = delta_max_;
  c.delta_dk_mean = delta_sum_ / static_cast<double>(count_);
  c.k_min = k_min_;
  c.k_max = k_max_;
  return c;
}

AggregateCurve aggregate(std::span<const TrialSummary> summaries, const std::string& strategy) {
  Aggregator agg(strategy);
  for (const auto& s : summaries) agg.add(s);
  return agg.finish();
}

double fit_regret_slope(std::span<const double> curve, long t_min, long t_max) {
  if (t_min < 1 || t_max <= t_min) {
    throw std::invalid_argument("fit_regret_slope: need 1 <= t_min < t_max");
  }
  if (static_cast<std::size_t>(t_max) > curve.size()) {
    throw std::invalid_argument("fit_regret_slope: window exceeds curve length");
  }
  double sx = 0.0;
  double sy = 0.0;
  const double n = static_cast<double>(t_max - t_min + 1);
  for (long t = t_min; t <= t_max; ++t) {
    const double v = curve[static_cast<std::size_t>(t - 1)];
    if (!(v > 0.0)) {
      throw UndefinedSlopeError("fit_regret_slope: nonpositive value at t=" + std::to_string(t));
    }
    sx += std::log(static_cast<double>(t));
    sy += std::log(v);
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (long t = t_min; t <= t_max; ++t) {
    const double dx = std::log(static_cast<double>(t)) - mx;
    sxy += dx * (std::log(curve[static_cast<std::size_t>(t - 1)]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

std::optional<SlopeWindow> default_slope_window(long horizon) {
  const long t_max = std::min<long>(10000, horizon);
  const long t_min = t_max >= 2000 ? 1000 : std::max<long>(1, t_max / 10);
  if (t_max <= t_min) return std::nullopt;
  return SlopeWindow{t_min, t_max};
}

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  std::vector<WineRecord> wine;
  if (config.setting == Setting::wine) wine = load_wine_csv(config.wine_csv);
  const std::vector<WineRecord>* wine_ptr = config.setting == Setting::wine ? &wine : nullptr;

  ExperimentResult result;
  result.config = config;
  for (int i = 0; i < config.trials; ++i) result.trial_seeds.push_back(trial_seed(config, i));

  const auto n_strategies = config.strategies.size();
  std::vector<Aggregator> aggregators;
  for (auto s : config.strategies) aggregators.emplace_back(std::string(to_string(s)));

  const int chunk = std::max(1, options.chunk_trials);
  const int threads = std::max(1, options.threads);
  for (int begin = 0; begin < config.trials; begin += chunk) {
    const int end = std::min(config.trials, begin + chunk);
    const auto width = static_cast<std::size_t>(end - begin);
    std::vector<TrialSummary> slots(n_strategies * width);

    auto job = [&](std::size_t j) {
      const std::size_t s = j / width;
      const int trial = begin + static_cast<int>(j % width);
      const auto record = run_trial(config, config.strategies[s],
                                    result.trial_seeds[static_cast<std::size_t>(trial)], wine_ptr);
      slots[j] = summarize(record);
    };

    if (threads == 1) {
      for (std::size_t j = 0; j < slots.size(); ++j) job(j);
    } else {
      std::atomic<std::size_t> next{0};
      std::exception_ptr failure;
      std::mutex failure_mutex;
      std::vector<std::thread> pool;
      for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
          for (std::size_t j = next++; j < slots.size(); j = next++) {
            try {
              job(j);
            } catch (...) {
              std::lock_guard lock(failure_mutex);
              if (!failure) failure = std::current_exception();
            }
          }
        });
      }
      for (auto& th : pool) th.join();
      if (failure) std::rethrow_exception(failure);
    }

    for (std::size_t s = 0; s < n_strategies; ++s) {
      for (std::size_t i = 0; i < width; ++i) aggregators[s].add(slots[s * width + i]);
    }
  }

  for (const auto& agg : aggregators) result.curves.push_back(agg.finish());
  return result;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void emit_results(const ExperimentResult& result, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + out_dir.string() + "': " + ec.message());

  auto open = [](const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(file_error(path, "write"));
    return out;
  };
  auto close = [](std::ofstream& out, const std::filesystem::path& path) {
    out.close();
    if (!out) throw std::runtime_error(file_error(path, "write"));
  };

  for (const auto& curve : result.curves) {
    const auto path = out_dir / ("curve_" + curve.strategy + ".csv");
    auto out = open(path);
    out << "strategy,t,mean_cum_proj_regret,stderr\n";
    for (std::size_t t = 0; t < curve.mean.size(); ++t) {
      out << curve.strategy << ',' << (t + 1) << ',' << format_double(curve.mean[t]) << ','
          << format_double(curve.standard_error[t]) << '\n';
    }
    close(out, path);
  }

  {
    const auto path = out_dir / "summary.csv";
    auto out = open(path);
    out << "experiment,strategy,trials,horizon,final_mean_cum_proj_regret,final_stderr,"
           "final_mean_cum_std_regret,slope,slope_t_min,slope_t_max,best_arm_pct,"
           "delta_dk_min,delta_dk_mean,delta_dk_max,k_min,k_max\n";
    const auto window = default_slope_window(result.config.horizon);
    for (const auto& c : result.curves) {
      double slope = std::nan("");
      if (window) {
        try {
          slope = fit_regret_slope(c.mean, window->t_min, window->t_max);
        } catch (const UndefinedSlopeError&) {
        }
      }
      out << result.config.label() << ',' << c.strategy << ',' << c.trials << ','
          << result.config.horizon << ',' << format_double(c.mean.back()) << ','
          << format_double(c.standard_error.back()) << ',' << format_double(c.final_standard_regret)
          << ',' << format_double(slope) << ',' << (window ? window->t_min : 0) << ','
          << (window ? window->t_max : 0) << ','
          << format_double(c.best_arm_percentage.value_or(std::nan(""))) << ','
          << format_double(c.delta_dk_min) << ',' << format_double(c.delta_dk_mean) << ','
          << format_double(c.delta_dk_max) << ',' << c.k_min << ',' << c.k_max << '\n';
    }
    close(out, path);
  }

  {
    const auto path = out_dir / "manifest.json";
    auto out = open(path);
    nlohmann::json manifest = to_json(result.config);
    manifest["experiment"] = result.config.label();
    manifest["resolved_seeds"] = {{"base_seed", result.config.base_seed},
                                  {"trial_seeds", result.trial_seeds}};
    out << manifest.dump(2) << '\n';
    close(out, path);
  }
}

std::map<std::string, std::vector<double>> read_curve_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(file_error(path, "open curve file"));
  std::string line;
  std::getline(in, line);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "strategy,t,mean_cum_proj_regret,stderr") {
    throw std::invalid_argument(path.string() + ":1: unexpected curve header '" + line + "'");
  }
  std::map<std::string, std::vector<double>> curves;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
    const auto c3 = c2 == std::string::npos ? c2 : line.find(',', c2 + 1);
    if (c3 == std::string::npos) {
      throw std::invalid_argument(path.string() + ":" + std::to_string(line_no) + ": expected 4 fields");
    }
    auto& curve = curves[line.substr(0, c1)];
    try {
      const long t = std::stol(line.substr(c1 + 1, c2 - c1 - 1));
      if (t != static_cast<long>(curve.size()) + 1) throw std::invalid_argument("t out of sequence");
      curve.push_back(std::stod(line.substr(c2 + 1, c3 - c2 - 1)));
    } catch (const std::exception& e) {
      throw std::invalid_argument(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return curves;
}

}  // namespace projbandit
