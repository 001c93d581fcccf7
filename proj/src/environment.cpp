#include "projbandit/environment.hpp"

#include <stdexcept>
#include <string>

namespace projbandit {

Environment::Environment(EnvironmentMode mode, Vector theta, Projector projector, double noise_std,
                         bool add_noise, std::vector<TabularArm> tabular)
    : mode_(mode),
      theta_(std::move(theta)),
      projector_(std::move(projector)),
      noise_std_(noise_std),
      add_noise_(add_noise),
      tabular_(std::move(tabular)) {
  if (!(noise_std_ >= 0.0)) throw std::invalid_argument("Environment: noise_std must be >= 0");
  if (mode_ == EnvironmentMode::synthetic) projected_theta_ = projector_.apply(theta_);
}

Environment Environment::synthetic(Vector theta, Projector projector, double noise_std,
                                   double theta_bound) {
  if (theta.size() != projector.dim()) {
    throw std::invalid_argument("Environment: theta dimension " + std::to_string(theta.size()) +
                                " != projector dimension " + std::to_string(projector.dim()));
  }
  if (theta.norm() > theta_bound) {
    throw std::invalid_argument("Environment: ||theta|| exceeds bound S");
  }
  if (!(projector.apply(theta).norm() > 0.0)) {
    throw std::invalid_argument("Environment: theta lies in the orthogonal complement of U");
  }
  return Environment(EnvironmentMode::synthetic, std::move(theta), std::move(projector), noise_std,
                     true, {});
}

Environment Environment::tabular(std::vector<TabularArm> arms, Projector projector,
                                 double noise_std, bool add_noise) {
  if (arms.empty()) throw std::invalid_argument("Environment: no tabular arms");
  for (const auto& a : arms) {
    if (a.features.size() != projector.dim()) {
      throw std::invalid_argument("Environment: tabular arm dimension mismatch");
    }
  }
  return Environment(EnvironmentMode::tabular, Vector(), std::move(projector), noise_std, add_noise,
                     std::move(arms));
}

const TabularArm& Environment::tabular_arm(const Arm& arm) const {
  if (arm.index < 0 || arm.index >= static_cast<int>(tabular_.size())) {
    throw std::out_of_range("Environment: tabular arm index " + std::to_string(arm.index));
  }
  return tabular_[static_cast<std::size_t>(arm.index)];
}

double Environment::observe_return(const Arm& arm, Rng& rng) const {
  if (mode_ == EnvironmentMode::tabular) {
    const double value = tabular_arm(arm).observed_value;
    if (!add_noise_ || noise_std_ == 0.0) return value;
    return value + std::normal_distribution<double>(0.0, noise_std_)(rng);
  }
  if (arm.x.size() != theta_.size()) throw std::invalid_argument("observe_return: dimension mismatch");
  const double mean = arm.x.dot(theta_);
  if (noise_std_ == 0.0) return mean;
  return mean + std::normal_distribution<double>(0.0, noise_std_)(rng);
}

double Environment::projection_reward(const Arm& arm) const {
  if (mode_ == EnvironmentMode::tabular) return tabular_arm(arm).projection_value;
  if (arm.x.size() != theta_.size()) {
    throw std::invalid_argument("projection_reward: dimension mismatch");
  }
  return projector_.apply(arm.x).dot(projected_theta_);
}

double Environment::expected_return(const Arm& arm) const {
  if (mode_ == EnvironmentMode::tabular) return tabular_arm(arm).observed_value;
  return arm.x.dot(theta_);
}

namespace {

template <typename Value>
BestArm best_tabular(const DecisionSet& set, Value value) {
  const auto& fs = set.finite();
  int best = 0;
  for (int i = 1; i < fs.size(); ++i) {
    if (value(i) > value(best)) best = i;
  }
  return BestArm{Arm{fs.arm(best), best}, value(best)};
}

}  // namespace

BestArm best_projection_arm(const Environment& env, const DecisionSet& set) {
  if (env.mode() == EnvironmentMode::tabular) {
    const auto& arms = env.tabular_arms();
    return best_tabular(set, [&](int i) { return arms[static_cast<std::size_t>(i)].projection_value; });
  }
  Arm arm = set.maximize(env.projector().apply(env.theta()));
  const double value = env.projection_reward(arm);
  return BestArm{std::move(arm), value};
}

BestArm best_standard_arm(const Environment& env, const DecisionSet& set) {
  if (env.mode() == EnvironmentMode::tabular) {
    const auto& arms = env.tabular_arms();
    return best_tabular(set, [&](int i) { return arms[static_cast<std::size_t>(i)].observed_value; });
  }
  Arm arm = set.maximize(env.theta());
  const double value = env.expected_return(arm);
  return BestArm{std::move(arm), value};
}

Oracle compute_oracle(const Environment& env, const DecisionSet& set) {
  auto proj = best_projection_arm(env, set);
  auto standard = best_standard_arm(env, set);
  return Oracle{std::move(proj.arm), proj.value, std::move(standard.arm), standard.value};
}

StepRegret step_regrets(const Environment& env, const Oracle& oracle, const Arm& arm) {
  return StepRegret{oracle.best_projection_value - env.projection_reward(arm),
                    oracle.best_standard_value - env.expected_return(arm)};
}

}  // namespace projbandit
