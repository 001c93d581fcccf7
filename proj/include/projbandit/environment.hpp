#pragma once

#include <limits>
#include <random>
#include <vector>

#include "projbandit/decision_sets.hpp"
#include "projbandit/linalg.hpp"

namespace projbandit {

using Rng = std::mt19937_64;

enum class EnvironmentMode { synthetic, tabular };

/// One wine arm: the observed (corrupted) rating and the original rating,
/// which is the arm's projection reward.
struct TabularArm {
  Vector features;
  double observed_value = 0.0;
  double projection_value = 0.0;
};

/// Ground truth for one trial.
///
/// Synthetic: r = <x, theta> + eta with eta ~ N(0, noise_std^2), projection
/// reward <P x, P theta>. Tabular: arms are addressed by index; the return is
/// the arm's observed value, optionally plus the same Gaussian noise.
class Environment {
 public:
  /// Throws std::invalid_argument if ||theta|| > theta_bound, if the
  /// dimensions disagree, or if ||P theta|| == 0.
  static Environment synthetic(Vector theta, Projector projector, double noise_std,
                               double theta_bound = std::numeric_limits<double>::infinity());
  static Environment tabular(std::vector<TabularArm> arms, Projector projector, double noise_std,
                             bool add_noise);

  EnvironmentMode mode() const { return mode_; }
  const Projector& projector() const { return projector_; }
  const Vector& theta() const { return theta_; }
  double noise_std() const { return noise_std_; }
  int dim() const { return projector_.dim(); }
  const std::vector<TabularArm>& tabular_arms() const { return tabular_; }

  double observe_return(const Arm& arm, Rng& rng) const;
  /// <P x, P theta> (synthetic) or the original rating (tabular).
  double projection_reward(const Arm& arm) const;
  /// Expected observed return: <x, theta> or the corrupted rating.
  double expected_return(const Arm& arm) const;

 private:
  Environment(EnvironmentMode mode, Vector theta, Projector projector, double noise_std,
              bool add_noise, std::vector<TabularArm> tabular);

  const TabularArm& tabular_arm(const Arm& arm) const;

  EnvironmentMode mode_;
  Vector theta_;
  Vector projected_theta_;
  Projector projector_;
  double noise_std_;
  bool add_noise_;
  std::vector<TabularArm> tabular_;
};

/// Best arms against which per-step regrets are measured, fixed per trial.
struct Oracle {
  Arm best_projection_arm;
  double best_projection_value = 0.0;
  Arm best_standard_arm;
  double best_standard_value = 0.0;
};

struct BestArm {
  Arm arm;
  double value = 0.0;
};

/// argmax over the set of the projection reward. Uses c = P theta, valid
/// because <P x, P theta> = <x, P theta>.
BestArm best_projection_arm(const Environment& env, const DecisionSet& set);
/// argmax over the set of the expected observed return.
BestArm best_standard_arm(const Environment& env, const DecisionSet& set);
Oracle compute_oracle(const Environment& env, const DecisionSet& set);

struct StepRegret {
  double projection = 0.0;
  double standard = 0.0;
};

StepRegret step_regrets(const Environment& env, const Oracle& oracle, const Arm& arm);

}  // namespace projbandit
