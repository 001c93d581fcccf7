#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "projbandit/decision_sets.hpp"
#include "projbandit/environment.hpp"
#include "projbandit/linalg.hpp"

namespace projbandit {

enum class Strategy { gentry, curse, regret, ue };
enum class ScheduleKind { finite, infinite, smooth };

std::string_view to_string(Strategy s);
std::string_view to_string(ScheduleKind k);
/// Case-insensitive; throws std::invalid_argument on an unknown name.
Strategy parse_strategy(std::string_view name);
ScheduleKind parse_schedule(std::string_view name);

/// finite: min{1, alpha k / t}; infinite: min{1, alpha k / t^(1/3)};
/// smooth: min{1, alpha k / sqrt(t)}.
struct EpsilonSchedule {
  ScheduleKind kind = ScheduleKind::finite;
  double alpha = 1.0;
  int k = 1;
};

/// Throws std::invalid_argument for t < 1.
double epsilon_value(const EpsilonSchedule& schedule, long t);

struct PolicyOptions {
  Strategy strategy = Strategy::gentry;
  ScheduleKind schedule = ScheduleKind::finite;
  double alpha = 1.0;
  double lambda = 1.0;
  /// UE on infinite sets: number of random-direction support points.
  int ue_candidate_pool = 64;
  /// UE exploit term: projected <P x, P theta_hat> when true, <x, theta_hat>
  /// otherwise.
  bool ue_projected_reward = true;
};

struct Selection {
  Arm arm;
  bool explored = false;
};

/// Learner state for one trial.
///
/// GENTRY, CURSE and UE regress returns on the pulled arms; REGRET regresses
/// them on the projected arms P x. The exploit direction c of each policy is
/// GENTRY: P theta_hat, CURSE: theta_hat, REGRET: P theta_tilde. The
/// epsilon-greedy policies explore uniformly over D_k.
class Policy {
 public:
  Policy(PolicyOptions options, const DecisionSet& set, Projector projector);

  const PolicyOptions& options() const { return options_; }
  const RidgeState& ridge() const { return ridge_; }
  const Projector& projector() const { return projector_; }
  /// Absent for UE.
  const std::optional<EpsilonSchedule>& schedule() const { return schedule_; }

  /// Chooses the arm for step t >= 1 using the estimate after t - 1 updates.
  Selection select(const DecisionSet& set, Rng& rng, long t);
  /// Feeds back the return of the arm chosen at the current step.
  void update(const Selection& choice, double observed_return);

  /// The linear objective maximized by the exploit branch.
  Vector exploit_direction() const;
  /// Greedy arm for the current estimate (the exploit branch of select).
  Arm exploit_arm(const DecisionSet& set) const;

  /// UE score r_bar(x) + alpha sqrt(log t min{d log t, |D|}) ||x||_{V^{-1}}.
  double ue_score(const Vector& x, long t, int set_size) const;

  long steps() const { return ridge_.steps(); }
  /// N_t(x) per finite-set arm; empty for infinite sets.
  const std::vector<long>& choice_counts() const { return choice_counts_; }
  /// Pulls made by the exploration branch, per finite-set arm.
  const std::vector<long>& explored_counts() const { return explored_counts_; }

 private:
  Selection select_ue(const DecisionSet& set, Rng& rng, long t);

  PolicyOptions options_;
  Projector projector_;
  RidgeState ridge_;
  std::optional<EpsilonSchedule> schedule_;
  std::vector<long> choice_counts_;
  std::vector<long> explored_counts_;
  std::vector<Vector> ue_pool_;
};

}  // namespace projbandit
