#include "projbandit/policies.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>

namespace projbandit {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return out;
}

}  // namespace

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::gentry: return "gentry";
    case Strategy::curse: return "curse";
    case Strategy::regret: return "regret";
    case Strategy::ue: return "ue";
  }
  return "unknown";
}

std::string_view to_string(ScheduleKind k) {
  switch (k) {
    case ScheduleKind::finite: return "finite";
    case ScheduleKind::infinite: return "infinite";
    case ScheduleKind::smooth: return "smooth";
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view name) {
  const auto n = lower(name);
  if (n == "gentry") return Strategy::gentry;
  if (n == "curse") return Strategy::curse;
  if (n == "regret") return Strategy::regret;
  if (n == "ue") return Strategy::ue;
  throw std::invalid_argument("unknown strategy '" + std::string(name) + "'");
}

ScheduleKind parse_schedule(std::string_view name) {
  const auto n = lower(name);
  if (n == "finite") return ScheduleKind::finite;
  if (n == "infinite") return ScheduleKind::infinite;
  if (n == "smooth") return ScheduleKind::smooth;
  throw std::invalid_argument("unknown schedule '" + std::string(name) + "'");
}

double epsilon_value(const EpsilonSchedule& schedule, long t) {
  if (t < 1) throw std::invalid_argument("epsilon_value: t must be >= 1");
  const double scale = schedule.alpha * schedule.k;
  const double td = static_cast<double>(t);
  double denom = td;
  switch (schedule.kind) {
    case ScheduleKind::finite: denom = td; break;
    case ScheduleKind::infinite: denom = std::cbrt(td); break;
    case ScheduleKind::smooth: denom = std::sqrt(td); break;
  }
  return std::min(1.0, scale / denom);
}

Policy::Policy(PolicyOptions options, const DecisionSet& set, Projector projector)
    : options_(options),
      projector_(std::move(projector)),
      ridge_(set.dim(), options.lambda) {
  if (!(options_.alpha >= 0.0)) throw std::invalid_argument("Policy: alpha must be >= 0");
  if (projector_.dim() != set.dim()) throw std::invalid_argument("Policy: projector dimension mismatch");
  if (options_.strategy != Strategy::ue) {
    if (!(options_.alpha > 0.0)) throw std::invalid_argument("Policy: alpha must be positive");
    schedule_ = EpsilonSchedule{options_.schedule, options_.alpha, set.span_dim()};
  }
  if (set.is_finite()) {
    choice_counts_.assign(static_cast<std::size_t>(set.size()), 0);
    explored_counts_.assign(static_cast<std::size_t>(set.size()), 0);
  }
}

Vector Policy::exploit_direction() const {
  switch (options_.strategy) {
    case Strategy::curse: return ridge_.theta_hat();
    case Strategy::ue:
      return options_.ue_projected_reward ? projector_.apply(ridge_.theta_hat())
                                          : ridge_.theta_hat();
    case Strategy::gentry:
    case Strategy::regret: return projector_.apply(ridge_.theta_hat());
  }
  return ridge_.theta_hat();
}

Arm Policy::exploit_arm(const DecisionSet& set) const { return set.maximize(exploit_direction()); }

double Policy::ue_score(const Vector& x, long t, int set_size) const {
  const double log_t = std::log(static_cast<double>(t));
  double width = ridge_.dim() * log_t;
  if (set_size > 0) width = std::min(width, static_cast<double>(set_size));
  const double bonus = options_.alpha * std::sqrt(std::max(0.0, log_t * width));
  return x.dot(exploit_direction()) + bonus * ridge_.inverse_norm(x);
}

Selection Policy::select(const DecisionSet& set, Rng& rng, long t) {
  if (t < 1) throw std::invalid_argument("Policy::select: t must be >= 1");
  if (options_.strategy == Strategy::ue) return select_ue(set, rng, t);

  const double eps = epsilon_value(*schedule_, t);
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  if (u < eps) {
    const int pick = std::uniform_int_distribution<int>(0, set.span_dim() - 1)(rng);
    return Selection{set.dk_arm(pick), true};
  }
  return Selection{exploit_arm(set), false};
}

Selection Policy::select_ue(const DecisionSet& set, Rng& rng, long t) {
  if (set.is_finite()) {
    const auto& fs = set.finite();
    const Matrix& rows = fs.arm_rows();
    const double log_t = std::log(static_cast<double>(t));
    const double width = std::min(ridge_.dim() * log_t, static_cast<double>(fs.size()));
    const double bonus = options_.alpha * std::sqrt(std::max(0.0, log_t * width));
    const Vector mean = rows * exploit_direction();
    const Vector norms =
        (rows * ridge_.gram_inverse()).cwiseProduct(rows).rowwise().sum().cwiseMax(0.0).cwiseSqrt();
    const Vector scores = mean + bonus * norms;
    int best = 0;
    for (Eigen::Index i = 1; i < scores.size(); ++i) {
      if (scores(i) > scores(best)) best = static_cast<int>(i);
    }
    return Selection{Arm{fs.arm(best), best}, false};
  }

  // Infinite set: the score is convex in x, so its maximum over the set lies
  // at an extreme point. Search a fixed pool of support points drawn once per
  // trial, the current greedy support point, and D_k.
  const auto& ball = set.entropy_ball();
  if (ue_pool_.empty()) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int i = 0; i < options_.ue_candidate_pool; ++i) {
      Vector dir(ball.dim());
      for (Eigen::Index j = 0; j < dir.size(); ++j) dir(j) = normal(rng);
      ue_pool_.push_back(entropy_ball_linear_max(ball, dir));
    }
    for (const auto& e : ball.dk_arms()) ue_pool_.push_back(e);
  }
  Vector best = entropy_ball_linear_max(ball, exploit_direction());
  double best_score = ue_score(best, t, -1);
  for (const auto& x : ue_pool_) {
    const double s = ue_score(x, t, -1);
    if (s > best_score) {
      best_score = s;
      best = x;
    }
  }
  return Selection{Arm{std::move(best), -1}, false};
}

void Policy::update(const Selection& choice, double observed_return) {
  if (options_.strategy == Strategy::regret) {
    ridge_.update(projector_.apply(choice.arm.x), observed_return);
  } else {
    ridge_.update(choice.arm.x, observed_return);
  }
  if (choice.arm.index >= 0 && !choice_counts_.empty()) {
    const auto i = static_cast<std::size_t>(choice.arm.index);
    ++choice_counts_.at(i);
    if (choice.explored) ++explored_counts_.at(i);
  }
}

}  // namespace projbandit
