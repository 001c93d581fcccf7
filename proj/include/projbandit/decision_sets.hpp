#pragma once

#include <limits>
#include <variant>
#include <vector>

#include "projbandit/linalg.hpp"

namespace projbandit {

/// A concrete arm. `index` is the position in a finite set, or -1 for a point
/// of a continuous set.
struct Arm {
  Vector x;
  int index = -1;
};

struct IndependentSubset {
  int k = 0;
  std::vector<int> indices;
};

/// Greedy scan in index order: an arm is kept iff it raises the rank of the
/// kept set (column-pivoted QR, relative pivot threshold 1e-10).
IndependentSubset select_independent_subset(const std::vector<Vector>& arms);

/// Finite decision set with its independent exploration subset D_k.
class FiniteSet {
 public:
  /// Throws std::invalid_argument on an empty list, mixed dimensions, or an
  /// arm whose norm exceeds `max_norm`.
  explicit FiniteSet(std::vector<Vector> arms,
                     double max_norm = std::numeric_limits<double>::infinity());

  int size() const { return static_cast<int>(arms_.size()); }
  int dim() const { return static_cast<int>(arm_rows_.cols()); }
  int span_dim() const { return static_cast<int>(dk_indices_.size()); }
  double max_norm() const { return max_norm_; }

  const std::vector<Vector>& arms() const { return arms_; }
  const Vector& arm(int i) const { return arms_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& dk_indices() const { return dk_indices_; }
  /// K x d matrix with one arm per row.
  const Matrix& arm_rows() const { return arm_rows_; }

 private:
  std::vector<Vector> arms_;
  Matrix arm_rows_;
  std::vector<int> dk_indices_;
  double max_norm_;
};

/// Smallest index attaining max <x, c>.
int finite_argmax(const FiniteSet& set, const Vector& c);

/// {x : sum_i x_i log x_i <= budget, x_i >= 0}, with 0 log 0 := 0.
class EntropyBall {
 public:
  EntropyBall(int dim, double budget);

  int dim() const { return dim_; }
  double budget() const { return budget_; }
  const std::vector<Vector>& dk_arms() const { return dk_arms_; }

  /// sum_i x_i log x_i; +inf if any coordinate is negative.
  double entropy(const Vector& x) const;
  bool contains(const Vector& x, double tol = 0.0) const;

 private:
  int dim_;
  double budget_;
  std::vector<Vector> dk_arms_;
};

struct EntropyBallSolution {
  Vector x;
  /// Multiplier mu of the active constraint; 0 when the constraint is inactive.
  double multiplier = 0.0;
  int iterations = 0;
};

/// argmax <c, x> over the entropy ball. If some c_i > 0 the constraint is
/// active and x_i = exp(c_i / mu - 1) with mu the root of
/// g(mu) = sum x_i log x_i - budget, found to |g| <= tol. Otherwise the
/// objective is nonpositive on the set and the returned point has x_i = 0
/// where c_i < 0 and x_i = 1/e where c_i = 0.
EntropyBallSolution entropy_ball_solve(const EntropyBall& set, const Vector& c,
                                       double tol = 1e-10);
Vector entropy_ball_linear_max(const EntropyBall& set, const Vector& c, double tol = 1e-10);

/// The standard basis e_1..e_d; each has entropy 0 and is a member for any
/// budget >= 0.
std::vector<Vector> entropy_ball_dk(int dim, double budget);

/// Either kind of decision set, with the operations the policies need.
class DecisionSet {
 public:
  DecisionSet(FiniteSet set) : set_(std::move(set)) {}  // NOLINT
  DecisionSet(EntropyBall set) : set_(std::move(set)) {}  // NOLINT

  bool is_finite() const { return std::holds_alternative<FiniteSet>(set_); }
  const FiniteSet& finite() const { return std::get<FiniteSet>(set_); }
  const EntropyBall& entropy_ball() const { return std::get<EntropyBall>(set_); }

  int dim() const;
  /// k = dim span(D) = |D_k|.
  int span_dim() const;
  /// Number of arms; -1 for an infinite set.
  int size() const;

  /// argmax over D of <x, c>, ties to the lowest index.
  Arm maximize(const Vector& c) const;
  /// The i-th arm of D_k, 0 <= i < span_dim().
  Arm dk_arm(int i) const;
  std::vector<Vector> dk_vectors() const;

 private:
  std::variant<FiniteSet, EntropyBall> set_;
};

}  // namespace projbandit
