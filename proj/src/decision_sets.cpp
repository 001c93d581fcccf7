#include "projbandit/decision_sets.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace projbandit {

namespace {

constexpr double kRankThreshold = 1e-10;

int matrix_rank(const Matrix& columns) {
  Eigen::ColPivHouseholderQR<Matrix> qr(columns);
  qr.setThreshold(kRankThreshold);
  return static_cast<int>(qr.rank());
}

}  // namespace

IndependentSubset select_independent_subset(const std::vector<Vector>& arms) {
  if (arms.empty()) throw std::invalid_argument("select_independent_subset: no arms");
  const auto dim = arms.front().size();
  IndependentSubset out;
  Matrix kept(dim, 0);
  for (std::size_t i = 0; i < arms.size(); ++i) {
    if (out.k == dim) break;
    if (arms[i].size() != dim) {
      throw std::invalid_argument("select_independent_subset: mixed arm dimensions");
    }
    if (arms[i].isZero(0.0)) continue;
    Matrix trial(dim, kept.cols() + 1);
    trial << kept, arms[i];
    if (matrix_rank(trial) > out.k) {
      kept = std::move(trial);
      out.indices.push_back(static_cast<int>(i));
      ++out.k;
    }
  }
  return out;
}

FiniteSet::FiniteSet(std::vector<Vector> arms, double max_norm)
    : arms_(std::move(arms)), max_norm_(max_norm) {
  if (arms_.empty()) throw std::invalid_argument("FiniteSet: no arms");
  const auto dim = arms_.front().size();
  if (dim < 1) throw std::invalid_argument("FiniteSet: zero-dimensional arms");
  arm_rows_.resize(static_cast<Eigen::Index>(arms_.size()), dim);
  for (std::size_t i = 0; i < arms_.size(); ++i) {
    const auto& a = arms_[i];
    if (a.size() != dim) throw std::invalid_argument("FiniteSet: mixed arm dimensions");
    if (!a.allFinite()) throw std::invalid_argument("FiniteSet: non-finite arm " + std::to_string(i));
    if (a.norm() > max_norm_) {
      throw std::invalid_argument("FiniteSet: arm " + std::to_string(i) + " has norm " +
                                  std::to_string(a.norm()) + " > bound " +
                                  std::to_string(max_norm_));
    }
    arm_rows_.row(static_cast<Eigen::Index>(i)) = a.transpose();
  }
  dk_indices_ = select_independent_subset(arms_).indices;
}

int finite_argmax(const FiniteSet& set, const Vector& c) {
  if (c.size() != set.dim()) throw std::invalid_argument("finite_argmax: dimension mismatch");
  const Vector scores = set.arm_rows() * c;
  int best = 0;
  for (Eigen::Index i = 1; i < scores.size(); ++i) {
    if (scores(i) > scores(best)) best = static_cast<int>(i);
  }
  return best;
}

EntropyBall::EntropyBall(int dim, double budget)
    : dim_(dim), budget_(budget), dk_arms_(entropy_ball_dk(dim, budget)) {
  if (dim < 1) throw std::invalid_argument("EntropyBall: dimension must be >= 1");
}

double EntropyBall::entropy(const Vector& x) const {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double v = x(i);
    if (v < 0.0) return std::numeric_limits<double>::infinity();
    if (v > 0.0) sum += v * std::log(v);
  }
  return sum;
}

bool EntropyBall::contains(const Vector& x, double tol) const {
  return x.size() == dim_ && entropy(x) <= budget_ + tol;
}

std::vector<Vector> entropy_ball_dk(int dim, double budget) {
  if (!(budget >= 0.0)) throw std::invalid_argument("entropy_ball_dk: budget must be >= 0");
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(dim));
  for (int i = 0; i < dim; ++i) out.push_back(Vector::Unit(dim, i));
  return out;
}

EntropyBallSolution entropy_ball_solve(const EntropyBall& set, const Vector& c, double tol) {
  if (c.size() != set.dim()) throw std::invalid_argument("entropy_ball_linear_max: dimension mismatch");
  if (!c.allFinite()) throw std::invalid_argument("entropy_ball_linear_max: non-finite objective");
  if (!(tol > 0.0)) throw std::invalid_argument("entropy_ball_linear_max: tol must be positive");

  EntropyBallSolution out;
  const double inv_e = std::exp(-1.0);
  if (c.maxCoeff() <= 0.0) {
    out.x = c.unaryExpr([inv_e](double ci) { return ci < 0.0 ? 0.0 : inv_e; });
    return out;
  }

  // Parametrize by s = 1/mu: x_i(s) = exp(c_i s - 1) and
  // g(s) = sum x_i (c_i s - 1) - budget, strictly increasing in s.
  const double budget = set.budget();
  auto g = [&](double s, double* slope) {
    double value = -budget;
    double deriv = 0.0;
    for (Eigen::Index i = 0; i < c.size(); ++i) {
      const double a = c(i) * s - 1.0;
      const double xi = std::exp(a);
      value += xi * a;
      deriv += xi * c(i) * c(i) * s;
    }
    if (slope != nullptr) *slope = deriv;
    return value;
  };

  double lo = 1e-8;
  double hi = 1e8;
  for (int i = 0; g(lo, nullptr) >= 0.0; ++i) {
    if (i > 200) throw std::runtime_error("entropy_ball_linear_max: failed to bracket multiplier");
    lo *= 0.1;
  }
  for (int i = 0; g(hi, nullptr) <= 0.0; ++i) {
    if (i > 200) throw std::runtime_error("entropy_ball_linear_max: failed to bracket multiplier");
    hi *= 10.0;
  }

  // Bisection on the bracket, accelerated by Newton steps that stay inside it
  // and at least halve the bracket; otherwise a bisection step is taken.
  auto width = [](double a, double b) { return b / a > 4.0 ? std::log(b / a) : b - a; };
  double s = std::sqrt(lo * hi);
  double slope = 0.0;
  double value = g(s, &slope);
  double last_width = width(lo, hi);
  bool force_bisect = false;
  int iter = 0;
  for (; iter < 500 && std::abs(value) > tol; ++iter) {
    if (value > 0.0) {
      hi = s;
    } else {
      lo = s;
    }
    const double w = width(lo, hi);
    force_bisect = w > 0.5 * last_width;
    last_width = w;
    double next = s - value / slope;
    if (force_bisect || !std::isfinite(next) || !(next > lo && next < hi)) {
      next = hi / lo > 4.0 ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
    }
    if (next <= lo || next >= hi) break;
    s = next;
    value = g(s, &slope);
  }
  // Not converged within the iteration budget: fall back to the feasible end.
  if (std::abs(value) > tol) s = lo;

  out.x = (c.array() * s - 1.0).exp().matrix();
  out.multiplier = 1.0 / s;
  out.iterations = iter;
  return out;
}

Vector entropy_ball_linear_max(const EntropyBall& set, const Vector& c, double tol) {
  return entropy_ball_solve(set, c, tol).x;
}

int DecisionSet::dim() const {
  return is_finite() ? finite().dim() : entropy_ball().dim();
}

int DecisionSet::span_dim() const {
  return is_finite() ? finite().span_dim() : static_cast<int>(entropy_ball().dk_arms().size());
}

int DecisionSet::size() const { return is_finite() ? finite().size() : -1; }

Arm DecisionSet::maximize(const Vector& c) const {
  if (is_finite()) {
    const int i = finite_argmax(finite(), c);
    return Arm{finite().arm(i), i};
  }
  return Arm{entropy_ball_linear_max(entropy_ball(), c), -1};
}

Arm DecisionSet::dk_arm(int i) const {
  if (i < 0 || i >= span_dim()) throw std::out_of_range("DecisionSet::dk_arm");
  if (is_finite()) {
    const int idx = finite().dk_indices()[static_cast<std::size_t>(i)];
    return Arm{finite().arm(idx), idx};
  }
  return Arm{entropy_ball().dk_arms()[static_cast<std::size_t>(i)], -1};
}

std::vector<Vector> DecisionSet::dk_vectors() const {
  std::vector<Vector> out;
  for (int i = 0; i < span_dim(); ++i) out.push_back(dk_arm(i).x);
  return out;
}

}  // namespace projbandit
