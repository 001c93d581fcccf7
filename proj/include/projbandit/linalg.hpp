#pragma once

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace projbandit {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Thrown when a caller-supplied set of basis vectors is linearly dependent.
class DegenerateBasisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Orthogonal projection onto a subspace U of R^d, stored as a symmetric
/// idempotent d x d matrix of trace u = dim(U).
class Projector {
 public:
  Projector(Matrix matrix, int subspace_dim);

  const Matrix& matrix() const { return matrix_; }
  int subspace_dim() const { return subspace_dim_; }
  int dim() const { return static_cast<int>(matrix_.rows()); }

  /// P x.
  Vector apply(const Vector& x) const;
  /// (I - P) x, the component in the orthogonal complement.
  Vector apply_complement(const Vector& x) const;

  /// Largest |P - P^T| entry.
  double symmetry_residual() const;
  /// Largest |P P - P| entry.
  double idempotence_residual() const;

 private:
  Matrix matrix_;
  int subspace_dim_;
};

/// P = A (A^T A)^{-1} A^T for a d x u basis A with independent columns.
/// Throws DegenerateBasisError if the smallest singular value of A is at most
/// 1e-10 times the largest.
Projector projector_from_basis(const Matrix& basis);

/// diag(1, ..., 1, 0, ..., 0) with `keep` leading ones.
Projector diagonal_projector(int dim, int keep);

/// P x with a dimension check.
Vector apply_projection(const Projector& projector, const Vector& x);

/// Regularized least-squares state V = lambda I + sum x x^T, b = sum r x,
/// theta_hat = V^{-1} b. The inverse is maintained by Sherman-Morrison
/// rank-one updates and recomputed from V every kRefactorInterval updates.
class RidgeState {
 public:
  static constexpr long kRefactorInterval = 512;

  RidgeState(int dim, double lambda);

  void update(const Vector& x, double reward);

  int dim() const { return static_cast<int>(gram_.rows()); }
  double lambda() const { return lambda_; }
  long steps() const { return steps_; }
  const Matrix& gram() const { return gram_; }
  const Matrix& gram_inverse() const { return gram_inverse_; }
  const Vector& weighted_sum() const { return weighted_sum_; }
  const Vector& theta_hat() const { return theta_hat_; }

  /// ||x||_{V^{-1}}.
  double inverse_norm(const Vector& x) const;
  /// max |V V^{-1} - I|.
  double inverse_residual() const;

 private:
  void refactor();

  double lambda_;
  long steps_ = 0;
  Matrix gram_;
  Matrix gram_inverse_;
  Vector weighted_sum_;
  Vector theta_hat_;
};

/// Functional form of RidgeState::update.
RidgeState ridge_update(RidgeState state, const Vector& x, double reward);

/// min over unit y in span(span_basis) of y^T M y. Throws DegenerateBasisError
/// if the basis vectors are linearly dependent or the list is empty.
double min_eigen_in_span(const Matrix& m, const std::vector<Vector>& span_basis);

}  // namespace projbandit
