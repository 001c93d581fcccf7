#include "projbandit/linalg.hpp"

#include <string>

namespace projbandit {

namespace {

constexpr double kRankThreshold = 1e-10;

void require_independent_columns(const Matrix& basis) {
  if (basis.cols() == 0 || basis.rows() == 0) {
    throw DegenerateBasisError("empty basis");
  }
  if (basis.cols() > basis.rows()) {
    throw DegenerateBasisError("basis has more columns (" + std::to_string(basis.cols()) +
                               ") than rows (" + std::to_string(basis.rows()) + ")");
  }
  Eigen::JacobiSVD<Matrix> svd(basis);
  const auto& sv = svd.singularValues();
  const double largest = sv(0);
  const double smallest = sv(sv.size() - 1);
  if (!(largest > 0.0) || smallest <= kRankThreshold * largest) {
    throw DegenerateBasisError("basis columns are linearly dependent (sigma_min=" +
                               std::to_string(smallest) + ", sigma_max=" +
                               std::to_string(largest) + ")");
  }
}

}  // namespace

Projector::Projector(Matrix matrix, int subspace_dim)
    : matrix_(std::move(matrix)), subspace_dim_(subspace_dim) {
  if (matrix_.rows() != matrix_.cols()) {
    throw std::invalid_argument("projector matrix must be square");
  }
  if (subspace_dim_ < 1 || subspace_dim_ > matrix_.rows()) {
    throw std::invalid_argument("projector subspace dimension out of range");
  }
}

Vector Projector::apply(const Vector& x) const { return matrix_ * x; }

Vector Projector::apply_complement(const Vector& x) const { return x - matrix_ * x; }

double Projector::symmetry_residual() const {
  return (matrix_ - matrix_.transpose()).cwiseAbs().maxCoeff();
}

double Projector::idempotence_residual() const {
  return (matrix_ * matrix_ - matrix_).cwiseAbs().maxCoeff();
}

Projector projector_from_basis(const Matrix& basis) {
  require_independent_columns(basis);
  // (A^T A) Z = A^T, then P = A Z.
  const Matrix gram = basis.transpose() * basis;
  const Matrix z = gram.ldlt().solve(basis.transpose());
  Matrix p = basis * z;
  p = 0.5 * (p + p.transpose()).eval();
  return Projector(std::move(p), static_cast<int>(basis.cols()));
}

Projector diagonal_projector(int dim, int keep) {
  if (dim < 1) throw std::invalid_argument("diagonal_projector: dimension must be >= 1");
  if (keep < 1 || keep > dim) {
    throw std::invalid_argument("diagonal_projector: keep=" + std::to_string(keep) +
                                " outside [1, " + std::to_string(dim) + "]");
  }
  Matrix p = Matrix::Zero(dim, dim);
  p.diagonal().head(keep).setOnes();
  return Projector(std::move(p), keep);
}

Vector apply_projection(const Projector& projector, const Vector& x) {
  if (x.size() != projector.dim()) {
    throw std::invalid_argument("apply_projection: vector has dimension " +
                                std::to_string(x.size()) + ", projector has " +
                                std::to_string(projector.dim()));
  }
  return projector.apply(x);
}

RidgeState::RidgeState(int dim, double lambda)
    : lambda_(lambda),
      gram_(lambda * Matrix::Identity(dim, dim)),
      gram_inverse_(Matrix::Identity(dim, dim) / lambda),
      weighted_sum_(Vector::Zero(dim)),
      theta_hat_(Vector::Zero(dim)) {
  if (dim < 1) throw std::invalid_argument("RidgeState: dimension must be >= 1");
  if (!(lambda > 0.0)) throw std::invalid_argument("RidgeState: lambda must be positive");
}

void RidgeState::update(const Vector& x, double reward) {
  if (x.size() != dim()) throw std::invalid_argument("RidgeState::update: dimension mismatch");
  gram_.noalias() += x * x.transpose();
  weighted_sum_.noalias() += reward * x;
  ++steps_;
  if (steps_ % kRefactorInterval == 0) {
    refactor();
  } else {
    const Vector u = gram_inverse_ * x;
    const double denom = 1.0 + x.dot(u);
    gram_inverse_.noalias() -= (u * u.transpose()) / denom;
  }
  theta_hat_.noalias() = gram_inverse_ * weighted_sum_;
}

void RidgeState::refactor() {
  gram_inverse_ = gram_.llt().solve(Matrix::Identity(dim(), dim()));
  gram_inverse_ = 0.5 * (gram_inverse_ + gram_inverse_.transpose()).eval();
}

double RidgeState::inverse_norm(const Vector& x) const {
  return std::sqrt(std::max(0.0, x.dot(gram_inverse_ * x)));
}

double RidgeState::inverse_residual() const {
  return (gram_ * gram_inverse_ - Matrix::Identity(dim(), dim())).cwiseAbs().maxCoeff();
}

RidgeState ridge_update(RidgeState state, const Vector& x, double reward) {
  state.update(x, reward);
  return state;
}

double min_eigen_in_span(const Matrix& m, const std::vector<Vector>& span_basis) {
  if (span_basis.empty()) throw DegenerateBasisError("min_eigen_in_span: empty span basis");
  if (m.rows() != m.cols()) throw std::invalid_argument("min_eigen_in_span: matrix not square");
  const auto dim = m.rows();
  Matrix basis(dim, static_cast<Eigen::Index>(span_basis.size()));
  for (std::size_t j = 0; j < span_basis.size(); ++j) {
    if (span_basis[j].size() != dim) {
      throw std::invalid_argument("min_eigen_in_span: basis vector dimension mismatch");
    }
    basis.col(static_cast<Eigen::Index>(j)) = span_basis[j];
  }
  require_independent_columns(basis);

  Eigen::HouseholderQR<Matrix> qr(basis);
  const Matrix q = qr.householderQ() * Matrix::Identity(dim, basis.cols());
  Matrix reduced = q.transpose() * m * q;
  reduced = 0.5 * (reduced + reduced.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(reduced, Eigen::EigenvaluesOnly);
  return eig.eigenvalues()(0);
}

}  // namespace projbandit
