#include "projbandit/validation.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "projbandit/decision_sets.hpp"
#include "projbandit/environment.hpp"
#include "projbandit/linalg.hpp"

namespace projbandit {

namespace {

Matrix random_matrix(int rows, int cols, Rng& rng) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Matrix m(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) m(i, j) = unif(rng);
  }
  return m;
}

CheckResult finish(std::string name, double worst, double tol) {
  return CheckResult{std::move(name), worst <= tol, worst, tol};
}

}  // namespace

std::vector<CheckResult> run_self_checks(std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_int_distribution<int> dim_dist(2, 13);
  std::vector<CheckResult> out;

  {
    double sym = 0.0, idem = 0.0, trace = 0.0;
    for (int i = 0; i < 100; ++i) {
      const int d = dim_dist(rng);
      const int u = std::uniform_int_distribution<int>(1, d)(rng);
      const Projector p = projector_from_basis(random_matrix(d, u, rng));
      sym = std::max(sym, p.symmetry_residual());
      idem = std::max(idem, p.idempotence_residual());
      trace = std::max(trace, std::abs(p.matrix().trace() - u));
    }
    out.push_back(finish("projector symmetry", sym, 1e-10));
    out.push_back(finish("projector idempotence", idem, 1e-8));
    out.push_back(finish("projector trace", trace, 1e-8));
  }

  {
    double worst = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
      const int d = dim_dist(rng);
      RidgeState ridge(d, 1.0);
      Matrix v = Matrix::Identity(d, d);
      Vector b = Vector::Zero(d);
      for (int s = 0; s < 50; ++s) {
        const Vector x = random_matrix(d, 1, rng).col(0);
        const double r = random_matrix(1, 1, rng)(0, 0);
        ridge.update(x, r);
        v += x * x.transpose();
        b += r * x;
      }
      const Vector batch = v.fullPivLu().solve(b);
      worst = std::max(worst, (batch - ridge.theta_hat()).cwiseAbs().maxCoeff());
    }
    out.push_back(finish("ridge incremental vs batch", worst, 1e-8));
  }

  {
    // Symmetric objectives reduce to m x log x = budget.
    double worst = 0.0;
    for (int m = 1; m <= 4; ++m) {
      const EntropyBall ball(m, 5.0);
      const Vector x = entropy_ball_linear_max(ball, Vector::Ones(m));
      double lo = 1.0, hi = 10.0;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (m * mid * std::log(mid) > 5.0 ? hi : lo) = mid;
      }
      worst = std::max(worst, (x.array() - lo).abs().maxCoeff());
    }
    out.push_back(finish("entropy ball symmetric optimum", worst, 1e-8));

    double kkt = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
      const int d = dim_dist(rng);
      const EntropyBall ball(d, 5.0);
      Vector c = random_matrix(d, 1, rng).col(0);
      c(0) = std::abs(c(0)) + 1e-3;
      const auto sol = entropy_ball_solve(ball, c, 1e-10);
      const Vector resid = c.array() - sol.multiplier * (1.0 + sol.x.array().log());
      kkt = std::max({kkt, resid.cwiseAbs().maxCoeff(), std::abs(ball.entropy(sol.x) - 5.0)});
    }
    out.push_back(finish("entropy ball KKT residual", kkt, 1e-9));
  }

  {
    double worst = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
      const int d = 6;
      const int k = std::uniform_int_distribution<int>(1, d)(rng);
      const Matrix basis = random_matrix(d, k, rng);
      std::vector<Vector> dk;
      Matrix m = Matrix::Zero(d, d);
      for (int j = 0; j < k; ++j) {
        dk.push_back(basis.col(j));
        m += basis.col(j) * basis.col(j).transpose();
      }
      // Rayleigh quotient over y = B z: generalized problem (B^T M B, B^T B).
      Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> ges(
          basis.transpose() * m * basis, basis.transpose() * basis, Eigen::EigenvaluesOnly);
      worst = std::max(worst, std::abs(min_eigen_in_span(m, dk) - ges.eigenvalues()(0)));
    }
    out.push_back(finish("min eigenvalue in span", worst, 1e-8));
  }

  {
    double worst = 0.0;
    for (int rep = 0; rep < 1000; ++rep) {
      const int d = dim_dist(rng);
      const int u = std::uniform_int_distribution<int>(1, d)(rng);
      const Projector p = projector_from_basis(random_matrix(d, u, rng));
      const Vector x = random_matrix(d, 1, rng).col(0);
      const Vector theta = random_matrix(d, 1, rng).col(0);
      const double lhs = p.apply(x).dot(p.apply(theta)) +
                         p.apply_complement(x).dot(p.apply_complement(theta));
      worst = std::max(worst, std::abs(lhs - x.dot(theta)));
    }
    out.push_back(finish("reward decomposition", worst, 1e-8));
  }

  return out;
}

}  // namespace projbandit
