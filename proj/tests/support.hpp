#pragma once

// Seeded generators for property tests. Each property draws its own cases
// from a fixed seed so failures reproduce.

#include <random>

#include "projbandit/linalg.hpp"

namespace testsupport {

using projbandit::Matrix;
using projbandit::Vector;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo = -1.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  Vector vector(int n, double lo = -1.0, double hi = 1.0) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = uniform(lo, hi);
    return v;
  }
  Matrix matrix(int rows, int cols) {
    Matrix m(rows, cols);
    for (int j = 0; j < cols; ++j) {
      for (int i = 0; i < rows; ++i) m(i, j) = uniform();
    }
    return m;
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

// Projector onto span(basis) via Gram-Schmidt, independent of the library's
// normal-equation construction.
inline Matrix gram_schmidt_projector(const Matrix& basis) {
  Matrix q(basis.rows(), 0);
  for (Eigen::Index j = 0; j < basis.cols(); ++j) {
    Vector v = basis.col(j);
    for (Eigen::Index i = 0; i < q.cols(); ++i) v -= q.col(i).dot(v) * q.col(i);
    for (Eigen::Index i = 0; i < q.cols(); ++i) v -= q.col(i).dot(v) * q.col(i);
    q.conservativeResize(Eigen::NoChange, q.cols() + 1);
    q.col(q.cols() - 1) = v.normalized();
  }
  return q * q.transpose();
}

// Largest root of x log x = b on [1, inf) by bisection.
inline double xlogx_upper_root(double b) {
  double lo = 1.0, hi = 2.0;
  while (hi * std::log(hi) < b) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mid * std::log(mid) > b ? hi : lo) = mid;
  }
  return lo;
}

}  // namespace testsupport
