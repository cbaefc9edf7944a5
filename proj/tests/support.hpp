#pragma once

#include <cstdint>
#include <random>

#include "twogrid/objective.hpp"
#include "twogrid/tomography.hpp"

namespace twogrid::testutil {

inline Vector random_vector(std::mt19937_64& rng, Eigen::Index n, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = dist(rng);
  return v;
}

inline BoxPoint random_point(std::mt19937_64& rng, Eigen::Index n, double margin = 1e-3) {
  return BoxPoint(random_vector(rng, n, margin, 1.0 - margin));
}

/// Dense random nonnegative p x n matrix with a positive entry in every row.
inline SparseMatrix random_operator(std::mt19937_64& rng, Eigen::Index p, Eigen::Index n) {
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  std::vector<Eigen::Triplet<double, int>> t;
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double v = dist(rng);
      if (v > 0.4 || j == i % n) t.emplace_back(static_cast<int>(i), static_cast<int>(j), v + 0.05);
    }
  }
  SparseMatrix A(p, n);
  A.setFromTriplets(t.begin(), t.end());
  return A;
}

/// Small tomography problem on a size x size grid with data from the given phantom.
inline Problem tomo_problem(int size, int angles, PhantomKind kind = PhantomKind::Mixed, double lambda = 0.5,
                            double rho = 0.5) {
  const Phantom ph = make_phantom(kind, size);
  return synthesize(ScanGeometry::for_grid(ph.shape, angles), ph, lambda, rho);
}

/// Central-difference directional derivative of a scalar function of a vector.
template <class F>
double directional_fd(F&& f, const Vector& x, const Vector& d, double h) {
  return (f(Vector(x + h * d)) - f(Vector(x - h * d))) / (2.0 * h);
}

}  // namespace twogrid::testutil
