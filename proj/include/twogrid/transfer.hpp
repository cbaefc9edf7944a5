#pragma once

// Grid transfer between a fine rows x cols grid and the coarse grid made of
// its even (row, col) positions.

#include <cstddef>
#include <vector>

#include "twogrid/manifold.hpp"

namespace twogrid {

struct GridShape {
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  Eigen::Index size() const { return rows * cols; }
  friend bool operator==(const GridShape&, const GridShape&) = default;
};

/// Fine-only point j together with its coarse neighborhood N_j and weights.
struct Neighborhood {
  Eigen::Index fine_index = 0;
  WeightSet stencil;
};

/// Two-level hierarchy with bilinear neighborhoods. Weights are (1/2, 1/2) on
/// edge midpoints and (1/4, ...) on cell centers; stencils cut by the last
/// row/column are renormalized over the available coarse neighbors.
class GridHierarchy {
 public:
  explicit GridHierarchy(GridShape fine);

  const GridShape& fine_shape() const { return fine_; }
  const GridShape& coarse_shape() const { return coarse_; }

  /// Fine index of coarse index i.
  Eigen::Index fine_of_coarse(Eigen::Index i) const { return coarse_to_fine_[static_cast<std::size_t>(i)]; }
  const std::vector<Eigen::Index>& coarse_to_fine() const { return coarse_to_fine_; }
  const std::vector<Neighborhood>& neighborhoods() const { return neighborhoods_; }

 private:
  GridShape fine_;
  GridShape coarse_;
  std::vector<Eigen::Index> coarse_to_fine_;
  std::vector<Neighborhood> neighborhoods_;
};

/// Bilinear interpolation BI (coarse -> fine) and its transpose.
Vector interp_apply(const GridHierarchy& h, const Vector& coarse);
Vector interp_transpose(const GridHierarchy& h, const Vector& fine);

/// P(x): coarse values copied, fine-only values are geometric means.
BoxPoint prolong(const GridHierarchy& h, const BoxPoint& x);

/// dP_x u.
Tangent dprolong(const GridHierarchy& h, const BoxPoint& x, const Tangent& u);

/// Injection R y = y restricted to the coarse positions.
BoxPoint restrict_point(const GridHierarchy& h, const BoxPoint& y);

/// TR_y v = G_m(x)^{-1} dP_x^T G_n(y) v with x = R y; adjoint of dP_x in the
/// metrics at x and y.
Tangent restrict_tangent(const GridHierarchy& h, const BoxPoint& y, const Tangent& v);

}  // namespace twogrid
