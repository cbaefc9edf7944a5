#pragma once

// f(y) = KL(Ay, b) + lambda * J(y) with J the isotropic smoothed total
// variation sum_p ( sqrt(|grad y|_p^2 + rho^2) - rho ).

#include <functional>
#include <memory>

#include <Eigen/SparseCore>

#include "twogrid/manifold.hpp"
#include "twogrid/transfer.hpp"

namespace twogrid {

/// Compressed sparse rows, column indices sorted within each row.
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

/// Builds the projection operator for a grid of the given shape. Used to
/// evaluate the same measurement model on coarser grids.
using OperatorFactory = std::function<SparseMatrix(const GridShape&)>;

/// Immutable problem instance. Construction checks: b > 0, A >= 0, every row
/// of A has a positive entry, lambda >= 0, rho > 0, shape matches A.
class Problem {
 public:
  Problem(SparseMatrix A, Vector b, double lambda, double rho, GridShape shape,
          OperatorFactory factory = {});

  const SparseMatrix& A() const { return *A_; }
  const Vector& b() const { return b_; }
  double lambda() const { return lambda_; }
  double rho() const { return rho_; }
  const GridShape& shape() const { return shape_; }
  Eigen::Index num_pixels() const { return shape_.size(); }
  Eigen::Index num_rays() const { return A_->rows(); }
  const OperatorFactory& factory() const { return factory_; }

  /// Same operator and parameters with different data.
  Problem with_data(Vector b) const;

 private:
  std::shared_ptr<const SparseMatrix> A_;
  Vector b_;
  double lambda_;
  double rho_;
  GridShape shape_;
  OperatorFactory factory_;
};

struct ObjectiveEval {
  double value = 0.0;
  Vector eucl_grad;
};

/// <1, u log(u/w) + w - u>; throws on nonpositive components.
double kl_div(const Vector& u, const Vector& w);

double data_term(const Problem& pb, const BoxPoint& y);
/// A^T log(Ay / b).
Vector data_grad(const Problem& pb, const BoxPoint& y);

double smoothed_tv(const Problem& pb, const BoxPoint& y);
Vector smoothed_tv_grad(const Problem& pb, const BoxPoint& y);

double smoothed_tv(const Vector& image, const GridShape& shape, double rho);
Vector smoothed_tv_grad(const Vector& image, const GridShape& shape, double rho);

ObjectiveEval objective(const Problem& pb, const BoxPoint& y);

/// Objective with the data vector replaced by `b` (same operator).
ObjectiveEval objective_with_data(const Problem& pb, const Vector& b, const BoxPoint& y);

/// D_f(x, x0) = KL(Ax, Ax0) + lambda D_J(x, x0). Independent of b.
double bregman_f(const Problem& pb, const BoxPoint& x, const BoxPoint& x0);

/// The problem on the coarse grid of `h`: operator rebuilt by the problem's
/// factory, same lambda and rho, unit placeholder data.
Problem eval_at_level(const Problem& fine, const GridHierarchy& h);

}  // namespace twogrid
