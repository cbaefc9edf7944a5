#pragma once

// Riemannian geometry of the open box (0,1)^n with the Fisher-Rao metric
// G(y) = diag(1 / (y_i (1 - y_i))) and the exponential map of the e-connection.

#include <span>
#include <vector>

#include <Eigen/Core>

namespace twogrid {

using Vector = Eigen::VectorXd;

/// Tangent vectors carry no base point; agreement is the caller's contract.
using Tangent = Eigen::VectorXd;

/// Components of every BoxPoint lie in [kEpsClip, 1 - kEpsClip].
inline constexpr double kEpsClip = 1e-10;

double clip_to_box(double v);

/// A point of the open box. Construction clips every component into
/// [kEpsClip, 1 - kEpsClip]; the stored values are immutable afterwards.
class BoxPoint {
 public:
  BoxPoint() = default;
  explicit BoxPoint(Vector values);
  static BoxPoint constant(Eigen::Index n, double value);

  const Vector& values() const { return values_; }
  Eigen::Index size() const { return values_.size(); }
  double operator[](Eigen::Index i) const { return values_[i]; }

  /// y_i (1 - y_i), the inverse metric weights.
  Vector variance() const;

  friend bool operator==(const BoxPoint& a, const BoxPoint& b) {
    return a.values_.size() == b.values_.size() && a.values_ == b.values_;
  }

 private:
  struct Unchecked {};
  BoxPoint(Vector values, Unchecked) : values_(std::move(values)) {}
  friend BoxPoint exp_map(const BoxPoint&, const Tangent&);

  Vector values_;
};

/// Positive weights summing to one, attached to coarse indices.
struct WeightSet {
  std::vector<Eigen::Index> indices;
  std::vector<double> weights;

  /// Throws std::invalid_argument unless weights are positive and sum to 1.
  void validate() const;
};

double logit(double eta);
double logistic(double theta);

/// Diagonal of G(y), 1 / (y_i (1 - y_i)).
Vector metric(const BoxPoint& y);

/// <v, w>_y = sum_i v_i w_i / (y_i (1 - y_i)).
double inner(const BoxPoint& y, const Tangent& v, const Tangent& w);
double norm(const BoxPoint& y, const Tangent& v);

/// G(y)^{-1} times the Euclidean gradient.
Tangent riem_grad(const BoxPoint& y, const Vector& eucl_grad);

/// e-connection exponential map, clipped to the box. exp_map(y, 0) == y bitwise.
BoxPoint exp_map(const BoxPoint& y, const Tangent& v);

Tangent exp_inv(const BoxPoint& y, const BoxPoint& y2);

/// d exp_y(u) applied to v: (y'(1-y') / (y(1-y))) v with y' = exp_y(u).
Tangent dexp(const BoxPoint& y, const Tangent& u, const Tangent& v);

/// d exp_y^{-1}(y2) applied to v2.
Tangent dexp_inv(const BoxPoint& y, const BoxPoint& y2, const Tangent& v2);

/// Vector transport by the differentiated retraction.
Tangent transport(const BoxPoint& y, const Tangent& u, const Tangent& v);

/// Weighted geometric mean of scalars in (0,1): odds(mean) = prod odds(eta_i)^w_i.
double geometric_mean(std::span<const double> points, std::span<const double> weights);

}  // namespace twogrid
