#include "twogrid/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace twogrid {

namespace {

void require_same_size(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                                " vs " + std::to_string(b) + ")");
  }
}

// exp_eta(v) for a single component. Written as logistic(theta + t) with
// t = v / (eta (1 - eta)), rearranged so that e^t never overflows.
double exp_component(double eta, double v) {
  if (v == 0.0) return eta;
  const double t = v / (eta * (1.0 - eta));
  if (t > 0.0) {
    return eta / (eta + (1.0 - eta) * std::exp(-t));
  }
  const double e = std::exp(t);
  return eta * e / ((1.0 - eta) + eta * e);
}

}  // namespace

double clip_to_box(double v) {
  if (std::isnan(v)) throw std::invalid_argument("BoxPoint: NaN component");
  return std::clamp(v, kEpsClip, 1.0 - kEpsClip);
}

BoxPoint::BoxPoint(Vector values) : values_(std::move(values)) {
  if (values_.size() < 1) throw std::invalid_argument("BoxPoint: dimension must be >= 1");
  for (Eigen::Index i = 0; i < values_.size(); ++i) values_[i] = clip_to_box(values_[i]);
}

BoxPoint BoxPoint::constant(Eigen::Index n, double value) {
  return BoxPoint(Vector::Constant(n, value));
}

Vector BoxPoint::variance() const {
  return values_.array() * (1.0 - values_.array());
}

void WeightSet::validate() const {
  if (indices.empty() || indices.size() != weights.size()) {
    throw std::invalid_argument("WeightSet: indices and weights must be non-empty and equal length");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw std::invalid_argument("WeightSet: weights must be positive");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("WeightSet: weights must sum to 1");
}

double logit(double eta) { return std::log(eta) - std::log1p(-eta); }

double logistic(double theta) {
  if (theta >= 0.0) return 1.0 / (1.0 + std::exp(-theta));
  const double e = std::exp(theta);
  return e / (1.0 + e);
}

Vector metric(const BoxPoint& y) { return y.variance().cwiseInverse(); }

double inner(const BoxPoint& y, const Tangent& v, const Tangent& w) {
  require_same_size(y.size(), v.size(), "inner");
  require_same_size(y.size(), w.size(), "inner");
  return (v.array() * w.array() / y.variance().array()).sum();
}

double norm(const BoxPoint& y, const Tangent& v) { return std::sqrt(inner(y, v, v)); }

Tangent riem_grad(const BoxPoint& y, const Vector& eucl_grad) {
  require_same_size(y.size(), eucl_grad.size(), "riem_grad");
  return y.variance().cwiseProduct(eucl_grad);
}

BoxPoint exp_map(const BoxPoint& y, const Tangent& v) {
  require_same_size(y.size(), v.size(), "exp_map");
  Vector out(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) out[i] = clip_to_box(exp_component(y[i], v[i]));
  return BoxPoint(std::move(out), BoxPoint::Unchecked{});
}

Tangent exp_inv(const BoxPoint& y, const BoxPoint& y2) {
  require_same_size(y.size(), y2.size(), "exp_inv");
  Tangent out(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double eta = y[i];
    const double eta2 = y2[i];
    if (eta == eta2) {
      out[i] = 0.0;
      continue;
    }
    const double log_odds_diff =
        (std::log(eta2) - std::log(eta)) + (std::log1p(-eta) - std::log1p(-eta2));
    out[i] = eta * (1.0 - eta) * log_odds_diff;
  }
  return out;
}

Tangent dexp(const BoxPoint& y, const Tangent& u, const Tangent& v) {
  require_same_size(y.size(), v.size(), "dexp");
  const BoxPoint moved = exp_map(y, u);
  return (moved.variance().array() / y.variance().array() * v.array()).matrix();
}

Tangent dexp_inv(const BoxPoint& y, const BoxPoint& y2, const Tangent& v2) {
  require_same_size(y.size(), y2.size(), "dexp_inv");
  require_same_size(y.size(), v2.size(), "dexp_inv");
  return (y.variance().array() / y2.variance().array() * v2.array()).matrix();
}

Tangent transport(const BoxPoint& y, const Tangent& u, const Tangent& v) { return dexp(y, u, v); }

double geometric_mean(std::span<const double> points, std::span<const double> weights) {
  if (points.empty()) throw std::invalid_argument("geometric_mean: empty point list");
  if (points.size() != weights.size()) {
    throw std::invalid_argument("geometric_mean: points and weights differ in length");
  }
  if (points.size() == 1) return points[0];
  double theta = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) theta += weights[i] * logit(points[i]);
  return logistic(theta);
}

}  // namespace twogrid
