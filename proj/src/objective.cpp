#include "twogrid/objective.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace twogrid {

namespace {

// Forward differences with zero padding past the last row/column.
struct Differences {
  double dh = 0.0;
  double dv = 0.0;
};

Differences differences_at(const Vector& img, const GridShape& s, Eigen::Index r, Eigen::Index c) {
  const Eigen::Index p = r * s.cols + c;
  Differences d;
  if (c + 1 < s.cols) d.dh = img[p + 1] - img[p];
  if (r + 1 < s.rows) d.dv = img[p + s.cols] - img[p];
  return d;
}

void require_image(const Vector& img, const GridShape& s) {
  if (img.size() != s.size()) throw std::invalid_argument("smoothed_tv: image does not match shape");
}

}  // namespace

Problem::Problem(SparseMatrix A, Vector b, double lambda, double rho, GridShape shape, OperatorFactory factory)
    : b_(std::move(b)), lambda_(lambda), rho_(rho), shape_(shape), factory_(std::move(factory)) {
  A.makeCompressed();
  if (A.cols() != shape.size()) throw std::invalid_argument("Problem: A has wrong number of columns");
  if (A.rows() != b_.size()) throw std::invalid_argument("Problem: A rows and b length differ");
  if (A.rows() == 0) throw std::invalid_argument("Problem: no measurements");
  if (!(lambda >= 0.0)) throw std::invalid_argument("Problem: lambda must be >= 0");
  if (!(rho > 0.0)) throw std::invalid_argument("Problem: rho must be > 0");
  for (Eigen::Index i = 0; i < b_.size(); ++i) {
    if (!(b_[i] > 0.0)) throw std::invalid_argument("Problem: b must be strictly positive");
  }
  for (int r = 0; r < A.outerSize(); ++r) {
    bool support = false;
    for (SparseMatrix::InnerIterator it(A, r); it; ++it) {
      if (it.value() < 0.0) throw std::invalid_argument("Problem: A must be nonnegative");
      support = support || it.value() > 0.0;
    }
    if (!support) throw std::invalid_argument("Problem: row " + std::to_string(r) + " of A has no support");
  }
  A_ = std::make_shared<const SparseMatrix>(std::move(A));
}

Problem Problem::with_data(Vector b) const {
  Problem copy = *this;
  if (b.size() != b_.size()) throw std::invalid_argument("Problem::with_data: wrong data length");
  for (Eigen::Index i = 0; i < b.size(); ++i) {
    if (!(b[i] > 0.0)) throw std::invalid_argument("Problem::with_data: b must be strictly positive");
  }
  copy.b_ = std::move(b);
  return copy;
}

double kl_div(const Vector& u, const Vector& w) {
  if (u.size() != w.size()) throw std::invalid_argument("kl_div: length mismatch");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (!(u[i] > 0.0) || !(w[i] > 0.0)) throw std::invalid_argument("kl_div: components must be positive");
    acc += u[i] * std::log(u[i] / w[i]) + w[i] - u[i];
  }
  return acc;
}

double data_term(const Problem& pb, const BoxPoint& y) {
  const Vector Ay = pb.A() * y.values();
  return kl_div(Ay, pb.b());
}

Vector data_grad(const Problem& pb, const BoxPoint& y) {
  const Vector Ay = pb.A() * y.values();
  const Vector ratio = (Ay.array() / pb.b().array()).log().matrix();
  return pb.A().transpose() * ratio;
}

double smoothed_tv(const Vector& img, const GridShape& s, double rho) {
  require_image(img, s);
  double acc = 0.0;
  for (Eigen::Index r = 0; r < s.rows; ++r) {
    for (Eigen::Index c = 0; c < s.cols; ++c) {
      const auto d = differences_at(img, s, r, c);
      const double sq = d.dh * d.dh + d.dv * d.dv;
      // sqrt(sq + rho^2) - rho without cancellation.
      acc += sq / (std::sqrt(sq + rho * rho) + rho);
    }
  }
  return acc;
}

Vector smoothed_tv_grad(const Vector& img, const GridShape& s, double rho) {
  require_image(img, s);
  Vector g = Vector::Zero(img.size());
  for (Eigen::Index r = 0; r < s.rows; ++r) {
    for (Eigen::Index c = 0; c < s.cols; ++c) {
      const Eigen::Index p = r * s.cols + c;
      const auto d = differences_at(img, s, r, c);
      const double norm = std::sqrt(d.dh * d.dh + d.dv * d.dv + rho * rho);
      const double gh = d.dh / norm;
      const double gv = d.dv / norm;
      if (c + 1 < s.cols) {
        g[p + 1] += gh;
        g[p] -= gh;
      }
      if (r + 1 < s.rows) {
        g[p + s.cols] += gv;
        g[p] -= gv;
      }
    }
  }
  return g;
}

double smoothed_tv(const Problem& pb, const BoxPoint& y) { return smoothed_tv(y.values(), pb.shape(), pb.rho()); }

Vector smoothed_tv_grad(const Problem& pb, const BoxPoint& y) {
  return smoothed_tv_grad(y.values(), pb.shape(), pb.rho());
}

ObjectiveEval objective_with_data(const Problem& pb, const Vector& b, const BoxPoint& y) {
  if (y.size() != pb.num_pixels()) throw std::invalid_argument("objective: point does not match problem size");
  const Vector Ay = pb.A() * y.values();
  ObjectiveEval out;
  out.value = kl_div(Ay, b);
  const Vector ratio = (Ay.array() / b.array()).log().matrix();
  out.eucl_grad = pb.A().transpose() * ratio;
  if (pb.lambda() != 0.0) {
    out.value += pb.lambda() * smoothed_tv(pb, y);
    out.eucl_grad += pb.lambda() * smoothed_tv_grad(pb, y);
  }
  return out;
}

ObjectiveEval objective(const Problem& pb, const BoxPoint& y) { return objective_with_data(pb, pb.b(), y); }

double bregman_f(const Problem& pb, const BoxPoint& x, const BoxPoint& x0) {
  const Vector Ax = pb.A() * x.values();
  const Vector Ax0 = pb.A() * x0.values();
  const double tv_gap = smoothed_tv(pb, x) - smoothed_tv(pb, x0) -
                        smoothed_tv_grad(pb, x0).dot(x.values() - x0.values());
  return kl_div(Ax, Ax0) + pb.lambda() * tv_gap;
}

Problem eval_at_level(const Problem& fine, const GridHierarchy& h) {
  if (!(fine.shape() == h.fine_shape())) throw std::invalid_argument("eval_at_level: hierarchy does not match problem");
  if (!fine.factory()) throw std::invalid_argument("eval_at_level: problem has no operator factory");
  SparseMatrix coarse_A = fine.factory()(h.coarse_shape());
  Vector placeholder = Vector::Ones(coarse_A.rows());
  return Problem(std::move(coarse_A), std::move(placeholder), fine.lambda(), fine.rho(), h.coarse_shape(),
                 fine.factory());
}

}  // namespace twogrid
