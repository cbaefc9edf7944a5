#include "twogrid/transfer.hpp"

#include <stdexcept>
#include <string>

namespace twogrid {

namespace {

void require_size(Eigen::Index got, Eigen::Index expected, const char* what) {
  if (got != expected) {
    throw std::invalid_argument(std::string(what) + ": expected length " + std::to_string(expected) +
                                ", got " + std::to_string(got));
  }
}

}  // namespace

GridHierarchy::GridHierarchy(GridShape fine) : fine_(fine) {
  if (fine.rows < 2 || fine.cols < 2 || fine.rows % 2 != 0 || fine.cols % 2 != 0) {
    throw std::invalid_argument("GridHierarchy: fine dimensions must be even and >= 2");
  }
  coarse_ = {fine.rows / 2, fine.cols / 2};
  coarse_to_fine_.reserve(static_cast<std::size_t>(coarse_.size()));
  for (Eigen::Index r = 0; r < coarse_.rows; ++r) {
    for (Eigen::Index c = 0; c < coarse_.cols; ++c) coarse_to_fine_.push_back(2 * r * fine.cols + 2 * c);
  }

  auto coarse_index = [&](Eigen::Index r, Eigen::Index c) { return r * coarse_.cols + c; };
  for (Eigen::Index fr = 0; fr < fine.rows; ++fr) {
    for (Eigen::Index fc = 0; fc < fine.cols; ++fc) {
      if (fr % 2 == 0 && fc % 2 == 0) continue;
      // Coarse rows/cols bracketing this fine point; the upper one may fall
      // off the grid at the last fine row/column.
      std::vector<Eigen::Index> rows{fr / 2};
      if (fr % 2 == 1 && fr / 2 + 1 < coarse_.rows) rows.push_back(fr / 2 + 1);
      std::vector<Eigen::Index> cols{fc / 2};
      if (fc % 2 == 1 && fc / 2 + 1 < coarse_.cols) cols.push_back(fc / 2 + 1);

      Neighborhood nb;
      nb.fine_index = fr * fine.cols + fc;
      const double w = 1.0 / static_cast<double>(rows.size() * cols.size());
      for (Eigen::Index r : rows) {
        for (Eigen::Index c : cols) {
          nb.stencil.indices.push_back(coarse_index(r, c));
          nb.stencil.weights.push_back(w);
        }
      }
      neighborhoods_.push_back(std::move(nb));
    }
  }
}

Vector interp_apply(const GridHierarchy& h, const Vector& coarse) {
  require_size(coarse.size(), h.coarse_shape().size(), "interp_apply");
  Vector fine = Vector::Zero(h.fine_shape().size());
  const auto& c2f = h.coarse_to_fine();
  for (std::size_t i = 0; i < c2f.size(); ++i) fine[c2f[i]] = coarse[static_cast<Eigen::Index>(i)];
  for (const auto& nb : h.neighborhoods()) {
    double acc = 0.0;
    for (std::size_t k = 0; k < nb.stencil.indices.size(); ++k) {
      acc += nb.stencil.weights[k] * coarse[nb.stencil.indices[k]];
    }
    fine[nb.fine_index] = acc;
  }
  return fine;
}

Vector interp_transpose(const GridHierarchy& h, const Vector& fine) {
  require_size(fine.size(), h.fine_shape().size(), "interp_transpose");
  Vector coarse(h.coarse_shape().size());
  const auto& c2f = h.coarse_to_fine();
  for (std::size_t i = 0; i < c2f.size(); ++i) coarse[static_cast<Eigen::Index>(i)] = fine[c2f[i]];
  for (const auto& nb : h.neighborhoods()) {
    const double v = fine[nb.fine_index];
    for (std::size_t k = 0; k < nb.stencil.indices.size(); ++k) {
      coarse[nb.stencil.indices[k]] += nb.stencil.weights[k] * v;
    }
  }
  return coarse;
}

BoxPoint prolong(const GridHierarchy& h, const BoxPoint& x) {
  require_size(x.size(), h.coarse_shape().size(), "prolong");
  Vector fine(h.fine_shape().size());
  const auto& c2f = h.coarse_to_fine();
  for (std::size_t i = 0; i < c2f.size(); ++i) fine[c2f[i]] = x[static_cast<Eigen::Index>(i)];
  std::vector<double> pts;
  for (const auto& nb : h.neighborhoods()) {
    pts.clear();
    for (Eigen::Index i : nb.stencil.indices) pts.push_back(x[i]);
    fine[nb.fine_index] = geometric_mean(pts, nb.stencil.weights);
  }
  return BoxPoint(std::move(fine));
}

Tangent dprolong(const GridHierarchy& h, const BoxPoint& x, const Tangent& u) {
  require_size(x.size(), h.coarse_shape().size(), "dprolong");
  require_size(u.size(), h.coarse_shape().size(), "dprolong");
  const BoxPoint px = prolong(h, x);
  const Vector xvar = x.variance();
  Tangent out(h.fine_shape().size());
  const auto& c2f = h.coarse_to_fine();
  for (std::size_t i = 0; i < c2f.size(); ++i) out[c2f[i]] = u[static_cast<Eigen::Index>(i)];
  for (const auto& nb : h.neighborhoods()) {
    double acc = 0.0;
    for (std::size_t k = 0; k < nb.stencil.indices.size(); ++k) {
      const Eigen::Index i = nb.stencil.indices[k];
      acc += nb.stencil.weights[k] * u[i] / xvar[i];
    }
    const double m = px[nb.fine_index];
    out[nb.fine_index] = m * (1.0 - m) * acc;
  }
  return out;
}

BoxPoint restrict_point(const GridHierarchy& h, const BoxPoint& y) {
  require_size(y.size(), h.fine_shape().size(), "restrict");
  Vector coarse(h.coarse_shape().size());
  const auto& c2f = h.coarse_to_fine();
  for (std::size_t i = 0; i < c2f.size(); ++i) coarse[static_cast<Eigen::Index>(i)] = y[c2f[i]];
  return BoxPoint(std::move(coarse));
}

Tangent restrict_tangent(const GridHierarchy& h, const BoxPoint& y, const Tangent& v) {
  require_size(y.size(), h.fine_shape().size(), "restrict_tangent");
  require_size(v.size(), h.fine_shape().size(), "restrict_tangent");
  const BoxPoint pr = prolong(h, restrict_point(h, y));
  Tangent out(h.coarse_shape().size());
  const auto& c2f = h.coarse_to_fine();
  for (std::size_t i = 0; i < c2f.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[c2f[i]];
  for (const auto& nb : h.neighborhoods()) {
    const Eigen::Index j = nb.fine_index;
    const double m = pr[j];
    const double scaled = m * (1.0 - m) / (y[j] * (1.0 - y[j])) * v[j];
    for (std::size_t k = 0; k < nb.stencil.indices.size(); ++k) {
      out[nb.stencil.indices[k]] += nb.stencil.weights[k] * scaled;
    }
  }
  return out;
}

}  // namespace twogrid
