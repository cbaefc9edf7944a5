#include "twogrid/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace twogrid {

namespace {

constexpr double kMinSegment = 1e-12;

// Uniform double in [0, 1) from the raw engine output, independent of the
// standard library's distribution implementations.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

struct Ray {
  double px, py;  // point on the ray
  double dx, dy;  // unit direction
};

// Appends (pixel, length) pairs of one ray, ordered by pixel index.
void trace_ray(const Ray& ray, const GridShape& grid, std::vector<std::pair<int, double>>& out) {
  const double xmin = -0.5 * static_cast<double>(grid.cols);
  const double ymin = -0.5 * static_cast<double>(grid.rows);
  const double xmax = -xmin;
  const double ymax = -ymin;

  double s_in = -std::numeric_limits<double>::infinity();
  double s_out = std::numeric_limits<double>::infinity();
  auto slab = [&](double p, double d, double lo, double hi) {
    if (d == 0.0) {
      if (p < lo || p >= hi) s_in = std::numeric_limits<double>::infinity();
      return;
    }
    double s0 = (lo - p) / d;
    double s1 = (hi - p) / d;
    if (s0 > s1) std::swap(s0, s1);
    s_in = std::max(s_in, s0);
    s_out = std::min(s_out, s1);
  };
  slab(ray.px, ray.dx, xmin, xmax);
  slab(ray.py, ray.dy, ymin, ymax);
  if (!(s_out - s_in > kMinSegment)) return;

  std::vector<double> cuts{s_in, s_out};
  if (ray.dx != 0.0) {
    for (Eigen::Index i = 1; i < grid.cols; ++i) {
      const double s = (xmin + static_cast<double>(i) - ray.px) / ray.dx;
      if (s > s_in && s < s_out) cuts.push_back(s);
    }
  }
  if (ray.dy != 0.0) {
    for (Eigen::Index j = 1; j < grid.rows; ++j) {
      const double s = (ymin + static_cast<double>(j) - ray.py) / ray.dy;
      if (s > s_in && s < s_out) cuts.push_back(s);
    }
  }
  std::sort(cuts.begin(), cuts.end());

  std::map<int, double> lengths;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double len = cuts[k + 1] - cuts[k];
    if (len <= kMinSegment) continue;
    const double mid = 0.5 * (cuts[k] + cuts[k + 1]);
    // Half-open pixels [low, high): floor of the segment midpoint.
    auto col = static_cast<Eigen::Index>(std::floor(ray.px + mid * ray.dx - xmin));
    auto row = static_cast<Eigen::Index>(std::floor(ray.py + mid * ray.dy - ymin));
    col = std::clamp<Eigen::Index>(col, 0, grid.cols - 1);
    row = std::clamp<Eigen::Index>(row, 0, grid.rows - 1);
    lengths[static_cast<int>(row * grid.cols + col)] += len;
  }
  for (const auto& [pix, len] : lengths) out.emplace_back(pix, len);
}

double snap_trig(double v) { return std::abs(v) < 1e-14 ? 0.0 : v; }

}  // namespace

ScanGeometry ScanGeometry::for_grid(GridShape grid, int num_angles) {
  ScanGeometry g;
  g.grid = grid;
  g.num_angles = num_angles;
  g.detector_count = static_cast<int>(std::max(grid.rows, grid.cols));
  g.validate();
  return g;
}

std::vector<double> ScanGeometry::angles() const {
  std::vector<double> out;
  for (int k = 0; k < num_angles; ++k) out.push_back(std::numbers::pi * k / num_angles);
  return out;
}

void ScanGeometry::validate() const {
  if (grid.rows < 1 || grid.cols < 1) throw std::invalid_argument("ScanGeometry: empty grid");
  if (num_angles < 1) throw std::invalid_argument("ScanGeometry: num_angles must be >= 1");
  if (detector_count < 1) throw std::invalid_argument("ScanGeometry: detector_count must be >= 1");
}

int angles_for_undersampling(double fraction, Eigen::Index grid_side) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw std::invalid_argument("undersampling must lie in (0, 1]");
  return std::max(1, static_cast<int>(std::lround(fraction * static_cast<double>(grid_side))));
}

SparseMatrix build_matrix(const ScanGeometry& g) {
  g.validate();
  std::vector<Eigen::Triplet<double, int>> triplets;
  std::vector<std::pair<int, double>> row;
  int out_row = 0;
  for (double theta : g.angles()) {
    const double c = snap_trig(std::cos(theta));
    const double s = snap_trig(std::sin(theta));
    for (int d = 0; d < g.detector_count; ++d) {
      const double t = static_cast<double>(d) - 0.5 * static_cast<double>(g.detector_count - 1);
      row.clear();
      trace_ray({-t * s, t * c, c, s}, g.grid, row);
      if (row.empty()) continue;
      for (const auto& [pix, len] : row) triplets.emplace_back(out_row, pix, len);
      ++out_row;
    }
  }
  SparseMatrix A(out_row, static_cast<int>(g.grid.size()));
  A.setFromTriplets(triplets.begin(), triplets.end());
  A.makeCompressed();
  return A;
}

const std::vector<std::string>& phantom_names() {
  static const std::vector<std::string> names{"disks", "annulus", "bars", "checker", "blob", "mixed"};
  return names;
}

PhantomKind parse_phantom(std::string_view name) {
  static constexpr PhantomKind kinds[] = {PhantomKind::Disks, PhantomKind::Annulus, PhantomKind::Bars,
                                          PhantomKind::Checker, PhantomKind::Blob, PhantomKind::Mixed};
  const auto& names = phantom_names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return kinds[i];
  }
  throw std::invalid_argument("unknown phantom '" + std::string(name) + "'");
}

std::string_view to_string(PhantomKind kind) { return phantom_names()[static_cast<std::size_t>(kind)]; }

Phantom make_phantom(PhantomKind kind, Eigen::Index size, std::uint64_t seed) {
  if (size < 8) throw std::invalid_argument("make_phantom: size must be >= 8");
  Phantom ph{kind, {size, size}, Vector::Zero(size * size)};
  std::mt19937_64 rng(seed ^ (0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(kind) + 1)));
  const double half = 0.5 * static_cast<double>(size);

  // Normalized pixel-center coordinates in (-1, 1).
  auto coord = [&](Eigen::Index i) { return (static_cast<double>(i) + 0.5 - half) / half; };
  auto fill = [&](auto&& value_at) {
    for (Eigen::Index r = 0; r < size; ++r) {
      for (Eigen::Index c = 0; c < size; ++c) {
        ph.image[r * size + c] = std::clamp(value_at(coord(c), coord(r)), 0.0, 1.0);
      }
    }
  };

  switch (kind) {
    case PhantomKind::Disks: {
      struct Disk {
        double x, y, r, v;
      };
      std::vector<Disk> disks{{0.0, 0.0, 0.8, 0.3}};
      for (int k = 0; k < 14; ++k) {
        const double r = uniform(rng, 0.04, 0.22);
        const double rho = uniform(rng, 0.0, 0.78 - r);
        const double phi = uniform(rng, 0.0, 2.0 * std::numbers::pi);
        disks.push_back({rho * std::cos(phi), rho * std::sin(phi), r, uniform(rng, 0.5, 1.0)});
      }
      fill([&](double x, double y) {
        double v = 0.0;
        for (const auto& d : disks) {
          if ((x - d.x) * (x - d.x) + (y - d.y) * (y - d.y) < d.r * d.r) v = std::max(v, d.v);
        }
        return v;
      });
      break;
    }
    case PhantomKind::Annulus:
      fill([](double x, double y) {
        const double r = std::sqrt(x * x + y * y);
        if (r >= 0.45 && r <= 0.75) return 1.0;
        if (r < 0.25) return 0.6;
        return 0.0;
      });
      break;
    case PhantomKind::Bars:
      fill([](double x, double y) {
        if (std::abs(x) > 0.85 || std::abs(y) > 0.85) return 0.0;
        // Left half: vertical bars getting finer towards the center.
        if (x < 0.0) {
          const double period = 0.05 + 0.25 * (-x);
          return std::fmod(-x, period) < 0.5 * period ? 1.0 : 0.2;
        }
        const double period = 0.08 + 0.2 * (y + 0.85) / 1.7;
        return std::fmod(y + 0.85, period) < 0.5 * period ? 0.8 : 0.2;
      });
      break;
    case PhantomKind::Checker:
      fill([](double x, double y) {
        if (x * x + y * y > 0.85 * 0.85) return 0.0;
        const double cell = (x < 0.0) ? (y < 0.0 ? 0.1 : 0.2) : (y < 0.0 ? 0.3 : 0.45);
        const auto i = static_cast<long>(std::floor((x + 1.0) / cell));
        const auto j = static_cast<long>(std::floor((y + 1.0) / cell));
        return ((i + j) % 2 == 0) ? 0.9 : 0.25;
      });
      break;
    case PhantomKind::Blob: {
      struct Bump {
        double x, y, s, a;
      };
      std::vector<Bump> bumps;
      for (int k = 0; k < 10; ++k) {
        bumps.push_back({uniform(rng, -0.55, 0.55), uniform(rng, -0.55, 0.55), uniform(rng, 0.08, 0.3),
                         uniform(rng, 0.3, 1.0)});
      }
      Vector raw(size * size);
      double peak = 0.0;
      for (Eigen::Index r = 0; r < size; ++r) {
        for (Eigen::Index c = 0; c < size; ++c) {
          const double x = coord(c), y = coord(r);
          double v = 0.0;
          for (const auto& b : bumps) {
            v += b.a * std::exp(-((x - b.x) * (x - b.x) + (y - b.y) * (y - b.y)) / (2.0 * b.s * b.s));
          }
          raw[r * size + c] = v;
          peak = std::max(peak, v);
        }
      }
      ph.image = (raw / peak).cwiseMax(0.0).cwiseMin(1.0);
      break;
    }
    case PhantomKind::Mixed: {
      // Ellipses (x0, y0, a, b, angle, value added).
      struct Ellipse {
        double x, y, a, b, t, v;
      };
      const std::vector<Ellipse> ellipses{
          {0.0, 0.0, 0.69, 0.92, 0.0, 0.8},      {0.0, -0.0184, 0.6624, 0.874, 0.0, -0.5},
          {0.22, 0.0, 0.11, 0.31, -0.31, -0.2},  {-0.22, 0.0, 0.16, 0.41, 0.31, -0.2},
          {0.0, 0.35, 0.21, 0.25, 0.0, 0.3},     {0.0, 0.1, 0.046, 0.046, 0.0, 0.3},
          {0.0, -0.1, 0.046, 0.046, 0.0, 0.3},   {-0.08, -0.605, 0.046, 0.023, 0.0, 0.4},
          {0.0, -0.605, 0.023, 0.023, 0.0, 0.4}, {0.06, -0.605, 0.023, 0.046, 0.0, 0.4}};
      fill([&](double x, double y) {
        double v = 0.0;
        for (const auto& e : ellipses) {
          const double ct = std::cos(e.t), st = std::sin(e.t);
          const double u = ((x - e.x) * ct + (y - e.y) * st) / e.a;
          const double w = (-(x - e.x) * st + (y - e.y) * ct) / e.b;
          if (u * u + w * w <= 1.0) v += e.v;
        }
        return v;
      });
      break;
    }
  }
  return ph;
}

Problem synthesize(const ScanGeometry& g, const Phantom& phantom, double lambda, double rho) {
  if (!(phantom.shape == g.grid)) throw std::invalid_argument("synthesize: phantom does not match geometry");
  const SparseMatrix A = build_matrix(g);
  if (A.rows() == 0) throw std::invalid_argument("synthesize: no ray intersects the image");
  const BoxPoint truth(phantom.image);
  Vector b = A * truth.values();
  const int angles = g.num_angles;
  OperatorFactory factory = [angles](const GridShape& shape) {
    return build_matrix(ScanGeometry::for_grid(shape, angles));
  };
  return Problem(A, std::move(b), lambda, rho, g.grid, std::move(factory));
}

Problem synthesize(const Phantom& phantom, double undersampling, double lambda, double rho) {
  const Eigen::Index side = std::max(phantom.shape.rows, phantom.shape.cols);
  const auto g = ScanGeometry::for_grid(phantom.shape, angles_for_undersampling(undersampling, side));
  return synthesize(g, phantom, lambda, rho);
}

void write_pgm(const std::string& path, const Vector& image, const GridShape& shape) {
  if (image.size() != shape.size()) throw std::invalid_argument("write_pgm: image does not match shape");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_pgm: cannot open " + path);
  out << "P5\n" << shape.cols << " " << shape.rows << "\n255\n";
  for (Eigen::Index i = 0; i < image.size(); ++i) {
    const double v = std::clamp(image[i], 0.0, 1.0);
    out.put(static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0))));
  }
  if (!out) throw std::runtime_error("write_pgm: write failed for " + path);
}

Vector read_pgm(const std::string& path, GridShape* shape) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_pgm: cannot open " + path);
  auto next_token = [&]() {
    std::string tok;
    for (;;) {
      in >> std::ws;
      if (in.peek() == '#') {
        std::string comment;
        std::getline(in, comment);
        continue;
      }
      in >> tok;
      return tok;
    }
  };
  if (next_token() != "P5") throw std::runtime_error("read_pgm: not a binary PGM (P5): " + path);
  const long cols = std::stol(next_token());
  const long rows = std::stol(next_token());
  const long maxval = std::stol(next_token());
  if (cols <= 0 || rows <= 0 || maxval != 255) throw std::runtime_error("read_pgm: unsupported header in " + path);
  in.get();  // single whitespace before the raster
  Vector image(rows * cols);
  for (Eigen::Index i = 0; i < image.size(); ++i) {
    const int ch = in.get();
    if (ch == EOF) throw std::runtime_error("read_pgm: truncated raster in " + path);
    image[i] = static_cast<double>(ch) / 255.0;
  }
  if (shape != nullptr) *shape = {rows, cols};
  return image;
}

}  // namespace twogrid
