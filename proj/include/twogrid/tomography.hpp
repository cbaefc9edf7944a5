#pragma once

// Synthetic 2-D parallel-beam tomography.
//
// The image occupies [-cols/2, cols/2] x [-rows/2, rows/2] with unit pixels;
// pixel (r, c) covers x in [c - cols/2, c + 1 - cols/2) and
// y in [r - rows/2, r + 1 - rows/2). Ray (k, s) has direction
// (cos t_k, sin t_k), t_k = k pi / K, and offset (s - (D - 1)/2) along the
// detector normal (-sin t_k, cos t_k), with D detectors of unit spacing
// centered on the image.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "twogrid/objective.hpp"

namespace twogrid {

struct ScanGeometry {
  GridShape grid;
  int num_angles = 1;
  int detector_count = 1;

  /// Detector width equals the grid side length.
  static ScanGeometry for_grid(GridShape grid, int num_angles);
  std::vector<double> angles() const;
  void validate() const;
};

/// max(1, round(fraction * grid_side)).
int angles_for_undersampling(double fraction, Eigen::Index grid_side);

/// A_ij = length of ray i inside pixel j. Rays that miss the image are
/// dropped; rows are ordered angle-major, detector-minor.
SparseMatrix build_matrix(const ScanGeometry& g);

enum class PhantomKind { Disks, Annulus, Bars, Checker, Blob, Mixed };

const std::vector<std::string>& phantom_names();
PhantomKind parse_phantom(std::string_view name);
std::string_view to_string(PhantomKind kind);

struct Phantom {
  PhantomKind kind;
  GridShape shape;
  Vector image;  ///< row-major, values in [0, 1]
};

/// Deterministic for (kind, size, seed). Throws for size < 8.
Phantom make_phantom(PhantomKind kind, Eigen::Index size, std::uint64_t seed = 7);

/// Problem with b = A clip(phantom) and an operator factory that rebuilds A
/// with the same angle count on any grid.
Problem synthesize(const ScanGeometry& g, const Phantom& phantom, double lambda, double rho);

/// Geometry with angles_for_undersampling(undersampling, side) angles.
Problem synthesize(const Phantom& phantom, double undersampling, double lambda, double rho);

void write_pgm(const std::string& path, const Vector& image, const GridShape& shape);
Vector read_pgm(const std::string& path, GridShape* shape);

}  // namespace twogrid
