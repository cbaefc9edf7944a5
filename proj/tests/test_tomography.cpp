#include <cmath>
#include <filesystem>
#include <numbers>

#include <gtest/gtest.h>

#include "support.hpp"
#include "twogrid/tomography.hpp"

using namespace twogrid;

namespace {

Eigen::MatrixXd dense(const SparseMatrix& A) { return Eigen::MatrixXd(A); }

}  // namespace

TEST(Undersampling, AngleCount) {
  EXPECT_EQ(angles_for_undersampling(0.02, 128), 3);
  EXPECT_EQ(angles_for_undersampling(0.02, 64), 1);
  EXPECT_EQ(angles_for_undersampling(0.2, 64), 13);
  EXPECT_EQ(angles_for_undersampling(0.001, 64), 1);
  EXPECT_EQ(angles_for_undersampling(1.0, 32), 32);
  EXPECT_THROW(angles_for_undersampling(0.0, 64), std::invalid_argument);
  EXPECT_THROW(angles_for_undersampling(1.5, 64), std::invalid_argument);
}

TEST(ScanGeometry, AnglesAreEquispacedOnHalfCircle) {
  const auto g = ScanGeometry::for_grid({8, 8}, 4);
  EXPECT_EQ(g.detector_count, 8);
  const auto a = g.angles();
  ASSERT_EQ(a.size(), 4u);
  EXPECT_EQ(a[0], 0.0);
  EXPECT_DOUBLE_EQ(a[2], std::numbers::pi / 2);
  EXPECT_THROW(ScanGeometry::for_grid({8, 8}, 0), std::invalid_argument);
}

TEST(BuildMatrix, AxisAlignedTwoByTwo) {
  const Eigen::MatrixXd A = dense(build_matrix(ScanGeometry::for_grid({2, 2}, 2)));
  Eigen::MatrixXd expected(4, 4);
  expected << 1, 1, 0, 0,  //
      0, 0, 1, 1,          //
      0, 1, 0, 1,          //
      1, 0, 1, 0;
  EXPECT_EQ(A, expected);
}

TEST(BuildMatrix, SinglePixelChords) {
  const Eigen::MatrixXd A = dense(build_matrix(ScanGeometry::for_grid({1, 1}, 4)));
  ASSERT_EQ(A.rows(), 4);
  EXPECT_NEAR(A(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(A(1, 0), std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(A(2, 0), 1.0, 1e-15);
  EXPECT_NEAR(A(3, 0), std::sqrt(2.0), 1e-12);
}

TEST(BuildMatrix, AxisAlignedAnglesCoverEveryPixelOnce) {
  const auto g = ScanGeometry::for_grid({6, 6}, 2);
  const SparseMatrix A = build_matrix(g);
  ASSERT_EQ(A.rows(), 12);
  const Vector col_sums = A.transpose() * Vector::Ones(A.rows());
  EXPECT_LE((col_sums.array() - 2.0).abs().maxCoeff(), 1e-12);
}

TEST(BuildMatrix, RowSumsAreChordLengths) {
  // A ray at offset t and angle theta crosses a centered square of side n
  // over the same length as the segment clipped by the two slabs.
  const Eigen::Index n = 10;
  const auto g = ScanGeometry::for_grid({n, n}, 7);
  const SparseMatrix A = build_matrix(g);
  const Vector sums = A * Vector::Ones(n * n);
  EXPECT_GT(sums.minCoeff(), 0.0);
  EXPECT_LE(sums.maxCoeff(), std::sqrt(2.0) * n + 1e-9);
  for (int r = 0; r < A.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(A, r); it; ++it) {
      EXPECT_GT(it.value(), 0.0);
      EXPECT_LE(it.value(), std::sqrt(2.0) + 1e-12);
    }
  }
}

TEST(BuildMatrix, SatisfiesProblemAssumptions) {
  for (int angles : {1, 3, 13}) {
    const SparseMatrix A = build_matrix(ScanGeometry::for_grid({16, 16}, angles));
    EXPECT_NO_THROW(Problem(A, Vector::Ones(A.rows()), 0.5, 0.5, {16, 16}));
  }
}

TEST(Phantom, NamesRoundTrip) {
  for (const auto& name : phantom_names()) EXPECT_EQ(to_string(parse_phantom(name)), name);
  EXPECT_THROW(parse_phantom("shepp"), std::invalid_argument);
  EXPECT_EQ(phantom_names().size(), 6u);
}

TEST(Phantom, RangeAndDeterminism) {
  for (const auto& name : phantom_names()) {
    const PhantomKind kind = parse_phantom(name);
    const Phantom a = make_phantom(kind, 32);
    const Phantom b = make_phantom(kind, 32);
    EXPECT_EQ(a.image, b.image) << name;
    EXPECT_GE(a.image.minCoeff(), 0.0) << name;
    EXPECT_LE(a.image.maxCoeff(), 1.0) << name;
    EXPECT_GT(a.image.maxCoeff(), 0.0) << name;
    EXPECT_EQ(a.shape, (GridShape{32, 32}));
  }
}

TEST(Phantom, SeedMattersForRandomKinds) {
  EXPECT_NE(make_phantom(PhantomKind::Disks, 32, 1).image, make_phantom(PhantomKind::Disks, 32, 2).image);
  EXPECT_NE(make_phantom(PhantomKind::Blob, 32, 1).image, make_phantom(PhantomKind::Blob, 32, 2).image);
  EXPECT_EQ(make_phantom(PhantomKind::Annulus, 32, 1).image, make_phantom(PhantomKind::Annulus, 32, 2).image);
}

TEST(Phantom, AnnulusValues) {
  const Phantom ph = make_phantom(PhantomKind::Annulus, 64);
  EXPECT_EQ(ph.image[32 * 64 + 32], 0.6);  // center
  EXPECT_EQ(ph.image[0], 0.0);             // corner
  EXPECT_EQ(ph.image[32 * 64 + 52], 1.0);  // radius ~0.64
  EXPECT_THROW(make_phantom(PhantomKind::Annulus, 4), std::invalid_argument);
}

TEST(Synthesize, DataMatchesPhantomAndRebuildsCoarseOperator) {
  const Phantom ph = make_phantom(PhantomKind::Mixed, 16);
  const Problem pb = synthesize(ph, 0.2, 0.5, 0.5);
  const auto g = ScanGeometry::for_grid(ph.shape, 3);
  EXPECT_EQ(pb.num_rays(), build_matrix(g).rows());
  EXPECT_LE((pb.b() - pb.A() * BoxPoint(ph.image).values()).norm(), 1e-12);
  ASSERT_TRUE(static_cast<bool>(pb.factory()));
  const SparseMatrix coarse = pb.factory()({8, 8});
  EXPECT_EQ(coarse.cols(), 64);
  EXPECT_EQ(Eigen::MatrixXd(coarse), dense(build_matrix(ScanGeometry::for_grid({8, 8}, 3))));
  // Exact data: the clipped phantom has zero data misfit.
  EXPECT_NEAR(data_term(pb, BoxPoint(ph.image)), 0.0, 1e-9);
}

TEST(Pgm, RoundTripQuantized) {
  const auto path = std::filesystem::temp_directory_path() / "twogrid_test.pgm";
  const Phantom ph = make_phantom(PhantomKind::Blob, 16);
  write_pgm(path.string(), ph.image, ph.shape);
  GridShape shape;
  const Vector back = read_pgm(path.string(), &shape);
  EXPECT_EQ(shape, ph.shape);
  EXPECT_LE((back - ph.image).lpNorm<Eigen::Infinity>(), 0.5 / 255 + 1e-12);
  std::filesystem::remove(path);
  EXPECT_THROW(read_pgm(path.string(), nullptr), std::runtime_error);
}
