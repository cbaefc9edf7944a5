#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "support.hpp"
#include "twogrid/objective.hpp"

using namespace twogrid;

namespace {

Problem random_problem(std::mt19937_64& rng, Eigen::Index p, GridShape shape, double lambda = 0.5) {
  SparseMatrix A = testutil::random_operator(rng, p, shape.size());
  Vector b = testutil::random_vector(rng, p, 0.5, 3.0);
  return Problem(std::move(A), std::move(b), lambda, 0.5, shape);
}

SparseMatrix identity(Eigen::Index n) {
  SparseMatrix I(n, n);
  I.setIdentity();
  return I;
}

}  // namespace

TEST(Problem, ValidatesAssumptions) {
  SparseMatrix A = identity(2);
  EXPECT_NO_THROW(Problem(A, Vector::Ones(2), 0.5, 0.5, {1, 2}));
  EXPECT_THROW(Problem(A, Vector::Zero(2), 0.5, 0.5, {1, 2}), std::invalid_argument);
  EXPECT_THROW(Problem(A, Vector::Ones(2), -1.0, 0.5, {1, 2}), std::invalid_argument);
  EXPECT_THROW(Problem(A, Vector::Ones(2), 0.5, 0.0, {1, 2}), std::invalid_argument);
  EXPECT_THROW(Problem(A, Vector::Ones(2), 0.5, 0.5, {1, 3}), std::invalid_argument);
  SparseMatrix zero_row(2, 2);
  zero_row.insert(0, 0) = 1.0;
  EXPECT_THROW(Problem(zero_row, Vector::Ones(2), 0.5, 0.5, {1, 2}), std::invalid_argument);
  SparseMatrix negative = identity(2);
  negative.coeffRef(1, 0) = -0.1;
  EXPECT_THROW(Problem(negative, Vector::Ones(2), 0.5, 0.5, {1, 2}), std::invalid_argument);
}

TEST(KlDiv, Examples) {
  Vector u(1), w(1);
  u << 2.0;
  w << 1.0;
  EXPECT_NEAR(kl_div(u, w), 0.3862943611198906, 1e-15);
  EXPECT_NEAR(kl_div(w, u), 0.3068528194400547, 1e-15);
  EXPECT_EQ(kl_div(u, u), 0.0);
  EXPECT_THROW(kl_div(Vector::Zero(1), w), std::invalid_argument);
}

TEST(KlDiv, NonnegativeOnRandomPairs) {
  std::mt19937_64 rng(21);
  for (int k = 0; k < 100; ++k) {
    EXPECT_GE(kl_div(testutil::random_vector(rng, 7, 0.01, 5), testutil::random_vector(rng, 7, 0.01, 5)), 0.0);
  }
}

TEST(DataTerm, ScalarExample) {
  Vector b(1);
  b << 1.0;
  const Problem pb(identity(1), b, 0.5, 0.5, {1, 1});
  const BoxPoint y = BoxPoint::constant(1, 0.5);
  EXPECT_NEAR(data_term(pb, y), 0.1534264097200273, 1e-15);
  EXPECT_NEAR(data_grad(pb, y)[0], std::log(0.5), 1e-15);
}

TEST(DataTerm, VanishesAtData) {
  std::mt19937_64 rng(22);
  const SparseMatrix A = testutil::random_operator(rng, 6, 9);
  const BoxPoint y = testutil::random_point(rng, 9);
  const Problem pb(A, A * y.values(), 0.0, 0.5, {3, 3});
  EXPECT_NEAR(data_term(pb, y), 0.0, 1e-13);
  EXPECT_LE(data_grad(pb, y).norm(), 1e-13);
}

TEST(SmoothedTv, Examples) {
  EXPECT_EQ(smoothed_tv(Vector::Constant(12, 0.3), {3, 4}, 0.5), 0.0);
  EXPECT_EQ(smoothed_tv_grad(Vector::Constant(12, 0.3), {3, 4}, 0.5).norm(), 0.0);
  Vector img(2);
  img << 0.2, 0.8;
  // One vertical difference of 0.6 in a 2x1 image.
  EXPECT_NEAR(smoothed_tv(img, {2, 1}, 0.5), std::sqrt(0.36 + 0.25) - 0.5, 1e-15);
  EXPECT_NEAR(smoothed_tv(img, {2, 1}, 0.5), 0.2810249675906654, 1e-15);
}

TEST(SmoothedTv, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(23);
  const GridShape s{8, 8};
  const Vector img = testutil::random_vector(rng, 64, 0, 1);
  const Vector g = smoothed_tv_grad(img, s, 0.5);
  for (int k = 0; k < 5; ++k) {
    const Vector d = testutil::random_vector(rng, 64, -1, 1);
    const double fd =
        testutil::directional_fd([&](const Vector& v) { return smoothed_tv(v, s, 0.5); }, img, d, 1e-6);
    EXPECT_NEAR(fd, g.dot(d), 1e-5 * std::abs(g.dot(d)));
  }
}

TEST(Objective, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(24);
  const Problem pb = random_problem(rng, 6, {3, 3});
  const BoxPoint y = testutil::random_point(rng, 9, 0.1);
  const ObjectiveEval e = objective(pb, y);
  for (int k = 0; k < 5; ++k) {
    const Vector d = testutil::random_vector(rng, 9, -1, 1);
    const double fd = testutil::directional_fd([&](const Vector& v) { return objective(pb, BoxPoint(v)).value; },
                                              y.values(), d, 1e-6);
    EXPECT_NEAR(fd, e.eucl_grad.dot(d), 1e-5 * std::abs(e.eucl_grad.dot(d)));
  }
}

TEST(Objective, SumOfParts) {
  std::mt19937_64 rng(25);
  const Problem pb = random_problem(rng, 10, {4, 4});
  const BoxPoint y = testutil::random_point(rng, 16);
  const ObjectiveEval e = objective(pb, y);
  EXPECT_NEAR(e.value, data_term(pb, y) + 0.5 * smoothed_tv(pb, y), 1e-12);
  EXPECT_LE((e.eucl_grad - data_grad(pb, y) - 0.5 * smoothed_tv_grad(pb, y)).norm(), 1e-12);
  const Problem no_reg = random_problem(rng, 10, {4, 4}, 0.0);
  EXPECT_EQ(objective(no_reg, y).value, data_term(no_reg, y));
}

TEST(Objective, ZeroAtConstantExactData) {
  std::mt19937_64 rng(26);
  const SparseMatrix A = testutil::random_operator(rng, 5, 4);
  const BoxPoint y = BoxPoint::constant(4, 0.4);
  const Problem pb(A, A * y.values(), 0.5, 0.5, {2, 2});
  EXPECT_NEAR(objective(pb, y).value, 0.0, 1e-14);
}

TEST(Objective, ConvexAlongSegments) {
  std::mt19937_64 rng(27);
  const Problem pb = random_problem(rng, 12, {4, 4});
  for (int k = 0; k < 20; ++k) {
    const BoxPoint y1 = testutil::random_point(rng, 16), y2 = testutil::random_point(rng, 16);
    const double f1 = objective(pb, y1).value, f2 = objective(pb, y2).value;
    for (double t : {0.25, 0.5, 0.75}) {
      const BoxPoint yt(t * y1.values() + (1 - t) * y2.values());
      EXPECT_LE(objective(pb, yt).value, t * f1 + (1 - t) * f2 + 1e-10);
    }
  }
}

TEST(BregmanF, MatchesDefinitionAndIgnoresData) {
  std::mt19937_64 rng(28);
  const Problem pb = random_problem(rng, 8, {3, 3});
  const BoxPoint x = testutil::random_point(rng, 9), x0 = testutil::random_point(rng, 9);
  EXPECT_EQ(bregman_f(pb, x0, x0), 0.0);
  const ObjectiveEval e0 = objective(pb, x0);
  const double direct = objective(pb, x).value - e0.value - e0.eucl_grad.dot(x.values() - x0.values());
  EXPECT_NEAR(bregman_f(pb, x, x0), direct, 1e-10);
  const Problem other = pb.with_data(testutil::random_vector(rng, 8, 0.1, 9.0));
  EXPECT_NEAR(bregman_f(other, x, x0), bregman_f(pb, x, x0), 1e-12);
  EXPECT_GE(bregman_f(pb, x, x0), 0.0);
}

TEST(BregmanF, ThreePointIdentity) {
  std::mt19937_64 rng(29);
  for (int k = 0; k < 20; ++k) {
    const Vector a = testutil::random_vector(rng, 5, 0.1, 4), b = testutil::random_vector(rng, 5, 0.1, 4),
                 c = testutil::random_vector(rng, 5, 0.1, 4);
    const double lhs = kl_div(c, a) + kl_div(a, b) - kl_div(c, b);
    const Vector grad_b = b.array().log(), grad_a = a.array().log();
    EXPECT_NEAR(lhs, (grad_b - grad_a).dot(c - a), 1e-10);
  }
}

TEST(WithData, ReplacesOnlyData) {
  std::mt19937_64 rng(30);
  const Problem pb = random_problem(rng, 4, {2, 2});
  const Problem q = pb.with_data(Vector::Constant(4, 2.0));
  EXPECT_EQ(&q.A(), &pb.A());
  EXPECT_EQ(q.b()[0], 2.0);
  EXPECT_THROW(pb.with_data(Vector::Zero(4)), std::invalid_argument);
  EXPECT_THROW(pb.with_data(Vector::Ones(3)), std::invalid_argument);
}

TEST(EvalAtLevel, BuildsCoarseOperator) {
  const Problem fine = testutil::tomo_problem(16, 4);
  const GridHierarchy h(fine.shape());
  const Problem coarse = eval_at_level(fine, h);
  EXPECT_EQ(coarse.num_pixels(), fine.num_pixels() / 4);
  EXPECT_EQ(coarse.shape(), h.coarse_shape());
  EXPECT_EQ(coarse.lambda(), fine.lambda());
  EXPECT_EQ(coarse.rho(), fine.rho());
  // Assumption (A) is checked by the constructor; verify row support explicitly too.
  for (int r = 0; r < coarse.A().outerSize(); ++r) {
    double row = 0.0;
    for (SparseMatrix::InnerIterator it(coarse.A(), r); it; ++it) {
      EXPECT_GE(it.value(), 0.0);
      row += it.value();
    }
    EXPECT_GT(row, 0.0);
  }
}

TEST(EvalAtLevel, RequiresFactoryAndMatchingHierarchy) {
  std::mt19937_64 rng(31);
  const Problem pb = random_problem(rng, 6, {4, 4});
  EXPECT_THROW(eval_at_level(pb, GridHierarchy({4, 4})), std::invalid_argument);
  const Problem tomo = testutil::tomo_problem(16, 2);
  EXPECT_THROW(eval_at_level(tomo, GridHierarchy({8, 8})), std::invalid_argument);
}
