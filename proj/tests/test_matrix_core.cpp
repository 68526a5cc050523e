#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/QR>
#include <cmath>

#include "rsipm/rng.hpp"
#include "rsipm/svd.hpp"
#include "rsipm/types.hpp"

using namespace rsipm;

namespace {

Mat random_mat(int rows, int cols, std::uint64_t seed) {
  Rng rng(seed);
  Mat M(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) M(i, j) = rng.normal();
  return M;
}

SpMat random_sparse(int rows, int cols, double density, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Eigen::Triplet<double>> t;
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      if (rng.uniform() < density) t.emplace_back(i, j, rng.normal());
  SpMat A(rows, cols);
  A.setFromTriplets(t.begin(), t.end());
  return A;
}

}  // namespace

TEST_CASE("thin_svd: identity padded with zero columns") {
  Mat M = Mat::Zero(3, 5);
  M.leftCols(3) = Mat::Identity(3, 3);
  const ThinSvd r = thin_svd(M);
  REQUIRE(r.sigma.size() == 3);
  for (int i = 0; i < 3; ++i) CHECK(r.sigma[i] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((r.U * r.sigma.asDiagonal() * r.Vt - M).norm() <= 1e-12);
}

TEST_CASE("thin_svd: diagonal values come out sorted") {
  Mat M = Mat::Zero(2, 4);
  M(0, 0) = 3.0;  // deliberately smaller first
  M(1, 1) = 4.0;
  const ThinSvd r = thin_svd(M);
  CHECK(r.sigma[0] == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(r.sigma[1] == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("thin_svd: random 4x10 reconstruction and orthonormality") {
  const Mat M = random_mat(4, 10, 17);
  const ThinSvd r = thin_svd(M);
  CHECK((r.U * r.sigma.asDiagonal() * r.Vt - M).norm() <= 1e-10);
  CHECK((r.U.transpose() * r.U - Mat::Identity(4, 4)).norm() <= 1e-10);
  CHECK((r.Vt * r.Vt.transpose() - Mat::Identity(4, 4)).norm() <= 1e-10);
  for (int i = 1; i < 4; ++i) CHECK(r.sigma[i] <= r.sigma[i - 1]);
  CHECK(r.sigma.minCoeff() >= 0.0);
}

TEST_CASE("thin_svd: deterministic sign convention") {
  const Mat M = random_mat(5, 12, 3);
  const ThinSvd a = thin_svd(M);
  const ThinSvd b = thin_svd(M);
  CHECK(a.U == b.U);
  CHECK(a.Vt == b.Vt);
  // first nonzero entry of each left singular vector is nonnegative
  for (int j = 0; j < a.U.cols(); ++j) {
    for (int i = 0; i < a.U.rows(); ++i) {
      if (a.U(i, j) != 0.0) {
        CHECK(a.U(i, j) > 0.0);
        break;
      }
    }
  }
}

TEST_CASE("thin_svd: rejects tall and non-finite input") {
  CHECK_THROWS_AS(thin_svd(Mat::Zero(5, 3)), std::invalid_argument);
  Mat M = Mat::Ones(2, 4);
  M(1, 2) = std::nan("");
  CHECK_THROWS_AS(thin_svd(M), std::invalid_argument);
}

TEST_CASE("sym_eig_extremes: identity and diagonal") {
  auto [lo1, hi1] = sym_eig_extremes(Mat::Identity(4, 4));
  CHECK(lo1 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(hi1 == doctest::Approx(1.0).epsilon(1e-12));

  Mat D = Mat::Zero(2, 2);
  D(0, 0) = 1.0;
  D(1, 1) = 10.0;
  auto [lo2, hi2] = sym_eig_extremes(D);
  CHECK(lo2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(hi2 == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("sym_eig_extremes: matches spectrum planted via orthogonal conjugation") {
  // B = Q diag(lam) Q' has known extremes by construction.
  const Mat G = random_mat(6, 6, 21);
  const Mat Q = Eigen::HouseholderQR<Mat>(G).householderQ();
  Vec lam(6);
  lam << 0.5, 1.1, 2.0, 3.7, 8.0, 20.0;
  const Mat B = Q * lam.asDiagonal() * Q.transpose();
  auto [lo, hi] = sym_eig_extremes(0.5 * (B + B.transpose()));
  CHECK(lo == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(hi == doctest::Approx(20.0).epsilon(1e-9));
}

TEST_CASE("sym_eig_extremes: rejects asymmetric input") {
  Mat B(2, 2);
  B << 0.0, 1.0, 2.0, 0.0;
  CHECK_THROWS_AS(sym_eig_extremes(B), std::invalid_argument);
}

TEST_CASE("sym_eig_extremes: brackets every Rayleigh quotient") {
  Mat B = random_mat(8, 8, 5);
  B = 0.5 * (B + B.transpose()).eval();
  auto [lo, hi] = sym_eig_extremes(B);
  Rng rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    Vec v(8);
    for (int i = 0; i < 8; ++i) v[i] = rng.normal();
    const double r = v.dot(B * v) / v.squaredNorm();
    CHECK(r >= lo - 1e-10);
    CHECK(r <= hi + 1e-10);
  }
}

TEST_CASE("sparse products match dense reference") {
  const SpMat A = random_sparse(6, 40, 0.3, 9);
  const Mat Ad = Mat(A);
  Rng rng(10);
  Vec x(40), y(6);
  for (int j = 0; j < 40; ++j) x[j] = rng.normal();
  for (int i = 0; i < 6; ++i) y[i] = rng.normal();

  CHECK((A * x - Ad * x).norm() <= 1e-12 * (1.0 + (Ad * x).norm()));
  CHECK((A.transpose() * y - Ad.transpose() * y).norm() <=
        1e-12 * (1.0 + (Ad.transpose() * y).norm()));
}

TEST_CASE("sparse products: identity, zero, adjacency of the adjoint") {
  SpMat I(5, 5);
  I.setIdentity();
  Vec x(5);
  x << 1, -2, 3, 0.5, -0.25;
  CHECK(Vec(I * x) == x);

  const SpMat Z(3, 7);  // all-zero matrix
  CHECK(Vec(Z * Vec::Ones(7)).norm() == 0.0);

  // y'(Ax) == x'(A'y) for random A, x, y
  const SpMat A = random_sparse(4, 9, 0.5, 12);
  Rng rng(13);
  Vec u(9), v(4);
  for (int j = 0; j < 9; ++j) u[j] = rng.normal();
  for (int i = 0; i < 4; ++i) v[i] = rng.normal();
  const double lhs = v.dot(A * u);
  const double rhs = u.dot(A.transpose() * v);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}
