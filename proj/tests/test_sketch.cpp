#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "rsipm/rng.hpp"
#include "rsipm/sketch.hpp"
#include "rsipm/svd.hpp"
#include "rsipm/types.hpp"

using namespace rsipm;

namespace {

// dense copy of a realized sketch, either kind
Mat densify(const SketchMatrix& W) {
  if (W.kind == SketchKind::Gaussian) return W.dense;
  Mat D = Mat::Zero(W.n, W.w);
  for (int i = 0; i < W.n; ++i)
    for (int k = 0; k < W.s; ++k)
      D(i, W.cols[std::size_t(i) * W.s + k]) += W.vals[std::size_t(i) * W.s + k];
  return D;
}

SketchMatrix identity_sketch(int n) {
  SketchMatrix W;
  W.kind = SketchKind::Gaussian;
  W.n = n;
  W.w = n;
  W.dense = Mat::Identity(n, n);
  return W;
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

Mat random_orthonormal_rows(int m, int n, std::uint64_t seed) {
  Rng rng(seed);
  Mat M(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) M(i, j) = rng.normal();
  return thin_svd(M).Vt;
}

}  // namespace

TEST_CASE("build_sketch: s=1 rows carry a single +-1 entry") {
  SketchSpec sp;
  sp.w = 4;
  sp.s = 1;
  sp.seed = 7;
  const SketchMatrix W = build_sketch(4, sp);
  REQUIRE(W.cols.size() == 4);
  REQUIRE(W.vals.size() == 4);
  for (double v : W.vals) CHECK(std::abs(v) == 1.0);
  for (auto c : W.cols) {
    CHECK(c >= 0);
    CHECK(c < 4);
  }
}

TEST_CASE("build_sketch: sparse rows have s distinct columns, values +-1/sqrt(s)") {
  SketchSpec sp;
  sp.w = 64;
  sp.s = 8;
  sp.seed = 2;
  const SketchMatrix W = build_sketch(300, sp);
  const double mag = 1.0 / std::sqrt(8.0);
  for (int i = 0; i < 300; ++i) {
    std::set<int> seen;
    for (int k = 0; k < 8; ++k) {
      const int c = W.cols[std::size_t(i) * 8 + k];
      CHECK(c >= 0);
      CHECK(c < 64);
      seen.insert(c);
      CHECK(std::abs(W.vals[std::size_t(i) * 8 + k]) == doctest::Approx(mag).epsilon(1e-15));
    }
    CHECK(seen.size() == 8);
  }
}

TEST_CASE("build_sketch: column occupancy stays balanced") {
  SketchSpec sp;
  sp.w = 200;
  sp.s = 8;
  sp.seed = 0;
  const SketchMatrix W = build_sketch(1000, sp);
  std::vector<int> hist(200, 0);
  for (auto c : W.cols) hist[c]++;
  const auto [lo, hi] = std::minmax_element(hist.begin(), hist.end());
  CHECK(*lo > 0);
  CHECK(double(*hi) / double(*lo) < 3.0);
}

TEST_CASE("build_sketch: gaussian entries have the right scale") {
  SketchSpec sp;
  sp.kind = SketchKind::Gaussian;
  sp.w = 50;
  sp.seed = 0;
  const SketchMatrix W = build_sketch(100, sp);
  REQUIRE(W.dense.rows() == 100);
  REQUIRE(W.dense.cols() == 50);
  // sample mean of 5000 N(0, 1/50) draws: 3 standard errors
  const double bound = 3.0 * (1.0 / std::sqrt(50.0)) / std::sqrt(100.0 * 50.0);
  CHECK(std::abs(W.dense.mean()) <= bound);
  // second moment within 10% of 1/w
  CHECK(std::abs(W.dense.array().square().mean() * 50.0 - 1.0) <= 0.1);
}

TEST_CASE("build_sketch: deterministic for a fixed spec") {
  SketchSpec sp;
  sp.w = 32;
  sp.s = 4;
  sp.seed = 99;
  const SketchMatrix a = build_sketch(120, sp);
  const SketchMatrix b = build_sketch(120, sp);
  CHECK(a.cols == b.cols);
  CHECK(a.vals == b.vals);

  sp.kind = SketchKind::Gaussian;
  const SketchMatrix c = build_sketch(120, sp);
  const SketchMatrix d = build_sketch(120, sp);
  CHECK(c.dense == d.dense);
}

TEST_CASE("build_sketch: rows of WW' have unit diagonal on average") {
  // sparse kind: exactly 1 per row by construction, every seed
  SketchSpec sp;
  sp.w = 40;
  sp.s = 8;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    sp.seed = seed;
    const Mat D = densify(build_sketch(90, sp));
    CHECK((D * D.transpose()).diagonal().mean() == doctest::Approx(1.0).epsilon(1e-12));
  }
  // gaussian kind: 1 in expectation; average over 50 seeds within 2%
  SketchSpec g;
  g.kind = SketchKind::Gaussian;
  g.w = 50;
  double acc = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    g.seed = seed;
    const SketchMatrix W = build_sketch(100, g);
    acc += (W.dense * W.dense.transpose()).diagonal().mean();
  }
  CHECK(std::abs(acc / 50.0 - 1.0) <= 0.02);
}

TEST_CASE("build_sketch: rejects bad sizes") {
  SketchSpec sp;
  sp.w = 0;
  CHECK_THROWS_AS(build_sketch(10, sp), std::invalid_argument);
  sp.w = 8;
  sp.s = 0;
  CHECK_THROWS_AS(build_sketch(10, sp), std::invalid_argument);
  sp.s = 9;  // s > w
  CHECK_THROWS_AS(build_sketch(10, sp), std::invalid_argument);
}

TEST_CASE("apply_sketch_right: hand-checkable selector") {
  // n=3 rows mapped to w=2 buckets with signs (+, -, +)
  SketchMatrix W;
  W.kind = SketchKind::SparseEmbedding;
  W.n = 3;
  W.w = 2;
  W.s = 1;
  W.cols = {0, 1, 0};
  W.vals = {1.0, -1.0, 1.0};

  SpMat A(2, 3);
  std::vector<Eigen::Triplet<double>> t{
      {0, 0, 1.0}, {0, 1, 2.0}, {0, 2, 3.0}, {1, 0, 4.0}, {1, 2, 5.0}};
  A.setFromTriplets(t.begin(), t.end());
  Vec d(3);
  d << 1.0, 1.0, 2.0;

  const Mat B = apply_sketch_right(A, d, W);
  REQUIRE(B.rows() == 2);
  REQUIRE(B.cols() == 2);
  // column 0 collects rows 0 and 2 of diag(d) scaled A columns; column 1 is -col 1
  CHECK(B(0, 0) == doctest::Approx(1.0 + 6.0).epsilon(1e-15));
  CHECK(B(0, 1) == doctest::Approx(-2.0).epsilon(1e-15));
  CHECK(B(1, 0) == doctest::Approx(4.0 + 10.0).epsilon(1e-15));
  CHECK(B(1, 1) == doctest::Approx(0.0));
}

TEST_CASE("apply_sketch_right: zero scaling gives the zero matrix") {
  const SpMat A = random_sparse(4, 20, 0.4, 31);
  SketchSpec sp;
  sp.w = 8;
  sp.s = 3;
  const SketchMatrix W = build_sketch(20, sp);
  CHECK(apply_sketch_right(A, Vec::Zero(20), W).norm() == 0.0);
}

TEST_CASE("apply_sketch_right: agrees with the dense triple product") {
  const SpMat A = random_sparse(5, 40, 0.35, 41);
  Rng rng(42);
  Vec d(40);
  for (int j = 0; j < 40; ++j) d[j] = std::exp(rng.normal());

  SketchSpec sp;
  sp.w = 10;
  sp.s = 3;
  sp.seed = 4;
  const SketchMatrix W = build_sketch(40, sp);
  const Mat ref = Mat(A) * d.asDiagonal() * densify(W);
  CHECK((apply_sketch_right(A, d, W) - ref).norm() <= 1e-12 * (1.0 + ref.norm()));

  SketchSpec g;
  g.kind = SketchKind::Gaussian;
  g.w = 6;
  g.seed = 5;
  const SketchMatrix Wg = build_sketch(40, g);
  const Mat refg = Mat(A) * d.asDiagonal() * Wg.dense;
  CHECK((apply_sketch_right(A, d, Wg) - refg).norm() <= 1e-12 * (1.0 + refg.norm()));
}

TEST_CASE("apply_sketch_vec agrees with the dense product") {
  SketchSpec sp;
  sp.w = 12;
  sp.s = 4;
  sp.seed = 8;
  const SketchMatrix W = build_sketch(30, sp);
  Rng rng(9);
  Vec u(12);
  for (int k = 0; k < 12; ++k) u[k] = rng.normal();
  const Vec ref = densify(W) * u;
  CHECK((apply_sketch_vec(W, u) - ref).norm() <= 1e-12 * (1.0 + ref.norm()));

  SketchSpec g;
  g.kind = SketchKind::Gaussian;
  g.w = 12;
  g.seed = 8;
  const SketchMatrix Wg = build_sketch(30, g);
  const Vec refg = Wg.dense * u;
  CHECK((apply_sketch_vec(Wg, u) - refg).norm() <= 1e-12 * (1.0 + refg.norm()));
}

TEST_CASE("embedding_quality: exact for a perfectly isometric sketch") {
  const Mat Z = random_orthonormal_rows(3, 8, 51);
  CHECK(embedding_quality(Z, identity_sketch(8)) <= 1e-12);
}

TEST_CASE("embedding_quality: rejects non-orthonormal rows") {
  const Mat Z = 2.0 * random_orthonormal_rows(3, 8, 52);
  CHECK_THROWS_AS(embedding_quality(Z, identity_sketch(8)), std::invalid_argument);
}

TEST_CASE("embedding_quality: improves as the sketch widens") {
  const Mat Z = random_orthonormal_rows(8, 400, 77);
  double mean64 = 0.0, mean256 = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SketchSpec sp;
    sp.s = 8;
    sp.seed = seed;
    sp.w = 64;
    mean64 += embedding_quality(Z, build_sketch(400, sp));
    sp.w = 256;
    mean256 += embedding_quality(Z, build_sketch(400, sp));
  }
  CHECK(mean256 < mean64);
  CHECK(mean256 / 10.0 < 0.5);
}

TEST_CASE("embedding_quality: default width meets the premise, m breadth does not") {
  const Mat Z = random_orthonormal_rows(10, 2000, 99);
  SketchSpec sp;
  sp.s = 8;
  sp.w = default_sketch_width(10, 2000);
  int wide_ok = 0, narrow_bad = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    sp.seed = seed;
    if (embedding_quality(Z, build_sketch(2000, sp)) <= 0.5) ++wide_ok;
  }
  sp.w = 10;  // as narrow as the preconditioner allows
  sp.s = 8;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    sp.seed = seed;
    if (embedding_quality(Z, build_sketch(2000, sp)) > 0.5) ++narrow_bad;
  }
  CHECK(wide_ok >= 19);
  CHECK(narrow_bad >= 18);
}

TEST_CASE("default_sketch_width: sane sizing") {
  CHECK(default_sketch_width(20, 2000) >= 40);
  CHECK(default_sketch_width(20, 2000) <= 2000);
  CHECK(default_sketch_width(500, 100) == 100);  // capped at n
  CHECK(default_sketch_width(40, 100000) >= default_sketch_width(20, 100000));
  CHECK(default_sketch_width(1, 50) >= 2);
}
