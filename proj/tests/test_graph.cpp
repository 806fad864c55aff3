#include <catch2/catch_amalgamated.hpp>

#include "test_support.hpp"

using namespace netred;
using netred::testing::randomTree;

namespace {

NetworkTopology twoVertex(double w12, double w21) {
  std::map<std::pair<int, int>, double> weights;
  if (w12 > 0.0) weights[{0, 1}] = w12;
  if (w21 > 0.0) weights[{1, 0}] = w21;
  return makeTopology(2, weights, Mat::Zero(2, 1), Mat::Zero(1, 2));
}

}  // namespace

TEST_CASE("Laplacian of a symmetric single edge") {
  const Mat l = buildLaplacian(twoVertex(1.0, 1.0));
  Mat expected(2, 2);
  expected << 1, -1, -1, 1;
  REQUIRE(maxAbs(l - expected) == 0.0);
}

TEST_CASE("Laplacian of a one-directional edge") {
  const Mat l = buildLaplacian(twoVertex(2.0, 0.0));
  Mat expected(2, 2);
  expected << 2, -2, 0, 0;
  REQUIRE(maxAbs(l - expected) == 0.0);
}

TEST_CASE("Laplacian of the corridor path") {
  const double w = 1.0 / 16e-3;
  const NetworkTopology topo = testing::pathTopology(6, 2, 2, w);
  const Mat l = buildLaplacian(topo);
  Vec diag(6);
  diag << 62.5, 125, 125, 125, 125, 62.5;
  REQUIRE(maxAbs(Mat(l.diagonal().asDiagonal()) - Mat(diag.asDiagonal())) <
          1e-12);
  REQUIRE(maxAbs(l * Vec::Ones(6)) == 0.0);
}

TEST_CASE("underlying undirected edges") {
  CHECK(underlyingUndirectedEdges(twoVertex(2.0, 0.0)) ==
        std::vector<std::pair<int, int>>{{0, 1}});
  CHECK(underlyingUndirectedEdges(twoVertex(0.0, 0.0)).empty());
  const auto corridor = underlyingUndirectedEdges(testing::pathTopology(6, 2, 2));
  const std::vector<std::pair<int, int>> expected{{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}};
  CHECK(corridor == expected);
}

TEST_CASE("tree predicate") {
  CHECK(isTree(testing::pathTopology(6, 2, 2)));
  std::map<std::pair<int, int>, double> triangle{
      {{0, 1}, 1.0}, {{1, 2}, 1.0}, {{2, 0}, 1.0}};
  CHECK_FALSE(isTree(makeTopology(3, triangle, Mat(), Mat())));
  CHECK_FALSE(isTree(makeTopology(2, {}, Mat(), Mat())));
}

TEST_CASE("directed rooted spanning tree") {
  // w_12 = 2 means vertex 1 listens to vertex 2: edge 2 -> 1, root 2.
  CHECK(hasDirectedRootedSpanningTree(twoVertex(2.0, 0.0)));
  CHECK(hasDirectedRootedSpanningTree(testing::pathTopology(6, 2, 2)));
  // 3-path where only the middle vertex is heard: w_12 > 0 and w_32 > 0.
  std::map<std::pair<int, int>, double> inward{{{0, 1}, 1.0}, {{2, 1}, 1.0}};
  CHECK(hasDirectedRootedSpanningTree(makeTopology(3, inward, Mat(), Mat())));
  // Mirror image: middle vertex listens to both ends, the ends hear nothing.
  std::map<std::pair<int, int>, double> outward{{{1, 0}, 1.0}, {{1, 2}, 1.0}};
  CHECK_FALSE(hasDirectedRootedSpanningTree(makeTopology(3, outward, Mat(), Mat())));
}

TEST_CASE("factorization of a symmetric edge") {
  const EdgeFactorization fac = factorize(twoVertex(1.0, 1.0));
  Mat e(2, 1), f(2, 1);
  e << 1, -1;
  f << 1, -1;
  CHECK(maxAbs(fac.e_mat - e) == 0.0);
  CHECK(maxAbs(fac.f_mat - f) == 0.0);
  CHECK(fac.edge_laplacian(0, 0) == 2.0);
  CHECK(fac.nu(0) == Catch::Approx(0.5).margin(1e-12));
  CHECK(fac.nu(1) == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("factorization with an absorbing root") {
  const EdgeFactorization fac = factorize(twoVertex(2.0, 0.0));
  Mat f(2, 1);
  f << 2, 0;
  CHECK(maxAbs(fac.f_mat - f) == 0.0);
  CHECK(fac.edge_laplacian(0, 0) == 2.0);
  CHECK(fac.nu(0) == Catch::Approx(0.0).margin(1e-12));
  CHECK(fac.nu(1) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("factorize rejects Assumption violations") {
  std::map<std::pair<int, int>, double> triangle{
      {{0, 1}, 1.0}, {{1, 0}, 1.0}, {{1, 2}, 1.0},
      {{2, 1}, 1.0}, {{2, 0}, 1.0}, {{0, 2}, 1.0}};
  CHECK_THROWS_AS(factorize(makeTopology(3, triangle, Mat(), Mat())),
                  AssumptionViolation);
  std::map<std::pair<int, int>, double> outward{{{1, 0}, 1.0}, {{1, 2}, 1.0}};
  CHECK_THROWS_AS(factorize(makeTopology(3, outward, Mat(), Mat())),
                  AssumptionViolation);
}

TEST_CASE("single-vertex network degenerates gracefully") {
  const NetworkTopology topo = makeTopology(1, {}, Mat(), Mat());
  CHECK(isTree(topo));
  const EdgeFactorization fac = factorize(topo);
  CHECK(fac.edge_laplacian.rows() == 0);
  CHECK(fac.nu(0) == 1.0);
}

TEST_CASE("factorization properties on random trees") {
  std::mt19937 rng(1234);
  std::uniform_int_distribution<int> nDist(2, 20);
  for (int trial = 0; trial < 60; ++trial) {
    const double dropProb = trial % 3 == 0 ? 0.5 : 0.0;
    const NetworkTopology topo = randomTree(rng, nDist(rng), dropProb);
    const Mat l = buildLaplacian(topo);
    const EdgeFactorization fac = factorize(topo);
    const int n = topo.n_vertices;

    REQUIRE(maxAbs(l * Vec::Ones(n)) <= 1e-13 * std::max(1.0, maxAbs(l)));
    REQUIRE(maxAbs(fac.f_mat * fac.e_mat.transpose() - l) <=
            1e-13 * std::max(1.0, maxAbs(l)));
    REQUIRE(maxAbs(Vec(fac.e_mat.transpose() * Vec::Ones(n))) == 0.0);
    REQUIRE(maxAbs(fac.nu.transpose() * l) <= 1e-10 * std::max(1.0, maxAbs(l)));

    // spec(L_e) equals the nonzero spectrum of L (Laplacian zero removed)
    Eigen::EigenSolver<Mat> esL(l, false), esLe(fac.edge_laplacian, false);
    std::vector<std::complex<double>> lEigs(esL.eigenvalues().data(),
                                            esL.eigenvalues().data() + n);
    std::sort(lEigs.begin(), lEigs.end(), [](auto a, auto b) {
      return std::abs(a) < std::abs(b);
    });
    lEigs.erase(lEigs.begin());  // the simple zero eigenvalue
    std::vector<std::complex<double>> leEigs(
        esLe.eigenvalues().data(), esLe.eigenvalues().data() + n - 1);
    auto lexi = [](auto a, auto b) {
      return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    };
    std::sort(lEigs.begin(), lEigs.end(), lexi);
    std::sort(leEigs.begin(), leEigs.end(), lexi);
    const double scale = std::max(1.0, maxAbs(l));
    for (int k = 0; k < n - 1; ++k) {
      REQUIRE(std::abs(lEigs[k] - leEigs[k]) <= 1e-8 * scale);
      REQUIRE(leEigs[k].real() > 0.0);
    }

    // T L T^{-1} = blkdiag(0, L_e)
    Mat block = Mat::Zero(n, n);
    block.bottomRightCorner(n - 1, n - 1) = fac.edge_laplacian;
    const Mat similar = fac.t_mat * l * fac.t_mat.inverse();
    REQUIRE(maxAbs(similar - block) <= 1e-8 * std::max(1.0, maxAbs(l)));
  }
}

TEST_CASE("rank test matches reachability on random weight patterns") {
  std::mt19937 rng(99);
  std::uniform_int_distribution<int> nDist(2, 10);
  std::uniform_real_distribution<double> uDist(0.0, 1.0);
  std::uniform_real_distribution<double> wDist(0.1, 10.0);
  for (int trial = 0; trial < 200; ++trial) {
    // random tree skeleton with arbitrary direction dropping; the spanning
    // tree property may or may not survive
    const int n = nDist(rng);
    std::map<std::pair<int, int>, double> weights;
    for (int v = 1; v < n; ++v) {
      std::uniform_int_distribution<int> pDist(0, v - 1);
      const int p = pDist(rng);
      if (uDist(rng) < 0.8) weights[{v, p}] = wDist(rng);
      if (uDist(rng) < 0.8) weights[{p, v}] = wDist(rng);
    }
    const NetworkTopology topo = makeTopology(n, weights, Mat(), Mat());
    if (!isTree(topo)) continue;
    // hasDirectedRootedSpanningTree throws if search and rank(F) disagree
    CHECK_NOTHROW(hasDirectedRootedSpanningTree(topo));
  }
}
