#include <catch2/catch_amalgamated.hpp>

#include "test_support.hpp"

using namespace netred;

namespace {

// Test-only transfer magnitude for an arbitrary state-space triple.
double magnitudeAt(const Mat& a, const Mat& b, const Mat& c, double fPerHour) {
  const std::complex<double> s(0.0, fPerHour * kRadPerSecPerCyclePerHour);
  CMat shifted = (-a).cast<std::complex<double>>();
  shifted.diagonal().array() += s;
  const CMat t = c.cast<std::complex<double>>() *
                 shifted.partialPivLu().solve(b.cast<std::complex<double>>());
  return std::abs(t(0, 0));
}

}  // namespace

TEST_CASE("sync check on the scalar two-vertex network") {
  const Subsystem sub = testing::scalarSubsystem();
  const EdgeFactorization fac = factorize(testing::pathTopology(2, 0, 0));
  const SyncReport rep = syncCheck(sub, fac);
  CHECK(rep.max_real_part == Catch::Approx(-3.0).margin(1e-12));
  CHECK(rep.spectral_ok);
  CHECK(rep.simulation_decay < 1e-6);
}

TEST_CASE("lossless integrator subsystems still synchronize") {
  // J = R = 0, Q = B = 1: diffusive coupling alone stabilizes the edge dynamics
  const Subsystem sub = makeSubsystem(Mat::Zero(1, 1), Mat::Zero(1, 1),
                                      Mat::Ones(1, 1), Mat::Ones(1, 1));
  const EdgeFactorization fac = factorize(testing::pathTopology(2, 0, 0));
  const SyncReport rep = syncCheck(sub, fac);
  CHECK(rep.max_real_part == Catch::Approx(-2.0).margin(1e-12));
  CHECK(rep.spectral_ok);
}

TEST_CASE("synchronization certificate") {
  SECTION("single edge") {
    EdgeFactorization fac;
    fac.edge_laplacian = 2.0 * Mat::Ones(1, 1);
    auto [k, alpha] = syncCertificate(fac);
    CHECK(k(0, 0) == Catch::Approx(0.25).margin(1e-14));
    CHECK(alpha == Catch::Approx(1.0).margin(1e-12));
  }
  SECTION("decoupled edge Laplacian") {
    EdgeFactorization fac;
    fac.edge_laplacian = Mat::Zero(2, 2);
    fac.edge_laplacian(0, 0) = 1.0;
    fac.edge_laplacian(1, 1) = 3.0;
    auto [k, alpha] = syncCertificate(fac);
    CHECK(k(0, 0) == Catch::Approx(0.5).margin(1e-12));
    CHECK(k(1, 1) == Catch::Approx(1.0 / 6.0).margin(1e-12));
    CHECK(alpha == Catch::Approx(1.0).margin(1e-10));
  }
  SECTION("corridor") {
    const EdgeFactorization fac = factorize(corridorExample().second);
    auto [k, alpha] = syncCertificate(fac);
    CHECK(minEigSym(k) > 0.0);
    const Mat& le = fac.edge_laplacian;
    CHECK(maxAbs(le.transpose() * k + k * le - Mat::Identity(5, 5)) <= 1e-10);
  }
  SECTION("rejects an unstable edge Laplacian") {
    EdgeFactorization fac;
    fac.edge_laplacian = -Mat::Ones(1, 1);
    CHECK_THROWS_AS(syncCertificate(fac), NotHurwitz);
  }
}

TEST_CASE("first-order lag frequency response") {
  const Subsystem sub = testing::scalarSubsystem();
  const NetworkTopology topo =
      makeTopology(1, {}, Mat::Ones(1, 1), Mat::Ones(1, 1));
  const NetworkedSystem net = assembleNetwork(sub, topo);
  const Vec grid = logspace(1e-4, 1e1, 40);
  const FrequencyResponse frf = frequencyResponse(net, grid);
  for (Eigen::Index k = 0; k < grid.size(); ++k) {
    const double w = grid(k) * kRadPerSecPerCyclePerHour;
    CHECK(frf.magnitudes[k](0, 0) ==
          Catch::Approx(1.0 / std::sqrt(1.0 + w * w)).epsilon(1e-10));
  }
}

TEST_CASE("edge and dual edge responses coincide") {
  auto [sub, topo] = corridorExample();
  const NetworkedSystem net = assembleNetwork(sub, topo);
  const EdgeFactorization fac = factorize(topo);
  const EdgeSystem edge = edgeSystem(net, fac, EdgeFlavor::edge);
  const EdgeSystem dual = edgeSystem(net, fac, EdgeFlavor::dual);
  const Vec grid = logspace(1e-3, 1e1, 25);
  for (Eigen::Index k = 0; k < grid.size(); ++k) {
    const double me = magnitudeAt(edge.a_edge, edge.b_in, edge.c_out, grid(k));
    const double md = magnitudeAt(dual.a_edge, dual.b_in, dual.c_out, grid(k));
    REQUIRE(std::abs(me - md) <= 1e-8 * std::max(1e-300, me));
  }
}

TEST_CASE("corridor grid stays finite") {
  auto [sub, topo] = corridorExample();
  const NetworkedSystem net = assembleNetwork(sub, topo);
  const FrequencyResponse frf = frequencyResponse(net, logspace(1e-4, 1e1, 200));
  for (const Mat& m : frf.magnitudes) REQUIRE(m.allFinite());
}

TEST_CASE("response comparison") {
  auto [sub, topo] = corridorExample();
  const NetworkedSystem net = assembleNetwork(sub, topo);
  const FrequencyResponse frf = frequencyResponse(net, logspace(1e-3, 1e0, 20));
  SECTION("identical inputs give zero error") {
    const ResponseErrorReport rep = compareResponses(frf, frf);
    CHECK(rep.max_err == 0.0);
    CHECK(rep.rms_err == 0.0);
  }
  SECTION("doubled magnitudes give relative error one") {
    FrequencyResponse doubled = frf;
    for (Mat& m : doubled.magnitudes) m *= 2.0;
    const ResponseErrorReport rep = compareResponses(frf, doubled);
    CHECK(rep.max_err == Catch::Approx(1.0).margin(1e-12));
  }
  SECTION("grid mismatch is rejected") {
    auto [sub2, topo2] = corridorExample();
    const FrequencyResponse other =
        frequencyResponse(assembleNetwork(sub2, topo2), logspace(1e-3, 1e0, 21));
    CHECK_THROWS_AS(compareResponses(frf, other), GridMismatch);
  }
}

TEST_CASE("spectral preservation along reductions") {
  std::mt19937 rng(61);
  for (int trial = 0; trial < 5; ++trial) {
    const Subsystem sub = testing::randomSubsystem(rng);
    const NetworkTopology topo = testing::randomTree(rng, 6);
    const NetworkedSystem net = assembleNetwork(sub, topo);
    const EdgeFactorization fac = factorize(topo);
    REQUIRE(syncCheck(sub, fac).spectral_ok);
    const ReduceResult res = reduceTo(net, 2);
    for (const auto& log : res.map.log) REQUIRE(log.spectral_abscissa < 0.0);
    REQUIRE(syncCheck(sub, res.factorization).spectral_ok);
  }
}

TEST_CASE("simulated decay rate is consistent with the spectral abscissa") {
  auto [sub, topo] = corridorExample();
  const EdgeFactorization fac = factorize(topo);
  const SyncReport rep = syncCheck(sub, fac);
  REQUIRE(rep.spectral_ok);
  // decay envelope slope within 20% of the abscissa over the horizon
  const double horizon = 20.0 / std::abs(rep.max_real_part);
  const double slope = std::log(rep.simulation_decay) / horizon;
  CHECK(slope <= rep.max_real_part * 0.8);
}
