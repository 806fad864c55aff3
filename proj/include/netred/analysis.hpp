#pragma once

#include <fstream>
#include <random>
#include <sstream>
#include <vector>

#include "netred/gramsolve.hpp"
#include "netred/sysmodel.hpp"

namespace netred {

inline constexpr double kRadPerSecPerCyclePerHour = 2.0 * EIGEN_PI / 3600.0;

struct SyncReport {
  bool spectral_ok = false;
  double max_real_part = 0.0;
  Mat certificate_k;          // empty if not requested
  double certificate_alpha = 0.0;
  double simulation_decay = 0.0;  // disagreement at horizon / at start
};

// Lyapunov certificate for the edge dynamics: K solves L_e^T K + K L_e = I.
inline std::pair<Mat, double> syncCertificate(const EdgeFactorization& fac) {
  const Mat& le = fac.edge_laplacian;
  if (le.rows() == 0) return {Mat(0, 0), 0.0};
  const Mat k = solveLyapunov(-le.transpose(), Mat::Identity(le.rows(), le.rows()));
  if (minEigSym(k) <= 0.0)
    throw NumericalError("synchronization certificate K is not positive definite");
  const double alpha = minEigSym(le.transpose() * k + k * le);
  return {k, alpha};
}

inline SyncReport syncCheck(const Subsystem& sub, const EdgeFactorization& fac,
                            unsigned seed = 42, bool withCertificate = false) {
  SyncReport rep;
  const Mat& le = fac.edge_laplacian;
  const auto ne = le.rows();
  if (ne == 0) {  // single vertex synchronizes trivially
    rep.spectral_ok = true;
    rep.max_real_part = -std::numeric_limits<double>::infinity();
    return rep;
  }
  const Mat aEdge = kron(Mat::Identity(ne, ne), sub.a_mat) -
                    kron(le, sub.b_mat * sub.c_mat);
  rep.max_real_part = maxRealEig(aEdge);
  const double epsSpec = 1e-9 * std::max(1e-300, maxAbs(aEdge));
  rep.spectral_ok = rep.max_real_part < -epsSpec;
  if (withCertificate) {
    auto [k, alpha] = syncCertificate(fac);
    rep.certificate_k = k;
    rep.certificate_alpha = alpha;
  }
  if (rep.spectral_ok) {
    // fixed-seed disagreement decay in edge coordinates
    std::mt19937 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    Vec x0(aEdge.rows());
    for (Eigen::Index i = 0; i < x0.size(); ++i) x0(i) = dist(rng);
    const double horizon = 20.0 / std::abs(rep.max_real_part);
    const double step = defaultStep(aEdge, horizon);
    const Trajectory traj = simulate(aEdge, x0, horizon, step);
    const double start = traj.states.col(0).norm();
    rep.simulation_decay = traj.states.rightCols(1).norm() / std::max(1e-300, start);
  }
  return rep;
}

struct FrequencyResponse {
  Vec grid;                    // cycles per hour
  std::vector<Mat> magnitudes;  // per-frequency entrywise |T(jw)|
};

inline Vec logspace(double fmin, double fmax, int points) {
  if (!(fmin > 0.0) || !(fmax > fmin) || points < 2)
    throw ValidationError("frequency grid requires 0 < fmin < fmax, points >= 2");
  Vec grid(points);
  const double l0 = std::log10(fmin), l1 = std::log10(fmax);
  for (int k = 0; k < points; ++k)
    grid(k) = std::pow(10.0, l0 + (l1 - l0) * k / (points - 1));
  return grid;
}

// |T(jw)| with T(s) = (H (x) C)(sI - a_net)^{-1}(G (x) B), grid in cycles/hour.
inline FrequencyResponse frequencyResponse(const NetworkedSystem& net,
                                           const Vec& gridPerHour) {
  FrequencyResponse frf;
  frf.grid = gridPerHour;
  const auto n = net.a_net.rows();
  const CMat a = net.a_net.cast<std::complex<double>>();
  const CMat b = net.b_net.cast<std::complex<double>>();
  const CMat c = net.c_net.cast<std::complex<double>>();
  frf.magnitudes.reserve(gridPerHour.size());
  for (Eigen::Index k = 0; k < gridPerHour.size(); ++k) {
    if (!(gridPerHour(k) > 0.0))
      throw ValidationError("frequency grid must exclude zero");
    const std::complex<double> s(0.0, gridPerHour(k) * kRadPerSecPerCyclePerHour);
    CMat shifted = -a;
    shifted.diagonal().array() += s;
    Eigen::PartialPivLU<CMat> lu(shifted);
    const CMat x = lu.solve(b);
    if (!x.allFinite())
      throw SingularAtFrequency("transfer matrix singular on the grid");
    const CMat t = c * x;
    Mat mag(t.rows(), t.cols());
    for (Eigen::Index i = 0; i < t.rows(); ++i)
      for (Eigen::Index j = 0; j < t.cols(); ++j) mag(i, j) = std::abs(t(i, j));
    if (!mag.allFinite())
      throw SingularAtFrequency("nonfinite frequency response entry");
    frf.magnitudes.push_back(mag);
  }
  return frf;
}

struct ResponseErrorReport {
  Vec rel_err;      // per-frequency worst entrywise relative error
  double max_err = 0.0;
  double rms_err = 0.0;
};

inline ResponseErrorReport compareResponses(const FrequencyResponse& full,
                                            const FrequencyResponse& reduced) {
  if (full.grid.size() != reduced.grid.size() ||
      (full.grid - reduced.grid).cwiseAbs().maxCoeff() > 0.0)
    throw GridMismatch("frequency grids differ");
  ResponseErrorReport rep;
  rep.rel_err.resize(full.grid.size());
  double sumSq = 0.0;
  for (Eigen::Index k = 0; k < full.grid.size(); ++k) {
    const Mat& a = full.magnitudes[k];
    const Mat& b = reduced.magnitudes[k];
    if (a.rows() != b.rows() || a.cols() != b.cols())
      throw GridMismatch("response dimensions differ");
    double worst = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      for (Eigen::Index j = 0; j < a.cols(); ++j) {
        const double denom = std::max(1e-300, std::abs(a(i, j)));
        worst = std::max(worst, std::abs(a(i, j) - b(i, j)) / denom);
      }
    rep.rel_err(k) = worst;
    rep.max_err = std::max(rep.max_err, worst);
    sumSq += worst * worst;
  }
  rep.rms_err = std::sqrt(sumSq / full.grid.size());
  return rep;
}

// CSV rows: freq_per_hr, |T|_full, |T|_reduced, rel_err (first output/input
// channel), plain decimal, newline-terminated.
inline void writeFrfCsv(std::ostream& os, const FrequencyResponse& full,
                        const FrequencyResponse& reduced,
                        const ResponseErrorReport& err) {
  os << "freq_per_hr,|T|_full,|T|_reduced,rel_err\n";
  os.precision(17);
  for (Eigen::Index k = 0; k < full.grid.size(); ++k) {
    os << full.grid(k) << ',' << full.magnitudes[k](0, 0) << ','
       << reduced.magnitudes[k](0, 0) << ',' << err.rel_err(k) << '\n';
  }
}

}  // namespace netred
