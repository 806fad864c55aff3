#pragma once

#include <functional>

#include "netred/graph.hpp"
#include "netred/linalg.hpp"

namespace netred {

// Identical passive block in port-Hamiltonian form: A = (J-R)Q, C = B^T Q.
struct Subsystem {
  Mat j_mat, r_mat, q_mat, b_mat;
  Mat a_mat, c_mat;
  int n = 0, m = 0;
};

namespace detail {

inline bool kalmanControllable(const Mat& a, const Mat& b) {
  const Eigen::Index n = a.rows();
  Mat ctrb(n, n * b.cols());
  Mat block = b;
  for (Eigen::Index k = 0; k < n; ++k) {
    ctrb.block(0, k * b.cols(), n, b.cols()) = block;
    block = a * block;
  }
  return numericalRank(ctrb) == n;
}

}  // namespace detail

inline Subsystem makeSubsystem(const Mat& j, const Mat& r, const Mat& q,
                               const Mat& b) {
  const Eigen::Index n = j.rows();
  if (j.cols() != n || r.rows() != n || r.cols() != n || q.rows() != n ||
      q.cols() != n || b.rows() != n)
    throw DimensionMismatch("subsystem matrices have inconsistent dimensions");
  const double jScale = std::max(1e-300, maxAbs(j));
  if (maxAbs(j + j.transpose()) > 1e-12 * jScale)
    throw NotSkew("J is not skew-symmetric");
  if (!isSymmetric(r)) throw NotPSD("R is not symmetric");
  if (minEigSym(r) < -1e-12 * std::max(1.0, maxAbs(r)))
    throw NotPSD("R is not positive semidefinite");
  if (!isSymmetric(q)) throw NotPD("Q is not symmetric");
  if (minEigSym(q) < 1e-12 * std::max(1e-300, maxAbs(q)))
    throw NotPD("Q is not positive definite");

  Subsystem sub;
  sub.j_mat = j;
  sub.r_mat = r;
  sub.q_mat = q;
  sub.b_mat = b;
  sub.a_mat = (j - r) * q;
  sub.c_mat = b.transpose() * q;
  sub.n = static_cast<int>(n);
  sub.m = static_cast<int>(b.cols());
  if (!detail::kalmanControllable(sub.a_mat, sub.b_mat))
    throw NotMinimal("(A,B) is not controllable");
  if (!detail::kalmanControllable(sub.a_mat.transpose(), sub.c_mat.transpose()))
    throw NotMinimal("(A,C) is not observable");
  return sub;
}

struct NetworkedSystem {
  Subsystem subsystem;
  NetworkTopology topology;
  Mat a_net;  // I (x) A - L (x) BC
  Mat b_net;  // G (x) B
  Mat c_net;  // H (x) C
};

inline NetworkedSystem assembleNetwork(const Subsystem& sub,
                                       const NetworkTopology& topo) {
  if (!isTree(topo))
    throw AssumptionViolation("underlying undirected graph is not a tree");
  if (!hasDirectedRootedSpanningTree(topo))
    throw AssumptionViolation("graph has no directed rooted spanning tree");
  NetworkedSystem net;
  net.subsystem = sub;
  net.topology = topo;
  const Mat l = buildLaplacian(topo);
  const Mat eye = Mat::Identity(topo.n_vertices, topo.n_vertices);
  net.a_net = kron(eye, sub.a_mat) - kron(l, sub.b_mat * sub.c_mat);
  net.b_net = kron(topo.g, sub.b_mat);
  net.c_net = kron(topo.h, sub.c_mat);
  return net;
}

enum class EdgeFlavor { edge, dual };

// Realization of the dynamics in edge coordinates x_e = (E^T (x) I) x.
// flavor edge: inputs through E^T G, outputs through H F (E^T F)^{-1}.
// flavor dual: the (E^T F)^{-1}-transformed realization.
struct EdgeSystem {
  Mat a_edge;  // I (x) A - L_e (x) BC
  Mat g_io;    // G_e or G_f
  Mat h_io;    // H_e or H_f
  Mat b_in;    // g_io (x) B
  Mat c_out;   // h_io (x) C
  EdgeFlavor flavor = EdgeFlavor::edge;
};

inline EdgeSystem edgeSystem(const NetworkedSystem& net,
                             const EdgeFactorization& fac, EdgeFlavor flavor) {
  const Mat& le = fac.edge_laplacian;
  if (le.rows() > 0 && conditionNumber(le) > 1e12)
    throw SingularEdgeLaplacian("edge Laplacian E^T F is numerically singular");
  const Subsystem& sub = net.subsystem;
  const Eigen::Index ne = le.rows();
  EdgeSystem sys;
  sys.flavor = flavor;
  const Mat eye = Mat::Identity(ne, ne);
  sys.a_edge = kron(eye, sub.a_mat) - kron(le, sub.b_mat * sub.c_mat);
  const Mat ge = fac.e_mat.transpose() * net.topology.g;
  const Mat hf = net.topology.h * fac.f_mat;
  if (flavor == EdgeFlavor::edge) {
    sys.g_io = ge;
    sys.h_io = ne > 0 ? Mat(hf * le.inverse()) : Mat(hf);
  } else {
    sys.g_io = ne > 0 ? Mat(le.inverse() * ge) : Mat(ge);
    sys.h_io = hf;
  }
  sys.b_in = kron(sys.g_io, sub.b_mat);
  sys.c_out = kron(sys.h_io, sub.c_mat);
  return sys;
}

struct Trajectory {
  Vec times;
  Mat states;  // one column per time point
};

inline double defaultStep(const Mat& a, double horizon) {
  const double rowSum =
      a.size() == 0 ? 0.0 : a.cwiseAbs().rowwise().sum().maxCoeff();
  double step = horizon / 1000.0;
  if (rowSum > 0.0) step = std::min(step, 0.1 / rowSum);
  return step;
}

// Fixed-step RK4 for xdot = a x + forcing, forcing constant.
inline Trajectory simulate(const Mat& a, const Vec& x0, double horizon,
                           double step, const Vec& forcing = Vec()) {
  if (step <= 0.0 || horizon < step)
    throw ValidationError("simulate requires 0 < step <= horizon");
  const Vec f = forcing.size() > 0 ? forcing : Vec(Vec::Zero(x0.size()));
  if (f.size() != x0.size() || a.rows() != x0.size())
    throw DimensionMismatch("simulate dimension mismatch");
  const auto nSteps = static_cast<Eigen::Index>(std::ceil(horizon / step));
  Trajectory traj;
  traj.times.resize(nSteps + 1);
  traj.states.resize(x0.size(), nSteps + 1);
  Vec x = x0;
  traj.times(0) = 0.0;
  traj.states.col(0) = x;
  for (Eigen::Index k = 0; k < nSteps; ++k) {
    const double h = std::min(step, horizon - k * step);
    const Vec k1 = a * x + f;
    const Vec k2 = a * (x + 0.5 * h * k1) + f;
    const Vec k3 = a * (x + 0.5 * h * k2) + f;
    const Vec k4 = a * (x + h * k3) + f;
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!x.allFinite()) throw NonFinite("state left the finite range");
    traj.times(k + 1) = traj.times(k) + h;
    traj.states.col(k + 1) = x;
  }
  return traj;
}

// Largest ||x_i - x_j|| over all vertex pairs for a stacked network state.
inline double maxPairwiseDisagreement(const Vec& x, int nVertices, int n) {
  double worst = 0.0;
  for (int i = 0; i < nVertices; ++i)
    for (int j = i + 1; j < nVertices; ++j)
      worst = std::max(worst,
                       (x.segment(i * n, n) - x.segment(j * n, n)).norm());
  return worst;
}

}  // namespace netred
