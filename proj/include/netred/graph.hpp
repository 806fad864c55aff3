#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "netred/linalg.hpp"

namespace netred {

// Weighted directed coupling topology. Vertices are 0-based internally;
// external formats use 1-based labels.
struct NetworkTopology {
  int n_vertices = 0;
  // (i,j) -> w_ij, only strictly positive entries stored, no self-loops.
  std::map<std::pair<int, int>, double> weights;
  Mat g;  // n_vertices x m_bar external-input gains
  Mat h;  // p_bar x n_vertices external-output gains

  double weight(int i, int j) const {
    auto it = weights.find({i, j});
    return it == weights.end() ? 0.0 : it->second;
  }
};

inline NetworkTopology makeTopology(int nVertices,
                                    const std::map<std::pair<int, int>, double>& weights,
                                    const Mat& g, const Mat& h) {
  if (nVertices < 1) throw ValidationError("n_vertices must be positive");
  NetworkTopology topo;
  topo.n_vertices = nVertices;
  for (const auto& [ij, w] : weights) {
    const auto [i, j] = ij;
    if (i < 0 || i >= nVertices || j < 0 || j >= nVertices)
      throw ValidationError("edge endpoint out of range");
    if (i == j) throw ValidationError("self-loops are not allowed");
    if (w < 0.0) throw ValidationError("coupling weight must be nonnegative");
    if (w > 0.0) topo.weights[ij] = w;
  }
  if (g.size() > 0 && g.rows() != nVertices)
    throw DimensionMismatch("G must have n_vertices rows");
  if (h.size() > 0 && h.cols() != nVertices)
    throw DimensionMismatch("H must have n_vertices columns");
  topo.g = g.size() > 0 ? g : Mat::Zero(nVertices, 1);
  topo.h = h.size() > 0 ? h : Mat::Zero(1, nVertices);
  return topo;
}

inline Mat buildLaplacian(const NetworkTopology& topo) {
  const int n = topo.n_vertices;
  Mat l = Mat::Zero(n, n);
  for (const auto& [ij, w] : topo.weights) {
    const auto [i, j] = ij;
    l(i, j) -= w;
    l(i, i) += w;
  }
  return l;
}

// Edges of the underlying undirected graph, canonical (min,max) order,
// sorted lexicographically.
inline std::vector<std::pair<int, int>> underlyingUndirectedEdges(
    const NetworkTopology& topo) {
  std::set<std::pair<int, int>> edges;
  for (const auto& [ij, w] : topo.weights) {
    if (w > 0.0)
      edges.insert({std::min(ij.first, ij.second), std::max(ij.first, ij.second)});
  }
  return {edges.begin(), edges.end()};
}

inline bool isTree(const NetworkTopology& topo) {
  const int n = topo.n_vertices;
  const auto edges = underlyingUndirectedEdges(topo);
  if (static_cast<int>(edges.size()) != n - 1) return false;
  // connectivity by union-find
  std::vector<int> parent(n);
  for (int i = 0; i < n; ++i) parent[i] = i;
  auto find = [&](int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  int components = n;
  for (const auto& [a, b] : edges) {
    int ra = find(a), rb = find(b);
    if (ra != rb) {
      parent[ra] = rb;
      --components;
    }
  }
  return components == 1;
}

namespace detail {

// Directed edge j -> i exists iff w_ij > 0 (vertex i listens to j).
inline bool reachesAllFrom(const NetworkTopology& topo, int root) {
  const int n = topo.n_vertices;
  std::vector<char> seen(n, 0);
  std::vector<int> stack{root};
  seen[root] = 1;
  int count = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (const auto& [ij, w] : topo.weights) {
      if (w > 0.0 && ij.second == v && !seen[ij.first]) {
        seen[ij.first] = 1;
        ++count;
        stack.push_back(ij.first);
      }
    }
  }
  return count == n;
}

inline bool spanningTreeBySearch(const NetworkTopology& topo) {
  for (int r = 0; r < topo.n_vertices; ++r)
    if (reachesAllFrom(topo, r)) return true;
  return false;
}

}  // namespace detail

struct EdgeFactorization {
  Mat e_mat;           // n x (n-1) oriented incidence, columns min -> max
  Mat f_mat;           // n x (n-1) weighted counterpart
  Mat edge_laplacian;  // (n-1) x (n-1), E^T F
  Vec nu;              // left null vector of L, nu >= 0, sum 1
  Mat t_mat;           // [nu^T; E^T]
  std::vector<std::pair<int, int>> edges;  // canonical (min,max), sorted
};

inline Mat incidenceMatrix(int nVertices,
                           const std::vector<std::pair<int, int>>& edges) {
  Mat e = Mat::Zero(nVertices, static_cast<Eigen::Index>(edges.size()));
  for (std::size_t l = 0; l < edges.size(); ++l) {
    e(edges[l].first, static_cast<Eigen::Index>(l)) = 1.0;
    e(edges[l].second, static_cast<Eigen::Index>(l)) = -1.0;
  }
  return e;
}

inline Mat weightedIncidenceMatrix(const NetworkTopology& topo,
                                   const std::vector<std::pair<int, int>>& edges) {
  Mat f = Mat::Zero(topo.n_vertices, static_cast<Eigen::Index>(edges.size()));
  for (std::size_t l = 0; l < edges.size(); ++l) {
    const auto [i, j] = edges[l];
    f(i, static_cast<Eigen::Index>(l)) = topo.weight(i, j);
    f(j, static_cast<Eigen::Index>(l)) = -topo.weight(j, i);
  }
  return f;
}

inline bool hasDirectedRootedSpanningTree(const NetworkTopology& topo) {
  const bool bySearch = detail::spanningTreeBySearch(topo);
  if (isTree(topo)) {
    const auto edges = underlyingUndirectedEdges(topo);
    const Mat f = weightedIncidenceMatrix(topo, edges);
    const bool byRank = numericalRank(f) == topo.n_vertices - 1;
    if (byRank != bySearch)
      throw NumericalError(
          "rank(F) test and reachability search disagree on spanning tree");
  }
  return bySearch;
}

// Left null vector of L, nonnegative, normalized to sum 1.
inline Vec leftNullVector(const Mat& l) {
  const Eigen::Index n = l.rows();
  if (n == 1) return Vec::Ones(1);
  Eigen::EigenSolver<Mat> es(l.transpose());
  Eigen::Index best = 0;
  double bestMag = std::abs(es.eigenvalues()(0));
  for (Eigen::Index k = 1; k < n; ++k) {
    const double mag = std::abs(es.eigenvalues()(k));
    if (mag < bestMag) {
      bestMag = mag;
      best = k;
    }
  }
  const double scale = std::max(1e-300, maxAbs(l));
  if (bestMag > 1e-8 * scale)
    throw NumericalError("no zero eigenvalue of L within tolerance");
  Vec nu = es.eigenvectors().col(best).real();
  const double s = nu.sum();
  if (std::abs(s) < 1e-14) throw NumericalError("degenerate null vector of L");
  nu /= s;
  const double clampTol = 1e-10;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (nu(i) < 0.0 && nu(i) > -clampTol) nu(i) = 0.0;
    if (nu(i) < 0.0) throw NumericalError("left null vector has negative entries");
  }
  nu /= nu.sum();
  return nu;
}

inline EdgeFactorization factorize(const NetworkTopology& topo) {
  if (!isTree(topo))
    throw AssumptionViolation("underlying undirected graph is not a tree");
  if (!hasDirectedRootedSpanningTree(topo))
    throw AssumptionViolation("graph has no directed rooted spanning tree");
  EdgeFactorization fac;
  fac.edges = underlyingUndirectedEdges(topo);
  fac.e_mat = incidenceMatrix(topo.n_vertices, fac.edges);
  fac.f_mat = weightedIncidenceMatrix(topo, fac.edges);
  fac.edge_laplacian = fac.e_mat.transpose() * fac.f_mat;
  fac.nu = leftNullVector(buildLaplacian(topo));
  fac.t_mat = Mat(topo.n_vertices, topo.n_vertices);
  fac.t_mat.row(0) = fac.nu.transpose();
  fac.t_mat.bottomRows(topo.n_vertices - 1) = fac.e_mat.transpose();
  return fac;
}

}  // namespace netred
