#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "netred/gramsolve.hpp"
#include "netred/sysmodel.hpp"

namespace netred {

struct EdgeRankingEntry {
  int edge_id = 0;  // 0-based position in the factorization edge list
  double pi_c = 0.0, pi_o = 0.0, product = 0.0;
};

// Descending by importance product pi_c * pi_o, ties by ascending edge id.
struct EdgeRanking {
  std::vector<EdgeRankingEntry> entries;

  // Edge to cluster next: smallest product, lowest edge id on ties.
  int candidate() const {
    int best = entries.front().edge_id;
    double bestProduct = entries.front().product;
    for (const auto& e : entries) {
      if (e.product < bestProduct - 0.0 ||
          (e.product == bestProduct && e.edge_id < best)) {
        best = e.edge_id;
        bestProduct = e.product;
      }
    }
    return best;
  }

  int mostImportant() const {
    int best = entries.front().edge_id;
    double bestProduct = entries.front().product;
    for (const auto& e : entries) {
      if (e.product > bestProduct ||
          (e.product == bestProduct && e.edge_id < best)) {
        best = e.edge_id;
        bestProduct = e.product;
      }
    }
    return best;
  }
};

inline EdgeRanking rankEdges(const GeneralizedEdgeGramians& gen) {
  EdgeRanking ranking;
  const Eigen::Index ne = gen.pi_c.size();
  ranking.entries.reserve(ne);
  for (Eigen::Index l = 0; l < ne; ++l)
    ranking.entries.push_back({static_cast<int>(l), gen.pi_c(l), gen.pi_o(l),
                               gen.pi_c(l) * gen.pi_o(l)});
  std::stable_sort(ranking.entries.begin(), ranking.entries.end(),
                   [](const EdgeRankingEntry& a, const EdgeRankingEntry& b) {
                     if (a.product != b.product) return a.product > b.product;
                     return a.edge_id < b.edge_id;
                   });
  return ranking;
}

struct ReductionStep {
  int vi = 0, vj = 0;          // clustered endpoints, current 0-based labels, vi < vj
  int edge_id = 0;             // position in the factorization edge list
  double w_ij = 0.0, w_ji = 0.0;
  Mat v_proj, w_proj;          // n x (n-1)
};

namespace detail {

// Projection pair of the clustering step: V has 0/1 cluster indicators, W
// carries the convex weights; the merged vertex takes the position of the
// lower endpoint.
inline void buildProjections(int n, int vi, int vj, double wij, double wji,
                             Mat& v, Mat& w) {
  v = Mat::Zero(n, n - 1);
  w = Mat::Zero(n, n - 1);
  auto newIndex = [vj](int vertex) { return vertex < vj ? vertex : vertex - 1; };
  const double total = wij + wji;
  for (int vertex = 0; vertex < n; ++vertex) {
    if (vertex == vj) continue;
    v(vertex, newIndex(vertex)) = 1.0;
    w(vertex, newIndex(vertex)) = vertex == vi ? wji / total : 1.0;
  }
  v(vj, newIndex(vi)) = 1.0;
  w(vj, newIndex(vi)) = wij / total;
}

}  // namespace detail

inline std::pair<NetworkedSystem, ReductionStep> clusterOnce(
    const NetworkedSystem& net, const EdgeFactorization& fac, int edgeId) {
  const int n = net.topology.n_vertices;
  if (n < 2) throw DegenerateNetwork("cannot cluster a single-vertex network");
  if (edgeId < 0 || edgeId >= static_cast<int>(fac.edges.size()))
    throw EdgeNotFound("edge id out of range");
  ReductionStep step;
  step.edge_id = edgeId;
  step.vi = std::min(fac.edges[edgeId].first, fac.edges[edgeId].second);
  step.vj = std::max(fac.edges[edgeId].first, fac.edges[edgeId].second);
  step.w_ij = net.topology.weight(step.vi, step.vj);
  step.w_ji = net.topology.weight(step.vj, step.vi);
  detail::buildProjections(n, step.vi, step.vj, step.w_ij, step.w_ji,
                           step.v_proj, step.w_proj);

  const Mat l = buildLaplacian(net.topology);
  const Mat lHat = step.w_proj.transpose() * l * step.v_proj;
  const Mat gHat = step.w_proj.transpose() * net.topology.g;
  const Mat hHat = net.topology.h * step.v_proj;

  std::map<std::pair<int, int>, double> weights;
  const double zeroTol = 1e-14 * std::max(1e-300, maxAbs(lHat));
  for (int a = 0; a < n - 1; ++a)
    for (int b = 0; b < n - 1; ++b)
      if (a != b && -lHat(a, b) > zeroTol) weights[{a, b}] = -lHat(a, b);
  const NetworkTopology reduced = makeTopology(n - 1, weights, gHat, hHat);
  return {assembleNetwork(net.subsystem, reduced), step};
}

// Reduced factorization by projecting E and F and dropping the clustered
// column; column order and orientation of the surviving edges are inherited.
inline EdgeFactorization reducedFactorization(const ReductionStep& step,
                                              const EdgeFactorization& fac) {
  const auto ne = static_cast<Eigen::Index>(fac.edges.size());
  const Mat ve = step.v_proj.transpose() * fac.e_mat;
  const Mat wf = step.w_proj.transpose() * fac.f_mat;
  EdgeFactorization out;
  out.e_mat.resize(ve.rows(), ne - 1);
  out.f_mat.resize(wf.rows(), ne - 1);
  Eigen::Index col = 0;
  auto newIndex = [&step](int vertex) {
    if (vertex == step.vj) vertex = step.vi;
    return vertex < step.vj ? vertex : vertex - 1;
  };
  for (Eigen::Index l = 0; l < ne; ++l) {
    if (l == step.edge_id) continue;
    out.e_mat.col(col) = ve.col(l);
    out.f_mat.col(col) = wf.col(l);
    out.edges.push_back({newIndex(fac.edges[l].first),
                         newIndex(fac.edges[l].second)});
    ++col;
  }
  out.edge_laplacian = out.e_mat.transpose() * out.f_mat;
  out.nu = leftNullVector(out.f_mat * out.e_mat.transpose());
  const auto n = out.e_mat.rows();
  out.t_mat.resize(n, n);
  out.t_mat.row(0) = out.nu.transpose();
  out.t_mat.bottomRows(n - 1) = out.e_mat.transpose();
  return out;
}

struct SchurReport {
  double residual_le = 0.0, residual_ge = 0.0, residual_hf = 0.0;
  double scale = 0.0;
  bool pass = false;
};

// Verifies that the reduced edge quantities equal the partial singular
// perturbation (Schur complement) of the originals.
inline SchurReport schurCheck(const EdgeFactorization& fac, int edgeId,
                              const Mat& g, const Mat& h,
                              const EdgeFactorization& reducedFac,
                              const Mat& gHat, const Mat& hHat,
                              double tolScale = 1.0) {
  const auto ne = static_cast<Eigen::Index>(fac.edges.size());
  if (edgeId < 0 || edgeId >= ne) throw EdgeNotFound("edge id out of range");
  std::vector<Eigen::Index> keep;
  for (Eigen::Index l = 0; l < ne; ++l)
    if (l != edgeId) keep.push_back(l);
  const auto k = static_cast<Eigen::Index>(keep.size());

  const Mat& le = fac.edge_laplacian;
  const Mat ge = fac.e_mat.transpose() * g;
  const Mat hf = h * fac.f_mat;

  SchurReport rep;
  rep.scale = std::max({1.0, maxAbs(le), maxAbs(ge), maxAbs(hf)});
  if (k == 0) {  // single-edge network: empty Schur complement, trivial pass
    rep.pass = true;
    return rep;
  }
  const double l22 = le(edgeId, edgeId);
  if (l22 == 0.0) throw SingularBlock("clustered-edge block of L_e is zero");

  Mat le11(k, k), le12(k, 1), le21(1, k), ge1(k, ge.cols());
  Mat hf1(hf.rows(), k);
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = 0; b < k; ++b) le11(a, b) = le(keep[a], keep[b]);
    le12(a, 0) = le(keep[a], edgeId);
    le21(0, a) = le(edgeId, keep[a]);
    ge1.row(a) = ge.row(keep[a]);
    hf1.col(a) = hf.col(keep[a]);
  }
  const Mat ge2 = ge.row(edgeId);
  const Mat hf2 = hf.col(edgeId);

  const Mat leSchur = le11 - le12 * le21 / l22;
  const Mat geSchur = ge1 - le12 * ge2 / l22;
  const Mat hfSchur = hf1 - hf2 * le21 / l22;

  rep.residual_le = maxAbs(reducedFac.edge_laplacian - leSchur);
  rep.residual_ge = maxAbs(reducedFac.e_mat.transpose() * gHat - geSchur);
  rep.residual_hf = maxAbs(hHat * reducedFac.f_mat - hfSchur);
  const double tol = 1e-10 * rep.scale * tolScale;
  rep.pass = rep.residual_le <= tol && rep.residual_ge <= tol &&
             rep.residual_hf <= tol;
  return rep;
}

// Drops the clustered edge's entries and re-certifies against the reduced
// LMIs; the margin must stay above the inheritance tolerance.
inline GeneralizedEdgeGramians inheritGramians(
    const GeneralizedEdgeGramians& gen, int edgeId,
    const EdgeFactorization& reducedFac, const Mat& gHat, const Mat& hHat,
    double tolScale = 1.0) {
  const Eigen::Index ne = gen.pi_c.size();
  if (edgeId < 0 || edgeId >= ne) throw EdgeNotFound("edge id out of range");
  GeneralizedEdgeGramians out;
  out.pi_c.resize(ne - 1);
  out.pi_o.resize(ne - 1);
  Eigen::Index col = 0;
  for (Eigen::Index l = 0; l < ne; ++l) {
    if (l == edgeId) continue;
    out.pi_c(col) = gen.pi_c(l);
    out.pi_o(col) = gen.pi_o(l);
    ++col;
  }
  const Mat& le = reducedFac.edge_laplacian;
  const Mat sc = reducedFac.e_mat.transpose() * gHat * gHat.transpose() *
                 reducedFac.e_mat;
  const Mat so = reducedFac.f_mat.transpose() * hHat.transpose() * hHat *
                 reducedFac.f_mat;
  out.feas_c = minEigSym(detail::lmiResidual(le, sc, out.pi_c));
  out.feas_o = minEigSym(detail::lmiResidual(le.transpose(), so, out.pi_o));
  out.trace_c = out.pi_c.sum();
  out.trace_o = out.pi_o.sum();
  const double scaleC = std::max({1.0, maxAbs(sc), maxAbs(le)});
  const double scaleO = std::max({1.0, maxAbs(so), maxAbs(le)});
  if (out.feas_c < -1e-6 * scaleC * tolScale ||
      out.feas_o < -1e-6 * scaleO * tolScale)
    throw InheritanceViolation("inherited Gramians fail the reduced LMIs");
  return out;
}

struct StepLog {
  int edge_label = 0;               // 1-based original edge id
  std::pair<int, int> original_pair;  // 1-based original vertex labels
  double product = 0.0;
  SchurReport schur;
  double feas_c = 0.0, feas_o = 0.0;
  double spectral_abscissa = 0.0;   // of the reduced edge dynamics
};

struct ClusterMap {
  std::vector<std::vector<int>> blocks;  // original 0-based vertex ids
  std::vector<ReductionStep> steps;
  std::vector<StepLog> log;
};

struct ReduceOptions {
  bool recompute_each_step = false;
  bool adversarial = false;  // cluster the most important edge instead
  double tol_scale = 1.0;
};

struct ReduceResult {
  NetworkedSystem network;
  EdgeFactorization factorization;
  GeneralizedEdgeGramians gramians;
  ClusterMap map;
};

inline ReduceResult reduceTo(const NetworkedSystem& net, int targetOrder,
                             const ReduceOptions& options = {}) {
  const int n0 = net.topology.n_vertices;
  if (targetOrder < 1 || targetOrder > n0)
    throw ValidationError("target order must satisfy 1 <= n_hat <= n_vertices");
  ReduceResult res;
  res.network = net;
  res.factorization = factorize(net.topology);
  res.gramians = generalizedEdgeGramians(res.factorization, net.topology.g,
                                         net.topology.h, options.tol_scale);
  for (int v = 0; v < n0; ++v) res.map.blocks.push_back({v});
  // surviving edges keep their original 1-based labels and endpoint pairs
  std::vector<int> edgeLabels(res.factorization.edges.size());
  std::iota(edgeLabels.begin(), edgeLabels.end(), 1);
  std::vector<std::pair<int, int>> originalPairs = res.factorization.edges;

  while (res.network.topology.n_vertices > targetOrder) {
    const EdgeRanking ranking = rankEdges(res.gramians);
    const int edgeId =
        options.adversarial ? ranking.mostImportant() : ranking.candidate();

    StepLog log;
    log.edge_label = edgeLabels[edgeId];
    log.original_pair = {originalPairs[edgeId].first + 1,
                         originalPairs[edgeId].second + 1};
    log.product = res.gramians.pi_c(edgeId) * res.gramians.pi_o(edgeId);

    auto [reducedNet, step] = clusterOnce(res.network, res.factorization, edgeId);
    EdgeFactorization reducedFac = reducedFactorization(step, res.factorization);
    log.schur = schurCheck(res.factorization, edgeId, res.network.topology.g,
                           res.network.topology.h, reducedFac,
                           reducedNet.topology.g, reducedNet.topology.h,
                           options.tol_scale);

    GeneralizedEdgeGramians reducedGen;
    if (options.recompute_each_step && reducedFac.edges.size() > 0) {
      reducedGen = generalizedEdgeGramians(reducedFac, reducedNet.topology.g,
                                           reducedNet.topology.h,
                                           options.tol_scale);
    } else {
      reducedGen = inheritGramians(res.gramians, edgeId, reducedFac,
                                   reducedNet.topology.g, reducedNet.topology.h,
                                   options.tol_scale);
    }
    log.feas_c = reducedGen.feas_c;
    log.feas_o = reducedGen.feas_o;

    const Subsystem& sub = net.subsystem;
    const auto ne = reducedFac.edge_laplacian.rows();
    const Mat aEdge = kron(Mat::Identity(ne, ne), sub.a_mat) -
                      kron(reducedFac.edge_laplacian, sub.b_mat * sub.c_mat);
    log.spectral_abscissa = maxRealEig(aEdge);

    // merge cluster blocks: vj folds into vi
    auto& blocks = res.map.blocks;
    blocks[step.vi].insert(blocks[step.vi].end(), blocks[step.vj].begin(),
                           blocks[step.vj].end());
    std::sort(blocks[step.vi].begin(), blocks[step.vi].end());
    blocks.erase(blocks.begin() + step.vj);

    edgeLabels.erase(edgeLabels.begin() + edgeId);
    originalPairs.erase(originalPairs.begin() + edgeId);

    res.network = std::move(reducedNet);
    res.factorization = std::move(reducedFac);
    res.gramians = std::move(reducedGen);
    res.map.steps.push_back(step);
    res.map.log.push_back(log);
  }
  return res;
}

}  // namespace netred
