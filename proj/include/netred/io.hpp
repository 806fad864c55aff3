#pragma once

#include <fstream>
#include <string>
#include <utility>

#include <json.hpp>

#include "netred/reduction.hpp"
#include "netred/sysmodel.hpp"

namespace netred {

using nlohmann::json;

namespace detail {

inline Mat matrixFromJson(const json& j, const std::string& name) {
  if (!j.is_array() || j.empty() || !j.front().is_array())
    throw ParseError(name + ": expected a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.front().size());
  Mat m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw ParseError(name + ": ragged rows");
    for (Eigen::Index c = 0; c < cols; ++c) {
      const auto& cell = row[static_cast<std::size_t>(c)];
      if (!cell.is_number()) throw ParseError(name + ": non-numeric entry");
      m(r, c) = cell.get<double>();
    }
  }
  return m;
}

inline json matrixToJson(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

// "eK" shorthand: unit column e_K (1-based) of length n.
inline Mat ioMatrix(const json& j, const std::string& name, int n, bool isInput) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s.size() < 2 || s[0] != 'e')
      throw ParseError(name + ": unknown shorthand '" + s + "'");
    int k = 0;
    try {
      k = std::stoi(s.substr(1));
    } catch (const std::exception&) {
      throw ParseError(name + ": unknown shorthand '" + s + "'");
    }
    if (k < 1 || k > n) throw ParseError(name + ": unit index out of range");
    Mat e = Mat::Zero(n, 1);
    e(k - 1, 0) = 1.0;
    return isInput ? e : Mat(e.transpose());
  }
  return matrixFromJson(j, name);
}

}  // namespace detail

inline std::pair<Subsystem, NetworkTopology> parseNetwork(const json& doc) {
  if (!doc.contains("subsystem") || !doc.contains("topology"))
    throw ParseError("network file needs 'subsystem' and 'topology' blocks");
  const json& sj = doc["subsystem"];
  for (const char* key : {"J", "R", "Q", "B"})
    if (!sj.contains(key))
      throw ParseError(std::string("subsystem block missing '") + key + "'");
  Subsystem sub;
  try {
    sub = makeSubsystem(detail::matrixFromJson(sj["J"], "subsystem.J"),
                        detail::matrixFromJson(sj["R"], "subsystem.R"),
                        detail::matrixFromJson(sj["Q"], "subsystem.Q"),
                        detail::matrixFromJson(sj["B"], "subsystem.B"));
  } catch (const ValidationError&) {
    throw;
  }

  const json& tj = doc["topology"];
  if (!tj.contains("n_vertices") || !tj["n_vertices"].is_number_integer())
    throw ParseError("topology.n_vertices missing or not an integer");
  const int n = tj["n_vertices"].get<int>();
  if (n < 1) throw ValidationError("topology.n_vertices must be positive");
  std::map<std::pair<int, int>, double> weights;
  if (tj.contains("edges")) {
    if (!tj["edges"].is_array()) throw ParseError("topology.edges must be an array");
    for (const auto& ej : tj["edges"]) {
      for (const char* key : {"i", "j"})
        if (!ej.contains(key) || !ej[key].is_number_integer())
          throw ParseError("edge entry needs integer 'i' and 'j'");
      const int i = ej["i"].get<int>() - 1;
      const int j = ej["j"].get<int>() - 1;
      const double wij = ej.value("w_ij", 0.0);
      const double wji = ej.value("w_ji", 0.0);
      if (wij > 0.0) weights[{i, j}] += wij;
      if (wji > 0.0) weights[{j, i}] += wji;
      if (wij < 0.0 || wji < 0.0)
        throw ValidationError("coupling weight must be nonnegative");
    }
  }
  Mat g, h;
  if (doc.contains("io")) {
    const json& ij = doc["io"];
    if (ij.contains("G")) g = detail::ioMatrix(ij["G"], "io.G", n, true);
    if (ij.contains("H")) h = detail::ioMatrix(ij["H"], "io.H", n, false);
  }
  NetworkTopology topo = makeTopology(n, weights, g, h);
  if (!isTree(topo))
    throw AssumptionViolation(
        "underlying undirected graph is not a tree (Assumption item 1)");
  if (!hasDirectedRootedSpanningTree(topo))
    throw AssumptionViolation(
        "no directed rooted spanning tree (Assumption item 2)");
  return {std::move(sub), std::move(topo)};
}

inline std::pair<Subsystem, NetworkTopology> parseNetworkFile(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  return parseNetwork(doc);
}

inline json emitNetwork(const Subsystem& sub, const NetworkTopology& topo) {
  json doc;
  doc["subsystem"] = {{"n", sub.n},
                      {"m", sub.m},
                      {"J", detail::matrixToJson(sub.j_mat)},
                      {"R", detail::matrixToJson(sub.r_mat)},
                      {"Q", detail::matrixToJson(sub.q_mat)},
                      {"B", detail::matrixToJson(sub.b_mat)}};
  json edges = json::array();
  for (const auto& [i, j] : underlyingUndirectedEdges(topo)) {
    edges.push_back({{"i", i + 1},
                     {"j", j + 1},
                     {"w_ij", topo.weight(i, j)},
                     {"w_ji", topo.weight(j, i)}});
  }
  doc["topology"] = {{"n_vertices", topo.n_vertices}, {"edges", edges}};
  doc["io"] = {{"G", detail::matrixToJson(topo.g)},
               {"H", detail::matrixToJson(topo.h)}};
  return doc;
}

inline void writeNetworkFile(const std::string& path, const Subsystem& sub,
                             const NetworkTopology& topo) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << emitNetwork(sub, topo).dump(2) << '\n';
}

// Six-room thermal corridor: identical two-mass rooms on a path graph,
// actuation and measurement on room 3.
inline std::pair<Subsystem, NetworkTopology> corridorExample() {
  const double c1 = 4.35e4;     // J/K, fast thermal mass (air)
  const double c2 = 9.24e6;     // J/K, slow thermal mass (walls, furniture)
  const double rInt = 2.0e-3;   // K/W, in-room resistance
  const double rOut = 23.0e-3;  // K/W, outer-wall resistance
  const double rWall = 16.0e-3; // K/W, wall between adjacent rooms
  const int nRooms = 6;

  Mat q(2, 2), r(2, 2), b(2, 1);
  q << c1, 0.0, 0.0, c2;
  r << c2 / c1, 1.0, 1.0, c1 / c2;
  r /= rInt * c1 * c2;
  r(0, 0) += 1.0 / (rOut * c1 * c1);
  b << 1.0 / c1, 0.0;
  Subsystem sub = makeSubsystem(Mat::Zero(2, 2), r, q, b);

  std::map<std::pair<int, int>, double> weights;
  for (int i = 0; i + 1 < nRooms; ++i) {
    weights[{i, i + 1}] = 1.0 / rWall;
    weights[{i + 1, i}] = 1.0 / rWall;
  }
  Mat g = Mat::Zero(nRooms, 1);
  g(2, 0) = 1.0;
  const Mat h = g.transpose();
  return {std::move(sub), makeTopology(nRooms, weights, g, h)};
}

inline std::pair<Subsystem, NetworkTopology> namedExample(const std::string& name) {
  if (name == "corridor") return corridorExample();
  throw UnknownExample("unknown example '" + name + "'");
}

}  // namespace netred
