#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "netred/netred.hpp"

namespace {

using namespace netred;

constexpr int kExitUsage = 2;
constexpr int kExitValidation = 3;
constexpr int kExitInfeasible = 4;
constexpr int kExitNumerical = 5;

std::string defaultOutPath(const std::string& input, const std::string& suffix) {
  const auto dot = input.rfind('.');
  const std::string stem = dot == std::string::npos ? input : input.substr(0, dot);
  return stem + suffix;
}

void printSpectrum(const Mat& l) {
  Eigen::EigenSolver<Mat> es(l, false);
  std::printf("Laplacian spectrum:");
  std::vector<std::complex<double>> eigs(es.eigenvalues().data(),
                                         es.eigenvalues().data() + l.rows());
  std::sort(eigs.begin(), eigs.end(), [](auto a, auto b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  for (const auto& ev : eigs) {
    if (std::abs(ev.imag()) > 1e-12 * std::max(1.0, std::abs(ev.real())))
      std::printf(" %.6g%+.6gi", ev.real(), ev.imag());
    else
      std::printf(" %.6g", ev.real());
  }
  std::printf("\n");
}

void printRanking(const EdgeRanking& ranking, const EdgeFactorization& fac) {
  std::printf("edge ranking (most to least important):\n");
  std::printf("  %-6s %-10s %14s %14s %14s\n", "edge", "vertices", "pi_c", "pi_o",
              "product");
  for (const auto& e : ranking.entries) {
    const auto& [i, j] = fac.edges[static_cast<std::size_t>(e.edge_id)];
    std::printf("  %-6d {%d,%d}%*s %14.6e %14.6e %14.6e\n", e.edge_id + 1, i + 1,
                j + 1, 4, "", e.pi_c, e.pi_o, e.product);
  }
  std::printf("clustering candidate: edge %d\n", ranking.candidate() + 1);
}

json syncReportJson(const SyncReport& rep) {
  return {{"spectral_ok", rep.spectral_ok},
          {"max_real_part", rep.max_real_part},
          {"simulation_decay", rep.simulation_decay}};
}

int cmdAnalyze(const std::string& path, const std::string& jsonPath,
               unsigned seed, double tolScale) {
  auto [sub, topo] = parseNetworkFile(path);
  const NetworkedSystem net = assembleNetwork(sub, topo);
  const EdgeFactorization fac = factorize(topo);
  printSpectrum(buildLaplacian(topo));

  const GeneralizedEdgeGramians gen =
      generalizedEdgeGramians(fac, topo.g, topo.h, tolScale);
  const EdgeRanking ranking = rankEdges(gen);
  printRanking(ranking, fac);
  std::printf("LMI feasibility margins: controllability %.3e, observability %.3e\n",
              gen.feas_c, gen.feas_o);

  const EdgeSystem eSys = edgeSystem(net, fac, EdgeFlavor::edge);
  const EdgeSystem fSys = edgeSystem(net, fac, EdgeFlavor::dual);
  const EdgeGramians grams = edgeGramians(eSys, fSys);
  const BoundReport bounds = verifyGramianBounds(grams, gen, sub, tolScale);
  std::printf("Gramian bound margins: controllability %.3e, observability %.3e [%s]\n",
              bounds.margin_c, bounds.margin_o, bounds.pass ? "PASS" : "FAIL");

  const SyncReport sync = syncCheck(sub, fac, seed);
  std::printf("sync: spectral abscissa %.6e [%s], simulated decay %.3e\n",
              sync.max_real_part, sync.spectral_ok ? "ok" : "NOT OK",
              sync.simulation_decay);

  if (!jsonPath.empty()) {
    json report;
    json rankingJson = json::array();
    for (const auto& e : ranking.entries)
      rankingJson.push_back({{"edge", e.edge_id + 1},
                             {"pi_c", e.pi_c},
                             {"pi_o", e.pi_o},
                             {"product", e.product}});
    report["ranking"] = rankingJson;
    report["lmi_margins"] = {{"controllability", gen.feas_c},
                             {"observability", gen.feas_o}};
    report["bound_margins"] = {{"controllability", bounds.margin_c},
                               {"observability", bounds.margin_o},
                               {"pass", bounds.pass}};
    report["sync"] = syncReportJson(sync);
    std::ofstream out(jsonPath);
    out << report.dump(2) << '\n';
    std::printf("report written to %s\n", jsonPath.c_str());
  }
  return 0;
}

int cmdReduce(const std::string& path, int order, bool recompute,
              const std::string& outPath, const std::string& mapPath,
              unsigned seed, double tolScale) {
  auto [sub, topo] = parseNetworkFile(path);
  const NetworkedSystem net = assembleNetwork(sub, topo);
  if (order > topo.n_vertices) {
    std::fprintf(stderr, "error: target order %d exceeds network order %d\n",
                 order, topo.n_vertices);
    return kExitValidation;
  }
  ReduceOptions opts;
  opts.recompute_each_step = recompute;
  opts.tol_scale = tolScale;
  const ReduceResult res = reduceTo(net, order, opts);

  for (std::size_t k = 0; k < res.map.log.size(); ++k) {
    const StepLog& log = res.map.log[k];
    std::printf(
        "step %zu: clustered edge %d {%d,%d}, product %.6e, schur [%s] "
        "(%.2e/%.2e/%.2e), feas margins %.2e/%.2e, spectral abscissa %.6e\n",
        k + 1, log.edge_label, log.original_pair.first, log.original_pair.second,
        log.product, log.schur.pass ? "PASS" : "FAIL", log.schur.residual_le,
        log.schur.residual_ge, log.schur.residual_hf, log.feas_c, log.feas_o,
        log.spectral_abscissa);
  }
  std::printf("clusters:");
  for (const auto& block : res.map.blocks) {
    std::printf(" {");
    for (std::size_t i = 0; i < block.size(); ++i)
      std::printf("%s%d", i ? "," : "", block[i] + 1);
    std::printf("}");
  }
  std::printf("\n");

  const SyncReport sync = syncCheck(res.network.subsystem, res.factorization, seed);
  std::printf("reduced sync: spectral abscissa %.6e [%s]\n", sync.max_real_part,
              sync.spectral_ok ? "ok" : "NOT OK");

  const std::string out =
      outPath.empty() ? defaultOutPath(path, "_reduced.json") : outPath;
  writeNetworkFile(out, res.network.subsystem, res.network.topology);
  std::printf("reduced network written to %s\n", out.c_str());

  const std::string mapOut =
      mapPath.empty() ? defaultOutPath(path, "_clusters.json") : mapPath;
  json mapJson;
  json blocks = json::array();
  for (const auto& block : res.map.blocks) {
    json b = json::array();
    for (int v : block) b.push_back(v + 1);
    blocks.push_back(b);
  }
  mapJson["clusters"] = blocks;
  json stepsJson = json::array();
  for (const auto& log : res.map.log)
    stepsJson.push_back({{"edge", log.edge_label},
                         {"vertices", {log.original_pair.first, log.original_pair.second}},
                         {"product", log.product},
                         {"schur_pass", log.schur.pass},
                         {"feas_c", log.feas_c},
                         {"feas_o", log.feas_o},
                         {"spectral_abscissa", log.spectral_abscissa}});
  mapJson["steps"] = stepsJson;
  std::ofstream mapFile(mapOut);
  mapFile << mapJson.dump(2) << '\n';
  std::printf("cluster map written to %s\n", mapOut.c_str());
  return 0;
}

int cmdFrf(const std::string& fullPath, const std::string& reducedPath,
           double fmin, double fmax, int points, const std::string& outPath) {
  auto [fullSub, fullTopo] = parseNetworkFile(fullPath);
  auto [redSub, redTopo] = parseNetworkFile(reducedPath);
  const Vec grid = logspace(fmin, fmax, points);
  const FrequencyResponse full =
      frequencyResponse(assembleNetwork(fullSub, fullTopo), grid);
  const FrequencyResponse reduced =
      frequencyResponse(assembleNetwork(redSub, redTopo), grid);
  const ResponseErrorReport err = compareResponses(full, reduced);
  std::ofstream out(outPath);
  if (!out) throw Error("cannot write '" + outPath + "'");
  writeFrfCsv(out, full, reduced, err);
  std::printf("relative error: max %.6e, rms %.6e over %d points\n", err.max_err,
              err.rms_err, points);
  std::printf("CSV written to %s\n", outPath.c_str());
  return 0;
}

int cmdExample(const std::string& name, const std::string& outPath) {
  auto [sub, topo] = namedExample(name);
  const std::string out = outPath.empty() ? name + ".json" : outPath;
  writeNetworkFile(out, sub, topo);
  std::printf("example '%s' written to %s\n", name.c_str(), out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"clustering-based reduction of passive subsystem networks"};
  app.require_subcommand(1);
  unsigned seed = 42;
  double tolScale = 1.0;
  app.add_option("--seed", seed, "simulation initial-state seed");
  app.add_option("--tol-scale", tolScale, "tolerance scale factor")
      ->check(CLI::PositiveNumber);

  std::string analyzePath, analyzeJson;
  auto* analyze = app.add_subcommand("analyze", "rank edges and certify bounds");
  analyze->add_option("file", analyzePath, "network JSON file")->required();
  analyze->add_option("--json", analyzeJson, "write a JSON report here");

  std::string reducePath, reduceOut, reduceMap;
  int order = 0;
  bool recompute = false;
  auto* reduce = app.add_subcommand("reduce", "cluster down to a target order");
  reduce->add_option("file", reducePath, "network JSON file")->required();
  reduce->add_option("--order", order, "target number of vertices")
      ->required()
      ->check(CLI::PositiveNumber);
  reduce->add_flag("--recompute-each-step", recompute,
                   "re-solve the LMIs after every step instead of inheriting");
  reduce->add_option("--out", reduceOut, "reduced network output path");
  reduce->add_option("--map", reduceMap, "cluster map output path");

  std::string frfFull, frfReduced, frfOut = "frf.csv";
  double fmin = 0.0, fmax = 0.0;
  int points = 200;
  auto* frf = app.add_subcommand("frf", "compare frequency responses");
  frf->add_option("full", frfFull, "full network JSON file")->required();
  frf->add_option("reduced", frfReduced, "reduced network JSON file")->required();
  frf->add_option("--fmin", fmin, "lowest frequency [1/hr]")->required();
  frf->add_option("--fmax", fmax, "highest frequency [1/hr]")->required();
  frf->add_option("--points", points, "grid points")->check(CLI::Range(2, 100000));
  frf->add_option("--out", frfOut, "CSV output path");

  std::string exampleName, exampleOut;
  auto* example = app.add_subcommand("example", "write a built-in network file");
  example->add_option("name", exampleName, "example name")->required();
  example->add_option("--out", exampleOut, "output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*analyze) return cmdAnalyze(analyzePath, analyzeJson, seed, tolScale);
    if (*reduce) return cmdReduce(reducePath, order, recompute, reduceOut,
                                  reduceMap, seed, tolScale);
    if (*frf) {
      if (!(fmin > 0.0) || !(fmax > fmin)) {
        std::fprintf(stderr, "error: require 0 < fmin < fmax\n");
        return kExitUsage;
      }
      return cmdFrf(frfFull, frfReduced, fmin, fmax, points, frfOut);
    }
    if (*example) return cmdExample(exampleName, exampleOut);
  } catch (const Infeasible& e) {
    std::fprintf(stderr, "infeasible: %s\n", e.what());
    return kExitInfeasible;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumerical;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  }
  return kExitUsage;
}
