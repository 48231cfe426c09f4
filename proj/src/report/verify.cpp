#include <chrono>
#include <utility>

#include "speclab/error.hpp"
#include "speclab/report.hpp"

namespace speclab::report {

namespace {

using Run = std::pair<std::string, std::map<std::string, std::string>>;

// A criterion is a fixed list of experiment runs; their residuals are merged under
// "<run index>:<experiment>/<residual>" so that repeated experiments stay distinct.
std::function<void(ExperimentReport&)> compose(std::vector<Run> runs, std::uint64_t seed = 2024) {
  return [runs = std::move(runs), seed](ExperimentReport& r) {
    json parts = json::array();
    int i = 0;
    for (const auto& [id, values] : runs) {
      const ExperimentReport sub = run_experiment(id, Params(values), seed);
      const std::string tag = std::to_string(i++) + ":" + id;
      for (const auto& [k, v] : sub.residuals) r.check(tag + "/" + k, v, sub.tolerances.at(k));
      for (const auto& [k, v] : sub.outputs) r.outputs[tag + "/" + k] = v;
      if (!sub.error.empty()) {
        r.error_kind = sub.error_kind;
        r.error += (r.error.empty() ? "" : "; ") + tag + ": " + sub.error;
      }
      parts.push_back({{"id", id}, {"inputs", sub.inputs}, {"pass", sub.pass}, {"runtime_ms", sub.runtime_ms}});
    }
    r.seed = seed;
    r.details["runs"] = parts;
  };
}

std::vector<Criterion> build() {
  const std::string pi = "2pi";
  return {
      {1, "Gaussian chain exactness", compose({{"transfer-gaussian", {{"m", "1"}, {"N", "8,32,64"}}}})},
      {2, "Perron-Frobenius and mixing",
       compose({{"transfer-mixing", {{"P", "0,1"}}}, {"transfer-mixing", {{"P", "0,0,1"}}}, {"transfer-mixing", {{"P", "0,-1,1"}}}},
               20240611)},
      {3, "Quartic cross-validation", compose({{"transfer-mcmc", {{"P", "0,0,1"}, {"N", "32"}, {"steps", "1000000"}}}})},
      {4, "Zeta closed forms",
       compose({{"zeta-circle", {{"L", pi}, {"m", "1"}}},
                {"zeta-circle", {{"L", pi}, {"m", "0"}}},
                {"zeta-circle", {{"L", "1"}, {"m", "0"}}},
                {"zeta-circle", {{"L", "7.5"}, {"m", "0"}}},
                {"zeta-circle", {{"L", pi}, {"m", "1"}, {"theta", "pi/3"}}},
                {"zeta-circle", {{"L", pi}, {"m", "1"}, {"theta", "pi/2"}}},
                {"zeta-circle", {{"L", pi}, {"m", "1"}, {"theta", "pi"}}}})},
      {5, "Spectral decomposition of covers",
       compose({{"spectra-cover", {{"base", "cycle"}, {"n", "3"}, {"N", "12"}}},
                {"spectra-cover", {{"base", "random"}, {"n", "6"}, {"p", "0.5"}, {"graph_seed", "11"}, {"N", "12"}}},
                {"spectra-cover", {{"base", "random"}, {"n", "9"}, {"p", "0.3"}, {"graph_seed", "12"}, {"N", "9"}}},
                {"zeta-cover-product", {{"L", "1"}, {"m", "0"}, {"N", "1,2,3,4,5,6,7,8,9,10,11,12"}}},
                {"zeta-cover-product", {{"L", "1"}, {"m", "0.5"}, {"N", "2,5,12"}}}})},
      {6, "Cover free energy",
       compose({{"covers-free-energy", {{"geometry", "circle"}, {"L", "1"}, {"m", "0"}}},
                {"covers-free-energy", {{"geometry", "circle"}, {"L", "1"}, {"m", "1"}, {"N", "2,4,8,16,32"}}},
                {"covers-free-energy", {{"geometry", "torus-strip"}, {"L", pi}, {"L2", pi}, {"N", "1,2,3,4,6,8"}}}})},
      {7, "Heat-trace deck identity", compose({{"covers-heat-trace", {}}, {"covers-heat-bound", {}}})},
      {8, "BFK on the flat torus", compose({{"zeta-bfk", {{"L1", pi}, {"L2", pi}, {"m", "1"}, {"cutoff", "1024"}}}})},
      {9, "Anomaly suite",
       compose({{"anomaly-smooth", {}},
                {"anomaly-reference", {{"d", "2"}}},
                {"anomaly-scaling", {{"d", "2"}, {"h", "bump"}}},
                {"anomaly-scaling", {{"d", "2"}, {"h", "tilt"}}},
                {"anomaly-counterterm", {{"d", "2"}}},
                {"anomaly-counterterm", {{"d", "3"}}}})},
      {10, "Weights and entropy", compose({{"weights", {}}})},
      {11, "RP witnesses",
       compose({{"rp-line", {{"kappa", "1"}}},
                {"rp-compact", {{"Lambda", "1"}}},
                {"rp-compact", {{"Lambda", "4"}}},
                {"rp-compact", {{"Lambda", "16"}}},
                {"rp-cylinder", {{"Lambda", "1"}}},
                {"rp-cylinder", {{"Lambda", "10"}}},
                {"rp-cylinder", {{"Lambda", "100"}}},
                {"rp-ball", {{"Lambda", "4"}, {"basis", "8"}}}})},
      {12, "Gaussian-network identities", compose({{"gff-identities", {{"graphs", "100"}, {"max_size", "60"}}}})},
      {13, "Wick calculus", compose({{"gff-wick", {{"samples", "1000000"}}}})},
  };
}

}  // namespace

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> list = build();
  return list;
}

ExperimentReport verify_criterion(int number) {
  for (const auto& c : criteria()) {
    if (c.number != number) continue;
    ExperimentReport r;
    r.id = "criterion-" + std::to_string(number);
    r.inputs = {{"title", c.title}};
    const auto t0 = std::chrono::steady_clock::now();
    c.body(r);
    r.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    r.finalize();
    return r;
  }
  throw PreconditionError("no acceptance criterion numbered " + std::to_string(number));
}

}  // namespace speclab::report
