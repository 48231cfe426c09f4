// Command-line front end: module experiments, config runs, acceptance verification and tables.
//
// Exit codes: 0 every selected report passes, 1 some report fails, 2 usage or precondition error.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "speclab/error.hpp"
#include "speclab/parallel.hpp"
#include "speclab/report.hpp"

namespace rep = speclab::report;

namespace {

struct Globals {
  std::uint64_t seed = 2024;
  bool seed_given = false;
  int threads = 0;
  std::string out_dir = "speclab-out";
  std::string format = "json";
};

void print_error(const std::string& kind, const std::string& message) {
  const rep::json j{{"schema", rep::kSchemaVersion}, {"error", {{"kind", kind}, {"message", message}}}};
  std::cerr << j.dump() << '\n';
}

double worst_ratio(const rep::ExperimentReport& r) {
  double w = 0.0;
  for (const auto& [k, v] : r.residuals) {
    const double t = r.tolerances.at(k);
    w = std::max(w, t > 0 ? v / t : (v > 0 ? INFINITY : 0.0));
  }
  return w;
}

int finish(const std::vector<rep::ExperimentReport>& reports, const Globals& g, const std::string& stem) {
  std::printf("%-24s %-6s %12s %16s\n", "id", "result", "runtime_ms", "max resid/tol");
  bool precondition = false, failed = false;
  for (const auto& r : reports) {
    std::printf("%-24s %-6s %12.1f %16.3g\n", r.id.c_str(), r.pass ? "PASS" : "FAIL", r.runtime_ms, worst_ratio(r));
    if (!r.error.empty()) {
      print_error(r.error_kind, r.id + ": " + r.error);
      precondition |= r.error_kind == "precondition";
    }
    for (const auto& [k, v] : r.residuals)
      if (!(v <= r.tolerances.at(k))) std::printf("    %s = %.3e (tolerance %.3e)\n", k.c_str(), v, r.tolerances.at(k));
    failed |= !r.pass;
  }
  if (!g.out_dir.empty() && !reports.empty())
    std::printf("artifact: %s\n", rep::write_reports(reports, g.out_dir, stem, g.format).c_str());
  if (precondition) return 2;
  return failed ? 1 : 0;
}

rep::Params parse_sets(const std::vector<std::string>& sets) {
  rep::Params p;
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    speclab::require(eq != std::string::npos && eq > 0, "--set expects key=value, got '" + s + "'");
    p.set(s.substr(0, eq), s.substr(eq + 1));
  }
  return p;
}

std::vector<std::string> module_experiments(const std::string& module) {
  std::vector<std::string> ids;
  for (const auto& e : rep::experiments())
    if (e.module == module) ids.push_back(e.id);
  return ids;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"speclab: spectral geometry and Gaussian field experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Seed for randomized experiments");
  app.add_option("--threads", g.threads, "OpenMP threads for the kernels (0 = runtime default)")->check(CLI::NonNegativeNumber);
  app.add_option("--out-dir", g.out_dir, "Directory for JSON/CSV artifacts (empty string disables)");
  app.add_option("--format", g.format, "Artifact format")->check(CLI::IsMember({"csv", "json"}));

  // Module subcommands share the same shape: pick an experiment, override parameters.
  struct ModuleCmd {
    std::string experiment;
    std::vector<std::string> sets;
    bool list = false;
  };
  std::map<std::string, ModuleCmd> module_cmds;
  std::map<std::string, CLI::App*> module_apps;
  const std::map<std::string, std::string> modules{{"spectra", "Laplace spectra of circles, tori and cover graphs"},
                                                   {"zeta", "Zeta-regularized determinants and the torus gluing formula"},
                                                   {"transfer", "Transfer matrices of one-dimensional chains"},
                                                   {"covers", "Heat traces and free energies along cover towers"},
                                                   {"anomaly", "Conformal anomaly on the sphere, weights and Renyi entropies"},
                                                   {"gff", "Gaussian networks and Wick calculus"}};
  for (const auto& [name, help] : modules) {
    auto* sub = app.add_subcommand(name, help);
    auto& cmd = module_cmds[name];
    const auto ids = module_experiments(name);
    cmd.experiment = ids.front();
    sub->add_option("-e,--experiment", cmd.experiment, "Experiment id")->check(CLI::IsMember(ids));
    sub->add_option("--set", cmd.sets, "Parameter override key=value (repeatable)");
    sub->add_flag("--list", cmd.list, "List experiments and parameters");
    module_apps[name] = sub;
  }

  auto* rp = app.add_subcommand("rp", "Reflection-positivity witnesses for cut-off covariances");
  std::string construction = "line";
  std::optional<double> kappa, Lambda, L;
  std::optional<int> n_max, basis;
  std::string cert_out;
  std::vector<std::string> rp_sets;
  rp->add_option("--construction", construction, "Witness construction")
      ->check(CLI::IsMember({"line", "cylinder", "compact", "ball", "phi4"}));
  rp->add_option("--kappa", kappa, "Line resolvent parameter");
  rp->add_option("--Lambda", Lambda, "Spectral cutoff");
  rp->add_option("--L", L, "Slice circle length (cylinder)");
  rp->add_option("--n-max", n_max, "Largest derivative order searched");
  rp->add_option("--basis", basis, "Basis size (ball)");
  rp->add_option("--out", cert_out, "Write the certificate JSON here");
  rp->add_option("--set", rp_sets, "Further parameter overrides key=value");

  auto* verify = app.add_subcommand("verify", "Run acceptance criteria");
  bool verify_all = false;
  std::vector<int> verify_numbers;
  verify->add_flag("--all", verify_all, "Run every criterion");
  verify->add_option("--criterion", verify_numbers, "Criterion number (repeatable)");

  auto* table = app.add_subcommand("table", "Print a named CSV table");
  std::string table_name;
  table->add_option("name", table_name, "Table name")->required()->check(CLI::IsMember(rep::table_names()));

  auto* run = app.add_subcommand("run", "Run every experiment section of a config file");
  std::string config_path;
  run->add_option("config", config_path, "Config file (key = value lines, [experiment] sections)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  g.seed_given = app.count("--seed") > 0;
  speclab::par::set_threads(g.threads);

  try {
    for (const auto& [name, cmd] : module_cmds) {
      if (!module_apps[name]->parsed()) continue;
      if (cmd.list) {
        for (const auto& e : rep::experiments()) {
          if (e.module != name) continue;
          std::printf("%-22s %s\n    keys:", e.id.c_str(), e.summary.c_str());
          for (const auto& k : e.keys) std::printf(" %s", k.c_str());
          std::printf("\n");
        }
        return 0;
      }
      const auto r = rep::run_experiment(cmd.experiment, parse_sets(cmd.sets), g.seed);
      return finish({r}, g, cmd.experiment);
    }

    if (rp->parsed()) {
      rep::Params p = parse_sets(rp_sets);
      auto put = [&](const char* key, auto opt) {
        if (!opt) return;
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", static_cast<double>(*opt));
        p.set(key, buf);
      };
      put("kappa", kappa);
      put("Lambda", Lambda);
      put("L", L);
      put("n_max", n_max);
      put("basis", basis);
      const std::string id = "rp-" + construction;
      const auto r = rep::run_experiment(id, p, g.seed);
      if (!cert_out.empty() && r.details.contains("certificate")) {
        std::ofstream f(cert_out);
        speclab::require(static_cast<bool>(f), "cannot write " + cert_out);
        f << r.details["certificate"].dump(2) << '\n';
      }
      return finish({r}, g, id);
    }

    if (verify->parsed()) {
      if (verify_all || verify_numbers.empty())
        for (const auto& c : rep::criteria()) verify_numbers.push_back(c.number);
      std::vector<rep::ExperimentReport> reports;
      for (int n : verify_numbers) {
        reports.push_back(rep::verify_criterion(n));
        std::fflush(stdout);
      }
      const int code = finish(reports, g, "verify");
      std::printf("\n%-4s %-40s %s\n", "#", "criterion", "result");
      for (std::size_t i = 0; i < reports.size(); ++i)
        std::printf("%-4d %-40s %s\n", verify_numbers[i], reports[i].inputs.value("title", "").c_str(),
                    reports[i].pass ? "PASS" : "FAIL");
      return code;
    }

    if (table->parsed()) {
      const auto t = rep::make_table(table_name);
      const std::string csv = rep::to_csv(t);
      std::fputs(csv.c_str(), stdout);
      if (app.count("--out-dir") > 0 && !g.out_dir.empty()) {
        std::filesystem::create_directories(g.out_dir);
        std::ofstream(std::filesystem::path(g.out_dir) / (table_name + ".csv")) << csv;
      }
      return 0;
    }

    if (run->parsed()) {
      const auto cfg = rep::load_config(config_path);
      const auto reports =
          rep::run_config(cfg, g.seed_given ? std::optional<std::uint64_t>(g.seed) : std::nullopt);
      const auto slash = config_path.find_last_of('/');
      std::string stem = config_path.substr(slash == std::string::npos ? 0 : slash + 1);
      if (const auto dot = stem.rfind('.'); dot != std::string::npos && dot > 0) stem.resize(dot);
      return finish(reports, g, stem);
    }
  } catch (const speclab::PreconditionError& e) {
    print_error("precondition", e.what());
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    print_error("io", e.what());
    return 2;
  } catch (const speclab::NumericalError& e) {
    print_error("numerical", e.what());
    return 1;
  }
  return 2;
}
