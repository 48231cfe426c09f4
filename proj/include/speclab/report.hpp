#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

namespace speclab::report {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

struct ExperimentReport {
  std::string id;
  json inputs = json::object();
  std::map<std::string, double> outputs;
  std::map<std::string, double> residuals;   // nonnegative
  std::map<std::string, double> tolerances;  // same keys as residuals
  json details = json::object();             // free-form payload (tables, certificates)
  bool pass = false;
  double runtime_ms = 0.0;
  std::uint64_t seed = 0;
  std::string error_kind;  // "", "precondition" or "numerical"
  std::string error;

  // Records a residual against its tolerance. Negative or NaN residuals fail.
  void check(const std::string& name, double residual, double tolerance);
  // A boolean condition, stored as residual 0 (true) or 1 (false) against tolerance 0.
  void require_true(const std::string& name, bool ok);
  // pass = no error and every residual within tolerance.
  void finalize();
};

json to_json(const ExperimentReport& r);
ExperimentReport report_from_json(const json& j);
// Long format, one row per output or residual: id,kind,name,value,tolerance.
std::string to_csv(const std::vector<ExperimentReport>& reports);

// ---- configuration ---------------------------------------------------------
//
// Flat "key = value" lines; "[name]" starts a section naming an experiment.
// Keys before the first section are global (seed, threads). '#' starts a comment.

struct Section {
  std::string name;
  std::map<std::string, std::string> values;
  int line = 0;
};

struct Config {
  std::map<std::string, std::string> globals;
  std::vector<Section> sections;
};

Config parse_config(const std::string& text);
Config load_config(const std::string& path);

// Typed read access to experiment parameters with defaults.
class Params {
 public:
  Params() = default;
  explicit Params(std::map<std::string, std::string> values) : values_(std::move(values)) {}

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  double number(const std::string& key, double fallback) const;
  long integer(const std::string& key, long fallback) const;
  std::string text(const std::string& key, const std::string& fallback) const;
  std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback) const;
  std::vector<long> integers(const std::string& key, const std::vector<long>& fallback) const;
  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  const std::map<std::string, std::string>& values() const { return values_; }
  json echo() const;

 private:
  std::map<std::string, std::string> values_;
};

// ---- experiments -------------------------------------------------------------

struct Experiment {
  std::string id;
  std::string module;  // CLI subcommand that owns it
  std::string summary;
  std::set<std::string> keys;  // accepted parameter names
  std::function<void(const Params&, std::uint64_t seed, ExperimentReport&)> body;
};

const std::vector<Experiment>& experiments();
const Experiment& find_experiment(const std::string& id);

// Runs one experiment: validates keys, times it, catches module errors into the report.
ExperimentReport run_experiment(const std::string& id, const Params& params, std::uint64_t seed);
std::vector<ExperimentReport> run_config(const Config& cfg, std::optional<std::uint64_t> seed_override);

// ---- tables ------------------------------------------------------------------

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

std::vector<std::string> table_names();
Table make_table(const std::string& name);
std::string to_csv(const Table& t);

// ---- acceptance ----------------------------------------------------------------

struct Criterion {
  int number = 0;
  std::string title;
  std::function<void(ExperimentReport&)> body;
};

const std::vector<Criterion>& criteria();
ExperimentReport verify_criterion(int number);

// Writes <out_dir>/<stem>.<format>; format is "json" or "csv". Returns the path.
std::string write_reports(const std::vector<ExperimentReport>& reports, const std::string& out_dir,
                          const std::string& stem, const std::string& format);

}  // namespace speclab::report
