#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "speclab/error.hpp"
#include "speclab/report.hpp"

namespace speclab::report {

namespace {

// JSON has no encoding for non-finite numbers, so they travel as strings.
json encode(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double decode(const json& j) {
  if (j.is_number()) return j.get<double>();
  const std::string s = j.get<std::string>();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  throw PreconditionError("report: bad number '" + s + "'");
}

json encode_map(const std::map<std::string, double>& m) {
  json j = json::object();
  for (const auto& [k, v] : m) j[k] = encode(v);
  return j;
}

std::map<std::string, double> decode_map(const json& j) {
  std::map<std::string, double> m;
  for (auto it = j.begin(); it != j.end(); ++it) m[it.key()] = decode(it.value());
  return m;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

}  // namespace

void ExperimentReport::check(const std::string& name, double residual, double tolerance) {
  residuals[name] = residual;
  tolerances[name] = tolerance;
}

void ExperimentReport::require_true(const std::string& name, bool ok) { check(name, ok ? 0.0 : 1.0, 0.0); }

void ExperimentReport::finalize() {
  pass = error.empty() && !residuals.empty();
  for (const auto& [k, r] : residuals) {
    const auto t = tolerances.find(k);
    if (t == tolerances.end() || !(r >= 0.0) || !(r <= t->second)) pass = false;
  }
}

json to_json(const ExperimentReport& r) {
  json j;
  j["schema"] = kSchemaVersion;
  j["id"] = r.id;
  j["inputs"] = r.inputs;
  j["outputs"] = encode_map(r.outputs);
  j["residuals"] = encode_map(r.residuals);
  j["tolerances"] = encode_map(r.tolerances);
  j["details"] = r.details;
  j["pass"] = r.pass;
  j["runtime_ms"] = r.runtime_ms;
  j["seed"] = r.seed;
  if (!r.error.empty()) j["error"] = {{"kind", r.error_kind}, {"message", r.error}};
  return j;
}

ExperimentReport report_from_json(const json& j) {
  require(j.value("schema", 0) == kSchemaVersion, "report: unsupported schema version");
  ExperimentReport r;
  r.id = j.at("id").get<std::string>();
  r.inputs = j.at("inputs");
  r.outputs = decode_map(j.at("outputs"));
  r.residuals = decode_map(j.at("residuals"));
  r.tolerances = decode_map(j.at("tolerances"));
  r.details = j.value("details", json::object());
  r.pass = j.at("pass").get<bool>();
  r.runtime_ms = j.at("runtime_ms").get<double>();
  r.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("error")) {
    r.error_kind = j["error"].at("kind").get<std::string>();
    r.error = j["error"].at("message").get<std::string>();
  }
  return r;
}

std::string to_csv(const std::vector<ExperimentReport>& reports) {
  std::ostringstream out;
  out << "id,kind,name,value,tolerance\n";
  for (const auto& r : reports) {
    for (const auto& [k, v] : r.outputs) out << csv_field(r.id) << ",output," << csv_field(k) << ',' << fmt(v) << ",\n";
    for (const auto& [k, v] : r.residuals)
      out << csv_field(r.id) << ",residual," << csv_field(k) << ',' << fmt(v) << ',' << fmt(r.tolerances.at(k)) << '\n';
    out << csv_field(r.id) << ",pass,pass," << (r.pass ? 1 : 0) << ",\n";
    if (!r.error.empty()) out << csv_field(r.id) << ",error," << csv_field(r.error_kind) << ',' << csv_field(r.error) << ",\n";
  }
  return out.str();
}

std::string write_reports(const std::vector<ExperimentReport>& reports, const std::string& out_dir,
                          const std::string& stem, const std::string& format) {
  require(format == "json" || format == "csv", "format must be csv or json");
  std::filesystem::create_directories(out_dir);
  const auto path = std::filesystem::path(out_dir) / (stem + "." + format);
  std::ofstream f(path);
  if (!f) throw PreconditionError("cannot write " + path.string());
  if (format == "csv") {
    f << to_csv(reports);
  } else {
    json arr = json::array();
    for (const auto& r : reports) arr.push_back(to_json(r));
    f << json{{"schema", kSchemaVersion}, {"reports", arr}}.dump(2) << '\n';
  }
  return path.string();
}

}  // namespace speclab::report
