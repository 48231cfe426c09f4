#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "speclab/error.hpp"
#include "speclab/report.hpp"

namespace speclab::report {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  // Accept "pi" multiples such as 2pi or pi/3, which the geometry parameters use constantly.
  const auto p = s.find("pi");
  if (p != std::string::npos) {
    const double pi = 3.141592653589793238462643383279502884;
    const std::string pre = trim(s.substr(0, p));
    const std::string post = trim(s.substr(p + 2));
    double factor = 1.0;
    if (!pre.empty()) factor = parse_number(key, pre.back() == '*' ? pre.substr(0, pre.size() - 1) : pre);
    double divisor = 1.0;
    if (!post.empty()) {
      require(post[0] == '/', "parameter " + key + ": cannot parse '" + s + "'");
      divisor = parse_number(key, post.substr(1));
    }
    return factor * pi / divisor;
  }
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  const auto res = std::from_chars(first, last, v);
  require(res.ec == std::errc() && res.ptr == last && first != last,
          "parameter " + key + ": expected a number, got '" + s + "'");
  return v;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, ',')) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

}  // namespace

Config parse_config(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      require(line.back() == ']' && line.size() > 2, "config line " + std::to_string(lineno) + ": bad section header");
      cfg.sections.push_back({trim(line.substr(1, line.size() - 2)), {}, lineno});
      continue;
    }
    const auto eq = line.find('=');
    require(eq != std::string::npos, "config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    require(!key.empty(), "config line " + std::to_string(lineno) + ": empty key");
    auto& target = cfg.sections.empty() ? cfg.globals : cfg.sections.back().values;
    require(!target.count(key), "config line " + std::to_string(lineno) + ": duplicate key " + key);
    target[key] = value;
  }
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream f(path);
  require(static_cast<bool>(f), "cannot open config file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

double Params::number(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : parse_number(key, it->second);
}

long Params::integer(const std::string& key, long fallback) const {
  const double v = number(key, static_cast<double>(fallback));
  require(v == static_cast<double>(static_cast<long>(v)), "parameter " + key + ": expected an integer");
  return static_cast<long>(v);
}

std::string Params::text(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

std::vector<double> Params::numbers(const std::string& key, const std::vector<double>& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<double> out;
  for (const auto& s : split_list(it->second)) out.push_back(parse_number(key, s));
  require(!out.empty(), "parameter " + key + ": empty list");
  return out;
}

std::vector<long> Params::integers(const std::string& key, const std::vector<long>& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<long> out;
  for (double v : numbers(key, {})) {
    require(v == static_cast<double>(static_cast<long>(v)), "parameter " + key + ": expected integers");
    out.push_back(static_cast<long>(v));
  }
  return out;
}

json Params::echo() const {
  json j = json::object();
  for (const auto& [k, v] : values_) j[k] = v;
  return j;
}

}  // namespace speclab::report
