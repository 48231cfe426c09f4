#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "speclab/covers.hpp"
#include "speclab/error.hpp"
#include "speclab/report.hpp"
#include "speclab/rpwitness.hpp"
#include "speclab/transfer.hpp"
#include "speclab/zeta.hpp"

namespace speclab::report {

namespace {

constexpr double kPi = std::numbers::pi;

Table free_energy_circle() {
  Table t{"free-energy-circle", {"N", "value", "limit", "abs_err"}, {}};
  covers::CoverSpec s;
  s.L = 1.0;
  const std::vector<int> ns{2, 4, 8, 16, 32, 64, 128};
  const auto seq = covers::free_energy_sequence(s, ns);
  for (std::size_t i = 0; i < ns.size(); ++i) t.rows.push_back({double(ns[i]), seq.values[i], 0.0, std::abs(seq.values[i])});
  return t;
}

Table bfk_torus() {
  Table t{"bfk-torus", {"cutoff", "lhs", "rhs", "residual"}, {}};
  for (long c : {64L, 128L, 256L, 512L, 1024L}) {
    const auto b = zeta::bfk_torus_check(2 * kPi, 2 * kPi, 1.0, c);
    t.rows.push_back({double(c), b.lhs, b.rhs, b.residual});
  }
  return t;
}

Table rp_line() {
  Table t{"rp-line", {"n", "pairing"}, {}};
  const auto c = rpwitness::line_witness(1.0, 12);
  for (std::size_t n = 0; n < c.trend.size(); ++n) t.rows.push_back({double(n), c.trend[n]});
  return t;
}

Table rp_compact() {
  Table t{"rp-compact", {"Lambda", "lambda_star", "pairing", "closed_form", "uncut"}, {}};
  for (double L : {1.0, 2.0, 4.0, 9.0, 16.0, 25.0}) {
    const auto c = rpwitness::compact_witness(L);
    const double ls = rpwitness::largest_odd_eigenvalue(L);
    t.rows.push_back({L, ls, c.pairing_value, -1.0 / (ls + 1.0), c.uncut_value});
  }
  return t;
}

Table transfer_gaussian() {
  Table t{"transfer-gaussian", {"N", "log_z", "log_z_closed", "rel_err"}, {}};
  const auto model = transfer::build_transfer(transfer::EvenPoly{{0.0, 1.0}});
  for (int N : {1, 2, 4, 8, 16, 32, 64}) {
    const double z = transfer::log_partition_function(model, N);
    const double closed = transfer::gaussian_chain_log_z(N, 1.0);
    t.rows.push_back({double(N), z, closed, std::abs(std::expm1(z - closed))});
  }
  return t;
}

}  // namespace

std::vector<std::string> table_names() {
  return {"free-energy-circle", "bfk-torus", "rp-line", "rp-compact", "transfer-gaussian"};
}

Table make_table(const std::string& name) {
  if (name == "free-energy-circle") return free_energy_circle();
  if (name == "bfk-torus") return bfk_torus();
  if (name == "rp-line") return rp_line();
  if (name == "rp-compact") return rp_compact();
  if (name == "transfer-gaussian") return transfer_gaussian();
  throw PreconditionError("unknown table '" + name + "'");
}

std::string to_csv(const Table& t) {
  std::ostringstream out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
  out << '\n';
  char buf[32];
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", row[i]);
      out << (i ? "," : "") << buf;
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace speclab::report
