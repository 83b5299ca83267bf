#pragma once

// Report model shared by every subcommand plus its three renderings. Output
// depends only on the report contents, so identical runs give identical bytes.

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "occtime/validation.hpp"

namespace occtime::cli {

struct Row {
  std::string name;
  int n = -1;  // -1 when the quantity has no order
  double value = 0.0;
  double err = 0.0;
  std::string provenance;
  std::string anchor;
};

struct Report {
  std::string command;
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<Row> rows;
  std::vector<validation::Check> checks;

  bool passed() const { return validation::all_passed(checks); }
  bool converged() const { return validation::all_converged(checks); }
};

enum class Format { csv, json, pretty };

inline std::string format_number(double x, int digits) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

inline std::string status_of(const validation::Check& c) {
  if (!c.converged) return "not_converged";
  return c.passed ? "pass" : "fail";
}

inline std::string render_csv(const Report& r) {
  std::ostringstream out;
  out << "# command=" << r.command << '\n';
  for (const auto& [k, v] : r.meta) out << "# " << k << '=' << v << '\n';
  out << "name,n,value,err,provenance,paper_anchor\n";
  for (const Row& row : r.rows) {
    out << csv_field(row.name) << ',' << (row.n >= 0 ? std::to_string(row.n) : "") << ','
        << format_number(row.value, 15) << ',' << format_number(row.err, 3) << ','
        << csv_field(row.provenance) << ',' << csv_field(row.anchor) << '\n';
  }
  if (!r.checks.empty()) {
    out << '\n' << "suite,check,measured,expected,tolerance,status\n";
    for (const validation::Check& c : r.checks) {
      out << csv_field(c.suite) << ',' << csv_field(c.name) << ',' << format_number(c.measured, 10)
          << ',' << format_number(c.expected, 10) << ',' << format_number(c.tolerance, 3) << ','
          << status_of(c) << '\n';
    }
  }
  return out.str();
}

inline std::string render_json(const Report& r) {
  nlohmann::ordered_json j;
  j["command"] = r.command;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.meta) meta[k] = v;
  j["meta"] = meta;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const Row& row : r.rows) {
    nlohmann::ordered_json e;
    e["name"] = row.name;
    if (row.n >= 0) e["n"] = row.n;
    e["value"] = row.value;
    e["err"] = row.err;
    e["provenance"] = row.provenance;
    e["paper_anchor"] = row.anchor;
    rows.push_back(std::move(e));
  }
  j["rows"] = rows;
  nlohmann::ordered_json checks = nlohmann::ordered_json::array();
  for (const validation::Check& c : r.checks) {
    nlohmann::ordered_json e;
    e["suite"] = c.suite;
    e["check"] = c.name;
    e["measured"] = c.measured;
    e["expected"] = c.expected;
    e["tolerance"] = c.tolerance;
    e["status"] = status_of(c);
    checks.push_back(std::move(e));
  }
  j["checks"] = checks;
  j["status"] = !r.converged() ? "not_converged" : (r.passed() ? "pass" : "fail");
  return j.dump(2) + "\n";
}

inline std::string render_pretty(const Report& r) {
  std::ostringstream out;
  out << r.command << '\n';
  for (const auto& [k, v] : r.meta) out << "  " << k << ": " << v << '\n';
  if (!r.rows.empty()) out << '\n';
  char line[256];
  for (const Row& row : r.rows) {
    const std::string label = row.n >= 0 ? row.name + " n=" + std::to_string(row.n) : row.name;
    const std::string err =
        row.err == 0.0 && row.provenance == "closed_form" ? "exact" : format_number(row.err, 2);
    std::snprintf(line, sizeof line, "  %-28s %20s  +- %-9s  %s\n", label.c_str(),
                  format_number(row.value, 12).c_str(), err.c_str(), row.provenance.c_str());
    out << line;
  }
  if (!r.checks.empty()) out << '\n';
  for (const validation::Check& c : r.checks) {
    std::snprintf(line, sizeof line, "  [%-4s] %-44s %14s (expected %s, tol %s)\n",
                  c.passed ? "pass" : (c.converged ? "FAIL" : "NCNV"), c.name.c_str(),
                  format_number(c.measured, 8).c_str(), format_number(c.expected, 10).c_str(),
                  format_number(c.tolerance, 2).c_str());
    out << line;
  }
  if (!r.checks.empty()) {
    out << "\nstatus: " << (!r.converged() ? "not converged" : (r.passed() ? "pass" : "fail"))
        << '\n';
  }
  return out.str();
}

inline std::string render(const Report& r, Format f) {
  switch (f) {
    case Format::csv: return render_csv(r);
    case Format::json: return render_json(r);
    case Format::pretty: return render_pretty(r);
  }
  return {};
}

}  // namespace occtime::cli
