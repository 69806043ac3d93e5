// Copyright 2026 The coulab Authors
// SPDX-License-Identifier: Apache-2.0

#include "coulab/report.hpp"

#include <cstdio>

namespace coulab {

void Report::finalize() {
  if (std::isinf(lhs) && lhs > 0) {
    gap = lhs;
    pass = true;
    return;
  }
  gap = lhs - rhs;
  pass = std::isfinite(gap) ? gap >= -tolerance - 3.0 * mc_error : gap > 0;
}

Report make_report(std::string name, double lhs, double rhs, double tol,
                   double mc_error) {
  Report r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.tolerance = tol;
  r.mc_error = mc_error;
  r.finalize();
  return r;
}

bool all_pass(const std::vector<Report>& rs) {
  for (const auto& r : rs)
    if (!r.pass) return false;
  return true;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void write_csv_header(std::ostream& os) {
  os << "name,config,scale,lhs,rhs,gap,mc_error,fitted_constant,tolerance,pass,"
        "note\n";
}

void write_csv_row(std::ostream& os, const Report& r) {
  os << csv_escape(r.name) << ',' << csv_escape(r.config) << ','
     << format_double(r.scale) << ',' << format_double(r.lhs) << ','
     << format_double(r.rhs) << ',' << format_double(r.gap) << ','
     << format_double(r.mc_error) << ',' << format_double(r.fitted_constant)
     << ',' << format_double(r.tolerance) << ',' << (r.pass ? 1 : 0) << ','
     << csv_escape(r.note) << '\n';
}

void write_csv(std::ostream& os, const std::vector<Report>& rs) {
  write_csv_header(os);
  for (const auto& r : rs) write_csv_row(os, r);
}

}  // namespace coulab
