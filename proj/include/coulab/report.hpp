// Copyright 2026 The coulab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

namespace coulab {

/// One inequality evaluation: lhs >= rhs is the claim, gap = lhs - rhs.
struct Report {
  std::string name;
  std::string config;
  double scale = std::numeric_limits<double>::quiet_NaN();
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;
  double mc_error = 0.0;
  double fitted_constant = std::numeric_limits<double>::quiet_NaN();
  double tolerance = 1e-12;
  bool pass = false;
  std::string note;

  /// Sets gap and pass from lhs, rhs, tolerance and mc_error.
  void finalize();
};

Report make_report(std::string name, double lhs, double rhs, double tol = 1e-12,
                   double mc_error = 0.0);

bool all_pass(const std::vector<Report>& rs);

/// Fixed column CSV; numbers printed with %.17g so output is stable.
void write_csv_header(std::ostream& os);
void write_csv_row(std::ostream& os, const Report& r);
void write_csv(std::ostream& os, const std::vector<Report>& rs);

std::string format_double(double x);

}  // namespace coulab
