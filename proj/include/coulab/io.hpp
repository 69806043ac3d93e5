// Copyright 2026 The coulab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "coulab/common.hpp"
#include "coulab/fock.hpp"
#include "coulab/geometry.hpp"
#include "coulab/inequalities.hpp"
#include "coulab/model.hpp"
#include "coulab/report.hpp"
#include "coulab/scan.hpp"

namespace coulab {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Malformed or invalid configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

json load_json_file(const std::string& path);
json parse_json_text(const std::string& text);

Vec3 parse_vec3(const json& j);
std::vector<Vec3> parse_points(const json& j);

/// {"shape": "cube"|"box"|"ball"|"sites", "side", "extent", "center",
///  "radius", "dim", "sites", "spacing", "label"}
Domain parse_domain(const json& j);
/// [{"R": [x, y, z], "z": 1.0}, ...]
NucleiConfig parse_nuclei(const json& j);
/// {"kind": "none"|"uniform"|"periodic"|"random", "B", "amplitude",
///  "period", "seed", "modes"}
MagneticField parse_field(const json& j);
/// {"x": [[..], ..], "q": [..]}
ChargeConfig parse_charge_config(const json& j);
ScanSpec parse_scan_spec(const json& j);
Statistics parse_statistics(const std::string& s);

json report_to_json(const Report& r);
/// format "csv" or "json"; json output is {"schema_version", "reports"}.
void write_reports(std::ostream& os, const std::vector<Report>& rs, const std::string& format);

void write_scan_csv(std::ostream& os, const ScanResult& s);
json scan_to_json(const ScanResult& s);

/// Dense arrays as row-major lists of "%.17g" decimal strings.
json matrix_to_json(const CMat& m);
CMat matrix_from_json(const json& j);
json state_to_json(const FockState& g);
FockState state_from_json(const json& j);

json domain_to_json(const Domain& d);
/// Vertex lists of the tiles of g(ell * tiling) meeting the box [lo, hi].
json tiling_to_json(const GroupElement& g, double ell, const Vec3& lo, const Vec3& hi);
/// x,y,z,value rows.
void write_field_csv(std::ostream& os, const std::vector<Vec3>& points,
                     const std::vector<double>& values);

}  // namespace coulab
