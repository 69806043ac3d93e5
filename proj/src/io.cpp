// Copyright 2026 The coulab Authors
// SPDX-License-Identifier: Apache-2.0

#include "coulab/io.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace coulab {

namespace {

json number_or_string(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

double as_double(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') throw ConfigError("not a number: " + s);
    return v;
  }
  throw ConfigError("expected a number, got " + j.dump());
}

}  // namespace

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str());
}

json parse_json_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed json: ") + e.what());
  }
}

Vec3 parse_vec3(const json& j) {
  if (!j.is_array() || j.size() != 3) throw ConfigError("expected [x, y, z], got " + j.dump());
  return Vec3(as_double(j[0]), as_double(j[1]), as_double(j[2]));
}

std::vector<Vec3> parse_points(const json& j) {
  if (!j.is_array()) throw ConfigError("expected a list of points");
  std::vector<Vec3> out;
  for (const auto& p : j) out.push_back(parse_vec3(p));
  return out;
}

Domain parse_domain(const json& j) {
  if (!j.is_object()) throw ConfigError("domain must be an object");
  const double a = j.value("spacing", 1.0);
  const std::string shape = j.value("shape", "cube");
  ShapeSpec s;
  if (shape == "cube") {
    s = cube_shape(j.value("side", 2.0), j.value("dim", 3));
  } else if (shape == "box") {
    s.kind = ShapeKind::Box;
    s.dim = j.value("dim", 3);
    s.extent = parse_vec3(j.at("extent"));
  } else if (shape == "ball") {
    s = ball_shape(j.value("radius", 1.0), j.contains("center") ? parse_vec3(j["center"])
                                                                 : Vec3::Zero());
  } else if (shape == "sites") {
    s.kind = ShapeKind::Custom;
    s.dim = j.value("dim", 3);
    for (const auto& p : j.at("sites")) {
      if (!p.is_array() || p.size() != 3) throw ConfigError("sites must be [i, j, k] triples");
      s.sites.push_back({p[0].get<int>(), p[1].get<int>(), p[2].get<int>()});
    }
  } else {
    throw ConfigError("unknown domain shape: " + shape);
  }
  s.label = j.value("label", std::string());
  try {
    return build_domain(s, a);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

NucleiConfig parse_nuclei(const json& j) {
  if (!j.is_array()) throw ConfigError("nuclei must be a list");
  NucleiConfig k;
  for (const auto& n : j) k.nuclei.push_back({parse_vec3(n.at("R")), n.value("z", 1.0)});
  return k;
}

MagneticField parse_field(const json& j) {
  if (j.is_null()) return no_field();
  const std::string kind = j.value("kind", "none");
  if (kind == "none") return no_field();
  if (kind == "uniform") return uniform_field(parse_vec3(j.at("B")));
  if (kind == "periodic") return periodic_field(j.value("amplitude", 1.0), j.value("period", 1.0));
  if (kind == "random")
    return random_bounded_field(j.value("seed", std::uint64_t{0}), j.value("amplitude", 1.0),
                                j.value("modes", 4));
  throw ConfigError("unknown field kind: " + kind);
}

ChargeConfig parse_charge_config(const json& j) {
  ChargeConfig c;
  c.x = parse_points(j.at("x"));
  for (const auto& q : j.at("q")) c.q.push_back(as_double(q));
  if (c.q.size() != c.x.size()) throw ConfigError("charge config: x and q differ in length");
  return c;
}

Statistics parse_statistics(const std::string& s) {
  if (s == "fermion") return Statistics::Fermion;
  if (s == "boson") return Statistics::Boson;
  throw ConfigError("unknown statistics: " + s);
}

ScanSpec parse_scan_spec(const json& j) {
  ScanSpec s;
  try {
    s.model = parse_scan_model(j.value("model", "crystal"));
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  if (j.contains("sides")) s.sides = j["sides"].get<std::vector<int>>();
  s.sites_per_cell = j.value("sites_per_cell", s.model == ScanModel::QuantumNuclei ? 1 : 2);
  s.spacing = j.value("spacing", s.spacing);
  s.z = j.value("z", s.z);
  s.beta = j.value("beta", s.beta);
  s.mu = j.value("mu", s.mu);
  s.mu_nuc = j.value("mu_nuc", s.mu_nuc);
  s.mass = j.value("mass", s.mass);
  s.nuc_cap = j.value("nuc_cap", s.nuc_cap);
  s.k_max = j.value("k_max", s.k_max);
  s.charge_points = j.value("charge_points", s.charge_points);
  s.max_dim = j.value("max_dim", s.max_dim);
  s.seed = j.value("seed", s.seed);
  s.min_separation = j.value("min_separation", s.min_separation);
  if (j.contains("added")) s.added = parse_nuclei(j["added"]).nuclei;
  if (j.contains("deformations"))
    for (const auto& d : j["deformations"]) {
      Deformation df;
      if (d.contains("cell")) {
        const auto c = d["cell"].get<std::vector<int>>();
        if (c.size() != 3) throw ConfigError("deformation cell must have 3 indices");
        df.cell = {c[0], c[1], c[2]};
      }
      df.atom = d.value("atom", 0);
      if (d.contains("dR")) df.dR = parse_vec3(d["dR"]);
      df.dz = d.value("dz", 0.0);
      s.deformations.push_back(df);
    }
  try {
    s.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return s;
}

json report_to_json(const Report& r) {
  return json{{"name", r.name},
              {"config", r.config},
              {"scale", number_or_string(r.scale)},
              {"lhs", number_or_string(r.lhs)},
              {"rhs", number_or_string(r.rhs)},
              {"gap", number_or_string(r.gap)},
              {"mc_error", number_or_string(r.mc_error)},
              {"fitted_constant", number_or_string(r.fitted_constant)},
              {"tolerance", number_or_string(r.tolerance)},
              {"pass", r.pass},
              {"note", r.note}};
}

void write_reports(std::ostream& os, const std::vector<Report>& rs, const std::string& format) {
  if (format == "csv") {
    write_csv(os, rs);
  } else if (format == "json") {
    json arr = json::array();
    for (const auto& r : rs) arr.push_back(report_to_json(r));
    os << json{{"schema_version", kSchemaVersion}, {"reports", arr}}.dump(2) << '\n';
  } else {
    throw ConfigError("unknown format: " + format);
  }
}

void write_scan_csv(std::ostream& os, const ScanResult& s) {
  os << "side,volume,energy,free_energy,e,f,n,delta_e,delta_f,cost,skipped,note\n";
  for (const auto& r : s.rows)
    os << r.side << ',' << format_double(r.volume) << ',' << format_double(r.energy) << ','
       << format_double(r.free_energy) << ',' << format_double(r.e) << ','
       << format_double(r.f) << ',' << format_double(r.n) << ',' << format_double(r.delta_e)
       << ',' << format_double(r.delta_f) << ',' << format_double(r.cost) << ','
       << (r.skipped ? 1 : 0) << ',' << r.note << '\n';
}

json scan_to_json(const ScanResult& s) {
  json rows = json::array();
  for (const auto& r : s.rows)
    rows.push_back({{"side", r.side},
                    {"volume", number_or_string(r.volume)},
                    {"energy", number_or_string(r.energy)},
                    {"free_energy", number_or_string(r.free_energy)},
                    {"e", number_or_string(r.e)},
                    {"f", number_or_string(r.f)},
                    {"n", number_or_string(r.n)},
                    {"delta_e", number_or_string(r.delta_e)},
                    {"delta_f", number_or_string(r.delta_f)},
                    {"cost", number_or_string(r.cost)},
                    {"skipped", r.skipped},
                    {"note", r.note}});
  json reports = json::array();
  for (const auto& r : s.reports) reports.push_back(report_to_json(r));
  return json{{"schema_version", kSchemaVersion},
              {"rows", rows},
              {"floor_e", number_or_string(s.floor_e)},
              {"floor_f", number_or_string(s.floor_f)},
              {"variation_e", number_or_string(s.variation_e)},
              {"variation_f", number_or_string(s.variation_f)},
              {"partial", s.partial},
              {"reports", reports}};
}

json matrix_to_json(const CMat& m) {
  json re = json::array(), im = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      re.push_back(format_double(m(i, k).real()));
      im.push_back(format_double(m(i, k).imag()));
    }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"order", "row-major"},
              {"real", re}, {"imag", im}};
}

CMat matrix_from_json(const json& j) {
  const Eigen::Index r = j.at("rows").get<Eigen::Index>(), c = j.at("cols").get<Eigen::Index>();
  if (j.value("order", "row-major") != "row-major") throw ConfigError("matrix: only row-major");
  const auto& re = j.at("real");
  const bool has_im = j.contains("imag");
  if (static_cast<Eigen::Index>(re.size()) != r * c ||
      (has_im && static_cast<Eigen::Index>(j["imag"].size()) != r * c))
    throw ConfigError("matrix: entry count does not match shape");
  CMat m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index k = 0; k < c; ++k) {
      const std::size_t idx = static_cast<std::size_t>(i * c + k);
      m(i, k) = cplx(as_double(re[idx]), has_im ? as_double(j["imag"][idx]) : 0.0);
    }
  return m;
}

json state_to_json(const FockState& g) {
  return json{{"schema_version", kSchemaVersion},
              {"modes", g.space.n},
              {"statistics", g.space.fermionic() ? "fermion" : "boson"},
              {"cap", g.space.cap},
              {"matrix", matrix_to_json(g.matrix)}};
}

FockState state_from_json(const json& j) {
  const Statistics st = parse_statistics(j.value("statistics", "fermion"));
  const FockSpace space = build_space(j.at("modes").get<int>(), st, j.value("cap", kDefaultBosonCap));
  try {
    return make_state(space, matrix_from_json(j.at("matrix")));
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

json domain_to_json(const Domain& d) {
  json sites = json::array();
  for (const auto& s : d.sites()) sites.push_back({s[0], s[1], s[2]});
  json boundary = json::array();
  for (int b : d.boundary()) boundary.push_back(b);
  return json{{"schema_version", kSchemaVersion},
              {"spacing", d.spacing()},
              {"dim", d.dim()},
              {"label", d.label()},
              {"sites", sites},
              {"boundary", boundary}};
}

json tiling_to_json(const GroupElement& g, double ell, const Vec3& lo, const Vec3& hi) {
  const Tiling& t = default_tiling();
  Vec3 kmin = Vec3::Constant(kInf), kmax = Vec3::Constant(-kInf);
  for (int c = 0; c < 8; ++c) {
    const Vec3 corner((c & 1) ? hi(0) : lo(0), (c & 2) ? hi(1) : lo(1), (c & 4) ? hi(2) : lo(2));
    const Vec3 y = g.apply_inverse(corner) / ell - t.shift;
    kmin = kmin.cwiseMin(y);
    kmax = kmax.cwiseMax(y);
  }
  json tiles = json::array();
  for (int i = static_cast<int>(std::floor(kmin(0))) - 1; i <= static_cast<int>(std::ceil(kmax(0))) + 1; ++i)
    for (int j = static_cast<int>(std::floor(kmin(1))) - 1; j <= static_cast<int>(std::ceil(kmax(1))) + 1; ++j)
      for (int k = static_cast<int>(std::floor(kmin(2))) - 1; k <= static_cast<int>(std::ceil(kmax(2))) + 1; ++k)
        for (int p = 0; p < static_cast<int>(t.pieces.size()); ++p) {
          const TileId id{p, {i, j, k}};
          const Tetrahedron tet = t.tile(g, ell, id);
          Vec3 bmin = tet.v[0], bmax = tet.v[0];
          for (const auto& v : tet.v) {
            bmin = bmin.cwiseMin(v);
            bmax = bmax.cwiseMax(v);
          }
          if ((bmax.array() < lo.array()).any() || (bmin.array() > hi.array()).any()) continue;
          json verts = json::array();
          for (const auto& v : tet.v) verts.push_back({v(0), v(1), v(2)});
          tiles.push_back({{"piece", p}, {"cell", {i, j, k}}, {"vertices", verts}});
        }
  return json{{"schema_version", kSchemaVersion}, {"ell", ell}, {"tiles", tiles}};
}

void write_field_csv(std::ostream& os, const std::vector<Vec3>& points,
                     const std::vector<double>& values) {
  if (points.size() != values.size()) throw Error("write_field_csv: size mismatch");
  os << "x,y,z,value\n";
  for (std::size_t i = 0; i < points.size(); ++i)
    os << format_double(points[i](0)) << ',' << format_double(points[i](1)) << ','
       << format_double(points[i](2)) << ',' << format_double(values[i]) << '\n';
}

}  // namespace coulab
