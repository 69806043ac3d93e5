// Copyright 2026 The coulab Authors
// SPDX-License-Identifier: Apache-2.0

#include <sstream>

#include "doctest.h"

#include "coulab/io.hpp"
#include "coulab/linalg.hpp"
#include "coulab/rng.hpp"

using namespace coulab;

TEST_CASE("domain configs") {
  const Domain c = parse_domain(parse_json_text(R"({"shape": "cube", "side": 3})"));
  CHECK(c.size() == 27);
  const Domain b = parse_domain(parse_json_text(R"({"shape": "box", "extent": [2, 3, 1], "spacing": 0.5})"));
  CHECK(b.size() == 4 * 6 * 2);
  const Domain s = parse_domain(parse_json_text(R"({"shape": "sites", "sites": [[0,0,0],[1,0,0]]})"));
  CHECK(s.size() == 2);
  CHECK_THROWS_AS(parse_domain(parse_json_text(R"({"shape": "torus"})")), ConfigError);
  CHECK_THROWS_AS(parse_domain(parse_json_text(R"({"shape": "ball", "radius": 0.4})")), ConfigError);
  CHECK_THROWS_AS(parse_json_text("{not json"), ConfigError);
  const json dj = domain_to_json(c);
  CHECK(dj["sites"].size() == 27);
  CHECK(dj["boundary"].size() == 26);
}

TEST_CASE("other configs") {
  const NucleiConfig k = parse_nuclei(parse_json_text(R"([{"R": [0.5, 0.5, 0.5], "z": 2}])"));
  CHECK(k.size() == 1);
  CHECK(k.nuclei[0].z == 2.0);
  CHECK(parse_field(parse_json_text(R"({"kind": "uniform", "B": [0, 0, 1]})")).kind ==
        MagneticField::Kind::Uniform);
  CHECK_THROWS_AS(parse_field(parse_json_text(R"({"kind": "vortex"})")), ConfigError);
  const ChargeConfig cc = parse_charge_config(parse_json_text(R"({"x": [[0,0,0],[1,0,0]], "q": [1, -1]})"));
  CHECK(cc.coulomb_energy() == doctest::Approx(-1.0));
  CHECK_THROWS_AS(parse_charge_config(parse_json_text(R"({"x": [[0,0,0]], "q": [1, -1]})")), ConfigError);
  CHECK_THROWS_AS(parse_vec3(parse_json_text("[1, 2]")), ConfigError);

  const ScanSpec s = parse_scan_spec(parse_json_text(
      R"({"model": "quantum-nuclei", "sides": [2, 3], "added": [{"R": [0, 0.6, 0], "z": 1}]})"));
  CHECK(s.model == ScanModel::QuantumNuclei);
  CHECK(s.sites_per_cell == 1);
  CHECK(s.added.size() == 1);
  CHECK_THROWS_AS(parse_scan_spec(parse_json_text(R"({"model": "plasma"})")), ConfigError);
  CHECK_THROWS_AS(parse_scan_spec(parse_json_text(R"({"sides": [3, 3]})")), ConfigError);
}

TEST_CASE("matrix and state round trip") {
  Rng rng(1);
  const CMat g = random_density(8, rng);
  const CMat back = matrix_from_json(parse_json_text(matrix_to_json(g).dump()));
  CHECK(back == g);
  const FockState st = make_state(build_space(3, Statistics::Fermion), g);
  const FockState st2 = state_from_json(parse_json_text(state_to_json(st).dump()));
  CHECK(st2.matrix == g);
  CHECK(st2.space.n == 3);
  json bad = matrix_to_json(g);
  bad["rows"] = 3;
  CHECK_THROWS_AS(matrix_from_json(bad), ConfigError);
}

TEST_CASE("report output") {
  Report r = make_report("x", 1.0, 0.5);
  r.fitted_constant = kInf;
  std::ostringstream csv, js;
  write_reports(csv, {r}, "csv");
  write_reports(js, {r}, "json");
  CHECK(csv.str().find("x,") != std::string::npos);
  const json j = json::parse(js.str());
  CHECK(j["schema_version"] == kSchemaVersion);
  CHECK(j["reports"][0]["pass"] == true);
  CHECK(j["reports"][0]["fitted_constant"].is_string());
  CHECK_THROWS_AS(write_reports(csv, {r}, "xml"), ConfigError);
}

TEST_CASE("tiling and field dumps") {
  const json t = tiling_to_json(GroupElement{}, 1.0, Vec3(0, 0, 0), Vec3(1, 1, 1));
  CHECK(t["tiles"].size() >= 24);
  for (const auto& tile : t["tiles"]) CHECK(tile["vertices"].size() == 4);
  std::ostringstream os;
  write_field_csv(os, {Vec3(0, 0, 0)}, {1.5});
  CHECK(os.str() == "x,y,z,value\n0,0,0,1.5\n");
}
