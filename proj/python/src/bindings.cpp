// Copyright 2026 The coulab Authors
// SPDX-License-Identifier: Apache-2.0

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "coulab/inequalities.hpp"
#include "coulab/io.hpp"
#include "coulab/localization.hpp"
#include "coulab/model.hpp"
#include "coulab/rng.hpp"
#include "coulab/scan.hpp"

namespace py = pybind11;
using namespace coulab;

namespace {

std::vector<Vec3> to_points(const std::vector<std::array<double, 3>>& xs) {
  std::vector<Vec3> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.emplace_back(x[0], x[1], x[2]);
  return out;
}

ChargeConfig to_config(const std::vector<std::array<double, 3>>& x, const std::vector<double>& q) {
  if (x.size() != q.size()) throw py::value_error("positions and charges differ in length");
  return {to_points(x), q};
}

GrandHamiltonian hamiltonian(const Domain& omega, const std::vector<std::array<double, 3>>& r,
                             const std::vector<double>& z, double lambda) {
  if (r.size() != z.size()) throw py::value_error("positions and charges differ in length");
  NucleiConfig k;
  for (std::size_t i = 0; i < r.size(); ++i) k.nuclei.push_back({Vec3(r[i][0], r[i][1], r[i][2]), z[i]});
  check_regularization(omega, k);
  return coulomb_hamiltonian(omega, k, no_field(), lambda);
}

py::dict scan_dict(const ScanResult& s) {
  return py::module_::import("json").attr("loads")(scan_to_json(s).dump());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "coulab native core";

  py::register_exception<Error>(m, "CoulabError", PyExc_ValueError);

  py::class_<Report>(m, "Report")
      .def_readonly("name", &Report::name)
      .def_readonly("config", &Report::config)
      .def_readonly("scale", &Report::scale)
      .def_readonly("lhs", &Report::lhs)
      .def_readonly("rhs", &Report::rhs)
      .def_readonly("gap", &Report::gap)
      .def_readonly("mc_error", &Report::mc_error)
      .def_readonly("fitted_constant", &Report::fitted_constant)
      .def_readonly("tolerance", &Report::tolerance)
      .def_readonly("passed", &Report::pass)
      .def_readonly("note", &Report::note)
      .def("__repr__", [](const Report& r) {
        return "<Report " + r.name + " gap=" + format_double(r.gap) +
               (r.pass ? " pass>" : " FAIL>");
      });

  py::class_<Domain>(m, "Domain")
      .def_property_readonly("spacing", &Domain::spacing)
      .def_property_readonly("dim", &Domain::dim)
      .def_property_readonly("label", &Domain::label)
      .def_property_readonly("volume", &Domain::volume)
      .def("__len__", &Domain::size)
      .def("sites", &Domain::sites)
      .def("boundary", &Domain::boundary)
      .def("position", &Domain::position);

  m.def("cube", [](double side, double a, int dim) { return build_domain(cube_shape(side, dim), a); },
        py::arg("side"), py::arg("a") = 1.0, py::arg("dim") = 3);
  m.def("ball",
        [](double radius, double a) { return build_domain(ball_shape(radius), a); },
        py::arg("radius"), py::arg("a") = 1.0);
  m.def("domain_from_json", [](const std::string& text) { return parse_domain(parse_json_text(text)); });

  m.def("lieb_yau_gap",
        [](const std::vector<std::array<double, 3>>& e, const std::vector<std::array<double, 3>>& n,
           double z, bool baxter) { return lieb_yau_gap(to_points(e), to_points(n), z, baxter); },
        py::arg("electrons"), py::arg("nuclei"), py::arg("z"), py::arg("baxter") = false);
  m.def("coulomb_yukawa_bound",
        [](const std::vector<std::array<double, 3>>& x, const std::vector<double>& q, double nu) {
          return coulomb_yukawa_bound(to_config(x, q), nu);
        },
        py::arg("x"), py::arg("q"), py::arg("nu"));
  m.def("coulomb_energy", [](const std::vector<std::array<double, 3>>& x,
                             const std::vector<double>& q) { return to_config(x, q).coulomb_energy(); });
  m.def("graf_schenker_deficit",
        [](const std::vector<std::array<double, 3>>& x, const std::vector<double>& q,
           const std::vector<double>& ells, int samples, std::uint64_t seed) {
          return graf_schenker_deficit({to_config(x, q)}, ells, samples, seed);
        },
        py::arg("x"), py::arg("q"), py::arg("ells"), py::arg("samples") = 2000,
        py::arg("seed") = 0);
  m.def("gs_w", &gs_w);
  m.def("gs_w_quadrature", &gs_w_quadrature);
  m.def("dipole_bound_check",
        [](const std::array<double, 3>& r, const std::array<double, 3>& d,
           const std::vector<std::array<double, 3>>& xs) {
          return dipole_bound_check(Vec3(r[0], r[1], r[2]), Vec3(d[0], d[1], d[2]), to_points(xs));
        });
  m.def("li_yau_gap", &li_yau_gap, py::arg("sides"), py::arg("f"));
  m.def("lieb_thirring_potential", &lieb_thirring_potential);
  m.def("lieb_thirring_slater", &lieb_thirring_slater);
  m.def("repelling_bound_check", &repelling_bound_check);

  m.def("kinetic_operator",
        [](const Domain& omega, double lambda) { return kinetic_operator(omega, no_field(), lambda); },
        py::arg("domain"), py::arg("lambda_") = 1.0);
  m.def("ground_state_energy",
        [](const Domain& omega, const std::vector<std::array<double, 3>>& r,
           const std::vector<double>& z, double lambda) {
          return ground_state_energy(hamiltonian(omega, r, z, lambda)).value;
        },
        py::arg("domain"), py::arg("nuclei") = std::vector<std::array<double, 3>>{},
        py::arg("charges") = std::vector<double>{}, py::arg("lambda_") = 1.0);
  m.def("free_energy",
        [](const Domain& omega, const std::vector<std::array<double, 3>>& r,
           const std::vector<double>& z, double beta, double mu) {
          return free_energy(hamiltonian(omega, r, z, 1.0), beta, mu, 0).value;
        },
        py::arg("domain"), py::arg("nuclei"), py::arg("charges"), py::arg("beta"),
        py::arg("mu") = 0.0);

  m.def("entropy", py::overload_cast<const CMat&>(&entropy));
  m.def("random_density", [](int dim, std::uint64_t seed) {
    Rng rng(seed);
    return random_density(dim, rng);
  });
  m.def("ssa_gap",
        [](int modes, const CMat& gamma, const std::vector<RVec>& thetas, const std::vector<int>& p1,
           const std::vector<int>& p2, const std::vector<int>& p3) {
          const FockSpace space = build_space(modes, Statistics::Fermion);
          return ssa_gap(space, gamma, diagonal_weights(thetas), p1, p2, p3);
        },
        py::arg("modes"), py::arg("gamma"), py::arg("thetas"), py::arg("p1"), py::arg("p2"),
        py::arg("p3"));

  m.def("run_scan",
        [](const std::string& config, bool perturbed) {
          return scan_dict(run_scan(parse_scan_spec(parse_json_text(config)), perturbed));
        },
        py::arg("config"), py::arg("perturbed") = false);
}
