// Copyright 2026 The coulab Authors
// SPDX-License-Identifier: Apache-2.0

// coulab command-line driver. Exit codes: 0 all checks pass, 1 a check
// failed, 2 bad command line or config, 3 runtime error.

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "coulab/inequalities.hpp"
#include "coulab/io.hpp"
#include "coulab/linalg.hpp"
#include "coulab/localization.hpp"
#include "coulab/model.hpp"
#include "coulab/rng.hpp"
#include "coulab/scan.hpp"

namespace {

using namespace coulab;

struct Options {
  std::string config;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out;
  std::string format = "csv";
};

struct Output {
  std::vector<Report> reports;
  std::string body;  // preformatted (scan tables), else reports are written
};

Report info(const std::string& name, const std::string& config, double value,
            const std::string& note) {
  Report r;
  r.name = name;
  r.config = config;
  r.lhs = value;
  r.rhs = value;
  r.gap = 0.0;
  r.tolerance = 0.0;
  r.pass = true;
  r.note = note;
  return r;
}

std::uint64_t seed_of(const Options& o, const json& cfg) {
  if (o.seed_given) return o.seed;
  return cfg.value("seed", std::uint64_t{0});
}

std::vector<double> doubles(const json& cfg, const char* key, std::vector<double> fallback) {
  return cfg.contains(key) ? cfg[key].get<std::vector<double>>() : fallback;
}

// ----------------------------------------------------------------- verify

std::vector<Report> verify_lieb_yau(const json& cfg, std::uint64_t seed) {
  std::vector<Report> out;
  const bool baxter = cfg.value("baxter", true);
  auto run = [&](const std::vector<Vec3>& e, const std::vector<Vec3>& n, double z,
                 const std::string& label) {
    Report r = lieb_yau_gap(e, n, z);
    r.config = label + " " + r.config;
    out.push_back(r);
    if (baxter) {
      Report b = lieb_yau_gap(e, n, z, true);
      b.config = label + " " + b.config;
      out.push_back(b);
    }
  };
  if (cfg.contains("configs")) {
    int i = 0;
    for (const auto& c : cfg["configs"])
      run(parse_points(c.at("electrons")), parse_points(c.at("nuclei")), c.value("z", 1.0),
          "cfg" + std::to_string(i++));
    return out;
  }
  const json rnd = cfg.value("random", json::object());
  const int count = rnd.value("count", 1000), max_n = rnd.value("max_n", 8),
            max_k = rnd.value("max_k", 8);
  const double z_max = rnd.value("z_max", 3.0), box = rnd.value("box", 4.0);
  Rng rng(seed);
  for (int t = 0; t < count; ++t) {
    const int n = rng.integer(1, max_n), k = rng.integer(1, max_k);
    const double z = rng.uniform(0.05, z_max);
    std::vector<Vec3> e, nuc;
    for (int i = 0; i < n; ++i) e.emplace_back(rng.uniform(0, box), rng.uniform(0, box), rng.uniform(0, box));
    for (int i = 0; i < k; ++i) nuc.emplace_back(rng.uniform(0, box), rng.uniform(0, box), rng.uniform(0, box));
    run(e, nuc, z, "trial" + std::to_string(t));
  }
  return out;
}

std::vector<ChargeConfig> charge_configs(const json& cfg, std::uint64_t seed, int count_default,
                                         int min_n, int max_n_default, double box_default) {
  std::vector<ChargeConfig> cfgs;
  if (cfg.contains("configs")) {
    for (const auto& c : cfg["configs"]) cfgs.push_back(parse_charge_config(c));
    return cfgs;
  }
  const json rnd = cfg.value("random", json::object());
  const int count = rnd.value("count", count_default), max_n = rnd.value("max_n", max_n_default);
  const double box = rnd.value("box", box_default), q_max = rnd.value("q_max", 3.0);
  Rng rng(seed);
  for (int t = 0; t < count; ++t)
    cfgs.push_back(random_charge_config(rng, rng.integer(min_n, max_n), box, q_max));
  return cfgs;
}

std::vector<Report> verify_graf_schenker(const json& cfg, std::uint64_t seed) {
  const auto cfgs = charge_configs(cfg, seed, 20, 2, 8, 2.0);
  const auto ells = doubles(cfg, "ells", {4, 8, 16});
  if (cfg.value("mode", "sharp") == "smooth")
    return smooth_gs_check(cfgs, ells, cfg.value("r_j", 1.0), cfg.value("samples", 500),
                           splitmix64(seed + 1));
  return graf_schenker_deficit(cfgs, ells, cfg.value("samples", 10000), splitmix64(seed + 1));
}

std::vector<Report> verify_yukawa(const json& cfg, std::uint64_t seed) {
  const auto cfgs = charge_configs(cfg, seed, 1000, 1, 8, 4.0);
  std::vector<Report> out;
  for (double nu : doubles(cfg, "nus", {0.5, 1.0, 2.0}))
    for (std::size_t i = 0; i < cfgs.size(); ++i) {
      Report r = coulomb_yukawa_bound(cfgs[i], nu);
      r.config = "cfg" + std::to_string(i) + " " + r.config;
      out.push_back(r);
    }
  return out;
}

Domain domain_or(const json& cfg, double side) {
  if (cfg.contains("domain")) return parse_domain(cfg["domain"]);
  return build_domain(cube_shape(side), 1.0);
}

std::vector<Report> verify_lt(const json& cfg) {
  const Domain omega = domain_or(cfg, 4.0);
  std::vector<Report> out;
  const std::string form = cfg.value("form", "potential");
  if (form == "potential") {
    const double a = omega.spacing();
    const int site = cfg.value("site", static_cast<int>(omega.size()) / 2);
    if (site < 0 || site >= static_cast<int>(omega.size())) throw ConfigError("lt: site out of range");
    for (double lam : doubles(cfg, "lambdas", {5, 10, 20})) {
      RVec v = RVec::Zero(omega.size());
      v(site) = -lam / (a * a);
      Report r = lieb_thirring_potential(omega, v);
      r.scale = lam;
      out.push_back(r);
    }
    lieb_thirring_family(out);
  } else if (form == "slater") {
    for (double k : doubles(cfg, "ks", {1, 2, 4, 8})) {
      Report r = lieb_thirring_slater(omega, static_cast<int>(k));
      r.scale = k;
      r.note = "ratio " + format_double(r.lhs);
      out.push_back(r);
    }
  } else {
    throw ConfigError("lt: form must be potential or slater");
  }
  return out;
}

std::vector<Report> verify_li_yau(const json& cfg) {
  json cases = cfg.value("cases", json::array());
  if (cases.empty())
    cases = json::parse(R"([{"sides":[3.141592653589793],"f":"exp","scale":1},
                            {"sides":[1,2,3],"f":"exp","scale":4}])");
  std::vector<Report> out;
  for (const auto& c : cases) {
    const auto sides = c.at("sides").get<std::vector<double>>();
    const std::string f = c.value("f", "exp");
    const double s = c.value("scale", 1.0);
    if (f == "exp")
      out.push_back(li_yau_gap(sides, [s](double t) { return std::exp(-t / s); }));
    else if (f == "zero")
      out.push_back(li_yau_gap(sides, [](double) { return 0.0; }));
    else
      throw ConfigError("li-yau: unknown function " + f);
  }
  return out;
}

std::vector<Report> verify_repelling(const json& cfg) {
  const Domain omega = domain_or(cfg, 4.0);
  std::vector<int> ns = cfg.contains("n_list") ? cfg["n_list"].get<std::vector<int>>()
                                               : std::vector<int>{1, 2, 3};
  return repelling_bound_suite(omega, ns, cfg.value("eps", 1.0));
}

std::vector<Report> verify_ims(const json& cfg, std::uint64_t seed) {
  const Domain omega = domain_or(cfg, 12.0);
  return ims_residual(omega, doubles(cfg, "ells", {4, 8, 16}), cfg.value("r_j", 0.25),
                      cfg.value("group_samples", 4), seed);
}

std::vector<Report> verify_dipole(const json& cfg, std::uint64_t seed) {
  const Vec3 R = cfg.contains("R") ? parse_vec3(cfg["R"]) : Vec3::Zero();
  const Vec3 D = cfg.contains("D") ? parse_vec3(cfg["D"]) : Vec3(0.3, 0.2, 0.1);
  const int n = cfg.value("samples", 10000);
  const double box = cfg.value("box", 3.0);
  Rng rng(seed);
  std::vector<Vec3> xs;
  for (int i = 0; i < n; ++i)
    xs.emplace_back(rng.uniform(-box, box), rng.uniform(-box, box), rng.uniform(-box, box));
  return {dipole_bound_check(R, D, xs)};
}

// -------------------------------------------------------------------- ssa

std::vector<Report> ssa_quantum(const json& cfg, std::uint64_t seed) {
  const int trials = cfg.value("trials", 100), modes = cfg.value("modes", 6),
            parts = cfg.value("parts", 3);
  if (parts < 3) throw ConfigError("ssa: need at least 3 parts");
  const FockSpace space = build_space(modes, Statistics::Fermion);
  std::vector<Report> out;
  for (int t = 0; t < trials; ++t) {
    Rng rng = Rng::substream(seed, t);
    const CMat g = random_density(static_cast<int>(space.dim), rng);
    const auto w = diagonal_weights(random_smooth_partition(modes, parts, rng));
    Report r = ssa_gap(space, g, w, {0}, {1}, {2});
    r.config = "trial" + std::to_string(t) + " " + r.config;
    out.push_back(r);
  }
  return out;
}

std::vector<Report> ssa_cq(const json& cfg, std::uint64_t seed) {
  const int trials = cfg.value("trials", 50), points = cfg.value("points", 3),
            modes = cfg.value("modes", 4), k_max = cfg.value("k_max", 2);
  const FockSpace space = build_space(modes, Statistics::Fermion);
  std::vector<Report> out;
  for (int t = 0; t < trials; ++t) {
    Rng rng = Rng::substream(seed, t);
    const CQState rho = random_cq_state(space, points, k_max, rng);
    const auto q = diagonal_weights(random_smooth_partition(modes, 3, rng));
    const auto th = random_smooth_partition(points, 3, rng);
    Report r = cq_ssa_gap(rho, q, th, {0}, {1}, {2});
    r.config = "trial" + std::to_string(t) + " " + r.config;
    out.push_back(r);
  }
  return out;
}

// ------------------------------------------------------------------ model

GrandHamiltonian model_hamiltonian(const json& cfg) {
  const Domain omega = domain_or(cfg, 2.0);
  const NucleiConfig k = cfg.contains("nuclei") ? parse_nuclei(cfg["nuclei"]) : NucleiConfig{};
  check_regularization(omega, k);
  GrandHamiltonian h =
      coulomb_hamiltonian(omega, k, parse_field(cfg.value("field", json())), cfg.value("lambda", 1.0));
  if (cfg.contains("statistics")) {
    h.stats = parse_statistics(cfg["statistics"].get<std::string>());
    h.cap = h.stats == Statistics::Fermion ? 1 : cfg.value("cap", kDefaultBosonCap);
  }
  return h;
}

std::vector<Report> run_energy(const json& cfg) {
  const GrandHamiltonian h = model_hamiltonian(cfg);
  const EnergyResult e = ground_state_energy(h, cfg.value("n_max", -1));
  std::vector<Report> out{info("energy", "modes=" + std::to_string(h.modes()), e.value,
                               "n_star=" + std::to_string(e.n_star) + " method=" + e.method)};
  for (const auto& [n, v] : e.sector_minima) {
    Report r = info("sector_minimum", "N=" + std::to_string(n), v, "");
    r.scale = n;
    out.push_back(r);
  }
  return out;
}

std::vector<Report> run_free_energy(const json& cfg) {
  const GrandHamiltonian h = model_hamiltonian(cfg);
  const double beta = cfg.value("beta", 1.0), mu = cfg.value("mu", 0.0);
  const FreeEnergyResult f = free_energy(h, beta, mu, 0);
  return {info("free_energy",
               "beta=" + format_double(beta) + " mu=" + format_double(mu), f.value,
               "mean_n=" + format_double(f.mean_n) + " entropy=" + format_double(f.entropy))};
}

std::vector<Report> run_hf(const json& cfg) {
  const GrandHamiltonian h = model_hamiltonian(cfg);
  if (h.stats != Statistics::Fermion) throw ConfigError("hf: fermions only");
  const double mu = cfg.value("mu", 0.0);
  std::optional<double> beta;
  if (cfg.contains("beta")) beta = cfg["beta"].get<double>();
  const HFResult r = hf_minimize(h, mu, beta);
  Report rep = info("hartree_fock", "mu=" + format_double(mu), r.value,
                    "energy=" + format_double(r.energy) +
                        " iterations=" + std::to_string(r.iterations));
  rep.pass = r.converged;
  if (!r.converged) rep.note += " not converged";
  return {rep};
}

// ------------------------------------------------------------------- main

int run(const std::string& command, const std::string& which, const Options& o) {
  json cfg = o.config.empty() ? json::object() : load_json_file(o.config);
  if (!cfg.is_object()) throw ConfigError("config must be a JSON object");
  const std::uint64_t seed = seed_of(o, cfg);
  if (o.format != "csv" && o.format != "json") throw ConfigError("format must be csv or json");

  Output res;
  if (command == "verify") {
    if (which == "lieb-yau") res.reports = verify_lieb_yau(cfg, seed);
    else if (which == "graf-schenker") res.reports = verify_graf_schenker(cfg, seed);
    else if (which == "lt") res.reports = verify_lt(cfg);
    else if (which == "li-yau") res.reports = verify_li_yau(cfg);
    else if (which == "repelling") res.reports = verify_repelling(cfg);
    else if (which == "ims") res.reports = verify_ims(cfg, seed);
    else if (which == "dipole") res.reports = verify_dipole(cfg, seed);
    else if (which == "yukawa") res.reports = verify_yukawa(cfg, seed);
  } else if (command == "ssa") {
    res.reports = which == "quantum" ? ssa_quantum(cfg, seed) : ssa_cq(cfg, seed);
  } else if (command == "energy") {
    res.reports = run_energy(cfg);
  } else if (command == "free-energy") {
    res.reports = run_free_energy(cfg);
  } else if (command == "hf") {
    res.reports = run_hf(cfg);
  } else if (command == "scan") {
    const ScanResult s = run_scan(parse_scan_spec(cfg));
    res.reports = s.reports;
    std::ostringstream os;
    if (o.format == "csv")
      write_scan_csv(os, s);
    else
      os << scan_to_json(s).dump(2) << '\n';
    res.body = os.str();
  } else if (command == "compare-perturbation") {
    const PerturbationComparison c = perturbation_compare(parse_scan_spec(cfg));
    res.reports = {c.report};
    for (std::size_t i = 0; i < c.sides.size(); ++i) {
      Report r = info("perturbation_ratio", "side=" + std::to_string(c.sides[i]), c.ratio[i], "");
      r.scale = c.sides[i];
      res.reports.push_back(r);
    }
  }

  std::ostringstream body;
  if (!res.body.empty())
    body << res.body;
  else
    write_reports(body, res.reports, o.format);
  if (o.out.empty()) {
    std::cout << body.str();
  } else {
    std::ofstream f(o.out, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + o.out);
    f << body.str();
  }
  bool ok = true;
  for (const auto& r : res.reports)
    if (!r.pass) {
      if (ok) std::cerr << "failed checks:\n";
      ok = false;
      write_csv_row(std::cerr, r);
    }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coulab: Coulomb lattice verification tools"};
  app.fallthrough();
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.config, "JSON config file");
  auto* seed_opt = app.add_option("--seed", o.seed, "random seed (u64)");
  app.add_option("--out", o.out, "output path (default stdout)");
  app.add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  std::string which;
  auto* verify = app.add_subcommand("verify", "check an inequality");
  verify->add_option("which", which, "inequality")
      ->required()
      ->check(CLI::IsMember(
          {"lieb-yau", "graf-schenker", "lt", "li-yau", "repelling", "ims", "dipole", "yukawa"}));
  auto* ssa = app.add_subcommand("ssa", "strong subadditivity suites");
  ssa->add_option("kind", which, "quantum or cq")->required()->check(CLI::IsMember({"quantum", "cq"}));
  app.add_subcommand("energy", "ground-state energy");
  app.add_subcommand("free-energy", "grand-canonical free energy");
  app.add_subcommand("hf", "Hartree-Fock minimization");
  app.add_subcommand("scan", "thermodynamic scan");
  app.add_subcommand("compare-perturbation", "perturbed versus periodic crystal");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  o.seed_given = seed_opt->count() > 0;
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run(command, which, o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
