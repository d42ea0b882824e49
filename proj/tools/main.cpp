#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "encl/config.hpp"
#include "encl/errors.hpp"
#include "encl/io.hpp"
#include "encl/pipeline.hpp"

namespace {

using nlohmann::json;

json point_json(const encl::Point& p, int dim) {
  json a = json::array();
  for (int i = 0; i < dim; ++i) a.push_back(p[i]);
  return a;
}

json extraction_json(const encl::ExtractionResult& ex) {
  return json{{"estimate", ex.estimate},
              {"pairwise_estimate", ex.pairwise_estimate},
              {"slopes", ex.slopes},
              {"fit_b", ex.fit_b},
              {"fit_c", ex.fit_c},
              {"fit_residual", ex.fit_residual},
              {"sign_consistent", ex.sign_consistent},
              {"estimator_disagreement", ex.estimator_disagreement},
              {"indicator_sign", ex.indicator_sign},
              {"taus", ex.taus},
              {"log_abs", ex.log_abs}};
}

json check_json(const encl::AsymptoticCheck& c) {
  json j{{"name", c.name},
         {"taus", c.taus},
         {"scaled_values", c.scaled_values},
         {"pass", c.pass}};
  if (c.verdict == encl::Verdict::SlopeMatch || c.target != 0) {
    j["target"] = c.target;
    j["fitted"] = c.fitted;
  }
  return j;
}

json summary_json(const encl::RunSummary& s) {
  json j{{"config_hash", s.config_hash},
         {"theorem", s.theorem},
         {"dimension", s.dimension},
         {"degraded", s.degraded}};
  if (!s.note.empty()) j["note"] = s.note;
  json entries = json::array();
  for (const auto& e : s.entries) {
    json je{{"theorem", e.theorem},
            {"param", point_json(e.param, s.dimension)},
            {"reported", e.reported},
            {"truth", e.truth}};
    if (!e.error.empty()) je["error"] = e.error;
    if (e.extraction) je["extraction"] = extraction_json(*e.extraction);
    entries.push_back(std::move(je));
  }
  j["entries"] = std::move(entries);
  if (s.validation) {
    const auto& v = *s.validation;
    json jv{{"flux_admissible", v.flux_admissible},
            {"all_pass", v.all_pass}};
    if (v.identity) {
      jv["identity"] = json{{"tau", v.identity_tau},
                            {"lhs", v.identity->lhs},
                            {"rhs", v.identity->rhs},
                            {"nd_term", v.identity->nd_term},
                            {"volume_term", v.identity->volume_term},
                            {"tail_term", v.identity->tail_term},
                            {"relative_mismatch", v.identity->relative_mismatch},
                            {"remainder_fraction", v.identity->remainder_fraction}};
    }
    json bounds = json::array();
    for (std::size_t i = 0; i < v.bounds.size(); ++i)
      bounds.push_back(json{{"tau", v.bounds_taus[i]},
                            {"lower", v.bounds[i].lower},
                            {"middle", v.bounds[i].middle},
                            {"upper", v.bounds[i].upper},
                            {"holds", v.bounds[i].holds}});
    jv["bounds"] = std::move(bounds);
    json checks = json::array();
    for (const auto& c : v.energy_checks) checks.push_back(check_json(c));
    jv["energy_checks"] = std::move(checks);
    j["validation"] = std::move(jv);
  }
  return j;
}

void write_summary(const std::string& dir, const json& j) {
  std::ofstream out(dir + "/summary.json");
  if (!out) throw encl::ConfigError("cannot write " + dir + "/summary.json");
  out << j.dump(2) << "\n";
}

struct Overrides {
  std::string out_dir;
  int workers = 0;
  double tau_min = 0, tau_ratio = 0;
  int tau_count = 0;
  int dim = 0;
};

encl::RunConfig load_with_overrides(const std::string& path,
                                    const Overrides& ov) {
  encl::RunConfig cfg = encl::load_config(path);
  if (!ov.out_dir.empty()) cfg.output_dir = ov.out_dir;
  if (ov.workers > 0) cfg.workers = ov.workers;
  if (ov.tau_min > 0) cfg.tau_min = ov.tau_min;
  if (ov.tau_ratio > 0) cfg.tau_ratio = ov.tau_ratio;
  if (ov.tau_count > 0) cfg.tau_count = ov.tau_count;
  if (ov.dim > 0 && ov.dim != cfg.dimension)
    throw encl::ConfigError(
        "--dim disagrees with the config's dimension; edit the config's "
        "geometry instead");
  std::filesystem::create_directories(cfg.output_dir);
  return cfg;
}

int cmd_simulate(const encl::RunConfig& cfg) {
  const encl::Grid grid =
      encl::build_grid(cfg.scene.domain, cfg.n, cfg.T, cfg.n_time);
  std::optional<double> tau;
  std::optional<encl::ProbeField> probe;
  if (cfg.flux.variant == encl::FluxSpec::Variant::ProbeFlux) {
    tau = cfg.tau_min;
    encl::Point omega = encl::Point::Zero();
    omega[0] = 1.0;
    if (!cfg.directions.empty()) omega = cfg.directions.front();
    probe = encl::ProbeField::plane(omega, *tau, cfg.dimension);
  }
  const encl::ForwardResult fwd =
      encl::run_forward(cfg, grid, {}, tau, probe ? &*probe : nullptr);
  encl::write_trace_csv(cfg.output_dir + "/trace.csv", fwd.trace,
                        cfg.dimension, cfg.hash);
  json j{{"config_hash", cfg.hash},
         {"cells", grid.num_cells()},
         {"facets", static_cast<int>(grid.facets().size())},
         {"final_energy", fwd.state.energy.back()},
         {"final_mass", fwd.state.mass.back()}};
  write_summary(cfg.output_dir, j);
  return 0;
}

int cmd_reconstruct(const encl::RunConfig& cfg, bool dump_transforms) {
  const encl::RunSummary summary = encl::run_reconstruction(cfg);
  for (std::size_t i = 0; i < summary.entries.size(); ++i) {
    const auto& e = summary.entries[i];
    encl::write_indicator_csv(
        cfg.output_dir + "/indicator_" + std::to_string(i) + ".csv", e.samples,
        cfg.hash);
  }
  if (dump_transforms) {
    const encl::Grid grid =
        encl::build_grid(cfg.scene.domain, cfg.n, cfg.T, cfg.n_time);
    if (cfg.flux.variant != encl::FluxSpec::Variant::ProbeFlux) {
      const encl::ForwardResult fwd = encl::run_forward(cfg, grid, {});
      std::vector<encl::TransformedTrace> traces;
      for (double tau : cfg.tau_sweep())
        traces.push_back(encl::scheme_matched_transform(fwd.trace, tau));
      encl::write_transformed_csv(cfg.output_dir + "/transformed.csv", grid,
                                  traces, cfg.hash);
    }
  }
  write_summary(cfg.output_dir, summary_json(summary));
  for (const auto& e : summary.entries)
    if (!e.error.empty()) {
      std::fprintf(stderr, "entry failed: %s\n", e.error.c_str());
      return 3;
    }
  return 0;
}

int cmd_validate(const encl::RunConfig& cfg) {
  const encl::RunSummary summary = encl::run_validation(cfg);
  write_summary(cfg.output_dir, summary_json(summary));
  if (summary.validation)
    encl::write_asymptotic_csv(cfg.output_dir + "/energy_checks.csv",
                               summary.validation->energy_checks, cfg.hash);
  if (!summary.validation || !summary.validation->all_pass) {
    std::fprintf(stderr, "validation failed\n");
    return 4;
  }
  return 0;
}

int cmd_oracle(const encl::RunConfig& cfg) {
  const std::vector<encl::AsymptoticCheck> checks = encl::run_oracles(cfg);
  encl::write_asymptotic_csv(cfg.output_dir + "/oracles.csv", checks, cfg.hash);
  json j{{"config_hash", cfg.hash}, {"checks", json::array()}};
  bool all = true;
  for (const auto& c : checks) {
    j["checks"].push_back(check_json(c));
    all = all && c.pass;
  }
  j["all_pass"] = all;
  write_summary(cfg.output_dir, j);
  if (!all) {
    std::fprintf(stderr, "oracle checks failed\n");
    return 4;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Enclosure-method laboratory: simulate boundary heat data and "
               "reconstruct inclusion geometry from it"};
  app.require_subcommand(1);

  std::string config_path;
  Overrides ov;
  app.add_option("--config", config_path, "run configuration file")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("--out", ov.out_dir, "output directory override");
  app.add_option("--workers", ov.workers, "worker thread count override");
  app.add_option("--tau-min", ov.tau_min, "tau sweep minimum override");
  app.add_option("--tau-ratio", ov.tau_ratio, "tau sweep ratio override");
  app.add_option("--tau-count", ov.tau_count, "tau sweep count override");
  app.add_option("--dim", ov.dim, "expected dimension (checked, not changed)")
      ->check(CLI::IsMember({2, 3}));

  auto* simulate = app.add_subcommand("simulate", "forward solve only");
  auto* reconstruct =
      app.add_subcommand("reconstruct", "full reconstruction pipeline");
  auto* validate = app.add_subcommand("validate", "property suites");
  auto* oracle = app.add_subcommand("oracle", "quadrature oracles only");
  auto* sweep = app.add_subcommand(
      "sweep", "reconstruction plus per-tau transform dumps");

  CLI11_PARSE(app, argc, argv);

  try {
    const encl::RunConfig cfg = load_with_overrides(config_path, ov);
    if (simulate->parsed()) return cmd_simulate(cfg);
    if (reconstruct->parsed()) return cmd_reconstruct(cfg, false);
    if (validate->parsed()) return cmd_validate(cfg);
    if (oracle->parsed()) return cmd_oracle(cfg);
    if (sweep->parsed()) return cmd_reconstruct(cfg, true);
    return 2;
  } catch (const encl::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const encl::UnsupportedGeometryError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const encl::SolverError& e) {
    std::fprintf(stderr, "solver failure: %s (residual %g)\n", e.what(),
                 e.residual);
    return 3;
  } catch (const encl::NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
