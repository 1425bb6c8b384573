// lgi: command-line front end.
//
//   lgi ideal --theta 0.416pi --scheme neumann
//   lgi ideal --sweep --grid 10000 --scheme luders --levels 2
//   lgi nv [--ideal] [--config run.json] --seed 7 --format csv
//   lgi characterize fid --t2star 62us
//   lgi characterize cg-repeat --p 0.995 --kmax 30
//   lgi characterize odmr --p 1.0
//
// Exit codes: 0 success, 1 usage error, 2 numerical failure.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "lgi/cli.hpp"

namespace {

using namespace lgi;
using namespace lgi::cli;

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> format, output;

  std::optional<std::string> theta, scheme, averaging, rf_model, cg_model, t2star;
  std::optional<int> levels, n, grid, samples, kmax, points, variant;
  std::optional<double> pol_e, pol_n, p, f_rabi, mw_rabi, readout_sigma, reference_detuning;
  bool sweep = false, ideal = false, no_cg = false;
  std::string kind;
};

RunConfig build_config(const Flags& f) {
  RunConfig cfg;
  if (!f.config.empty()) cfg = load_config_file(f.config, cfg);
  try {
    if (f.theta) cfg.theta = parse_theta(*f.theta);
    if (f.scheme) cfg.rule = parse_update_rule(*f.scheme);
    if (f.averaging) cfg.imperfections.averaging = parse_averaging(*f.averaging);
    if (f.rf_model) cfg.simulation.rf = nv::parse_rf_model(*f.rf_model);
    if (f.cg_model) cfg.simulation.cg = nv::parse_cg_model(*f.cg_model);
  } catch (const UsageError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (f.t2star) cfg.imperfections.t2_star_s = parse_duration(*f.t2star);
  if (f.levels) cfg.levels = *f.levels;
  if (f.n) cfg.n = *f.n;
  if (f.grid) cfg.grid = *f.grid;
  if (f.samples) cfg.imperfections.n_samples = *f.samples;
  if (f.kmax) cfg.kmax = *f.kmax;
  if (f.points) cfg.points = *f.points;
  if (f.variant) cfg.cg_variant = *f.variant;
  if (f.pol_e) cfg.imperfections.pol_e = *f.pol_e;
  if (f.pol_n) cfg.imperfections.pol_n = *f.pol_n;
  if (f.p) cfg.imperfections.flip_prob_p = *f.p;
  if (f.f_rabi) cfg.simulation.pulses.f_rabi_hz = *f.f_rabi;
  if (f.mw_rabi) cfg.simulation.pulses.mw_rabi_hz = *f.mw_rabi;
  if (f.readout_sigma) cfg.readout_sigma = *f.readout_sigma;
  if (f.reference_detuning) cfg.reference_detuning_hz = *f.reference_detuning;
  if (f.sweep) cfg.sweep = true;
  if (f.ideal) cfg.ideal = true;
  if (f.no_cg) cfg.apply_cg = false;
  if (f.seed) cfg.seed = f.seed;
  if (f.format) cfg.format = *f.format;
  if (f.output) cfg.output = *f.output;
  if (cfg.format != "json" && cfg.format != "csv") throw UsageError("--format must be json or csv");
  return cfg;
}

void emit(const ResultRecord& record, const RunConfig& cfg) {
  std::ofstream file;
  if (!cfg.output.empty()) {
    file.open(cfg.output);
    if (!file) throw UsageError("cannot write '" + cfg.output + "'");
  }
  std::ostream& os = cfg.output.empty() ? std::cout : file;
  if (cfg.format == "csv") {
    write_csv(os, record.table);
  } else {
    os << record.to_json().dump(2) << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Leggett-Garg violation simulator for a three-level NV nuclear spin"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags f;

  app.add_option("--config", f.config, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--seed", f.seed, "RNG seed (default: $LGI_SEED, else entropy)");
  app.add_option("--format", f.format, "json or csv");
  app.add_option("--output,-o", f.output, "output file (default stdout)");

  auto* ideal = app.add_subcommand("ideal", "noise-free protocol: correlators, Kn, violation search");
  ideal->add_option("--theta", f.theta, "rotation angle, e.g. 0.416pi or radians");
  ideal->add_option("--scheme", f.scheme, "neumann or luders");
  ideal->add_option("--levels", f.levels, "2 (qubit) or 3 (qutrit)");
  ideal->add_option("--n", f.n, "number of measurement times");
  ideal->add_flag("--sweep", f.sweep, "maximize K3 over theta in [0, pi]");
  ideal->add_option("--grid", f.grid, "grid points for --sweep");

  auto* nv = app.add_subcommand("nv", "six-level NV experiment with postselection");
  nv->add_option("--theta", f.theta, "rotation angle");
  nv->add_flag("--ideal", f.ideal, "perfect initialization, gates and coherence");
  nv->add_option("--t2star", f.t2star, "dephasing time, e.g. 62us");
  nv->add_option("--pol-e", f.pol_e, "electron polarization");
  nv->add_option("--pol-n", f.pol_n, "nuclear polarization");
  nv->add_option("--p", f.p, "controlled-gate flip probability");
  nv->add_option("--samples", f.samples, "detuning samples / quadrature nodes");
  nv->add_option("--averaging", f.averaging, "gausshermite or montecarlo");
  nv->add_option("--f-rabi", f.f_rabi, "nuclear Rabi frequency, Hz");
  nv->add_option("--mw-rabi", f.mw_rabi, "MW Rabi frequency for square pulses, Hz");
  nv->add_option("--rf-model", f.rf_model, "selective or ideal");
  nv->add_option("--cg-model", f.cg_model, "channel or square-pulse");

  auto* ch = app.add_subcommand("characterize", "synthetic characterization experiments");
  ch->add_option("kind", f.kind, "odmr, cg-repeat or fid")->required();
  ch->add_option("--t2star", f.t2star, "dephasing time, e.g. 62us");
  ch->add_option("--p", f.p, "controlled-gate flip probability");
  ch->add_option("--kmax", f.kmax, "repeated gate applications");
  ch->add_option("--readout-sigma", f.readout_sigma, "Gaussian readout noise");
  ch->add_option("--points", f.points, "FID sample points");
  ch->add_option("--reference-detuning", f.reference_detuning, "FID reference detuning, Hz");
  ch->add_option("--samples", f.samples, "detuning samples / quadrature nodes");
  ch->add_option("--averaging", f.averaging, "gausshermite or montecarlo");
  ch->add_option("--variant", f.variant, "controlled-gate variant 1..3 for odmr");
  ch->add_option("--mw-rabi", f.mw_rabi, "MW Rabi frequency, Hz");
  ch->add_flag("--no-cg", f.no_cg, "odmr without the controlled gate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    const RunConfig cfg = build_config(f);
    ResultRecord record;
    if (*ideal) {
      record = cmd_ideal(cfg);
    } else if (*nv) {
      record = cmd_nv(cfg);
    } else {
      record = cmd_characterize(parse_characterize_kind(f.kind), cfg);
    }
    emit(record, cfg);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
