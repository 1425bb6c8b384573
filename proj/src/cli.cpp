#include "lgi/cli.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "lgi/fitting.hpp"
#include "lgi/lg_protocol.hpp"

namespace lgi::cli {

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  const auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

double to_double(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw UsageError("cannot parse " + what + " '" + text + "'");
  }
  if (used != text.size()) throw UsageError("cannot parse " + what + " '" + text + "'");
  return v;
}

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  if (!obj.is_object()) throw UsageError(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!known.count(key)) throw UsageError("unknown config key '" + where + key + "'");
  }
}

template <class T>
T get(const json& obj, const char* key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw UsageError("bad value for '" + where + key + "': " + e.what());
  }
}

double theta_value(const json& v) {
  if (v.is_string()) return parse_theta(v.get<std::string>());
  if (v.is_number()) return v.get<double>();
  throw UsageError("theta must be a number or a string like '0.416pi'");
}

double duration_value(const json& v) {
  if (v.is_string()) return parse_duration(v.get<std::string>());
  if (v.is_number()) return v.get<double>();
  throw UsageError("durations must be numbers (seconds) or strings like '62us'");
}

json correlators_json(const CorrelatorSet& c) {
  return {{"q2_mean", c.q2_mean}, {"q2q3_mean", c.q2q3_mean}, {"q3_mean", c.q3_mean}, {"k3", c.k3}};
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json imperfections_json(const ImperfectionModel& m) {
  return {{"t2_star_s", std::isinf(m.t2_star_s) ? json(nullptr) : json(m.t2_star_s)},
          {"sigma_detuning_hz", m.sigma_detuning_hz()},
          {"pol_e", m.pol_e},
          {"pol_n", m.pol_n},
          {"flip_prob", m.flip_prob_p},
          {"n_samples", m.n_samples},
          {"averaging", to_string(m.averaging)}};
}

}  // namespace

double parse_theta(const std::string& raw) {
  std::string text = trim(raw);
  for (const char* suffix : {"*pi", "pi", "π"}) {
    const std::string s(suffix);
    if (text.size() >= s.size() && text.compare(text.size() - s.size(), s.size(), s) == 0) {
      const std::string factor = trim(text.substr(0, text.size() - s.size()));
      const double f = factor.empty() ? 1.0 : factor == "-" ? -1.0 : to_double(factor, "theta");
      return f * kPi;
    }
  }
  return to_double(text, "theta");
}

std::string format_theta(double theta) { return format_number(theta / kPi) + "pi"; }

double parse_duration(const std::string& raw) {
  const std::string text = trim(raw);
  struct Unit {
    const char* suffix;
    double scale;
  };
  for (const Unit& u : {Unit{"ns", 1e-9}, Unit{"us", 1e-6}, Unit{"µs", 1e-6}, Unit{"ms", 1e-3},
                        Unit{"s", 1.0}}) {
    const std::string s(u.suffix);
    if (text.size() > s.size() && text.compare(text.size() - s.size(), s.size(), s) == 0) {
      return to_double(trim(text.substr(0, text.size() - s.size())), "duration") * u.scale;
    }
  }
  return to_double(text, "duration");
}

CharacterizeKind parse_characterize_kind(const std::string& text) {
  if (text == "odmr") return CharacterizeKind::Odmr;
  if (text == "cg-repeat" || text == "cg_repeat") return CharacterizeKind::CgRepeat;
  if (text == "fid") return CharacterizeKind::Fid;
  throw UsageError("unknown characterization '" + text + "' (odmr, cg-repeat, fid)");
}

std::string to_string(CharacterizeKind kind) {
  switch (kind) {
    case CharacterizeKind::Odmr: return "odmr";
    case CharacterizeKind::CgRepeat: return "cg-repeat";
    case CharacterizeKind::Fid: return "fid";
  }
  return "?";
}

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

RunConfig apply_config(RunConfig cfg, const json& j) {
  reject_unknown(j,
                 {"theta", "scheme", "levels", "n", "sweep", "grid", "ideal", "seed", "format",
                  "output", "imperfections", "pulses", "model", "simulation", "characterize"},
                 "");
  try {
    if (j.contains("theta")) cfg.theta = theta_value(j["theta"]);
    if (j.contains("scheme")) cfg.rule = parse_update_rule(get<std::string>(j, "scheme", ""));
  } catch (const UsageError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (j.contains("levels")) cfg.levels = get<int>(j, "levels", "");
  if (j.contains("n")) cfg.n = get<int>(j, "n", "");
  if (j.contains("sweep")) cfg.sweep = get<bool>(j, "sweep", "");
  if (j.contains("grid")) cfg.grid = get<int>(j, "grid", "");
  if (j.contains("ideal")) cfg.ideal = get<bool>(j, "ideal", "");
  if (j.contains("seed")) cfg.seed = get<std::uint64_t>(j, "seed", "");
  if (j.contains("format")) cfg.format = get<std::string>(j, "format", "");
  if (j.contains("output")) cfg.output = get<std::string>(j, "output", "");

  if (j.contains("imperfections")) {
    const auto& s = j["imperfections"];
    const std::string w = "imperfections.";
    reject_unknown(s, {"t2_star", "pol_e", "pol_n", "flip_prob", "n_samples", "averaging"}, w);
    auto& m = cfg.imperfections;
    if (s.contains("t2_star")) m.t2_star_s = duration_value(s["t2_star"]);
    if (s.contains("pol_e")) m.pol_e = get<double>(s, "pol_e", w);
    if (s.contains("pol_n")) m.pol_n = get<double>(s, "pol_n", w);
    if (s.contains("flip_prob")) m.flip_prob_p = get<double>(s, "flip_prob", w);
    if (s.contains("n_samples")) m.n_samples = get<int>(s, "n_samples", w);
    if (s.contains("averaging")) {
      try {
        m.averaging = parse_averaging(get<std::string>(s, "averaging", w));
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
    }
  }
  if (j.contains("pulses")) {
    const auto& s = j["pulses"];
    const std::string w = "pulses.";
    reject_unknown(s, {"f_rabi_hz", "mw_rabi_hz"}, w);
    if (s.contains("f_rabi_hz")) cfg.simulation.pulses.f_rabi_hz = get<double>(s, "f_rabi_hz", w);
    if (s.contains("mw_rabi_hz")) cfg.simulation.pulses.mw_rabi_hz = get<double>(s, "mw_rabi_hz", w);
  }
  if (j.contains("model")) {
    const auto& s = j["model"];
    const std::string w = "model.";
    reject_unknown(s, {"d_zfs_hz", "q_quad_hz", "a_hf_hz", "b_field_gauss"}, w);
    auto& m = cfg.simulation.model;
    if (s.contains("d_zfs_hz")) m.d_zfs_hz = get<double>(s, "d_zfs_hz", w);
    if (s.contains("q_quad_hz")) m.q_quad_hz = get<double>(s, "q_quad_hz", w);
    if (s.contains("a_hf_hz")) m.a_hf_hz = get<double>(s, "a_hf_hz", w);
    if (s.contains("b_field_gauss")) m.b_field_gauss = get<double>(s, "b_field_gauss", w);
  }
  if (j.contains("simulation")) {
    const auto& s = j["simulation"];
    const std::string w = "simulation.";
    reject_unknown(s, {"rf_model", "cg_model"}, w);
    try {
      if (s.contains("rf_model")) cfg.simulation.rf = nv::parse_rf_model(get<std::string>(s, "rf_model", w));
      if (s.contains("cg_model")) cfg.simulation.cg = nv::parse_cg_model(get<std::string>(s, "cg_model", w));
    } catch (const UsageError&) {
      throw;
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  if (j.contains("characterize")) {
    const auto& s = j["characterize"];
    const std::string w = "characterize.";
    reject_unknown(s,
                   {"kmax", "readout_sigma", "reference_detuning_hz", "points", "span_factor",
                    "apply_cg", "cg_variant"},
                   w);
    if (s.contains("kmax")) cfg.kmax = get<int>(s, "kmax", w);
    if (s.contains("readout_sigma")) cfg.readout_sigma = get<double>(s, "readout_sigma", w);
    if (s.contains("reference_detuning_hz")) {
      cfg.reference_detuning_hz = get<double>(s, "reference_detuning_hz", w);
    }
    if (s.contains("points")) cfg.points = get<int>(s, "points", w);
    if (s.contains("span_factor")) cfg.span_factor = get<double>(s, "span_factor", w);
    if (s.contains("apply_cg")) cfg.apply_cg = get<bool>(s, "apply_cg", w);
    if (s.contains("cg_variant")) cfg.cg_variant = get<int>(s, "cg_variant", w);
  }
  return cfg;
}

RunConfig load_config_file(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return apply_config(std::move(base), j);
}

json ResultRecord::to_json() const {
  json prov = {{"seed", provenance.seed},
               {"seed_from_entropy", provenance.seed_from_entropy},
               {"version", provenance.version}};
  prov["timestamp"] = provenance.timestamp ? json(*provenance.timestamp) : json(nullptr);
  return {{"command", command}, {"inputs", inputs}, {"outputs", outputs}, {"provenance", prov}};
}

ResultRecord ResultRecord::from_json(const json& j) {
  reject_unknown(j, {"command", "inputs", "outputs", "provenance"}, "record.");
  ResultRecord r;
  r.command = j.at("command").get<std::string>();
  r.inputs = j.at("inputs");
  r.outputs = j.at("outputs");
  const auto& p = j.at("provenance");
  reject_unknown(p, {"seed", "seed_from_entropy", "version", "timestamp"}, "record.provenance.");
  r.provenance.seed = p.at("seed").get<std::uint64_t>();
  r.provenance.seed_from_entropy = p.at("seed_from_entropy").get<bool>();
  r.provenance.version = p.at("version").get<std::string>();
  if (!p.at("timestamp").is_null()) r.provenance.timestamp = p.at("timestamp").get<std::string>();
  return r;
}

void write_csv(std::ostream& os, const CsvTable& table) {
  auto line = [&os](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << '\n';
  };
  line(table.header);
  for (const auto& row : table.rows) line(row);
}

CsvTable parse_csv(const std::string& text) {
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (first) {
      table.header = std::move(cells);
      first = false;
    } else {
      if (cells.size() != table.header.size()) throw UsageError("CSV row width does not match header");
      table.rows.push_back(std::move(cells));
    }
  }
  return table;
}

Provenance resolve_seed(const RunConfig& config) {
  Provenance p;
  if (config.seed) {
    p.seed = *config.seed;
    return p;
  }
  if (const char* env = std::getenv(kSeedEnv); env && *env) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(env, env + std::char_traits<char>::length(env), v);
    if (res.ec != std::errc() || *res.ptr != '\0') {
      throw UsageError(std::string(kSeedEnv) + " is not an unsigned integer");
    }
    p.seed = v;
    return p;
  }
  std::random_device rd;
  p.seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  p.seed_from_entropy = true;
  p.timestamp = utc_timestamp();
  return p;
}

ResultRecord cmd_ideal(const RunConfig& cfg) {
  if (cfg.levels != 2 && cfg.levels != 3) throw UsageError("--levels must be 2 or 3");
  if (cfg.n < 3) throw UsageError("--n must be >= 3");
  if (!std::isfinite(cfg.theta)) throw UsageError("theta must be finite");
  const auto scheme =
      cfg.levels == 3 ? standard_qutrit_scheme(cfg.rule) : standard_qubit_scheme(cfg.rule);

  ResultRecord r;
  r.command = "ideal";
  r.provenance = resolve_seed(cfg);
  r.inputs = {{"scheme", to_string(cfg.rule)}, {"levels", cfg.levels}, {"sweep", cfg.sweep}};

  if (cfg.sweep) {
    if (cfg.grid < 100) throw UsageError("--grid must be >= 100");
    r.inputs["grid"] = cfg.grid;
    const auto best = find_max_k3(scheme, cfg.grid);
    r.outputs = {{"theta_star", format_theta(best.theta_star)},
                 {"theta_star_rad", best.theta_star},
                 {"k3_max", best.k3_max},
                 {"classical_bound", 1.0},
                 {"luders_bound", 1.5},
                 {"exceeds_luders_bound", best.k3_max > 1.5}};
    std::vector<double> thetas(static_cast<std::size_t>(cfg.grid));
    for (int i = 0; i < cfg.grid; ++i) thetas[i] = kPi * i / (cfg.grid - 1);
    const auto values = k3_on_grid(scheme, thetas);
    r.table.header = {"theta_over_pi", "k3"};
    for (std::size_t i = 0; i < thetas.size(); ++i) {
      r.table.rows.push_back({format_number(thetas[i] / kPi), format_number(values[i])});
    }
    return r;
  }

  r.inputs["theta"] = format_theta(cfg.theta);
  r.inputs["n"] = cfg.n;
  r.table.header = {"quantity", "value"};
  const auto [lo, hi] = classical_extrema(std::min(cfg.n, 12));
  if (cfg.n == 3) {
    const auto c = k3_protocol(cfg.theta, scheme);
    r.outputs = correlators_json(c);
    r.outputs["kn"] = c.k3;
    if (cfg.levels == 3 && cfg.rule == UpdateRule::VonNeumann) {
      r.outputs["analytic"] = correlators_json(analytic_correlators(cfg.theta));
    }
    r.table.rows = {{"q2_mean", format_number(c.q2_mean)},
                    {"q2q3_mean", format_number(c.q2q3_mean)},
                    {"q3_mean", format_number(c.q3_mean)},
                    {"k3", format_number(c.k3)}};
  } else {
    const auto s = kn_string(cfg.n, cfg.theta, scheme);
    r.outputs = {{"terms", s.terms}, {"kn", s.value}};
    for (std::size_t i = 0; i < s.terms.size(); ++i) {
      r.table.rows.push_back({"term" + std::to_string(i + 1), format_number(s.terms[i])});
    }
    r.table.rows.push_back({"kn", format_number(s.value)});
  }
  if (cfg.n <= 12) r.outputs["classical_range"] = {lo, hi};
  const double kn = r.outputs["kn"].get<double>();
  r.outputs["violates_classical_bound"] = cfg.n <= 12 && kn > hi;
  return r;
}

ResultRecord cmd_nv(const RunConfig& cfg) {
  ResultRecord r;
  r.command = "nv";
  r.provenance = resolve_seed(cfg);
  ImperfectionModel imp = cfg.ideal ? ImperfectionModel::ideal() : cfg.imperfections;
  imp.seed = r.provenance.seed;

  r.inputs = {{"theta", format_theta(cfg.theta)},
              {"ideal", cfg.ideal},
              {"imperfections", imperfections_json(imp)},
              {"f_rabi_hz", cfg.simulation.pulses.f_rabi_hz},
              {"u_duration_s", cfg.simulation.pulses.u_duration_s(cfg.theta)},
              {"mw_rabi_hz", cfg.simulation.pulses.mw_rabi_hz},
              {"rf_model", nv::to_string(cfg.simulation.rf)},
              {"cg_model", nv::to_string(cfg.simulation.cg)}};

  nv::LgRunResult res;
  try {
    res = nv::lg_run(cfg.theta, imp, cfg.simulation);
  } catch (const nv::PostselectionError& e) {
    throw NumericalFailure(e.what());
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  json table = json::array();
  r.table.header = {"variant", "level", "population"};
  for (int j = 1; j <= 4; ++j) {
    json col = json::array();
    for (int i = 1; i <= 6; ++i) {
      col.push_back(res.table(i, j));
      r.table.rows.push_back({std::to_string(j), std::to_string(i), format_number(res.table(i, j))});
    }
    table.push_back(col);
  }
  r.outputs = correlators_json(res.correlators);
  r.outputs["populations"] = table;
  r.outputs["postselected_weights"] = res.report.weights;
  r.outputs["overcount_ratio"] = res.report.overcount_ratio;
  r.outputs["renormalized"] = correlators_json(res.report.renormalized);
  r.outputs["luders_margin"] = res.correlators.k3 - 1.5;
  r.outputs["reference"] = {{"k3_ideal", 1.756},
                            {"k3_simulated", 1.632},
                            {"k3_measured", 1.625},
                            {"k3_measured_sigma", 0.022}};
  r.outputs["exceeds_measured"] = res.correlators.k3 > 1.625;
  return r;
}

namespace {

ResultRecord characterize_fid(const RunConfig& cfg, ResultRecord r) {
  ImperfectionModel m = cfg.imperfections;
  m.seed = r.provenance.seed;
  if (cfg.points < 5) throw UsageError("--points must be >= 5");
  std::vector<double> grid;
  const double span = cfg.span_factor * m.t2_star_s;
  for (int i = 0; i < cfg.points; ++i) grid.push_back(span * i / (cfg.points - 1));
  auto curve = fid_curve(m, grid, cfg.reference_detuning_hz);

  std::mt19937_64 rng(r.provenance.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  if (cfg.readout_sigma > 0) {
    for (auto& p : curve) p.y += cfg.readout_sigma * noise(rng);
  }
  const auto fit = fit_gaussian_decay(curve);

  r.inputs = {{"t2_star_s", m.t2_star_s},
              {"reference_detuning_hz", cfg.reference_detuning_hz},
              {"points", cfg.points},
              {"span_s", span},
              {"readout_sigma", cfg.readout_sigma},
              {"n_samples", m.n_samples},
              {"averaging", to_string(m.averaging)}};
  r.table.header = {"t_s", "p0"};
  for (const auto& p : curve) r.table.rows.push_back({format_number(p.x), format_number(p.y)});
  if (!fit.converged) throw NumericalFailure("FID fit failed: " + fit.message);
  r.outputs = {{"t2_star_hat_s", fit.t2_star_s},
               {"t2_star_err_s", fit.t2_star_err_s},
               {"relative_error", std::abs(fit.t2_star_s - m.t2_star_s) / m.t2_star_s},
               {"detuning_hat_hz", fit.detuning_hz},
               {"amplitude", fit.amplitude},
               {"offset", fit.offset},
               {"rms_residual", fit.rms_residual}};
  return r;
}

ResultRecord characterize_cg_repeat(const RunConfig& cfg, ResultRecord r) {
  const double p = cfg.imperfections.flip_prob_p;
  const auto curve = nv::repeated_cg(cfg.kmax, p, cfg.readout_sigma, r.provenance.seed);
  const auto fit = fit_flip_probability(curve);
  r.inputs = {{"flip_prob", p}, {"kmax", cfg.kmax}, {"readout_sigma", cfg.readout_sigma}};
  r.table.header = {"k", "p0"};
  for (const auto& pt : curve) r.table.rows.push_back({format_number(pt.x), format_number(pt.y)});
  if (!fit.converged) throw NumericalFailure("repeated-gate fit failed: " + fit.message);
  r.outputs = {{"p_hat", fit.p_hat}, {"p_err", fit.p_err}, {"abs_error", std::abs(fit.p_hat - p)}};
  return r;
}

std::vector<double> dip_frequencies(const std::vector<CurvePoint>& spectrum, double depth) {
  double top = 0.0;
  for (const auto& p : spectrum) top = std::max(top, p.y);
  std::vector<double> dips;
  for (std::size_t i = 1; i + 1 < spectrum.size(); ++i) {
    const auto& c = spectrum[i];
    if (c.y < spectrum[i - 1].y && c.y <= spectrum[i + 1].y && c.y < top - depth) dips.push_back(c.x);
  }
  return dips;
}

ResultRecord characterize_odmr(const RunConfig& cfg, ResultRecord r) {
  const double p = cfg.imperfections.flip_prob_p;
  const auto grid = nv::default_odmr_grid(cfg.simulation.model);
  const auto bare = nv::odmr_spectrum(false, p, grid, cfg.simulation);
  const auto gated = nv::odmr_spectrum(cfg.apply_cg, p, grid, cfg.simulation, cfg.cg_variant);

  const auto dips = dip_frequencies(bare, 0.1);
  std::vector<double> spacing;
  for (std::size_t i = 1; i < dips.size(); ++i) spacing.push_back(dips[i] - dips[i - 1]);
  double gap = 0.0;
  for (std::size_t i = 0; i < bare.size(); ++i) gap = std::max(gap, std::abs(bare[i].y - gated[i].y));

  r.inputs = {{"flip_prob", p},
              {"apply_cg", cfg.apply_cg},
              {"cg_variant", cfg.cg_variant},
              {"mw_rabi_hz", cfg.simulation.pulses.mw_rabi_hz}};
  r.outputs = {{"dips_hz", dips},
               {"dip_spacing_hz", spacing},
               {"max_gap_vs_bare", gap},
               {"protected_line_hz",
                nv::electron_transition_hz(cfg.simulation.model, 2 - cfg.cg_variant)}};
  r.table.header = {"freq_hz", "p0_bare", "p0_gated"};
  for (std::size_t i = 0; i < bare.size(); ++i) {
    r.table.rows.push_back({format_number(bare[i].x), format_number(bare[i].y), format_number(gated[i].y)});
  }
  return r;
}

}  // namespace

ResultRecord cmd_characterize(CharacterizeKind kind, const RunConfig& cfg) {
  ResultRecord r;
  r.command = "characterize " + to_string(kind);
  r.provenance = resolve_seed(cfg);
  try {
    switch (kind) {
      case CharacterizeKind::Fid: return characterize_fid(cfg, std::move(r));
      case CharacterizeKind::CgRepeat: return characterize_cg_repeat(cfg, std::move(r));
      case CharacterizeKind::Odmr: return characterize_odmr(cfg, std::move(r));
    }
  } catch (const UsageError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return r;
}

}  // namespace lgi::cli
