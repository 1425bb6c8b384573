#pragma once

// Run configuration, result records and the command implementations behind
// the `lgi` executable.

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "lgi/noise.hpp"
#include "lgi/nv_sim.hpp"

namespace lgi::cli {

using nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kSeedEnv = "LGI_SEED";

/// Bad flags, config keys or values. Maps to exit code 1.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Fits that did not converge and similar. Maps to exit code 2.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// "0.416pi", "0.5*pi", "pi", or plain radians.
double parse_theta(const std::string& text);
/// Canonical multiple-of-pi spelling, e.g. "0.416pi".
std::string format_theta(double theta);
/// "62us", "1.5ms", "2e-6s" or plain seconds.
double parse_duration(const std::string& text);

enum class CharacterizeKind { Odmr, CgRepeat, Fid };
CharacterizeKind parse_characterize_kind(const std::string& text);
std::string to_string(CharacterizeKind kind);

struct RunConfig {
  // ideal
  double theta = 0.416 * kPi;
  UpdateRule rule = UpdateRule::VonNeumann;
  int levels = 3;
  int n = 3;
  bool sweep = false;
  int grid = 10000;

  // nv
  bool ideal = false;
  ImperfectionModel imperfections = ImperfectionModel::nominal();
  nv::SimulationOptions simulation;

  // characterize
  int kmax = 30;
  double readout_sigma = 0.01;
  double reference_detuning_hz = 2e4;
  int points = 200;
  double span_factor = 2.5;
  bool apply_cg = true;
  int cg_variant = 1;

  std::optional<std::uint64_t> seed;
  std::string format = "json";
  std::string output;
};

/// Applies a JSON config on top of `base`. Unknown keys throw UsageError.
RunConfig apply_config(RunConfig base, const json& config);
RunConfig load_config_file(const std::string& path, RunConfig base = {});

struct Provenance {
  std::uint64_t seed = 0;
  bool seed_from_entropy = false;
  std::string version = kVersion;
  std::optional<std::string> timestamp;  // recorded only for entropy-seeded runs
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct ResultRecord {
  std::string command;
  json inputs;
  json outputs;
  Provenance provenance;
  CsvTable table;  // curve or population data; not part of the JSON form

  json to_json() const;
  static ResultRecord from_json(const json& j);
};

void write_csv(std::ostream& os, const CsvTable& table);
CsvTable parse_csv(const std::string& text);
std::string format_number(double v);

/// Seed from the config, else LGI_SEED, else std::random_device.
Provenance resolve_seed(const RunConfig& config);

ResultRecord cmd_ideal(const RunConfig& config);
ResultRecord cmd_nv(const RunConfig& config);
ResultRecord cmd_characterize(CharacterizeKind kind, const RunConfig& config);

}  // namespace lgi::cli
