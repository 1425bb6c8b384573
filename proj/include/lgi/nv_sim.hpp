#pragma once

// Six-level NV model (electron ancilla (x) 14N nuclear qutrit) of the
// negative-result LG experiment: Hamiltonian, controlled gates,
// postselected population tables, and the characterization sequences.
//
// Levels are numbered 1..6 as |1>e|+1>n, |1>e|0>n, |1>e|-1>n,
// |0>e|+1>n, |0>e|0>n, |0>e|-1>n. Postselection keeps levels 4..6.

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "lgi/lg_protocol.hpp"
#include "lgi/noise.hpp"
#include "lgi/qop.hpp"

namespace lgi::nv {

inline constexpr double kGammaElectronHzPerGauss = 2.8025e6;
inline constexpr double kGammaN14HzPerGauss = 307.7;

struct NvModel {
  double d_zfs_hz = 2.87e9;
  double q_quad_hz = -4.95e6;
  double a_hf_hz = -2.16e6;
  double b_field_gauss = 512.0;

  double omega_e_hz() const { return kGammaElectronHzPerGauss * b_field_gauss; }
  double omega_n_hz() const { return kGammaN14HzPerGauss * b_field_gauss; }
  void validate() const;
};

/// 1-based level index for electron ms in {1, 0} and nuclear mI in {+1, 0, -1}.
int level_index(int electron_ms, int nuclear_mi);
/// Inverse of level_index: {ms, mI}.
std::array<int, 2> level_state(int level);
/// 0-based nuclear basis index of mI (+1 -> 0, 0 -> 1, -1 -> 2).
int nuclear_slot(int nuclear_mi);

/// 2 pi (D Sz^2 + we Sz + Q Iz^2 + wn Iz + A Iz Sz) on the six levels, rad/s.
ComplexMatrix build_nv_hamiltonian(const NvModel& model);

/// Energy of a level divided by 2 pi, in Hz.
double level_energy_hz(const NvModel& model, int level);
/// |0>e -> |1>e transition frequency with the nucleus in mI, Hz.
double electron_transition_hz(const NvModel& model, int nuclear_mi);

struct PulseParams {
  double f_rabi_hz = 2e4;
  // Square selective MW pulses. |A| / sqrt(15) makes a pi pulse a full 2 pi
  // cycle on the neighbouring hyperfine line.
  double mw_rabi_hz = 2.16e6 / 3.872983346207417;

  /// RF time for a nuclear rotation angle: theta / (sqrt(2) pi f_rabi).
  double u_duration_s(double theta) const;
  double mw_pi_duration_s() const { return 1.0 / (2.0 * mw_rabi_hz); }
  /// RF tones (|4>-|5>, |5>-|6>) in the |0>e manifold, Hz.
  std::array<double, 2> rf_freqs_hz(const NvModel& model) const;
  /// MW tone of the protected-line controlled gate for the mI = +1 line, Hz.
  double mw_freq_hz(const NvModel& model) const { return electron_transition_hz(model, +1); }
  void validate() const;
};

enum class RfModel {
  Ideal,      // nuclear rotation in both electron manifolds
  Selective,  // RF resonant in the |0>e manifold only; |1>e detuned by A
};
enum class CgModel {
  Channel,      // instantaneous flip with probability p
  SquarePulse,  // square selective MW pi pulses, mixed with a miss of weight 1 - p
};

std::string to_string(RfModel m);
std::string to_string(CgModel m);
RfModel parse_rf_model(const std::string& text);
CgModel parse_cg_model(const std::string& text);

struct SimulationOptions {
  NvModel model;
  PulseParams pulses;
  RfModel rf = RfModel::Selective;
  CgModel cg = CgModel::Channel;
};

/// Flip of the electron for every nuclear state except the protected one,
/// applied with probability p: rho -> (1 - p) rho + p F rho F^dagger.
class ControlledGate {
 public:
  ControlledGate(int variant, double flip_prob);

  int variant() const { return variant_; }
  int protected_mi() const;
  double flip_prob() const { return p_; }
  const ComplexMatrix& flip_unitary() const { return flip_; }

  ComplexMatrix apply(const ComplexMatrix& rho) const;
  DensityMatrix apply(const DensityMatrix& rho) const;

 private:
  int variant_;
  double p_;
  ComplexMatrix flip_;
};

ControlledGate controlled_gate(int variant, double flip_prob);

struct InrmExperimentSpec {
  double theta = 0.0;
  int cg_variant = 4;  // 1..3 protect mI = +1, 0, -1; 4 runs without a gate
  ImperfectionModel imperfections = ImperfectionModel::ideal();
  SimulationOptions options;

  void validate() const;
};

using PopulationColumn = std::array<double, 6>;

/// p(level, variant) for level 1..6 and variant 1..4.
class PopulationTable {
 public:
  PopulationTable() { data_.setZero(); }

  double operator()(int level, int variant) const { return data_(level - 1, variant - 1); }
  double& operator()(int level, int variant) { return data_(level - 1, variant - 1); }

  void set_column(int variant, const PopulationColumn& column);
  PopulationColumn column(int variant) const;
  /// Population kept by postselection (levels 4..6) in one column.
  double postselected_weight(int variant) const;
  /// Throws if a column is not a probability vector to 1e-9.
  void validate() const;

 private:
  Eigen::Matrix<double, 6, 4> data_;
};

class PostselectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unitary for one RF segment rotating the nucleus by theta with electron
/// detuning delta0, in the interaction frame of the static Hamiltonian.
ComplexMatrix rf_segment(double theta, double delta0_hz, const SimulationOptions& options);

/// Square selective MW pi pulse on the line of nuclear state `target_mi`.
ComplexMatrix mw_pi_pulse(int target_mi, double delta0_hz, const SimulationOptions& options);

/// One shot of the sequence with a fixed detuning. Raw six-level
/// populations, no postselection.
PopulationColumn run_inrm_shot(const InrmExperimentSpec& spec, const DensityMatrix& initial,
                               double delta0_hz);

/// Shot populations averaged over the detuning ensemble of the spec.
PopulationColumn run_inrm_experiment(const InrmExperimentSpec& spec);
PopulationColumn run_inrm_experiment_serial(const InrmExperimentSpec& spec);

/// Correlators from raw joint probabilities in levels 4..6. Throws
/// PostselectionError when a postselected subspace is empty.
CorrelatorSet assemble_lg(const PopulationTable& table);

struct PostselectionReport {
  std::array<double, 4> weights{};  // levels 4..6 per variant
  // (sum of gate-variant weights) / (gate-free weight); 1 for perfect gates.
  double overcount_ratio = 0.0;
  // Correlators after renormalizing each column over levels 4..6.
  CorrelatorSet renormalized;
};

PostselectionReport postselection_report(const PopulationTable& table);

struct LgRunResult {
  PopulationTable table;
  CorrelatorSet correlators;
  PostselectionReport report;
};

/// Above this overcount the gates no longer discriminate the nuclear state.
inline constexpr double kMaxOvercountRatio = 1.5;

/// All four variants under the imperfection model. Throws PostselectionError
/// when postselection is degenerate (for example p = 0).
LgRunResult lg_run(double theta, const ImperfectionModel& imperfections,
                   const SimulationOptions& options = {});

/// Electron |0>e population after a selective MW pi pulse at each probe
/// frequency, nucleus fully mixed, optionally after a controlled gate.
std::vector<CurvePoint> odmr_spectrum(bool apply_cg, double flip_prob,
                                      const std::vector<double>& freqs_hz,
                                      const SimulationOptions& options = {}, int cg_variant = 1);

/// Probe grid centred on the three hyperfine lines.
std::vector<double> default_odmr_grid(const NvModel& model, double half_width_hz = 4e6,
                                      double step_hz = 2e4);

/// P0(k) = p^k for k = 1..k_max: each gate application keeps the shot on
/// the expected track with probability p and a miss never returns to it.
/// Optional Gaussian readout noise of width readout_sigma.
std::vector<CurvePoint> repeated_cg(int k_max, double flip_prob, double readout_sigma = 0.0,
                                    std::uint64_t seed = 0);

}  // namespace lgi::nv
