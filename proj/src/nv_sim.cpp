#include "lgi/nv_sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "lgi/kernels.hpp"

namespace lgi::nv {

namespace {

ComplexMatrix p1e_full() { return tensor(electron_sz(), ComplexMatrix::Identity(3, 3)); }

ComplexMatrix nuclear_projector(int mi) { return projector(3, nuclear_slot(mi)); }

// exp(i 2 pi diag(nu) t): returns from the static detuning frame to the
// interaction frame of the static Hamiltonian.
ComplexMatrix frame_return(const Eigen::VectorXd& nu_hz, double t) {
  ComplexMatrix w = ComplexMatrix::Zero(nu_hz.size(), nu_hz.size());
  for (Eigen::Index i = 0; i < nu_hz.size(); ++i) w(i, i) = std::exp(kI * (2 * kPi * nu_hz(i) * t));
  return w;
}

}  // namespace

void NvModel::validate() const {
  if (!(b_field_gauss > 0)) throw std::invalid_argument("NvModel: field must be positive");
  for (double v : {d_zfs_hz, q_quad_hz, a_hf_hz}) {
    if (!std::isfinite(v)) throw std::invalid_argument("NvModel: non-finite constant");
  }
}

int level_index(int electron_ms, int nuclear_mi) {
  if (electron_ms != 0 && electron_ms != 1) throw std::invalid_argument("level_index: ms must be 1 or 0");
  return (electron_ms == 1 ? 0 : 3) + nuclear_slot(nuclear_mi) + 1;
}

std::array<int, 2> level_state(int level) {
  if (level < 1 || level > 6) throw std::invalid_argument("level_state: level must be in 1..6");
  const int ms = level <= 3 ? 1 : 0;
  const int mi = 1 - (level - 1) % 3;
  return {ms, mi};
}

int nuclear_slot(int nuclear_mi) {
  if (nuclear_mi < -1 || nuclear_mi > 1) throw std::invalid_argument("nuclear_slot: mI must be in {-1,0,1}");
  return 1 - nuclear_mi;
}

double level_energy_hz(const NvModel& m, int level) {
  const auto [ms, mi] = level_state(level);
  return m.d_zfs_hz * ms * ms + m.omega_e_hz() * ms + m.q_quad_hz * mi * mi +
         m.omega_n_hz() * mi + m.a_hf_hz * mi * ms;
}

ComplexMatrix build_nv_hamiltonian(const NvModel& model) {
  model.validate();
  const ComplexMatrix sz = electron_sz();
  const auto spin = spin1_operators();
  const ComplexMatrix i2 = ComplexMatrix::Identity(2, 2);
  const ComplexMatrix i3 = ComplexMatrix::Identity(3, 3);
  const ComplexMatrix h = model.d_zfs_hz * tensor(sz * sz, i3) +
                          model.omega_e_hz() * tensor(sz, i3) +
                          model.q_quad_hz * tensor(i2, spin.iz_sq) +
                          model.omega_n_hz() * tensor(i2, spin.sz) +
                          model.a_hf_hz * tensor(sz, spin.sz);
  return 2 * kPi * h;
}

double electron_transition_hz(const NvModel& model, int nuclear_mi) {
  return level_energy_hz(model, level_index(1, nuclear_mi)) -
         level_energy_hz(model, level_index(0, nuclear_mi));
}

double PulseParams::u_duration_s(double theta) const {
  return theta / (std::sqrt(2.0) * kPi * f_rabi_hz);
}

std::array<double, 2> PulseParams::rf_freqs_hz(const NvModel& model) const {
  return {level_energy_hz(model, 4) - level_energy_hz(model, 5),
          level_energy_hz(model, 5) - level_energy_hz(model, 6)};
}

void PulseParams::validate() const {
  if (!(f_rabi_hz > 0)) throw std::invalid_argument("PulseParams: f_rabi must be positive");
  if (!(mw_rabi_hz > 0)) throw std::invalid_argument("PulseParams: mw_rabi must be positive");
}

std::string to_string(RfModel m) { return m == RfModel::Ideal ? "ideal" : "selective"; }
std::string to_string(CgModel m) { return m == CgModel::Channel ? "channel" : "square-pulse"; }

RfModel parse_rf_model(const std::string& text) {
  if (text == "ideal") return RfModel::Ideal;
  if (text == "selective") return RfModel::Selective;
  throw std::invalid_argument("unknown RF model '" + text + "'");
}

CgModel parse_cg_model(const std::string& text) {
  if (text == "channel") return CgModel::Channel;
  if (text == "square-pulse" || text == "square") return CgModel::SquarePulse;
  throw std::invalid_argument("unknown controlled-gate model '" + text + "'");
}

ControlledGate::ControlledGate(int variant, double flip_prob) : variant_(variant), p_(flip_prob) {
  if (variant < 1 || variant > 3) throw std::invalid_argument("controlled_gate: variant must be 1..3");
  if (!(flip_prob >= 0.0 && flip_prob <= 1.0)) {
    throw std::invalid_argument("controlled_gate: flip probability outside [0, 1]");
  }
  const ComplexMatrix keep = nuclear_projector(protected_mi());
  const ComplexMatrix others = ComplexMatrix::Identity(3, 3) - keep;
  flip_ = tensor(electron_flip(), others) + tensor(ComplexMatrix::Identity(2, 2), keep);
}

int ControlledGate::protected_mi() const { return 2 - variant_; }

ComplexMatrix ControlledGate::apply(const ComplexMatrix& rho) const {
  return (1.0 - p_) * rho + p_ * (flip_ * rho * flip_.adjoint());
}

DensityMatrix ControlledGate::apply(const DensityMatrix& rho) const {
  if (rho.dim() != 6) throw DimensionError("ControlledGate: expects a 6-level state");
  return DensityMatrix::unchecked(apply(rho.matrix()));
}

ControlledGate controlled_gate(int variant, double flip_prob) {
  return ControlledGate(variant, flip_prob);
}

void InrmExperimentSpec::validate() const {
  if (cg_variant < 1 || cg_variant > 4) throw std::invalid_argument("InrmExperimentSpec: variant must be 1..4");
  if (!std::isfinite(theta)) throw std::invalid_argument("InrmExperimentSpec: theta not finite");
  imperfections.validate();
  options.model.validate();
  options.pulses.validate();
}

void PopulationTable::set_column(int variant, const PopulationColumn& column) {
  for (int level = 1; level <= 6; ++level) (*this)(level, variant) = column[level - 1];
}

PopulationColumn PopulationTable::column(int variant) const {
  PopulationColumn c{};
  for (int level = 1; level <= 6; ++level) c[level - 1] = (*this)(level, variant);
  return c;
}

double PopulationTable::postselected_weight(int variant) const {
  return (*this)(4, variant) + (*this)(5, variant) + (*this)(6, variant);
}

void PopulationTable::validate() const {
  for (int j = 1; j <= 4; ++j) {
    double sum = 0.0;
    for (int i = 1; i <= 6; ++i) {
      const double v = (*this)(i, j);
      if (v < -1e-12 || v > 1.0 + 1e-12) {
        throw std::domain_error("PopulationTable: entry outside [0, 1]");
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::domain_error("PopulationTable: column does not sum to 1");
  }
}

ComplexMatrix rf_segment(double theta, double delta0_hz, const SimulationOptions& options) {
  const double t = options.pulses.u_duration_s(theta);
  const ComplexMatrix noise = (2 * kPi * delta0_hz) * p1e_full();

  if (options.rf == RfModel::Ideal) {
    // The drive commutes with the electron detuning.
    return matrix_exp(noise, -kI * t) *
           tensor(ComplexMatrix::Identity(2, 2), rotation_unitary(theta).matrix());
  }

  // Both RF tones are resonant in |0>e. In |1>e each nuclear transition is
  // shifted by A, i.e. a static detuning A * mI on |1>e|mI>.
  const auto spin = spin1_operators();
  const double drive = options.pulses.f_rabi_hz / std::sqrt(2.0);
  const ComplexMatrix detuning = options.model.a_hf_hz * tensor(electron_sz(), spin.sz);
  const ComplexMatrix h = 2 * kPi * (drive * tensor(ComplexMatrix::Identity(2, 2), spin.sx) + detuning) + noise;
  return frame_return(detuning.diagonal().real(), t) * matrix_exp(h, -kI * t);
}

ComplexMatrix mw_pi_pulse(int target_mi, double delta0_hz, const SimulationOptions& options) {
  const double tau = options.pulses.mw_pi_duration_s();
  const double rabi = options.pulses.mw_rabi_hz;
  const double f_target = electron_transition_hz(options.model, target_mi);

  ComplexMatrix h = ComplexMatrix::Zero(6, 6);
  Eigen::VectorXd nu = Eigen::VectorXd::Zero(6);
  for (int mi : {1, 0, -1}) {
    const double detuning = electron_transition_hz(options.model, mi) - f_target;
    const ComplexMatrix local = (detuning + delta0_hz) * electron_sz() + (rabi / 2) * electron_flip();
    h += 2 * kPi * tensor(local, nuclear_projector(mi));
    nu(level_index(1, mi) - 1) = detuning;
  }
  return frame_return(nu, tau) * matrix_exp(h, -kI * tau);
}

namespace {

// Controlled gate as a pair of selective pulses on the unprotected lines.
ComplexMatrix apply_square_pulse_gate(const ComplexMatrix& rho, int variant, double p,
                                      double delta0_hz, const SimulationOptions& options) {
  const int keep = 2 - variant;
  ComplexMatrix gate = ComplexMatrix::Identity(6, 6);
  int pulses = 0;
  for (int mi : {1, 0, -1}) {
    if (mi == keep) continue;
    gate = mw_pi_pulse(mi, delta0_hz, options) * gate;
    ++pulses;
  }
  const double idle = pulses * options.pulses.mw_pi_duration_s();
  const ComplexMatrix miss = matrix_exp((2 * kPi * delta0_hz) * p1e_full(), -kI * idle);
  return p * (gate * rho * gate.adjoint()) + (1.0 - p) * (miss * rho * miss.adjoint());
}

ComplexMatrix shot_state(const InrmExperimentSpec& spec, const ComplexMatrix& initial, double delta0_hz) {
  const ComplexMatrix u = rf_segment(spec.theta, delta0_hz, spec.options);
  ComplexMatrix rho = u * initial * u.adjoint();
  if (spec.cg_variant != 4) {
    const double p = spec.imperfections.flip_prob_p;
    if (spec.options.cg == CgModel::Channel) {
      rho = ControlledGate(spec.cg_variant, p).apply(rho);
    } else {
      rho = apply_square_pulse_gate(rho, spec.cg_variant, p, delta0_hz, spec.options);
    }
  }
  return u * rho * u.adjoint();
}

PopulationColumn to_column(const ComplexMatrix& rho) {
  PopulationColumn c{};
  for (int i = 0; i < 6; ++i) c[i] = rho(i, i).real();
  return c;
}

// Each sample contributes a 6x4 block of populations (one column per variant).
ComplexMatrix all_variant_shot(double theta, const ImperfectionModel& imp,
                               const SimulationOptions& options, const ComplexMatrix& initial,
                               double delta0_hz) {
  ComplexMatrix block(6, 4);
  InrmExperimentSpec spec{theta, 1, imp, options};
  for (int v = 1; v <= 4; ++v) {
    spec.cg_variant = v;
    block.col(v - 1) = shot_state(spec, initial, delta0_hz).diagonal();
  }
  return block;
}

template <class Sum>
PopulationColumn average_experiment(const InrmExperimentSpec& spec, Sum&& sum) {
  spec.validate();
  const auto samples = sample_detunings(spec.imperfections);
  const ComplexMatrix initial = imperfect_initial_state(spec.imperfections).matrix();
  std::vector<double> weights;
  for (const auto& s : samples) weights.push_back(s.weight);
  const ComplexMatrix mean = sum(std::span<const double>(weights), 6, 6, [&](std::size_t k) {
    return shot_state(spec, initial, samples[k].delta0_hz);
  });
  return to_column(mean);
}

}  // namespace

PopulationColumn run_inrm_shot(const InrmExperimentSpec& spec, const DensityMatrix& initial,
                               double delta0_hz) {
  spec.validate();
  if (initial.dim() != 6) throw DimensionError("run_inrm_shot: expects a 6-level state");
  return to_column(shot_state(spec, initial.matrix(), delta0_hz));
}

PopulationColumn run_inrm_experiment(const InrmExperimentSpec& spec) {
  return average_experiment(spec, [](auto w, auto r, auto c, auto&& f) {
    return kernels::weighted_sum(w, r, c, f);
  });
}

PopulationColumn run_inrm_experiment_serial(const InrmExperimentSpec& spec) {
  return average_experiment(spec, [](auto w, auto r, auto c, auto&& f) {
    return kernels::weighted_sum_serial(w, r, c, f);
  });
}

CorrelatorSet assemble_lg(const PopulationTable& t) {
  double gated = 0.0;
  for (int j = 1; j <= 3; ++j) gated += t.postselected_weight(j);
  if (!(gated > 0.0)) throw PostselectionError("assemble_lg: no postselected population with gates");
  if (!(t.postselected_weight(4) > 0.0)) {
    throw PostselectionError("assemble_lg: no postselected population without gates");
  }
  // Outcome of q2 per variant: +1, +1, -1; of q3 per level: +1, +1, -1.
  const std::array<int, 3> q2{+1, +1, -1};
  double mean2 = 0.0, corr = 0.0;
  for (int j = 1; j <= 3; ++j) {
    mean2 += q2[j - 1] * (t(4, j) + t(5, j) + t(6, j));
    corr += q2[j - 1] * (t(4, j) + t(5, j) - t(6, j));
  }
  const double mean3 = t(4, 4) + t(5, 4) - t(6, 4);
  return CorrelatorSet::from_terms(mean2, corr, mean3);
}

PostselectionReport postselection_report(const PopulationTable& t) {
  PostselectionReport r;
  for (int j = 1; j <= 4; ++j) r.weights[j - 1] = t.postselected_weight(j);
  const double gated = r.weights[0] + r.weights[1] + r.weights[2];
  r.overcount_ratio = r.weights[3] > 0 ? gated / r.weights[3] : std::numeric_limits<double>::infinity();

  // Gated columns share one normalization so they still carry the q2
  // outcome probabilities; the gate-free column is normalized on its own.
  PopulationTable normalized;
  for (int i = 4; i <= 6; ++i) {
    for (int j = 1; j <= 3; ++j) normalized(i, j) = gated > 0 ? t(i, j) / gated : 0.0;
    normalized(i, 4) = r.weights[3] > 0 ? t(i, 4) / r.weights[3] : 0.0;
  }
  if (gated > 0 && r.weights[3] > 0) r.renormalized = assemble_lg(normalized);
  return r;
}

LgRunResult lg_run(double theta, const ImperfectionModel& imperfections,
                   const SimulationOptions& options) {
  InrmExperimentSpec probe{theta, 4, imperfections, options};
  probe.validate();

  const auto samples = sample_detunings(imperfections);
  const ComplexMatrix initial = imperfect_initial_state(imperfections).matrix();
  std::vector<double> weights;
  for (const auto& s : samples) weights.push_back(s.weight);
  const ComplexMatrix mean =
      kernels::weighted_sum(std::span<const double>(weights), 6, 4, [&](std::size_t k) {
        return all_variant_shot(theta, imperfections, options, initial, samples[k].delta0_hz);
      });

  LgRunResult result;
  for (int j = 1; j <= 4; ++j) {
    for (int i = 1; i <= 6; ++i) result.table(i, j) = mean(i - 1, j - 1).real();
  }
  result.table.validate();
  result.correlators = assemble_lg(result.table);
  result.report = postselection_report(result.table);
  if (result.report.overcount_ratio > kMaxOvercountRatio) {
    throw PostselectionError(
        "lg_run: controlled gates do not discriminate the nuclear state (postselected weight "
        "ratio " + std::to_string(result.report.overcount_ratio) + "); check flip probability");
  }
  return result;
}

std::vector<CurvePoint> odmr_spectrum(bool apply_cg, double flip_prob,
                                      const std::vector<double>& freqs_hz,
                                      const SimulationOptions& options, int cg_variant) {
  options.model.validate();
  options.pulses.validate();
  ComplexMatrix rho = tensor(projector(2, 1), ComplexMatrix::Identity(3, 3) / 3.0);
  if (apply_cg) rho = ControlledGate(cg_variant, flip_prob).apply(rho);

  const double tau = options.pulses.mw_pi_duration_s();
  const double rabi = options.pulses.mw_rabi_hz;
  std::vector<CurvePoint> spectrum(freqs_hz.size());
  const auto n = static_cast<std::ptrdiff_t>(freqs_hz.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const double f = freqs_hz[static_cast<std::size_t>(k)];
    ComplexMatrix h = ComplexMatrix::Zero(6, 6);
    for (int mi : {1, 0, -1}) {
      const double detuning = electron_transition_hz(options.model, mi) - f;
      const ComplexMatrix local = detuning * electron_sz() + (rabi / 2) * electron_flip();
      h += 2 * kPi * tensor(local, nuclear_projector(mi));
    }
    const ComplexMatrix u = matrix_exp(h, -kI * tau);
    const ComplexMatrix out = u * rho * u.adjoint();
    spectrum[static_cast<std::size_t>(k)] = {f, out(3, 3).real() + out(4, 4).real() + out(5, 5).real()};
  }
  return spectrum;
}

std::vector<double> default_odmr_grid(const NvModel& model, double half_width_hz, double step_hz) {
  const double centre = electron_transition_hz(model, 0);
  std::vector<double> grid;
  const int steps = static_cast<int>(std::round(2 * half_width_hz / step_hz));
  for (int i = 0; i <= steps; ++i) grid.push_back(centre - half_width_hz + i * step_hz);
  return grid;
}

std::vector<CurvePoint> repeated_cg(int k_max, double flip_prob, double readout_sigma,
                                    std::uint64_t seed) {
  if (k_max < 1) throw std::invalid_argument("repeated_cg: k_max must be >= 1");
  if (!(flip_prob >= 0.0 && flip_prob <= 1.0)) {
    throw std::invalid_argument("repeated_cg: flip probability outside [0, 1]");
  }
  if (readout_sigma < 0) throw std::invalid_argument("repeated_cg: negative readout noise");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<CurvePoint> curve;
  // Two-state track: population on the expected sequence, and lost.
  double on_track = 1.0;
  for (int k = 1; k <= k_max; ++k) {
    on_track *= flip_prob;
    const double reading = readout_sigma > 0 ? on_track + readout_sigma * noise(rng) : on_track;
    curve.push_back({static_cast<double>(k), reading});
  }
  return curve;
}

}  // namespace lgi::nv
