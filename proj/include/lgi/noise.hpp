#pragma once

// Imperfection channels: quasi-static Gaussian electron dephasing, imperfect
// polarization, and free-induction-decay synthesis.

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "lgi/qop.hpp"

namespace lgi {

enum class Averaging { MonteCarlo, GaussHermite };

std::string to_string(Averaging a);
Averaging parse_averaging(const std::string& text);

/// sigma of the detuning distribution for a Gaussian FID with decay time t2_star.
double sigma_from_t2_star(double t2_star_s);

struct ImperfectionModel {
  double t2_star_s = 62e-6;
  double pol_e = 0.95;
  double pol_n = 0.98;
  double flip_prob_p = 0.995;
  int n_samples = 21;
  std::uint64_t seed = 0;
  Averaging averaging = Averaging::GaussHermite;

  /// 1 / (sqrt(2) pi T2*), zero for an infinite T2*.
  double sigma_detuning_hz() const { return sigma_from_t2_star(t2_star_s); }

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;

  static ImperfectionModel nominal() { return {}; }
  static ImperfectionModel ideal() {
    ImperfectionModel m;
    m.t2_star_s = std::numeric_limits<double>::infinity();
    m.pol_e = 1.0;
    m.pol_n = 1.0;
    m.flip_prob_p = 1.0;
    m.n_samples = 1;
    return m;
  }
};

struct DetuningSample {
  double delta0_hz = 0.0;
  double weight = 0.0;
};

/// Probabilists' Gauss-Hermite rule for the standard normal: nodes and
/// weights with sum(weights) = 1 (Golub-Welsch).
std::vector<DetuningSample> gauss_hermite_standard(int n);

std::vector<DetuningSample> sample_detunings(const ImperfectionModel& model);

/// (pol_e |0>e<0| + (1 - pol_e) |1>e<1|) (x)
/// (pol_n |+1><+1| + (1 - pol_n)/2 (|0><0| + |-1><-1|)).
DensityMatrix imperfect_initial_state(const ImperfectionModel& model);

/// Electron detuning operator on a 2- or 6-level space: diag(1, 0) on the
/// electron, identity on the nucleus.
ComplexMatrix electron_noise_operator(Eigen::Index dim);

/// sum_k w_k U_k rho U_k^dagger with U_k = exp(-i (H + 2 pi delta_k Sz_e) t).
/// `h_static` is in angular units (rad/s).
DensityMatrix dephasing_evolution(const DensityMatrix& rho, const ComplexMatrix& h_static,
                                  double duration_s, const std::vector<DetuningSample>& samples);
DensityMatrix dephasing_evolution_serial(const DensityMatrix& rho, const ComplexMatrix& h_static,
                                         double duration_s,
                                         const std::vector<DetuningSample>& samples);

struct CurvePoint {
  double x = 0.0;
  double y = 0.0;
};

/// Ramsey sequence on the electron: pi/2, free evolution under the
/// detuning ensemble plus a reference detuning, pi/2, read P(|0>e).
std::vector<CurvePoint> fid_curve(const ImperfectionModel& model, const std::vector<double>& t_grid_s,
                                  double reference_detuning_hz);

}  // namespace lgi
