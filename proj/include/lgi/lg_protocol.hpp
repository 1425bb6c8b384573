#pragma once

// Ideal (noise-free) Leggett-Garg protocol: measurement update rules,
// two-time correlators, Kn strings, and the violation search.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lgi/qop.hpp"

namespace lgi {

enum class UpdateRule { Luders, VonNeumann };

std::string to_string(UpdateRule rule);
UpdateRule parse_update_rule(const std::string& text);

struct LabeledProjector {
  std::string label;
  ComplexMatrix matrix;
  int outcome;  // dichotomic value, +1 or -1
};

/// Projective measurement of a dichotomic observable. Projectors sharing an
/// outcome are either applied individually (von Neumann) or summed into one
/// projector per outcome (Luders).
class MeasurementScheme {
 public:
  static constexpr double kTol = 1e-10;

  MeasurementScheme(std::vector<LabeledProjector> projectors, UpdateRule rule);

  const std::vector<LabeledProjector>& projectors() const { return projectors_; }
  UpdateRule rule() const { return rule_; }
  Eigen::Index dim() const { return projectors_.front().matrix.rows(); }
  int outcome_of(const std::string& label) const;

  // Summed projector onto the eigenspace of one outcome.
  ComplexMatrix outcome_projector(int outcome) const;

 private:
  std::vector<LabeledProjector> projectors_;
  UpdateRule rule_;
};

/// Rank-1 projectors on (|+1>, |0>, |-1>) with outcomes (+1, +1, -1).
MeasurementScheme standard_qutrit_scheme(UpdateRule rule);

/// Rank-1 projectors on (|up>, |down>) with outcomes (+1, -1).
MeasurementScheme standard_qubit_scheme(UpdateRule rule);

struct MeasurementBranch {
  int outcome = 0;
  double probability = 0.0;
  std::optional<DensityMatrix> post_state;  // absent when probability is zero
};

/// One branch per dichotomic outcome, ordered (+1, -1).
std::vector<MeasurementBranch> measure(const DensityMatrix& rho, const MeasurementScheme& scheme);

struct CorrelatorSet {
  double q2_mean = 0.0;
  double q2q3_mean = 0.0;
  double q3_mean = 0.0;
  double k3 = 0.0;

  static CorrelatorSet from_terms(double q2, double q2q3, double q3) {
    return {q2, q2q3, q3, q2 + q2q3 - q3};
  }
};

/// Free evolution between two successive measurement times, matched to the
/// scheme dimension: spin-1 exp(-i theta Sx) for qutrits, exp(-i theta
/// sigma_x / 2) for qubits.
UnitaryOp step_unitary(Eigen::Index dim, double theta);

/// <Q(t_j) Q(t_i)> for i < j with t_k = (k - 1) * theta, starting from the
/// +1 basis state at t_1. Only t_i and t_j are measured.
double two_time_correlator(int i, int j, double theta, const MeasurementScheme& scheme);

struct K3Options {
  // Measure at t_2 and discard the result on the <Q3> path.
  bool invasive_q3 = false;
};

CorrelatorSet k3_protocol(double theta, const MeasurementScheme& scheme, K3Options options = {});

/// Closed forms of the qutrit von Neumann correlators.
CorrelatorSet analytic_correlators(double theta);

struct LgString {
  int n = 0;
  std::vector<double> terms;  // n - 1 sequential correlators, then -<Q_n Q_1>
  double value = 0.0;
};

LgString kn_string(int n, double theta, const MeasurementScheme& scheme);

/// Extrema of the Kn string over all deterministic assignments q_i = +-1.
std::pair<double, double> classical_extrema(int n);

struct K3Maximum {
  double theta_star = 0.0;
  double k3_max = 0.0;
};

/// Grid search over [0, pi] followed by golden-section refinement.
K3Maximum find_max_k3(const MeasurementScheme& scheme, int grid_points);

/// Grid stage only, one K3 value per point. Serial twin kept for tests.
std::vector<double> k3_on_grid(const MeasurementScheme& scheme, const std::vector<double>& thetas);
std::vector<double> k3_on_grid_serial(const MeasurementScheme& scheme,
                                      const std::vector<double>& thetas);

}  // namespace lgi
