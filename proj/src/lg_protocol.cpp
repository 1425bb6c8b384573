#include "lgi/lg_protocol.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lgi/kernels.hpp"

namespace lgi {

std::string to_string(UpdateRule rule) {
  return rule == UpdateRule::Luders ? "luders" : "neumann";
}

UpdateRule parse_update_rule(const std::string& text) {
  if (text == "luders" || text == "Luders" || text == "lueders") return UpdateRule::Luders;
  if (text == "neumann" || text == "vonneumann" || text == "von-neumann" || text == "VonNeumann") {
    return UpdateRule::VonNeumann;
  }
  throw std::invalid_argument("unknown update rule '" + text + "'");
}

MeasurementScheme::MeasurementScheme(std::vector<LabeledProjector> projectors, UpdateRule rule)
    : projectors_(std::move(projectors)), rule_(rule) {
  if (projectors_.empty()) throw std::invalid_argument("MeasurementScheme: no projectors");
  const auto d = projectors_.front().matrix.rows();
  ComplexMatrix total = ComplexMatrix::Zero(d, d);
  for (std::size_t a = 0; a < projectors_.size(); ++a) {
    const auto& p = projectors_[a];
    if (p.matrix.rows() != d || p.matrix.cols() != d) {
      throw DimensionError("MeasurementScheme: projector '" + p.label + "' has wrong shape");
    }
    if (p.outcome != 1 && p.outcome != -1) {
      throw std::invalid_argument("MeasurementScheme: outcome of '" + p.label + "' is not +-1");
    }
    if (!is_hermitian(p.matrix, kTol)) {
      throw std::invalid_argument("MeasurementScheme: projector '" + p.label + "' not Hermitian");
    }
    if ((p.matrix * p.matrix - p.matrix).cwiseAbs().maxCoeff() > kTol) {
      throw std::invalid_argument("MeasurementScheme: projector '" + p.label + "' not idempotent");
    }
    for (std::size_t b = 0; b < a; ++b) {
      if ((p.matrix * projectors_[b].matrix).cwiseAbs().maxCoeff() > kTol) {
        throw std::invalid_argument("MeasurementScheme: projectors '" + p.label + "' and '" +
                                    projectors_[b].label + "' overlap");
      }
      if (p.label == projectors_[b].label) {
        throw std::invalid_argument("MeasurementScheme: duplicate label '" + p.label + "'");
      }
    }
    total += p.matrix;
  }
  if ((total - ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff() > kTol) {
    throw std::invalid_argument("MeasurementScheme: projectors do not sum to identity");
  }
}

int MeasurementScheme::outcome_of(const std::string& label) const {
  for (const auto& p : projectors_) {
    if (p.label == label) return p.outcome;
  }
  throw std::out_of_range("MeasurementScheme: no projector labelled '" + label + "'");
}

ComplexMatrix MeasurementScheme::outcome_projector(int outcome) const {
  ComplexMatrix sum = ComplexMatrix::Zero(dim(), dim());
  for (const auto& p : projectors_) {
    if (p.outcome == outcome) sum += p.matrix;
  }
  return sum;
}

MeasurementScheme standard_qutrit_scheme(UpdateRule rule) {
  return MeasurementScheme({{"+1", projector(3, 0), +1},
                            {"0", projector(3, 1), +1},
                            {"-1", projector(3, 2), -1}},
                           rule);
}

MeasurementScheme standard_qubit_scheme(UpdateRule rule) {
  return MeasurementScheme({{"up", projector(2, 0), +1}, {"down", projector(2, 1), -1}}, rule);
}

std::vector<MeasurementBranch> measure(const DensityMatrix& rho, const MeasurementScheme& scheme) {
  if (rho.dim() != scheme.dim()) throw DimensionError("measure: dimension mismatch");

  std::vector<MeasurementBranch> branches;
  for (int outcome : {+1, -1}) {
    ComplexMatrix unnormalized = ComplexMatrix::Zero(rho.dim(), rho.dim());
    if (scheme.rule() == UpdateRule::Luders) {
      const ComplexMatrix p = scheme.outcome_projector(outcome);
      unnormalized = p * rho.matrix() * p;
    } else {
      for (const auto& p : scheme.projectors()) {
        if (p.outcome == outcome) unnormalized += p.matrix * rho.matrix() * p.matrix;
      }
    }
    MeasurementBranch branch;
    branch.outcome = outcome;
    branch.probability = std::max(0.0, unnormalized.trace().real());
    if (branch.probability > 0.0) {
      branch.post_state = DensityMatrix::unchecked(unnormalized / branch.probability);
    }
    branches.push_back(std::move(branch));
  }
  return branches;
}

UnitaryOp step_unitary(Eigen::Index dim, double theta) {
  if (dim == 3) return rotation_unitary(theta);
  if (dim == 2) return qubit_rotation_unitary(theta);
  throw DimensionError("step_unitary: only qubit and qutrit schemes have built-in dynamics");
}

namespace {

// Sum over outcome pairs of q_i q_j P(q_i, q_j); the state at t_i has
// already been evolved.
double correlate(const DensityMatrix& at_first, double gap, const MeasurementScheme& scheme) {
  const UnitaryOp between = step_unitary(scheme.dim(), gap);
  double total = 0.0;
  for (const auto& first : measure(at_first, scheme)) {
    if (!first.post_state) continue;
    for (const auto& second : measure(evolve(*first.post_state, between), scheme)) {
      total += first.outcome * second.outcome * first.probability * second.probability;
    }
  }
  return total;
}

}  // namespace

double two_time_correlator(int i, int j, double theta, const MeasurementScheme& scheme) {
  if (i < 1 || j <= i) throw std::invalid_argument("two_time_correlator: need 1 <= i < j");
  const auto start = DensityMatrix::pure(scheme.dim(), 0);
  const auto at_first = evolve(start, step_unitary(scheme.dim(), (i - 1) * theta));
  return correlate(at_first, (j - i) * theta, scheme);
}

CorrelatorSet k3_protocol(double theta, const MeasurementScheme& scheme, K3Options options) {
  if (!std::isfinite(theta)) throw std::invalid_argument("k3_protocol: theta not finite");
  const double q2 = two_time_correlator(1, 2, theta, scheme);
  const double q2q3 = two_time_correlator(2, 3, theta, scheme);

  double q3 = 0.0;
  if (options.invasive_q3) {
    const auto at_t2 = evolve(DensityMatrix::pure(scheme.dim(), 0), step_unitary(scheme.dim(), theta));
    const UnitaryOp step = step_unitary(scheme.dim(), theta);
    for (const auto& mid : measure(at_t2, scheme)) {
      if (!mid.post_state) continue;
      for (const auto& last : measure(evolve(*mid.post_state, step), scheme)) {
        q3 += mid.probability * last.probability * last.outcome;
      }
    }
  } else {
    q3 = two_time_correlator(1, 3, theta, scheme);
  }
  return CorrelatorSet::from_terms(q2, q2q3, q3);
}

CorrelatorSet analytic_correlators(double theta) {
  if (!std::isfinite(theta)) throw std::invalid_argument("analytic_correlators: theta not finite");
  const double c1 = std::cos(theta);
  const double c2 = std::cos(2 * theta);
  const double c4 = std::cos(4 * theta);
  return CorrelatorSet::from_terms(0.25 + c1 - 0.25 * c2,
                                   1.0 / 16 + c1 - c4 / 16,
                                   0.25 + c2 - 0.25 * c4);
}

LgString kn_string(int n, double theta, const MeasurementScheme& scheme) {
  if (n < 3) throw std::invalid_argument("kn_string: n must be >= 3");
  LgString s;
  s.n = n;
  for (int i = 1; i < n; ++i) s.terms.push_back(two_time_correlator(i, i + 1, theta, scheme));
  s.terms.push_back(-two_time_correlator(1, n, theta, scheme));
  kernels::CompensatedSum sum;
  for (double t : s.terms) sum.add(t);
  s.value = sum.value();
  return s;
}

std::pair<double, double> classical_extrema(int n) {
  if (n < 3 || n > 12) throw std::invalid_argument("classical_extrema: n must be in [3, 12]");
  double lo = 1e300;
  double hi = -1e300;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    auto q = [mask](int i) { return (mask >> i) & 1u ? -1 : 1; };
    int value = -q(n - 1) * q(0);
    for (int i = 0; i + 1 < n; ++i) value += q(i + 1) * q(i);
    lo = std::min(lo, static_cast<double>(value));
    hi = std::max(hi, static_cast<double>(value));
  }
  return {lo, hi};
}

std::vector<double> k3_on_grid(const MeasurementScheme& scheme, const std::vector<double>& thetas) {
  return kernels::map_grid(thetas, [&](double t) { return k3_protocol(t, scheme).k3; });
}

std::vector<double> k3_on_grid_serial(const MeasurementScheme& scheme,
                                      const std::vector<double>& thetas) {
  return kernels::map_grid_serial(thetas, [&](double t) { return k3_protocol(t, scheme).k3; });
}

K3Maximum find_max_k3(const MeasurementScheme& scheme, int grid_points) {
  if (grid_points < 100) throw std::invalid_argument("find_max_k3: grid_points must be >= 100");

  std::vector<double> thetas(static_cast<std::size_t>(grid_points));
  for (int i = 0; i < grid_points; ++i) thetas[i] = kPi * i / (grid_points - 1);
  const auto values = k3_on_grid(scheme, thetas);

  // max_element returns the first maximum, i.e. the smallest theta on ties.
  const auto best = static_cast<std::size_t>(
      std::max_element(values.begin(), values.end()) - values.begin());

  double lo = thetas[best == 0 ? 0 : best - 1];
  double hi = thetas[std::min(best + 1, thetas.size() - 1)];
  auto k3 = [&](double t) { return k3_protocol(t, scheme).k3; };

  const double inv_phi = (std::sqrt(5.0) - 1) / 2;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = k3(x1);
  double f2 = k3(x2);
  while (hi - lo > 1e-9) {
    if (f1 >= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = k3(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = k3(x2);
    }
  }

  K3Maximum result{thetas[best], values[best]};
  const double mid = (lo + hi) / 2;
  const double f_mid = k3(mid);
  if (f_mid > result.k3_max) result = {mid, f_mid};
  return result;
}

}  // namespace lgi
