#include "lgi/noise.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "lgi/kernels.hpp"

namespace lgi {

std::string to_string(Averaging a) {
  return a == Averaging::MonteCarlo ? "montecarlo" : "gausshermite";
}

Averaging parse_averaging(const std::string& text) {
  if (text == "montecarlo" || text == "mc") return Averaging::MonteCarlo;
  if (text == "gausshermite" || text == "gh" || text == "quadrature") return Averaging::GaussHermite;
  throw std::invalid_argument("unknown averaging mode '" + text + "'");
}

double sigma_from_t2_star(double t2_star_s) {
  if (std::isinf(t2_star_s)) return 0.0;
  return 1.0 / (std::sqrt(2.0) * kPi * t2_star_s);
}

void ImperfectionModel::validate() const {
  if (!(t2_star_s > 0)) throw std::invalid_argument("ImperfectionModel: t2_star must be > 0");
  auto fraction = [](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw std::invalid_argument(std::string("ImperfectionModel: ") + name + " outside [0, 1]");
    }
  };
  fraction(pol_e, "pol_e");
  fraction(pol_n, "pol_n");
  fraction(flip_prob_p, "flip_prob_p");
  if (n_samples < 1) throw std::invalid_argument("ImperfectionModel: n_samples must be >= 1");
}

std::vector<DetuningSample> gauss_hermite_standard(int n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite_standard: n must be >= 1");
  // Jacobi matrix of the monic probabilists' Hermite recurrence.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);

  std::vector<DetuningSample> rule(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double v0 = es.eigenvectors()(0, i);
    rule[i] = {es.eigenvalues()(i), v0 * v0};
  }
  // Symmetrize: the rule is exactly even, eigen-solver noise is not.
  for (int i = 0; i < n / 2; ++i) {
    auto& a = rule[i];
    auto& b = rule[n - 1 - i];
    const double x = (b.delta0_hz - a.delta0_hz) / 2;
    const double w = (a.weight + b.weight) / 2;
    a = {-x, w};
    b = {x, w};
  }
  if (n % 2 == 1) rule[n / 2].delta0_hz = 0.0;

  kernels::CompensatedSum total;
  for (const auto& s : rule) total.add(s.weight);
  for (auto& s : rule) s.weight /= total.value();
  return rule;
}

std::vector<DetuningSample> sample_detunings(const ImperfectionModel& model) {
  model.validate();
  const double sigma = model.sigma_detuning_hz();
  std::vector<DetuningSample> samples;
  if (model.averaging == Averaging::GaussHermite) {
    samples = gauss_hermite_standard(model.n_samples);
    for (auto& s : samples) s.delta0_hz *= sigma;
    return samples;
  }
  std::mt19937_64 rng(model.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  samples.reserve(static_cast<std::size_t>(model.n_samples));
  const double w = 1.0 / model.n_samples;
  for (int i = 0; i < model.n_samples; ++i) samples.push_back({sigma * normal(rng), w});
  return samples;
}

DensityMatrix imperfect_initial_state(const ImperfectionModel& model) {
  model.validate();
  ComplexMatrix electron = ComplexMatrix::Zero(2, 2);
  electron(0, 0) = 1.0 - model.pol_e;
  electron(1, 1) = model.pol_e;
  ComplexMatrix nucleus = ComplexMatrix::Zero(3, 3);
  nucleus(0, 0) = model.pol_n;
  nucleus(1, 1) = nucleus(2, 2) = (1.0 - model.pol_n) / 2;
  return DensityMatrix(tensor(electron, nucleus));
}

ComplexMatrix electron_noise_operator(Eigen::Index dim) {
  if (dim == 2) return electron_sz();
  if (dim == 6) return tensor(electron_sz(), ComplexMatrix::Identity(3, 3));
  throw DimensionError("electron_noise_operator: dimension must be 2 or 6");
}

namespace {

template <class Sum>
DensityMatrix dephase_with(Sum&& sum, const DensityMatrix& rho, const ComplexMatrix& h_static,
                           double duration_s, const std::vector<DetuningSample>& samples) {
  if (h_static.rows() != rho.dim() || h_static.cols() != rho.dim()) {
    throw DimensionError("dephasing_evolution: dimension mismatch");
  }
  if (duration_s < 0) throw std::invalid_argument("dephasing_evolution: negative duration");
  const ComplexMatrix noise = electron_noise_operator(rho.dim());
  std::vector<double> weights;
  weights.reserve(samples.size());
  for (const auto& s : samples) weights.push_back(s.weight);

  auto term = [&](std::size_t k) -> ComplexMatrix {
    const ComplexMatrix h = h_static + 2 * kPi * samples[k].delta0_hz * noise;
    const ComplexMatrix u = matrix_exp(h, -kI * duration_s);
    return u * rho.matrix() * u.adjoint();
  };
  return DensityMatrix::unchecked(sum(std::span<const double>(weights), rho.dim(), rho.dim(), term));
}

}  // namespace

DensityMatrix dephasing_evolution(const DensityMatrix& rho, const ComplexMatrix& h_static,
                                  double duration_s, const std::vector<DetuningSample>& samples) {
  return dephase_with(
      [](auto w, auto r, auto c, auto& f) { return kernels::weighted_sum(w, r, c, f); }, rho,
      h_static, duration_s, samples);
}

DensityMatrix dephasing_evolution_serial(const DensityMatrix& rho, const ComplexMatrix& h_static,
                                         double duration_s,
                                         const std::vector<DetuningSample>& samples) {
  return dephase_with(
      [](auto w, auto r, auto c, auto& f) { return kernels::weighted_sum_serial(w, r, c, f); },
      rho, h_static, duration_s, samples);
}

std::vector<CurvePoint> fid_curve(const ImperfectionModel& model, const std::vector<double>& t_grid_s,
                                  double reference_detuning_hz) {
  const auto samples = sample_detunings(model);
  // Hadamard-like pi/2 on (|1>e, |0>e); it is its own inverse up to the
  // readout convention P0 = (1 + cos(phase)) / 2.
  ComplexMatrix half_pi(2, 2);
  half_pi << 1, 1, 1, -1;
  half_pi /= std::sqrt(2.0);
  const UnitaryOp pulse(half_pi);

  const auto ground = DensityMatrix::pure(2, 1);
  const auto prepared = evolve(ground, pulse);
  const ComplexMatrix h_ref = 2 * kPi * reference_detuning_hz * electron_sz();

  std::vector<CurvePoint> curve;
  curve.reserve(t_grid_s.size());
  for (double t : t_grid_s) {
    if (t < 0) throw std::invalid_argument("fid_curve: negative time");
    const auto free = dephasing_evolution(prepared, h_ref, t, samples);
    const auto read = evolve(free, pulse);
    curve.push_back({t, read.population(1)});
  }
  return curve;
}

}  // namespace lgi
