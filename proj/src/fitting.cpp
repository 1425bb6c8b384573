#include "lgi/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include <unsupported/Eigen/LevenbergMarquardt>

namespace lgi {

namespace {

// Times are rescaled to tau = t / span and frequencies to cycles per span
// so every parameter is O(1) for the solver.
struct DecayResidual : Eigen::DenseFunctor<double> {
  DecayResidual(const Eigen::VectorXd& tau, const Eigen::VectorXd& y)
      : Eigen::DenseFunctor<double>(5, static_cast<int>(tau.size())), tau_(tau), y_(y) {}

  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& fvec) const {
    for (Eigen::Index i = 0; i < tau_.size(); ++i) fvec(i) = model(x, tau_(i)) - y_(i);
    return 0;
  }

  int df(const Eigen::VectorXd& x, Eigen::MatrixXd& fjac) const {
    const double amp = x(0), width = x(1), freq = x(2), phase = x(3);
    for (Eigen::Index i = 0; i < tau_.size(); ++i) {
      const double t = tau_(i);
      const double g = std::exp(-(t / width) * (t / width));
      const double psi = 2 * kPi * freq * t + phase;
      const double c = std::cos(psi), s = std::sin(psi);
      fjac(i, 0) = g * c;
      fjac(i, 1) = amp * c * g * 2 * t * t / (width * width * width);
      fjac(i, 2) = -amp * g * s * 2 * kPi * t;
      fjac(i, 3) = -amp * g * s;
      fjac(i, 4) = 1.0;
    }
    return 0;
  }

  static double model(const Eigen::VectorXd& x, double t) {
    const double g = std::exp(-(t / x(1)) * (t / x(1)));
    return x(0) * g * std::cos(2 * kPi * x(2) * t + x(3)) + x(4);
  }

  Eigen::VectorXd tau_, y_;
};

double periodogram_peak(const Eigen::VectorXd& tau, const Eigen::VectorXd& y) {
  const double mean = y.mean();
  const double nyquist = static_cast<double>(tau.size()) / 2;
  double best_f = 0.0, best_power = -1.0;
  for (double f = 0.0; f <= nyquist; f += 0.25) {
    std::complex<double> acc = 0.0;
    for (Eigen::Index i = 0; i < tau.size(); ++i) {
      acc += (y(i) - mean) * std::exp(std::complex<double>(0, -2 * kPi * f * tau(i)));
    }
    if (std::norm(acc) > best_power) {
      best_power = std::norm(acc);
      best_f = f;
    }
  }
  return best_f;
}

}  // namespace

DecayFit fit_gaussian_decay(const std::vector<CurvePoint>& points) {
  DecayFit fit;
  if (points.size() < 5) {
    fit.message = "need at least 5 points";
    return fit;
  }
  const auto n = static_cast<Eigen::Index>(points.size());
  double t_min = points.front().x, t_max = points.front().x;
  for (const auto& p : points) {
    t_min = std::min(t_min, p.x);
    t_max = std::max(t_max, p.x);
  }
  const double span = t_max;
  if (!(span > 0) || t_min < 0) {
    fit.message = "time grid must be non-negative with positive extent";
    return fit;
  }

  Eigen::VectorXd tau(n), y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    tau(i) = points[i].x / span;
    y(i) = points[i].y;
  }

  const Eigen::Index tail = std::max<Eigen::Index>(1, n / 4);
  const double offset0 = y.tail(tail).mean();
  const Eigen::Index first =
      std::min_element(tau.data(), tau.data() + n) - tau.data();
  const double amp0 = y(first) - offset0;
  const double freq0 = periodogram_peak(tau, y);

  DecayResidual residual(tau, y);
  Eigen::VectorXd best;
  double best_cost = std::numeric_limits<double>::infinity();
  for (double width0 : {0.15, 0.3, 0.5, 0.8, 1.2, 2.0}) {
    Eigen::VectorXd x(5);
    x << amp0, width0, freq0, 0.0, offset0;
    Eigen::LevenbergMarquardt<DecayResidual> lm(residual);
    lm.setMaxfev(2000);
    const auto status = lm.minimize(x);
    if (status == Eigen::LevenbergMarquardtSpace::ImproperInputParameters) continue;
    Eigen::VectorXd r(n);
    residual(x, r);
    const double cost = r.squaredNorm();
    if (std::isfinite(cost) && cost < best_cost) {
      best_cost = cost;
      best = x;
    }
  }
  if (best.size() == 0) {
    fit.message = "solver did not start";
    return fit;
  }

  Eigen::MatrixXd jac(n, 5);
  residual.df(best, jac);
  const Eigen::MatrixXd normal = jac.transpose() * jac;
  const double dof = std::max<double>(1.0, static_cast<double>(n - 5));
  const double s2 = best_cost / dof;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(normal);
  const double cond = svd.singularValues()(0) / svd.singularValues()(4);

  fit.amplitude = best(0);
  fit.t2_star_s = std::abs(best(1)) * span;
  fit.detuning_hz = best(2) / span;
  fit.phase = best(3);
  fit.offset = best(4);
  fit.rms_residual = std::sqrt(best_cost / static_cast<double>(n));

  if (!std::isfinite(cond) || cond > 1e14) {
    fit.message = "decay parameters are not identifiable from the data";
    return fit;
  }
  const Eigen::MatrixXd cov = s2 * normal.inverse();
  fit.t2_star_err_s = std::sqrt(std::max(0.0, cov(1, 1))) * span;

  if (std::abs(fit.amplitude) < 1e-9) {
    fit.message = "no oscillation amplitude";
  } else if (fit.t2_star_s > 10 * span) {
    fit.message = "decay time far beyond the sampled window";
  } else if (!std::isfinite(fit.t2_star_err_s) || fit.t2_star_err_s > fit.t2_star_s) {
    fit.message = "decay time uncertainty exceeds the estimate";
  } else {
    fit.converged = true;
  }
  return fit;
}

FlipFit fit_flip_probability(const std::vector<CurvePoint>& points) {
  FlipFit fit;
  std::vector<CurvePoint> usable;
  for (const auto& p : points) {
    if (p.y > 0) usable.push_back({p.x, std::log(p.y)});
  }
  if (usable.size() < 3) {
    fit.message = "need at least 3 points with positive population";
    return fit;
  }
  const auto n = static_cast<double>(usable.size());
  double mx = 0, my = 0;
  for (const auto& p : usable) {
    mx += p.x;
    my += p.y;
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (const auto& p : usable) {
    sxx += (p.x - mx) * (p.x - mx);
    sxy += (p.x - mx) * (p.y - my);
  }
  if (sxx <= 0) {
    fit.message = "repetition counts do not vary";
    return fit;
  }
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double rss = 0;
  for (const auto& p : usable) {
    const double r = p.y - intercept - slope * p.x;
    rss += r * r;
  }
  const double se = std::sqrt(rss / std::max(1.0, n - 2) / sxx);
  fit.p_hat = std::exp(slope);
  fit.p_err = fit.p_hat * se;
  fit.converged = std::isfinite(fit.p_hat) && std::isfinite(fit.p_err);
  if (!fit.converged) fit.message = "regression produced a non-finite estimate";
  return fit;
}

}  // namespace lgi
