#include <doctest.h>

#include <cmath>
#include <random>

#include "lgi/fitting.hpp"

using namespace lgi;

namespace {

std::vector<CurvePoint> ramsey(double t2, double det, double noise, std::uint64_t seed,
                               int points = 200, double span = 2.5) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, noise);
  std::vector<CurvePoint> out;
  for (int i = 0; i < points; ++i) {
    const double t = span * t2 * i / (points - 1);
    const double y = 0.5 + 0.5 * std::exp(-std::pow(t / t2, 2)) * std::cos(2 * kPi * det * t);
    out.push_back({t, y + (noise > 0 ? g(rng) : 0.0)});
  }
  return out;
}

}  // namespace

TEST_CASE("noiseless Gaussian decay") {
  for (double t2 : {10e-6, 62e-6, 300e-6}) {
    const auto f = fit_gaussian_decay(ramsey(t2, 3.0 / t2 * 0.5, 0.0, 0));
    REQUIRE(f.converged);
    CHECK(f.t2_star_s == doctest::Approx(t2).epsilon(1e-6));
    CHECK(f.amplitude == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(f.offset == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(f.rms_residual < 1e-8);
  }
}

TEST_CASE("zero detuning leaves frequency and phase unidentifiable") {
  const auto f = fit_gaussian_decay(ramsey(62e-6, 0.0, 0.0, 0));
  CHECK_FALSE(f.converged);
  CHECK(f.message.find("identifiable") != std::string::npos);
}

TEST_CASE("T2* under 1% readout noise") {
  int worst_seed = -1;
  double worst = 0;
  for (int seed = 0; seed < 100; ++seed) {
    const auto f = fit_gaussian_decay(ramsey(62e-6, 2e4, 0.01, seed));
    REQUIRE(f.converged);
    const double rel = std::abs(f.t2_star_s / 62e-6 - 1.0);
    if (rel > worst) worst = rel, worst_seed = seed;
    CHECK(f.t2_star_err_s > 0);
  }
  INFO("worst seed " << worst_seed);
  CHECK(worst < 0.02);
}

TEST_CASE("degenerate decay data is flagged") {
  std::vector<CurvePoint> flat;
  for (int i = 0; i < 30; ++i) flat.push_back({i * 1e-6, 0.7});
  const auto f = fit_gaussian_decay(flat);
  CHECK_FALSE(f.converged);
  CHECK_FALSE(f.message.empty());
  CHECK_FALSE(fit_gaussian_decay({{0, 1}, {1, 0.5}}).converged);
}

TEST_CASE("flip probability regression") {
  std::vector<CurvePoint> pts;
  for (int k = 1; k <= 30; ++k) pts.push_back({double(k), std::pow(0.995, k)});
  const auto f = fit_flip_probability(pts);
  REQUIRE(f.converged);
  CHECK(f.p_hat == doctest::Approx(0.995).epsilon(1e-12));
  CHECK(f.p_err < 1e-10);

  std::vector<CurvePoint> same_k{{1, 0.9}, {1, 0.8}, {1, 0.7}};
  CHECK_FALSE(fit_flip_probability(same_k).converged);
  CHECK_FALSE(fit_flip_probability({{1, 0.9}, {2, 0.8}}).converged);
}
