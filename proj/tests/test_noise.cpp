#include <doctest.h>

#include <cmath>
#include <random>

#include "lgi/noise.hpp"

using namespace lgi;

TEST_CASE("Gauss-Hermite rule") {
  // numpy hermegauss(5), weights normalised
  const double x[] = {-2.8569700138728056, -1.355626179974266, 0.0, 1.355626179974266,
                      2.8569700138728056};
  const double w[] = {0.011257411327720677, 0.22207592200561257, 0.5333333333333335,
                      0.22207592200561257, 0.011257411327720677};
  const auto r = gauss_hermite_standard(5);
  REQUIRE(r.size() == 5);
  for (int i = 0; i < 5; ++i) {
    CHECK(r[i].delta0_hz == doctest::Approx(x[i]).epsilon(1e-12));
    CHECK(r[i].weight == doctest::Approx(w[i]).epsilon(1e-12));
  }
  // exact normal moments up to degree 2n - 1
  for (int n : {1, 3, 8, 21, 41}) {
    double m0 = 0, m1 = 0, m2 = 0, m4 = 0;
    for (const auto& s : gauss_hermite_standard(n)) {
      m0 += s.weight;
      m1 += s.weight * s.delta0_hz;
      m2 += s.weight * s.delta0_hz * s.delta0_hz;
      m4 += s.weight * std::pow(s.delta0_hz, 4);
    }
    CHECK(m0 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(m1) < 1e-13);
    if (n >= 2) CHECK(m2 == doctest::Approx(1.0).epsilon(1e-12));
    if (n >= 3) CHECK(m4 == doctest::Approx(3.0).epsilon(1e-12));
  }
  CHECK_THROWS(gauss_hermite_standard(0));
}

TEST_CASE("sigma from T2*") {
  CHECK(sigma_from_t2_star(62e-6) == doctest::Approx(3630.3077264399435).epsilon(1e-13));
  CHECK(sigma_from_t2_star(std::numeric_limits<double>::infinity()) == 0.0);
  ImperfectionModel m;
  m.n_samples = 21;
  double var = 0;
  for (const auto& s : sample_detunings(m)) var += s.weight * s.delta0_hz * s.delta0_hz;
  CHECK(std::sqrt(var) == doctest::Approx(m.sigma_detuning_hz()).epsilon(1e-12));
}

TEST_CASE("Monte Carlo samples are seeded and have the right spread") {
  ImperfectionModel m;
  m.averaging = Averaging::MonteCarlo;
  m.n_samples = 20000;
  m.seed = 9;
  const auto a = sample_detunings(m), b = sample_detunings(m);
  CHECK(a.front().delta0_hz == b.front().delta0_hz);
  double s2 = 0;
  for (const auto& s : a) s2 += s.weight * s.delta0_hz * s.delta0_hz;
  // 5 standard errors of the sample variance
  CHECK(std::abs(s2 / std::pow(m.sigma_detuning_hz(), 2) - 1.0) < 5 * std::sqrt(2.0 / 20000));
  m.seed = 10;
  CHECK(sample_detunings(m).front().delta0_hz != a.front().delta0_hz);
}

TEST_CASE("imperfection model validation") {
  ImperfectionModel m;
  CHECK_NOTHROW(m.validate());
  m.pol_e = 1.2;
  CHECK_THROWS(m.validate());
  m = {};
  m.t2_star_s = 0;
  CHECK_THROWS(m.validate());
  m = {};
  m.n_samples = 0;
  CHECK_THROWS(m.validate());
  CHECK(parse_averaging(to_string(Averaging::MonteCarlo)) == Averaging::MonteCarlo);
  CHECK_THROWS(parse_averaging("x"));
}

TEST_CASE("imperfect initial state") {
  const auto rho = imperfect_initial_state(ImperfectionModel::nominal());
  CHECK(rho.population(3) == doctest::Approx(0.931));
  CHECK(rho.population(0) == doctest::Approx(0.049));
  CHECK(rho.population(4) == doctest::Approx(0.0095));
  CHECK(rho.population(1) == doctest::Approx(0.0005));
  const auto pure = imperfect_initial_state(ImperfectionModel::ideal());
  CHECK(pure.population(3) == 1.0);
}

TEST_CASE("dephasing decays electron coherence as a Gaussian") {
  ImperfectionModel m;
  m.n_samples = 41;
  ComplexMatrix plus = ComplexMatrix::Constant(2, 2, 0.5);
  const DensityMatrix rho(plus);
  const auto samples = sample_detunings(m);
  for (double t : {0.0, 10e-6, 40e-6, 62e-6, 100e-6}) {
    const auto out = dephasing_evolution(rho, ComplexMatrix::Zero(2, 2), t, samples);
    const double coh = 2 * std::abs(out.matrix()(0, 1));
    CHECK(std::abs(coh - std::exp(-std::pow(t / m.t2_star_s, 2))) < 1e-9);
    CHECK(std::abs(out.matrix().trace() - 1.0) < 1e-13);
  }
}

TEST_CASE("dephasing leaves nuclear coherence in a fixed electron state alone") {
  ImperfectionModel m;
  ComplexMatrix psi = ComplexMatrix::Zero(6, 1);
  psi(3, 0) = psi(4, 0) = 1.0 / std::sqrt(2.0);  // |0>e (|+1> + |0>)
  const DensityMatrix rho(psi * psi.adjoint());
  const auto out = dephasing_evolution(rho, ComplexMatrix::Zero(6, 6), 80e-6, sample_detunings(m));
  CHECK((out.matrix() - rho.matrix()).norm() < 1e-14);
}

TEST_CASE("parallel and serial dephasing agree") {
  ImperfectionModel m;
  m.n_samples = 31;
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  ComplexMatrix a(6, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) a(i, j) = Complex(g(rng), g(rng));
  ComplexMatrix rho = a * a.adjoint();
  rho /= rho.trace();
  ComplexMatrix h = a + a.adjoint();
  h *= 1e5;
  const auto s = sample_detunings(m);
  const auto p = dephasing_evolution(DensityMatrix(rho), h, 20e-6, s);
  const auto q = dephasing_evolution_serial(DensityMatrix(rho), h, 20e-6, s);
  CHECK((p.matrix() - q.matrix()).norm() < 1e-13);
}

TEST_CASE("FID curve") {
  ImperfectionModel m;
  m.n_samples = 41;
  std::vector<double> ts;
  for (int i = 0; i < 20; ++i) ts.push_back(i * 8e-6);
  const auto curve = fid_curve(m, ts, 2e4);
  for (const auto& pt : curve) {
    const double expect =
        0.5 * (1 + std::exp(-std::pow(pt.x / m.t2_star_s, 2)) * std::cos(2 * kPi * 2e4 * pt.x));
    CHECK(std::abs(pt.y - expect) < 1e-9);
  }
  CHECK(curve.front().y == doctest::Approx(1.0));
  CHECK_THROWS(fid_curve(m, {-1e-6}, 0.0));
}
