#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "lgi/kernels.hpp"
#include "lgi/lg_protocol.hpp"
#include "lgi/noise.hpp"

using namespace lgi;

TEST_CASE("compensated sum recovers cancelled mass") {
  kernels::CompensatedSum s;
  s.add(1.0);
  s.add(1e100);
  s.add(1.0);
  s.add(-1e100);
  CHECK(s.value() == 2.0);
}

TEST_CASE("weighted_sum agrees with the serial reference") {
  std::vector<double> w(37);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = 1.0 / (1.0 + static_cast<double>(i));
  auto f = [](std::size_t i) {
    return matrix_exp(spin1_operators().sx, Complex(0, -0.1 * static_cast<double>(i)));
  };
  const ComplexMatrix par = kernels::weighted_sum(w, 3, 3, f);
  const ComplexMatrix ser = kernels::weighted_sum_serial(w, 3, 3, f);
  CHECK((par - ser).norm() < 1e-13);
}

TEST_CASE("parallel kernels are bit-identical across thread counts") {
  const auto gh = gauss_hermite_standard(41);
  std::vector<double> w;
  for (const auto& s : gh) w.push_back(s.weight);
  auto f = [&](std::size_t i) {
    return matrix_exp(spin1_operators().sx, Complex(0, -gh[i].delta0_hz));
  };
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const ComplexMatrix one = kernels::weighted_sum(w, 3, 3, f);
  omp_set_num_threads(4);
  const ComplexMatrix four = kernels::weighted_sum(w, 3, 3, f);
  CHECK((one - four).cwiseAbs().maxCoeff() == 0.0);

  std::vector<double> xs(500);
  std::iota(xs.begin(), xs.end(), 0.0);
  for (double& x : xs) x *= kPi / 499.0;
  const auto scheme = standard_qutrit_scheme(UpdateRule::VonNeumann);
  omp_set_num_threads(1);
  const auto g1 = k3_on_grid(scheme, xs);
  omp_set_num_threads(4);
  const auto g4 = k3_on_grid(scheme, xs);
  omp_set_num_threads(saved);
  CHECK(g1 == g4);
  CHECK(g1 == k3_on_grid_serial(scheme, xs));
}

TEST_CASE("map_grid preserves order") {
  std::vector<double> xs{3.0, 1.0, 2.0};
  const auto out = kernels::map_grid(xs, [](double x) { return x * x; });
  CHECK(out == std::vector<double>{9.0, 1.0, 4.0});
  CHECK(out == kernels::map_grid_serial(xs, [](double x) { return x * x; }));
}
