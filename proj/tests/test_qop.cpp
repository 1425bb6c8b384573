#include <doctest.h>

#include <cmath>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "lgi/qop.hpp"

using namespace lgi;

namespace {

ComplexMatrix random_hermitian(std::mt19937_64& rng, Eigen::Index dim, double scale) {
  std::normal_distribution<double> g(0.0, scale);
  ComplexMatrix a(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) a(i, j) = Complex(g(rng), g(rng));
  return (a + a.adjoint()) / 2.0;
}

}  // namespace

TEST_CASE("spin-1 operators") {
  const auto ops = spin1_operators();
  CHECK(ops.sx(0, 1).real() == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(ops.sx(1, 2).real() == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(std::abs(ops.sx(0, 2)) == 0.0);
  CHECK(ops.sz(0, 0).real() == 1.0);
  CHECK(ops.sz(2, 2).real() == -1.0);
  CHECK(ops.iz_sq(1, 1).real() == 0.0);
  // [Sz, Sx] = i Sy; Sx^2 + Sy^2 + Sz^2 = 2
  const ComplexMatrix sy = (ops.sz * ops.sx - ops.sx * ops.sz) / kI;
  const ComplexMatrix casimir = ops.sx * ops.sx + sy * sy + ops.sz * ops.sz;
  CHECK((casimir - 2.0 * ComplexMatrix::Identity(3, 3)).norm() < 1e-14);
}

TEST_CASE("matrix_exp against Eigen's Pade exponential") {
  std::mt19937_64 rng(11);
  for (int dim : {2, 3, 6, 12}) {
    for (double scale : {1e-3, 0.5, 3.0, 40.0}) {
      const ComplexMatrix h = random_hermitian(rng, dim, scale);
      const ComplexMatrix ours = matrix_exp(h, -kI);
      const ComplexMatrix ref = (Complex(0, -1) * h).exp();
      CHECK((ours - ref).norm() < 1e-10 * std::max(1.0, ref.norm()));
    }
  }
  CHECK((matrix_exp(ComplexMatrix::Zero(4, 4), 1.0) - ComplexMatrix::Identity(4, 4)).norm() == 0.0);
  CHECK_THROWS_AS(matrix_exp(ComplexMatrix::Zero(2, 3), 1.0), DimensionError);
  CHECK_THROWS_AS(matrix_exp(ComplexMatrix::Zero(17, 17), 1.0), DimensionError);
}

TEST_CASE("closed-form rotation matches the exponential") {
  const auto sx = spin1_operators().sx;
  for (double th = -7.0; th <= 7.0; th += 0.37) {
    const ComplexMatrix ref = (Complex(0, -th) * sx).exp();
    CHECK((rotation_unitary(th).matrix() - ref).norm() < 1e-12);
  }
  const ComplexMatrix upi = rotation_unitary(kPi).matrix();
  ComplexMatrix expect = ComplexMatrix::Zero(3, 3);
  expect(0, 2) = expect(1, 1) = expect(2, 0) = -1.0;
  CHECK((upi - expect).norm() < 1e-14);

  // populations after one step at 0.416 pi (scipy expm)
  const ComplexMatrix u = rotation_unitary(0.416 * kPi).matrix();
  CHECK(std::norm(u(0, 0)) == doctest::Approx(0.3974303259958442).epsilon(1e-12));
  CHECK(std::norm(u(1, 0)) == doctest::Approx(0.4659808542982088).epsilon(1e-12));
  CHECK(std::norm(u(2, 0)) == doctest::Approx(0.1365888197059471).epsilon(1e-12));

  const ComplexMatrix uq = qubit_rotation_unitary(kPi).matrix();
  CHECK(std::abs(uq(1, 0) - Complex(0, -1)) < 1e-14);
}

TEST_CASE("rotations compose additively") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  for (int k = 0; k < 50; ++k) {
    const double a = u(rng), b = u(rng);
    const UnitaryOp ab = rotation_unitary(a) * rotation_unitary(b);
    CHECK((ab.matrix() - rotation_unitary(a + b).matrix()).norm() < 1e-12);
  }
}

TEST_CASE("density matrix validation") {
  CHECK_NOTHROW(DensityMatrix::pure(3, 0));
  CHECK(DensityMatrix::maximally_mixed(6).population(4) == doctest::Approx(1.0 / 6));
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = 0.7;
  CHECK_THROWS_AS(DensityMatrix{m}, std::invalid_argument);  // trace
  m(1, 1) = 0.3;
  m(0, 1) = Complex(0, 0.1);
  CHECK_THROWS_AS(DensityMatrix{m}, std::invalid_argument);  // not Hermitian
  m(1, 0) = Complex(0, -0.1);
  CHECK_NOTHROW(DensityMatrix{m});
  m(0, 1) = 0.6;
  m(1, 0) = 0.6;
  CHECK_THROWS_AS(DensityMatrix{m}, std::invalid_argument);  // negative eigenvalue
  CHECK_THROWS_AS(UnitaryOp(ComplexMatrix::Constant(2, 2, 1.0)), std::invalid_argument);
}

TEST_CASE("tensor product layout") {
  const ComplexMatrix e = electron_sz();
  const ComplexMatrix n = spin1_operators().sz;
  const ComplexMatrix t = tensor(e, n);
  REQUIRE(t.rows() == 6);
  // |1>e|+1> is level 1, |0>e anything is zero
  CHECK(t(0, 0).real() == 1.0);
  CHECK(t(2, 2).real() == -1.0);
  for (int i = 3; i < 6; ++i) CHECK(std::abs(t(i, i)) == 0.0);
  const ComplexMatrix f = tensor(electron_flip(), ComplexMatrix::Identity(3, 3));
  CHECK(std::abs(f(0, 3) - 1.0) == 0.0);
  CHECK(std::abs(f(5, 2) - 1.0) == 0.0);
}

TEST_CASE("evolution and expectation") {
  const auto sz = spin1_operators().sz;
  const DensityMatrix rho = evolve(DensityMatrix::pure(3, 0), rotation_unitary(kPi));
  CHECK(rho.population(2) == doctest::Approx(1.0));
  CHECK(expectation(rho, sz) == doctest::Approx(-1.0));
  ComplexMatrix bad = ComplexMatrix::Zero(3, 3);
  bad(0, 1) = 1.0;
  CHECK_THROWS(expectation(rho, bad));
  CHECK_THROWS_AS(expectation(rho, ComplexMatrix::Identity(2, 2)), DimensionError);
}

TEST_CASE("property: unitary evolution preserves trace, hermiticity and positivity") {
  std::mt19937_64 rng(2024);
  for (int k = 0; k < 200; ++k) {
    const int dim = 2 + static_cast<int>(rng() % 5);
    const ComplexMatrix h = random_hermitian(rng, dim, 2.0);
    const UnitaryOp u(matrix_exp(h, -kI));
    const ComplexMatrix a = random_hermitian(rng, dim, 1.0);
    ComplexMatrix rho = a * a;
    rho /= rho.trace();
    const DensityMatrix out = evolve(DensityMatrix(rho), u);
    CHECK(std::abs(out.matrix().trace() - 1.0) < 1e-12);
    CHECK(is_hermitian(out.matrix(), 1e-12));
  }
}
