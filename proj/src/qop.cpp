#include "lgi/qop.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

namespace lgi {

namespace {

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw DimensionError(std::string(what) + ": matrix must be square and non-empty (got " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + ")");
  }
}

}  // namespace

bool is_hermitian(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

ComplexMatrix projector(Eigen::Index dim, Eigen::Index level) {
  ComplexMatrix p = ComplexMatrix::Zero(dim, dim);
  p(level, level) = 1.0;
  return p;
}

DensityMatrix::DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {
  require_square(m_, "DensityMatrix");
  if (!is_hermitian(m_, kHermitianTol)) {
    throw std::invalid_argument("DensityMatrix: not Hermitian");
  }
  const double tr = m_.trace().real();
  if (std::abs(tr - 1.0) > kTraceTol) {
    throw std::invalid_argument("DensityMatrix: trace " + std::to_string(tr) + " != 1");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < kEigenFloor) {
    throw std::invalid_argument("DensityMatrix: negative eigenvalue " +
                                std::to_string(es.eigenvalues().minCoeff()));
  }
}

DensityMatrix DensityMatrix::unchecked(ComplexMatrix m) {
  return DensityMatrix(std::move(m), Unchecked{});
}

DensityMatrix DensityMatrix::pure(Eigen::Index dim, Eigen::Index level) {
  return DensityMatrix(projector(dim, level), Unchecked{});
}

DensityMatrix DensityMatrix::maximally_mixed(Eigen::Index dim) {
  ComplexMatrix m = ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim);
  return DensityMatrix(std::move(m), Unchecked{});
}

UnitaryOp::UnitaryOp(ComplexMatrix m) : m_(std::move(m)) {
  require_square(m_, "UnitaryOp");
  const auto id = ComplexMatrix::Identity(m_.rows(), m_.cols());
  if ((m_.adjoint() * m_ - id).cwiseAbs().maxCoeff() > kUnitaryTol) {
    throw std::invalid_argument("UnitaryOp: matrix is not unitary");
  }
}

UnitaryOp UnitaryOp::operator*(const UnitaryOp& rhs) const {
  if (dim() != rhs.dim()) throw DimensionError("UnitaryOp product: dimension mismatch");
  return UnitaryOp(m_ * rhs.m_);
}

SpinOps spin1_operators() {
  const double r = 1.0 / std::sqrt(2.0);
  SpinOps ops;
  ops.sx = ComplexMatrix::Zero(3, 3);
  ops.sx(0, 1) = ops.sx(1, 0) = r;
  ops.sx(1, 2) = ops.sx(2, 1) = r;
  ops.sz = ComplexMatrix::Zero(3, 3);
  ops.sz(0, 0) = 1.0;
  ops.sz(2, 2) = -1.0;
  ops.iz_sq = ops.sz * ops.sz;
  return ops;
}

ComplexMatrix spin_half_sx() {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 1) = m(1, 0) = 0.5;
  return m;
}

ComplexMatrix spin_half_sz() {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = 0.5;
  m(1, 1) = -0.5;
  return m;
}

ComplexMatrix electron_sz() {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = 1.0;
  return m;
}

ComplexMatrix electron_flip() {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 1) = m(1, 0) = 1.0;
  return m;
}

ComplexMatrix matrix_exp(const ComplexMatrix& m, Complex scale) {
  require_square(m, "matrix_exp");
  if (m.rows() > 16) throw DimensionError("matrix_exp: dimension above 16");

  ComplexMatrix a = scale * m;
  const double norm = a.cwiseAbs().colwise().sum().maxCoeff();

  // Bring the 1-norm below 1/2; 18 Taylor terms then leave a remainder
  // below 0.5^19 / 19! ~ 1e-23.
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  a /= std::ldexp(1.0, squarings);

  constexpr int kOrder = 18;
  const auto n = m.rows();
  ComplexMatrix result = ComplexMatrix::Identity(n, n);
  ComplexMatrix term = ComplexMatrix::Identity(n, n);
  for (int k = 1; k <= kOrder; ++k) {
    term = (term * a) / static_cast<double>(k);
    result += term;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

UnitaryOp rotation_unitary(double theta) {
  if (!std::isfinite(theta)) throw std::invalid_argument("rotation_unitary: theta not finite");
  const double c = std::cos(theta);
  const Complex edge = -kI * std::sin(theta) / std::sqrt(2.0);
  ComplexMatrix u(3, 3);
  u << (1 + c) / 2, edge, (c - 1) / 2,
       edge,        c,    edge,
       (c - 1) / 2, edge, (1 + c) / 2;
  return UnitaryOp(std::move(u));
}

UnitaryOp qubit_rotation_unitary(double theta) {
  if (!std::isfinite(theta)) throw std::invalid_argument("qubit_rotation_unitary: theta not finite");
  const double c = std::cos(theta / 2);
  const Complex s = -kI * std::sin(theta / 2);
  ComplexMatrix u(2, 2);
  u << c, s,
       s, c;
  return UnitaryOp(std::move(u));
}

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

DensityMatrix evolve(const DensityMatrix& rho, const UnitaryOp& u) {
  if (rho.dim() != u.dim()) throw DimensionError("evolve: dimension mismatch");
  return DensityMatrix::unchecked(u.matrix() * rho.matrix() * u.matrix().adjoint());
}

double expectation(const DensityMatrix& rho, const ComplexMatrix& observable) {
  if (observable.rows() != rho.dim() || observable.cols() != rho.dim()) {
    throw DimensionError("expectation: dimension mismatch");
  }
  if (!is_hermitian(observable, 1e-10)) {
    throw std::invalid_argument("expectation: observable is not Hermitian");
  }
  const Complex value = (rho.matrix() * observable).trace();
  if (std::abs(value.imag()) > 1e-10) {
    throw std::domain_error("expectation: imaginary residue " + std::to_string(value.imag()));
  }
  return value.real();
}

}  // namespace lgi
