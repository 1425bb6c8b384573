#pragma once

// Dense complex linear algebra and quantum primitives for small Hilbert
// spaces (dimension <= 16). Basis conventions used throughout the library:
//
//   qutrit   : (|+1>, |0>, |-1>)
//   electron : (|1>e, |0>e)
//   6-level  : electron (x) nucleus, row-major, so |1> = |1>e|+1>n,
//              |4> = |0>e|+1>n, |6> = |0>e|-1>n.

#include <complex>
#include <cstddef>
#include <stdexcept>

#include <Eigen/Dense>

namespace lgi {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr Complex kI{0.0, 1.0};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Trace-one, Hermitian, positive-semidefinite state. The constructor
/// validates all three; use `unchecked` only for values produced by
/// trace-preserving maps of already-valid states.
class DensityMatrix {
 public:
  static constexpr double kHermitianTol = 1e-12;
  static constexpr double kTraceTol = 1e-10;
  static constexpr double kEigenFloor = -1e-10;

  explicit DensityMatrix(ComplexMatrix m);

  static DensityMatrix unchecked(ComplexMatrix m);
  static DensityMatrix pure(Eigen::Index dim, Eigen::Index level);
  static DensityMatrix maximally_mixed(Eigen::Index dim);

  Eigen::Index dim() const { return m_.rows(); }
  const ComplexMatrix& matrix() const { return m_; }
  RealVector populations() const { return m_.diagonal().real(); }
  double population(Eigen::Index level) const { return m_(level, level).real(); }

 private:
  struct Unchecked {};
  DensityMatrix(ComplexMatrix m, Unchecked) : m_(std::move(m)) {}
  ComplexMatrix m_;
};

/// Square matrix with U^dagger U = 1 to 1e-10.
class UnitaryOp {
 public:
  static constexpr double kUnitaryTol = 1e-10;

  explicit UnitaryOp(ComplexMatrix m);

  Eigen::Index dim() const { return m_.rows(); }
  const ComplexMatrix& matrix() const { return m_; }
  UnitaryOp operator*(const UnitaryOp& rhs) const;

 private:
  ComplexMatrix m_;
};

struct SpinOps {
  ComplexMatrix sx;
  ComplexMatrix sz;
  ComplexMatrix iz_sq;
};

SpinOps spin1_operators();

// Spin-1/2 Sx = sigma_x / 2 and Sz = sigma_z / 2 in (|up>, |down>) order.
ComplexMatrix spin_half_sx();
ComplexMatrix spin_half_sz();

// Electron "Sz" restricted to (|1>e, |0>e): diag(1, 0).
ComplexMatrix electron_sz();
// Electron flip sigma_x on (|1>e, |0>e).
ComplexMatrix electron_flip();

/// exp(scale * m) by scaling and squaring of a truncated Taylor series.
ComplexMatrix matrix_exp(const ComplexMatrix& m, Complex scale);

/// exp(-i theta Sx) for spin 1, closed form.
UnitaryOp rotation_unitary(double theta);

/// exp(-i theta sigma_x / 2) for spin 1/2.
UnitaryOp qubit_rotation_unitary(double theta);

/// Kronecker product a (x) b, block (i, j) = a(i, j) * b.
ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b);

DensityMatrix evolve(const DensityMatrix& rho, const UnitaryOp& u);

/// Tr(rho * observable). Throws if the observable is not Hermitian or the
/// imaginary residue exceeds 1e-10.
double expectation(const DensityMatrix& rho, const ComplexMatrix& observable);

bool is_hermitian(const ComplexMatrix& m, double tol);
ComplexMatrix projector(Eigen::Index dim, Eigen::Index level);

}  // namespace lgi
