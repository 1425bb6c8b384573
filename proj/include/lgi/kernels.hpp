#pragma once

// Data-parallel kernels. Each OpenMP kernel has a plain serial twin that is
// kept as the reference for tests and benchmarks.
//
// The parallel versions evaluate every item independently into its own slot
// and reduce afterwards in index order with compensated summation, so the
// result is bit-identical for any thread count or schedule.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include <omp.h>

#include "lgi/qop.hpp"

namespace lgi::kernels {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Entrywise compensated sum of equally-shaped complex matrices.
class CompensatedMatrixSum {
 public:
  CompensatedMatrixSum(Eigen::Index rows, Eigen::Index cols)
      : rows_(rows), cols_(cols), re_(rows * cols), im_(rows * cols) {}

  void add(const ComplexMatrix& m, double weight) {
    for (Eigen::Index j = 0; j < cols_; ++j) {
      for (Eigen::Index i = 0; i < rows_; ++i) {
        const auto k = static_cast<std::size_t>(j * rows_ + i);
        re_[k].add(weight * m(i, j).real());
        im_[k].add(weight * m(i, j).imag());
      }
    }
  }

  ComplexMatrix value() const {
    ComplexMatrix out(rows_, cols_);
    for (Eigen::Index j = 0; j < cols_; ++j) {
      for (Eigen::Index i = 0; i < rows_; ++i) {
        const auto k = static_cast<std::size_t>(j * rows_ + i);
        out(i, j) = Complex(re_[k].value(), im_[k].value());
      }
    }
    return out;
  }

 private:
  Eigen::Index rows_, cols_;
  std::vector<CompensatedSum> re_, im_;
};

/// sum_i weights[i] * f(i), f returning a rows x cols complex matrix.
template <class F>
ComplexMatrix weighted_sum(std::span<const double> weights, Eigen::Index rows, Eigen::Index cols,
                           F&& f) {
  const auto n = static_cast<std::ptrdiff_t>(weights.size());
  std::vector<ComplexMatrix> terms(weights.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    terms[static_cast<std::size_t>(i)] = f(static_cast<std::size_t>(i));
  }
  CompensatedMatrixSum acc(rows, cols);
  for (std::size_t i = 0; i < terms.size(); ++i) acc.add(terms[i], weights[i]);
  return acc.value();
}

template <class F>
ComplexMatrix weighted_sum_serial(std::span<const double> weights, Eigen::Index rows,
                                  Eigen::Index cols, F&& f) {
  ComplexMatrix acc = ComplexMatrix::Zero(rows, cols);
  for (std::size_t i = 0; i < weights.size(); ++i) acc += weights[i] * f(i);
  return acc;
}

/// Evaluates f at every point of a grid.
template <class F>
std::vector<double> map_grid(std::span<const double> xs, F&& f) {
  std::vector<double> out(xs.size());
  const auto n = static_cast<std::ptrdiff_t>(xs.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = f(xs[static_cast<std::size_t>(i)]);
  }
  return out;
}

template <class F>
std::vector<double> map_grid_serial(std::span<const double> xs, F&& f) {
  std::vector<double> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back(f(x));
  return out;
}

}  // namespace lgi::kernels
