#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <Eigen/SparseCore>

namespace pflab {

using Complex = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Operators act on C^2 (x) F or on the boson factor F alone; the storage is
// the same either way.
using SparseOp = Eigen::SparseMatrix<Complex>;
using DenseOp = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;

inline constexpr std::uint64_t kDefaultSeed = 0x5eed'2b1d'0c0f'fee5ULL;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input or a request that cannot be sized (usage-level failure).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A precondition on the mathematical input does not hold (non-Hermitian
// matrix, query outside an interpolation domain, missing symmetry, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// The computation ran but did not produce a trustworthy answer.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace pflab
