#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace linkfold {

using Complex = std::complex<double>;

/// A point of C^{n+1}. Realified coordinates are interleaved:
/// (Re z1, Im z1, Re z2, Im z2, ...).
using PointC = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;
using Point2 = Eigen::Vector2d;

enum class ErrorKind {
  Parse,
  DimensionMismatch,
  IndexOutOfRange,
  NonFinite,
  InvalidLink,
  NotOnLink,
  NonConvergence,
  RankDeficient,
  DimensionCollapse,
  WrongDimension,
  EmptyResult,
  BifurcationSuspected,
  StepCollapse,
  RankZero,
  RankTwo,
  Degenerate,
  NotApplicable,
  Config,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Syntax errors carry the 0-based character offset into the source text.
class ParseError : public Error {
 public:
  ParseError(std::size_t position, const std::string& what)
      : Error(ErrorKind::Parse,
              what + " at position " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

inline RealVector realify(const PointC& z) {
  RealVector out(2 * z.size());
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    out[2 * j] = z[j].real();
    out[2 * j + 1] = z[j].imag();
  }
  return out;
}

inline PointC complexify(const RealVector& x) {
  PointC out(x.size() / 2);
  for (Eigen::Index j = 0; j < out.size(); ++j) {
    out[j] = Complex(x[2 * j], x[2 * j + 1]);
  }
  return out;
}

inline bool all_finite(const PointC& z) {
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    if (!std::isfinite(z[j].real()) || !std::isfinite(z[j].imag())) {
      return false;
    }
  }
  return true;
}

}  // namespace linkfold
