#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "linkfold/types.hpp"

namespace linkfold {

using Exponents = std::vector<int>;

/// Graded lexicographic order: total degree first, then lexicographic on
/// the exponent vector.
struct GradedLex {
  bool operator()(const Exponents& a, const Exponents& b) const;
};

/// Multivariate polynomial in z1..z_n with complex double coefficients.
/// Terms are kept in graded-lex order, zero coefficients are never stored.
class ComplexPoly {
 public:
  using TermMap = std::map<Exponents, Complex, GradedLex>;

  ComplexPoly() = default;
  explicit ComplexPoly(int n_vars);

  static ComplexPoly constant(int n_vars, Complex c);
  /// The coordinate function z_{index+1}.
  static ComplexPoly variable(int n_vars, int index);

  int n_vars() const { return n_vars_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  /// Adds c * z^exps, merging with an existing term.
  void add_term(const Exponents& exps, Complex c);
  Complex coefficient(const Exponents& exps) const;

  ComplexPoly operator-() const;
  ComplexPoly& operator+=(const ComplexPoly& other);
  ComplexPoly& operator-=(const ComplexPoly& other);
  ComplexPoly& operator*=(Complex c);
  friend ComplexPoly operator+(ComplexPoly a, const ComplexPoly& b) { return a += b; }
  friend ComplexPoly operator-(ComplexPoly a, const ComplexPoly& b) { return a -= b; }
  friend ComplexPoly operator*(const ComplexPoly& a, const ComplexPoly& b);
  friend ComplexPoly operator*(ComplexPoly a, Complex c) { return a *= c; }
  friend bool operator==(const ComplexPoly& a, const ComplexPoly& b) {
    return a.n_vars_ == b.n_vars_ && a.terms_ == b.terms_;
  }

  ComplexPoly pow(int exponent) const;

  /// Canonical text form; `parse_poly(to_string())` reproduces the terms
  /// bit-for-bit.
  std::string to_string() const;

 private:
  int n_vars_ = 0;
  TermMap terms_;
};

/// Parses expressions over z1..z{n_vars} with `+ - * ^`, parentheses and
/// complex literals (`2`, `1.5e-3`, `3i`, `i`).
ComplexPoly parse_poly(std::string_view text, int n_vars);

Complex eval(const ComplexPoly& p, const PointC& z);

/// d p / d z_{index+1}. `index` is 0-based.
ComplexPoly wirtinger_partial(const ComplexPoly& p, int index);

/// Entry j is conj(dp/dz_j (z)).
PointC conj_gradient(const ComplexPoly& p, const PointC& z);

std::optional<int> homogeneous_degree(const ComplexPoly& p);

/// A polynomial with its first and second holomorphic partials expanded
/// once, so repeated evaluation along a computation is cheap.
class PolyFunction {
 public:
  PolyFunction() = default;
  PolyFunction(ComplexPoly p);  // NOLINT(google-explicit-constructor)

  const ComplexPoly& poly() const { return poly_; }
  int n_vars() const { return poly_.n_vars(); }

  Complex value(const PointC& z) const;
  /// Holomorphic gradient (dp/dz_j), not conjugated.
  PointC gradient(const PointC& z) const;
  PointC conj_gradient(const PointC& z) const;
  /// Symmetric matrix of second holomorphic partials.
  Eigen::MatrixXcd hessian(const PointC& z) const;

 private:
  ComplexPoly poly_;
  std::vector<ComplexPoly> first_;
  std::vector<ComplexPoly> second_;  // row-major upper triangle incl. diagonal
};

}  // namespace linkfold
