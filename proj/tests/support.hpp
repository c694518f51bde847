#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <string>

#include "linkfold/report.hpp"

namespace testing_support {

using namespace linkfold;

inline const double kR = std::sqrt(0.5);
inline const Complex kI(0.0, 1.0);

/// The A1 data for a given n: f = sum z_j^2, g = z1 + (i/2) z2, epsilon = 1.
struct A1 {
  explicit A1(int n_)
      : n(n_),
        link(parse_poly(RunConfig::a1(n_).f_text, n_ + 1), n_, 1.0),
        g(parse_poly(RunConfig::a1(n_).g_text, n_ + 1)) {}

  /// h(q) = 3 sqrt(2) / 4.
  PointC q() const {
    PointC z = PointC::Zero(n + 1);
    z[0] = kR;
    z[1] = -kI * kR;
    return z;
  }
  /// h(q') = sqrt(2) / 4.
  PointC q_prime() const {
    PointC z = PointC::Zero(n + 1);
    z[0] = kR;
    z[1] = kI * kR;
    return z;
  }

  int n;
  LinkSpec link;
  PolyFunction g;
};

inline PointC random_point(int dim, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  PointC z(dim);
  for (int j = 0; j < dim; ++j) z[j] = Complex(u(rng), u(rng));
  return z;
}

/// Random polynomial with `terms` terms of total degree <= max_degree and
/// coefficients in [-10, 10]^2.
inline ComplexPoly random_poly(int n_vars, int terms, int max_degree, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> deg(0, max_degree);
  std::uniform_real_distribution<double> coeff(-10.0, 10.0);
  ComplexPoly p(n_vars);
  for (int t = 0; t < terms; ++t) {
    Exponents e(n_vars, 0);
    int budget = deg(rng);
    for (int j = 0; j < n_vars && budget > 0; ++j) {
      std::uniform_int_distribution<int> take(0, budget);
      e[j] = take(rng);
      budget -= e[j];
    }
    p.add_term(e, Complex(coeff(rng), coeff(rng)));
  }
  return p;
}

}  // namespace testing_support
