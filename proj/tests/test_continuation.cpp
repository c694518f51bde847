#include <numbers>

#include "doctest.h"
#include "linkfold/continuation.hpp"
#include "linkfold/linalg.hpp"

using namespace linkfold;

namespace {

// x^2 + y^2 = r^2 in the plane.
CurveSystem circle(double r) {
  CurveSystem s;
  s.unknowns = 2;
  s.arc_dims = 2;
  s.residual = [r](const RealVector& x) {
    RealVector out(1);
    out[0] = x.squaredNorm() - r * r;
    return out;
  };
  s.jacobian = [](const RealVector& x) {
    RealMatrix j(1, 2);
    j << 2 * x[0], 2 * x[1];
    return j;
  };
  return s;
}

// The helix-like open curve y = x^3 (never closes).
CurveSystem cubic() {
  CurveSystem s;
  s.unknowns = 2;
  s.arc_dims = 2;
  s.residual = [](const RealVector& x) {
    RealVector out(1);
    out[0] = x[1] - x[0] * x[0] * x[0];
    return out;
  };
  s.jacobian = [](const RealVector& x) {
    RealMatrix j(1, 2);
    j << -3 * x[0] * x[0], 1.0;
    return j;
  };
  return s;
}

}  // namespace

TEST_SUITE("continuation") {
  TEST_CASE("a circle closes with length 2 pi r") {
    for (double r : {0.5, 1.0, 3.0}) {
      ContinuationOptions opt;
      opt.initial_step *= r;
      opt.min_step *= r;
      opt.max_step *= r;
      const CurvePath path = trace_curve(circle(r), RealVector::Unit(2, 0) * r, opt);
      CHECK(path.closed);
      CHECK(std::abs(path.arc_length - 2 * std::numbers::pi * r) <= 1e-9 * r);
      for (const auto& x : path.states) CHECK(std::abs(x.norm() - r) <= 1e-12);
    }
  }

  TEST_CASE("orientation callback picks the initial direction") {
    CurveSystem s = circle(1.0);
    s.orientation = [](const RealVector& x, const RealVector& t) { return x[0] * t[1] - x[1] * t[0]; };
    const CurvePath ccw = trace_curve(s, RealVector::Unit(2, 0));
    CHECK(ccw.states[1][1] > 0);
    s.orientation = [](const RealVector& x, const RealVector& t) { return x[1] * t[0] - x[0] * t[1]; };
    const CurvePath cw = trace_curve(s, RealVector::Unit(2, 0));
    CHECK(cw.states[1][1] < 0);
  }

  TEST_CASE("arc_estimate is exact on circular arcs") {
    for (double phi : {1e-6, 0.01, 0.1, 0.5}) {
      RealVector a(2), b(2), ta(2), tb(2);
      a << 1, 0;
      b << std::cos(phi), std::sin(phi);
      ta << 0, 1;
      tb << -std::sin(phi), std::cos(phi);
      CHECK(std::abs(arc_estimate(a, b, ta, tb) - phi) <= 1e-14);
    }
  }

  TEST_CASE("the corrector lands on the curve and on the hyperplane") {
    const CurveSystem s = circle(1.0);
    RealVector x(2), t(2);
    x << 1, 0;
    t << 0, 1;
    const RealVector predicted = x + 0.1 * t;
    const auto corrected = correct(s, predicted, t, ContinuationOptions{});
    REQUIRE(corrected.has_value());
    CHECK(std::abs(corrected->norm() - 1.0) <= 1e-12);
    CHECK(std::abs(t.dot(*corrected - predicted)) <= 1e-14);
  }

  TEST_CASE("tangent is orthogonal to the Jacobian rows") {
    const CurveSystem s = circle(2.0);
    RealVector x(2);
    x << std::sqrt(2.0), std::sqrt(2.0);
    const RealVector t = curve_tangent(s, x);
    CHECK(std::abs(t.norm() - 1.0) <= 1e-14);
    CHECK((s.jacobian(x) * t).norm() <= 1e-14);
    const RealVector flipped = -t;
    CHECK(curve_tangent(s, x, &flipped).dot(flipped) > 0);
  }

  TEST_CASE("an open curve exhausts the step budget without closing") {
    ContinuationOptions opt;
    opt.max_steps = 50;
    const CurvePath path = trace_curve(cubic(), RealVector::Zero(2), opt);
    CHECK_FALSE(path.closed);
    CHECK(path.states.size() == 51);
    for (std::size_t k = 1; k < path.arc.size(); ++k) CHECK(path.arc[k] > path.arc[k - 1]);
  }

  TEST_CASE("step collapse is reported") {
    ContinuationOptions opt;
    opt.max_turn = 1e-9;
    try {
      trace_curve(circle(1.0), RealVector::Unit(2, 0), opt);
      FAIL("expected StepCollapse");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::StepCollapse);
    }
  }

  TEST_CASE("a near-singular Jacobian is reported as a suspected bifurcation") {
    ContinuationOptions opt;
    opt.bifurcation_tol = 10.0;
    try {
      trace_curve(circle(1.0), RealVector::Unit(2, 0), opt);
      FAIL("expected BifurcationSuspected");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::BifurcationSuspected);
    }
  }

  TEST_CASE("Gauss-Newton handles square, under- and overdetermined systems") {
    // Square: x^2 = 2.
    auto sq_r = [](const RealVector& x) { return RealVector::Constant(1, x[0] * x[0] - 2); };
    auto sq_j = [](const RealVector& x) { return RealMatrix::Constant(1, 1, 2 * x[0]); };
    NewtonResult r = gauss_newton(sq_r, sq_j, RealVector::Constant(1, 1.0), 1e-14, 50);
    CHECK(r.converged);
    CHECK(std::abs(r.x[0] - std::sqrt(2.0)) <= 1e-15);

    // Underdetermined: least-norm steps move orthogonally onto x + y = 1.
    auto ud_r = [](const RealVector& x) { return RealVector::Constant(1, x[0] + x[1] - 1); };
    auto ud_j = [](const RealVector&) { return RealMatrix::Constant(1, 2, 1.0); };
    r = gauss_newton(ud_r, ud_j, RealVector::Zero(2), 1e-14, 10);
    CHECK(r.converged);
    CHECK(std::abs(r.x[0] - 0.5) <= 1e-15);
    CHECK(std::abs(r.x[1] - 0.5) <= 1e-15);

    // Overdetermined and consistent: x = 3, 2x = 6.
    auto od_r = [](const RealVector& x) {
      RealVector out(2);
      out << x[0] - 3, 2 * x[0] - 6;
      return out;
    };
    auto od_j = [](const RealVector&) {
      RealMatrix j(2, 1);
      j << 1, 2;
      return j;
    };
    r = gauss_newton(od_r, od_j, RealVector::Zero(1), 1e-14, 10);
    CHECK(r.converged);
    CHECK(std::abs(r.x[0] - 3) <= 1e-14);
  }

  TEST_CASE("least_norm_solve and null_space") {
    RealMatrix a(1, 3);
    a << 1, 2, 2;
    RealVector b(1);
    b << 9;
    const RealVector x = least_norm_solve(a, b);
    CHECK((x - RealVector(a.transpose()) * 1.0).norm() <= 1e-14);
    const RealMatrix ns = null_space(a, 1);
    CHECK(ns.cols() == 2);
    CHECK((a * ns).norm() <= 1e-14);
  }

  TEST_CASE("orthogonal complement detects dependent constraints") {
    RealMatrix c(3, 2);
    c << 1, 2, 0, 0, 0, 0;
    try {
      orthogonal_complement(c);
      FAIL("expected DimensionCollapse");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::DimensionCollapse);
    }
    c << 1, 0, 0, 1, 0, 0;
    const RealMatrix comp = orthogonal_complement(c);
    CHECK(comp.cols() == 1);
    CHECK(std::abs(std::abs(comp(2, 0)) - 1.0) <= 1e-15);
  }
}
