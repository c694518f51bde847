#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "linkfold/types.hpp"

namespace linkfold {

/// Underdetermined smooth system F: R^N -> R^{N-1} whose zero set is a curve.
/// The first `arc_dims` unknowns are the ones arc length is measured in.
struct CurveSystem {
  int unknowns = 0;
  int arc_dims = 0;
  std::function<RealVector(const RealVector&)> residual;
  std::function<RealMatrix(const RealVector&)> jacobian;
  /// Optional: the initial tangent is flipped so that this is positive.
  std::function<double(const RealVector& x, const RealVector& tangent)> orientation;
};

struct ContinuationOptions {
  double initial_step = 0.02;
  double min_step = 1e-4;
  double max_step = 0.1;
  int max_steps = 20000;
  double corrector_tol = 1e-12;
  int max_corrector_iter = 10;
  /// Smallest singular value of the Jacobian that still counts as regular.
  double bifurcation_tol = 1e-8;
  /// Largest accepted turn of the unit tangent per step, radians.
  double max_turn = 0.15;
};

struct CurvePath {
  std::vector<RealVector> states;
  /// Tangents scaled so their arc part has unit norm.
  std::vector<RealVector> tangents;
  /// Cumulative arc length at each state.
  std::vector<double> arc;
  bool closed = false;
  double arc_length = 0.0;
};

/// Null direction of the Jacobian, scaled to unit arc part. When `previous`
/// is given the sign is chosen to agree with it.
RealVector curve_tangent(const CurveSystem& system, const RealVector& x,
                         const RealVector* previous = nullptr);

/// Pseudo-arclength corrector: solves F(x) = 0 on the hyperplane through
/// `predicted` orthogonal to `tangent`. Returns nullopt on failure.
std::optional<RealVector> correct(const CurveSystem& system, const RealVector& predicted,
                                  const RealVector& tangent, const ContinuationOptions& options,
                                  int* iterations = nullptr);

/// Arc length of the curve piece between two nearby points with unit
/// tangents, exact for circular arcs.
double arc_estimate(const RealVector& from, const RealVector& to, const RealVector& t_from,
                    const RealVector& t_to);

/// Traces the curve from x0 until it closes up or the step budget is
/// exhausted. Throws StepCollapse and BifurcationSuspected.
CurvePath trace_curve(const CurveSystem& system, const RealVector& x0,
                      const ContinuationOptions& options = {});

/// Gauss-Newton with least-norm steps; returns the final iterate and its
/// residual norm. Works for under-, over- and square systems.
struct NewtonResult {
  RealVector x;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};
NewtonResult gauss_newton(const std::function<RealVector(const RealVector&)>& residual,
                          const std::function<RealMatrix(const RealVector&)>& jacobian,
                          RealVector x, double tol, int max_iter);

}  // namespace linkfold
