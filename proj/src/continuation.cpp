#include "linkfold/continuation.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>
#include <cmath>

#include "linkfold/linalg.hpp"

namespace linkfold {

RealVector curve_tangent(const CurveSystem& system, const RealVector& x, const RealVector* previous) {
  RealMatrix jac = system.jacobian(x);
  RealVector t = null_space(jac, system.unknowns - 1).col(0);
  const double arc_norm = t.head(system.arc_dims).norm();
  if (arc_norm < 1e-12) {
    throw Error(ErrorKind::BifurcationSuspected, "curve tangent has no component in arc coordinates");
  }
  t /= arc_norm;
  if (previous != nullptr) {
    if (t.head(system.arc_dims).dot(previous->head(system.arc_dims)) < 0) t = -t;
  } else if (system.orientation) {
    if (system.orientation(x, t) < 0) t = -t;
  } else {
    for (Eigen::Index k = 0; k < t.size(); ++k) {
      if (std::abs(t[k]) > 1e-8) {
        if (t[k] < 0) t = -t;
        break;
      }
    }
  }
  return t;
}

std::optional<RealVector> correct(const CurveSystem& system, const RealVector& predicted,
                                  const RealVector& tangent, const ContinuationOptions& options,
                                  int* iterations) {
  const int n = system.unknowns;
  RealVector x = predicted;
  RealMatrix bordered(n, n);
  RealVector rhs(n);
  for (int iter = 0; iter < options.max_corrector_iter; ++iter) {
    RealVector r = system.residual(x);
    const double norm = r.norm();
    const double plane = tangent.dot(x - predicted);
    if (!std::isfinite(norm)) return std::nullopt;
    bordered.topRows(n - 1) = system.jacobian(x);
    bordered.row(n - 1) = tangent.transpose();
    rhs.head(n - 1) = -r;
    rhs[n - 1] = -plane;
    Eigen::PartialPivLU<RealMatrix> lu(bordered);
    RealVector dx = lu.solve(rhs);
    if (!dx.allFinite()) return std::nullopt;
    x += dx;
    if (norm <= options.corrector_tol && std::abs(plane) <= options.corrector_tol) {
      if (iterations != nullptr) *iterations = iter;
      return x;
    }
  }
  return std::nullopt;
}

double arc_estimate(const RealVector& from, const RealVector& to, const RealVector& t_from,
                    const RealVector& t_to) {
  const double chord = (to - from).norm();
  const double cosine = std::clamp(t_from.normalized().dot(t_to.normalized()), -1.0, 1.0);
  const double half = 0.5 * std::acos(cosine);
  if (half < 1e-8) return chord;
  return chord * half / std::sin(half);
}

CurvePath trace_curve(const CurveSystem& system, const RealVector& x0,
                      const ContinuationOptions& options) {
  const int m = system.arc_dims;
  CurvePath path;
  RealVector x = x0;
  RealVector t = curve_tangent(system, x);
  path.states.push_back(x);
  path.tangents.push_back(t);
  path.arc.push_back(0.0);

  const RealVector start = x0.head(m);
  const RealVector start_dir = t.head(m);
  double step = std::clamp(options.initial_step, options.min_step, options.max_step);
  bool left_start = false;
  int accepted = 0;

  for (int attempt = 0; accepted < options.max_steps; ++attempt) {
    if (attempt > 20 * options.max_steps) break;
    const RealVector here = x.head(m);
    const RealVector dir = t.head(m);

    if (!left_start && (here - start).norm() > 2.0 * step) left_start = true;
    if (left_start) {
      const RealVector to_start = start - here;
      const double along = dir.dot(to_start);
      const double across = (to_start - along * dir).norm();
      if (along > 0 && along <= std::min(1.3 * step, options.max_step) && across <= 0.5 * step &&
          dir.dot(start_dir) > 0.9) {
        path.arc_length = path.arc.back() + arc_estimate(here, start, dir, start_dir);
        path.closed = true;
        return path;
      }
    }

    int iters = 0;
    auto next = correct(system, x + step * t, t, options, &iters);
    bool accept = next.has_value();
    RealVector t_next;
    double turn = 0.0;
    if (accept) {
      t_next = curve_tangent(system, *next, &t);
      turn = std::acos(std::clamp(dir.dot(t_next.head(m)) / t_next.head(m).norm(), -1.0, 1.0));
      accept = turn <= options.max_turn;
    }
    if (!accept) {
      step *= 0.5;
      if (step < options.min_step) {
        throw Error(ErrorKind::StepCollapse,
                    "step fell below " + std::to_string(options.min_step) + " after " +
                        std::to_string(accepted) + " steps");
      }
      continue;
    }

    const RealVector sv = singular_values(system.jacobian(*next));
    if (sv[sv.size() - 1] < options.bifurcation_tol) {
      throw Error(ErrorKind::BifurcationSuspected,
                  "corrector Jacobian singular value " + std::to_string(sv[sv.size() - 1]) +
                      " at arc length " + std::to_string(path.arc.back()));
    }

    const double ds = arc_estimate(here, next->head(m), dir, t_next.head(m));
    x = *next;
    t = t_next;
    path.states.push_back(x);
    path.tangents.push_back(t);
    path.arc.push_back(path.arc.back() + ds);
    ++accepted;

    if (iters <= 3 && turn < 0.25 * options.max_turn) step = std::min(1.5 * step, options.max_step);
  }
  path.arc_length = path.arc.back();
  return path;
}

NewtonResult gauss_newton(const std::function<RealVector(const RealVector&)>& residual,
                          const std::function<RealMatrix(const RealVector&)>& jacobian,
                          RealVector x, double tol, int max_iter) {
  NewtonResult result;
  for (int iter = 0; iter < max_iter; ++iter) {
    RealVector r = residual(x);
    const double norm = r.norm();
    result.iterations = iter;
    if (!std::isfinite(norm)) break;
    RealVector dx = least_norm_solve(jacobian(x), -r, 1e-12);
    if (!dx.allFinite()) break;
    x += dx;
    if (norm <= tol) {
      result.converged = true;
      break;
    }
  }
  result.x = x;
  result.residual = residual(x).norm();
  if (!std::isfinite(result.residual)) result.converged = false;
  return result;
}

}  // namespace linkfold
