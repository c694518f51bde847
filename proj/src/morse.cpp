#include "linkfold/morse.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace linkfold {

namespace {

constexpr Complex kI(0.0, 1.0);

Complex dh_along(const PolyFunction& g, const PointC& z, const RealVector& tangent) {
  return (g.gradient(z).array() * complexify(tangent).array()).sum();
}

CriticalPointRecord classify_critical(const PointC& p, const TangentFrame& frame,
                                      const ManifoldConstraints& constraints, const PolyFunction& g,
                                      Complex weight, const FoldOptions& options) {
  auto fn = [&](const RealVector& u) { return (weight * g.value(chart(frame, u, constraints))).real(); };
  const RealMatrix hess =
      finite_difference_hessian(fn, frame.dim(), options.hessian_step * constraints.link().epsilon());
  Eigen::SelfAdjointEigenSolver<RealMatrix> eig(hess);

  CriticalPointRecord record;
  record.point = p;
  record.value = (weight * g.value(p)).real();
  record.hessian_eigenvalues = eig.eigenvalues();
  record.gradient_norm = (frame.basis.transpose() * level_gradient(g, weight, p)).norm();

  const FoldPoint fp = classify_eigenvalues(record.hessian_eigenvalues, options.dead_band);
  if (fp.kind == FoldKind::Degenerate) {
    throw Error(ErrorKind::Degenerate, "Hessian eigenvalue inside the dead band");
  }
  record.morse_index = fp.negative_eigenvalues;
  return record;
}

void push_unique(std::vector<PointC>& points, const PointC& z, double tol) {
  for (const auto& p : points) {
    if ((p - z).norm() <= tol) return;
  }
  points.push_back(z);
}

}  // namespace

std::vector<PointC> slice_critical_points(const SliceSpec& slice, const std::vector<CurveTrace>& traces,
                                          const LinkSpec& link, const PolyFunction& g) {
  const Complex w = slice.rotation();
  const Complex level_weight = -kI * w;  // Re(-i w h) = Im(w h)
  const AugmentedSystem system(link, g);
  const int n2 = 2 * link.ambient_dim();

  auto residual = [&](const RealVector& x) {
    RealVector r(system.unknowns());
    r.head(system.equations()) = system.residual(x);
    r[system.equations()] = (w * g.value(complexify(x.head(n2)))).imag();
    return r;
  };
  auto jacobian = [&](const RealVector& x) {
    RealMatrix jac = RealMatrix::Zero(system.unknowns(), system.unknowns());
    jac.topRows(system.equations()) = system.jacobian(x);
    jac.block(system.equations(), 0, 1, n2) =
        level_gradient(g, level_weight, complexify(x.head(n2))).transpose();
    return jac;
  };

  std::vector<PointC> found;
  for (const CurveTrace& trace : traces) {
    const std::size_t n = trace.size();
    const std::size_t segments = trace.closed ? n : n - 1;
    for (std::size_t k = 0; k < segments && n > 1; ++k) {
      const std::size_t k1 = (k + 1) % n;
      const Complex h0 = w * g.value(trace.points[k].z);
      const Complex h1 = w * g.value(trace.points[k1].z);
      if (h0.real() <= 0 && h1.real() <= 0) continue;
      if (h0.imag() != 0 && (h0.imag() > 0) == (h1.imag() > 0)) continue;
      const double t = h0.imag() == h1.imag() ? 0.0 : h0.imag() / (h0.imag() - h1.imag());
      const RealVector x0 = system.state(trace.points[k]);
      const RealVector x1 = system.state(trace.points[k1]);
      NewtonResult newton = gauss_newton(residual, jacobian, (1 - t) * x0 + t * x1, 1e-13, 30);
      if (!newton.converged) continue;
      const PointC z = complexify(newton.x.head(n2));
      const Complex hz = w * g.value(z);
      if (hz.real() < 1e-3 * link.epsilon()) continue;
      if (std::abs(hz.imag()) > 1e-9 * std::abs(hz)) continue;
      push_unique(found, z, 1e-8);
    }
  }
  std::sort(found.begin(), found.end(), [&](const PointC& a, const PointC& b) {
    return (w * g.value(a)).real() < (w * g.value(b)).real();
  });
  return found;
}

CriticalPointRecord slice_morse_index(const PointC& p, const SliceSpec& slice, const LinkSpec& link,
                                      const PolyFunction& g, const FoldOptions& options) {
  const Complex w = slice.rotation();
  const ManifoldConstraints q_slice = ManifoldConstraints(link).with_level(g, -kI * w);
  const TangentFrame frame = tangent_frame(p, q_slice);
  return classify_critical(p, frame, q_slice, g, w, options);
}

std::vector<CriticalPointRecord> composed_morse(const Point2& eta, const std::vector<CurveTrace>& traces,
                                                const LinkSpec& link, const PolyFunction& g,
                                                const FoldOptions& options) {
  if (eta.norm() == 0.0) throw Error(ErrorKind::NotApplicable, "eta must be nonzero");
  // eta . h = Re(conj(eta_c) h) with eta_c = eta_x + i eta_y.
  const Complex weight(eta.x(), -eta.y());
  const AugmentedSystem system(link, g);
  const CurveSystem curve = system.curve();
  const int n2 = 2 * link.ambient_dim();
  ContinuationOptions copt;

  auto slope = [&](const RealVector& x, const RealVector& t) {
    return (weight * dh_along(g, complexify(x.head(n2)), t.head(n2))).real();
  };
  auto value = [&](const RealVector& x) { return (weight * g.value(complexify(x.head(n2)))).real(); };

  std::vector<PointC> located;
  for (const CurveTrace& trace : traces) {
    const std::size_t n = trace.size();
    const std::size_t segments = trace.closed ? n : n - 1;
    for (std::size_t k = 0; k < segments && n > 1; ++k) {
      const std::size_t k1 = (k + 1) % n;
      const RealVector x0 = system.state(trace.points[k]);
      const RealVector t0 = curve_tangent(curve, x0, nullptr);
      RealVector t0_oriented = t0;
      if (t0.head(n2).dot(trace.tangents[k]) < 0) t0_oriented = -t0;
      const RealVector x1 = system.state(trace.points[k1]);
      RealVector t1 = curve_tangent(curve, x1, &t0_oriented);
      const double d0 = slope(x0, t0_oriented);
      const double d1 = slope(x1, t1);
      if (d0 == 0.0) {
        push_unique(located, trace.points[k].z, 1e-8);
        continue;
      }
      if ((d0 > 0) == (d1 > 0)) continue;

      // Bisection on the pseudo-arclength parameter from x0.
      const double span = t0_oriented.head(n2).dot(x1.head(n2) - x0.head(n2));
      auto at = [&](double s) -> std::optional<std::pair<RealVector, double>> {
        if (s == 0.0) return std::make_pair(x0, d0);
        auto x = correct(curve, x0 + s * t0_oriented, t0_oriented, copt);
        if (!x) return std::nullopt;
        const RealVector t = curve_tangent(curve, *x, &t0_oriented);
        return std::make_pair(*x, slope(*x, t));
      };
      double lo = 0.0;
      double hi = span;
      double dlo = d0;
      bool ok = true;
      while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        auto m = at(mid);
        if (!m) {
          ok = false;
          break;
        }
        if ((m->second > 0) == (dlo > 0)) {
          lo = mid;
          dlo = m->second;
        } else {
          hi = mid;
        }
      }
      if (!ok) continue;
      // Three-point parabolic refinement of the value inside the bracket.
      double s_best = 0.5 * (lo + hi);
      auto a = at(lo);
      auto b = at(s_best);
      auto c = at(hi);
      if (a && b && c) {
        const double fa = value(a->first);
        const double fb = value(b->first);
        const double fc = value(c->first);
        const double h = 0.5 * (hi - lo);
        const double denom = fa - 2 * fb + fc;
        if (denom != 0.0) {
          const double shift = 0.5 * h * (fa - fc) / denom;
          if (std::abs(shift) <= h) s_best += shift;
        }
      }
      auto best = at(s_best);
      if (!best) continue;
      push_unique(located, complexify(best->first.head(n2)), 1e-8);
    }
  }

  const ManifoldConstraints constraints(link);
  std::vector<CriticalPointRecord> records;
  for (const PointC& z : located) {
    records.push_back(classify_critical(z, tangent_frame(z, link), constraints, g, weight, options));
  }
  std::sort(records.begin(), records.end(),
            [](const CriticalPointRecord& a, const CriticalPointRecord& b) { return a.value < b.value; });
  return records;
}

LinkImage trace_image_n1(const LinkSpec& link, const PolyFunction& g, int n_samples,
                         std::uint64_t rng_seed) {
  if (link.n() != 1) throw Error(ErrorKind::WrongDimension, "the link image tracer needs n = 1");
  const ManifoldConstraints constraints(link);
  CurveSystem curve;
  curve.unknowns = 4;
  curve.arc_dims = 4;
  curve.residual = [&](const RealVector& x) { return constraints.residual(complexify(x)); };
  curve.jacobian = [&](const RealVector& x) { return constraints.jacobian(complexify(x)); };
  curve.orientation = [&](const RealVector& x, const RealVector& t) {
    const PointC z = complexify(x);
    return (std::conj(g.value(z)) * dh_along(g, z, t)).imag();
  };
  ContinuationOptions copt;
  copt.initial_step *= link.epsilon();
  copt.min_step *= link.epsilon();
  copt.max_step *= link.epsilon();

  auto distance_to = [&](const CurvePath& path, const RealVector& x) {
    std::size_t best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < path.states.size(); ++k) {
      const double d = (path.states[k] - x).norm();
      if (d < best_dist) {
        best_dist = d;
        best = k;
      }
    }
    const RealVector& t = path.tangents[best];
    auto on = correct(curve, path.states[best] + t.dot(x - path.states[best]) * t, t, copt);
    return on ? std::min(best_dist, (*on - x).norm()) : best_dist;
  };

  std::mt19937_64 rng(rng_seed);
  std::vector<CurvePath> paths;
  for (int s = 0; s < n_samples; ++s) {
    const RealVector x = realify(random_link_point(link, rng));
    const bool covered = std::any_of(paths.begin(), paths.end(),
                                     [&](const CurvePath& p) { return distance_to(p, x) <= 1e-6; });
    if (!covered) paths.push_back(trace_curve(curve, x, copt));
  }

  LinkImage result;
  for (const CurvePath& path : paths) {
    LinkComponent comp;
    comp.closed = path.closed;
    comp.arc_length = path.arc_length;
    for (const auto& x : path.states) {
      const PointC z = complexify(x);
      const Complex hz = g.value(z);
      comp.points.push_back(z);
      comp.image.emplace_back(hz.real(), hz.imag());
    }
    comp.image_center = fit_circle_center(comp.image);
    double sum = 0.0;
    for (const auto& w : comp.image) sum += (w - comp.image_center).norm();
    comp.image_radius_mean = sum / static_cast<double>(comp.image.size());
    for (const auto& w : comp.image) {
      comp.image_radius_deviation = std::max(
          comp.image_radius_deviation, std::abs((w - comp.image_center).norm() - comp.image_radius_mean));
    }
    result.components.push_back(std::move(comp));
  }
  std::sort(result.components.begin(), result.components.end(),
            [](const LinkComponent& a, const LinkComponent& b) { return a.image_radius_mean < b.image_radius_mean; });

  result.min_component_distance = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < result.components.size(); ++i) {
    for (std::size_t j = i + 1; j < result.components.size(); ++j) {
      for (const auto& a : result.components[i].image) {
        for (const auto& b : result.components[j].image) {
          result.min_component_distance = std::min(result.min_component_distance, (a - b).norm());
        }
      }
    }
  }
  return result;
}

}  // namespace linkfold
