#include "linkfold/singular_set.hpp"

#include <algorithm>
#include <limits>

#include "linkfold/linalg.hpp"

namespace linkfold {

namespace {

constexpr Complex kI(0.0, 1.0);

// Realified complex conjugation on interleaved coordinates.
RealMatrix conjugation(int dim) {
  RealMatrix c = RealMatrix::Identity(2 * dim, 2 * dim);
  for (int j = 0; j < dim; ++j) c(2 * j + 1, 2 * j + 1) = -1.0;
  return c;
}

void check_dims(const PointC& z, const PolyFunction& f, const PolyFunction& g) {
  if (z.size() != f.n_vars() || z.size() != g.n_vars()) {
    throw Error(ErrorKind::DimensionMismatch, "point and polynomial dimensions differ");
  }
}

}  // namespace

CriterionMatrix criterion_matrix(const PointC& z, const PolyFunction& f, const PolyFunction& g) {
  check_dims(z, f, g);
  CriterionMatrix m;
  m.columns.resize(z.size(), 3);
  m.columns.col(0) = f.conj_gradient(z);
  m.columns.col(1) = g.conj_gradient(z);
  m.columns.col(2) = z;
  return m;
}

Complex criterion_det(const PointC& z, const PolyFunction& f, const PolyFunction& g) {
  if (z.size() != 3) {
    throw Error(ErrorKind::WrongDimension, "the determinant test needs n = 2 (3 coordinates)");
  }
  const Eigen::MatrixXcd m = criterion_matrix(z, f, g).columns;
  auto minor = [&](int r0, int r1) { return m(r0, 1) * m(r1, 2) - m(r1, 1) * m(r0, 2); };
  return m(0, 0) * minor(1, 2) - m(1, 0) * minor(0, 2) + m(2, 0) * minor(0, 1);
}

double criterion_rank_defect(const PointC& z, const PolyFunction& f, const PolyFunction& g) {
  const RealVector s = singular_values(realify_matrix(criterion_matrix(z, f, g).columns));
  // Singular values of the realification come in equal pairs.
  if (s.size() < 6 || s[0] == 0.0) return 0.0;
  return s[4] / s[0];
}

double gradient_dependency(const PointC& z, const PolyFunction& f, const PolyFunction& g) {
  check_dims(z, f, g);
  Eigen::MatrixXcd m(z.size(), 2);
  m.col(0) = f.conj_gradient(z);
  m.col(1) = g.conj_gradient(z);
  const RealVector s = singular_values(realify_matrix(m));
  if (s[0] == 0.0) return 0.0;
  return s[2] / s[0];
}

double direct_singularity_test(const PointC& z, const LinkSpec& link, const PolyFunction& g) {
  const TangentFrame frame = tangent_frame(z, link);
  const PointC grad = g.conj_gradient(z);
  RealMatrix dh(2, frame.dim());
  dh.row(0) = realify(grad).transpose() * frame.basis;
  dh.row(1) = realify(kI * grad).transpose() * frame.basis;
  return singular_values(dh)[1];
}

AugmentedSystem::AugmentedSystem(const LinkSpec& link, const PolyFunction& g)
    : link_(&link), g_(&g), dim_(link.ambient_dim()) {
  if (g.n_vars() != dim_) throw Error(ErrorKind::DimensionMismatch, "g variable count");
}

RealVector AugmentedSystem::state(const AugmentedPoint& p) const {
  RealVector x(unknowns());
  x.head(2 * dim_) = realify(p.z);
  x.tail<4>() << p.a.real(), p.a.imag(), p.b.real(), p.b.imag();
  return x;
}

AugmentedPoint AugmentedSystem::point(const RealVector& x) const {
  const auto tail = x.tail<4>();
  return {complexify(x.head(2 * dim_)), Complex(tail[0], tail[1]), Complex(tail[2], tail[3])};
}

RealVector AugmentedSystem::residual(const RealVector& x) const {
  const AugmentedPoint p = point(x);
  const PointC combo = p.z - p.a * link_->f().conj_gradient(p.z) - p.b * g_->conj_gradient(p.z);
  RealVector r(equations());
  r.head(2 * dim_) = realify(combo);
  r.tail<3>() = link_residual(p.z, *link_);
  return r;
}

RealMatrix AugmentedSystem::jacobian(const RealVector& x) const {
  const AugmentedPoint p = point(x);
  const PointC gf = link_->f().conj_gradient(p.z);
  const PointC gg = g_->conj_gradient(p.z);
  // d/dz of a*conj(Hf v) + b*conj(Hg v) = conj((conj(a) Hf + conj(b) Hg) v).
  const Eigen::MatrixXcd m = std::conj(p.a) * link_->f().hessian(p.z) + std::conj(p.b) * g_->hessian(p.z);
  const int n2 = 2 * dim_;

  RealMatrix jac = RealMatrix::Zero(equations(), unknowns());
  jac.topLeftCorner(n2, n2) = RealMatrix::Identity(n2, n2) - conjugation(dim_) * realify_matrix(m);
  jac.block(0, n2, n2, 1) = -realify(gf);
  jac.block(0, n2 + 1, n2, 1) = -realify(kI * gf);
  jac.block(0, n2 + 2, n2, 1) = -realify(gg);
  jac.block(0, n2 + 3, n2, 1) = -realify(kI * gg);
  jac.block(n2, 0, 3, n2) = ManifoldConstraints(*link_).jacobian(p.z);
  return jac;
}

AugmentedPoint AugmentedSystem::fit_coefficients(const PointC& z) const {
  Eigen::MatrixXcd basis(dim_, 2);
  basis.col(0) = link_->f().conj_gradient(z);
  basis.col(1) = g_->conj_gradient(z);
  Eigen::Vector2cd ab = basis.completeOrthogonalDecomposition().solve(z);
  return {z, ab[0], ab[1]};
}

CurveSystem AugmentedSystem::curve() const {
  CurveSystem sys;
  sys.unknowns = unknowns();
  sys.arc_dims = 2 * dim_;
  sys.residual = [this](const RealVector& x) { return residual(x); };
  sys.jacobian = [this](const RealVector& x) { return jacobian(x); };
  sys.orientation = [this](const RealVector& x, const RealVector& t) {
    const PointC z = complexify(x.head(2 * dim_));
    const PointC dz = complexify(t.head(2 * dim_));
    const Complex hz = g_->value(z);
    const Complex dh = (g_->gradient(z).array() * dz.array()).sum();
    return (std::conj(hz) * dh).imag();
  };
  return sys;
}

PointC random_link_point(const LinkSpec& link, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const int dim = link.ambient_dim();
  for (int attempt = 0; attempt < 100; ++attempt) {
    PointC z(dim);
    for (int j = 0; j < dim; ++j) z[j] = Complex(normal(rng), normal(rng));
    z *= link.epsilon() / z.norm();
    try {
      return project_to_link(z, link);
    } catch (const Error&) {
      continue;
    }
  }
  throw Error(ErrorKind::NonConvergence, "could not sample a link point in 100 attempts");
}

std::vector<AugmentedPoint> seed_singular_points(const LinkSpec& link, const PolyFunction& g,
                                                 int n_samples, std::uint64_t rng_seed,
                                                 const SeedOptions& options) {
  if (link.n() < 2) throw Error(ErrorKind::WrongDimension, "singular sets need n >= 2");
  const AugmentedSystem system(link, g);
  const PolyFunction& f = link.f();
  std::mt19937_64 rng(rng_seed);
  std::vector<AugmentedPoint> seeds;
  int failures = 0;
  double best_defect = std::numeric_limits<double>::infinity();

  auto defect_sq = [&](const PointC& z) {
    const double d = criterion_rank_defect(z, f, g);
    return d * d;
  };

  for (int sample = 0; sample < n_samples; ++sample) {
    PointC z = random_link_point(link, rng);
    try {
      const double h = 1e-6 * link.epsilon();
      for (int iter = 0; iter < options.descent_iterations; ++iter) {
        const double current = defect_sq(z);
        if (std::sqrt(current) < options.descent_target) break;
        const TangentFrame frame = tangent_frame(z, link);
        RealVector grad(frame.dim());
        for (int k = 0; k < frame.dim(); ++k) {
          RealVector u = RealVector::Zero(frame.dim());
          u[k] = h;
          grad[k] = (defect_sq(chart(frame, u, link)) - defect_sq(chart(frame, -u, link))) / (2 * h);
        }
        const double gnorm = grad.norm();
        if (gnorm == 0.0) break;
        bool improved = false;
        double length = 0.2 * link.epsilon();
        for (int back = 0; back < 10 && !improved; ++back, length *= 0.5) {
          PointC trial = chart(frame, -length / gnorm * grad, link);
          if (defect_sq(trial) < current) {
            z = trial;
            improved = true;
          }
        }
        if (!improved) break;
      }

      NewtonResult newton = gauss_newton([&](const RealVector& x) { return system.residual(x); },
                                         [&](const RealVector& x) { return system.jacobian(x); },
                                         system.state(system.fit_coefficients(z)),
                                         options.newton_tol, options.newton_iterations);
      if (!newton.converged || newton.residual > options.accept_residual) {
        ++failures;
        continue;
      }
      AugmentedPoint p = system.point(newton.x);
      const double defect = criterion_rank_defect(p.z, f, g);
      best_defect = std::min(best_defect, defect);
      if (defect > options.accept_defect) {
        ++failures;
        continue;
      }
      const bool duplicate = std::any_of(seeds.begin(), seeds.end(), [&](const AugmentedPoint& s) {
        return (s.z - p.z).norm() <= options.dedup_distance;
      });
      if (!duplicate) seeds.push_back(std::move(p));
    } catch (const Error&) {
      ++failures;
    }
  }
  if (seeds.empty()) {
    throw Error(ErrorKind::EmptyResult,
                "no seed converged out of " + std::to_string(n_samples) + " samples (" +
                    std::to_string(failures) + " failures, best defect " +
                    std::to_string(best_defect) + ")");
  }
  return seeds;
}

CurveTrace trace_singular_curve(const AugmentedPoint& seed, const LinkSpec& link,
                                const PolyFunction& g, const TraceOptions& options) {
  const AugmentedSystem system(link, g);
  const RealVector x0 = system.state(seed);
  const double r0 = system.residual(x0).norm();
  if (r0 > options.seed_tolerance) {
    throw Error(ErrorKind::NotOnLink, "seed residual " + std::to_string(r0) +
                                          " exceeds " + std::to_string(options.seed_tolerance));
  }
  ContinuationOptions copt = options.continuation;
  copt.initial_step *= link.epsilon();
  copt.min_step *= link.epsilon();
  copt.max_step *= link.epsilon();

  const CurvePath path = trace_curve(system.curve(), x0, copt);
  const int m = 2 * link.ambient_dim();
  CurveTrace trace;
  trace.closed = path.closed;
  trace.arc_length = path.arc_length;
  trace.arc_params = path.arc;
  for (std::size_t k = 0; k < path.states.size(); ++k) {
    AugmentedPoint p = system.point(path.states[k]);
    const Complex hz = g.value(p.z);
    trace.image.emplace_back(hz.real(), hz.imag());
    trace.points.push_back(std::move(p));
    trace.tangents.push_back(path.tangents[k].head(m));
  }
  return trace;
}

double distance_to_trace(const PointC& z, const CurveTrace& trace, const LinkSpec& link,
                         const PolyFunction& g) {
  if (trace.points.empty()) return std::numeric_limits<double>::infinity();
  std::size_t best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const double d = (trace.points[k].z - z).norm();
    if (d < best_dist) {
      best_dist = d;
      best = k;
    }
  }
  const AugmentedSystem system(link, g);
  const CurveSystem curve = system.curve();
  const int m = 2 * link.ambient_dim();
  RealVector x = system.state(trace.points[best]);
  // Each pass slides along the tangent to the foot of z and corrects back
  // onto the curve; the foot error shrinks quadratically.
  for (int pass = 0; pass < 4; ++pass) {
    const RealVector t = curve_tangent(curve, x);
    const double along = t.head(m).dot(realify(z) - x.head(m));
    const auto on_curve = correct(curve, x + along * t, t, ContinuationOptions{});
    if (!on_curve) break;
    x = *on_curve;
    if (std::abs(along) <= 1e-15) break;
  }
  return std::min(best_dist, (complexify(x.head(m)) - z).norm());
}

double hausdorff_distance(const CurveTrace& a, const CurveTrace& b, const LinkSpec& link,
                          const PolyFunction& g) {
  double d = 0.0;
  for (const auto& p : a.points) d = std::max(d, distance_to_trace(p.z, b, link, g));
  for (const auto& p : b.points) d = std::max(d, distance_to_trace(p.z, a, link, g));
  return d;
}

std::vector<CurveTrace> collect_components(const std::vector<AugmentedPoint>& seeds,
                                           const LinkSpec& link, const PolyFunction& g,
                                           const TraceOptions& options) {
  constexpr double kSame = 1e-4;
  std::vector<CurveTrace> traces;
  for (const AugmentedPoint& seed : seeds) {
    const bool covered = std::any_of(traces.begin(), traces.end(), [&](const CurveTrace& t) {
      return distance_to_trace(seed.z, t, link, g) <= kSame;
    });
    if (covered) continue;
    CurveTrace trace = trace_singular_curve(seed, link, g, options);
    const bool duplicate = std::any_of(traces.begin(), traces.end(), [&](const CurveTrace& t) {
      return hausdorff_distance(trace, t, link, g) <= kSame;
    });
    if (!duplicate) traces.push_back(std::move(trace));
  }
  std::sort(traces.begin(), traces.end(), [](const CurveTrace& a, const CurveTrace& b) {
    const RealVector ra = realify(a.points.front().z);
    const RealVector rb = realify(b.points.front().z);
    return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
  });
  return traces;
}

DependencyScan gradient_dependency_scan(const LinkSpec& link, const PolyFunction& g, int n_samples,
                                        std::uint64_t rng_seed) {
  const PolyFunction& f = link.f();
  const int dim = link.ambient_dim();
  const int n2 = 2 * dim;
  // Unknowns (realify(z), Re mu, Im mu); equations conj-grad g = mu conj-grad f
  // and the link equations. Overdetermined by one: solutions are exceptional.
  auto residual = [&](const RealVector& x) {
    const PointC z = complexify(x.head(n2));
    const Complex mu(x[n2], x[n2 + 1]);
    RealVector r(n2 + 3);
    r.head(n2) = realify(g.conj_gradient(z) - mu * f.conj_gradient(z));
    r.tail<3>() = link_residual(z, link);
    return r;
  };
  auto jacobian = [&](const RealVector& x) {
    const PointC z = complexify(x.head(n2));
    const Complex mu(x[n2], x[n2 + 1]);
    const PointC gf = f.conj_gradient(z);
    const Eigen::MatrixXcd m = g.hessian(z) - std::conj(mu) * f.hessian(z);
    RealMatrix jac = RealMatrix::Zero(n2 + 3, n2 + 2);
    jac.topLeftCorner(n2, n2) = conjugation(dim) * realify_matrix(m);
    jac.block(0, n2, n2, 1) = -realify(gf);
    jac.block(0, n2 + 1, n2, 1) = -realify(kI * gf);
    jac.block(n2, 0, 3, n2) = ManifoldConstraints(link).jacobian(z);
    return jac;
  };

  std::mt19937_64 rng(rng_seed);
  DependencyScan scan;
  for (int sample = 0; sample < n_samples; ++sample) {
    const PointC z0 = random_link_point(link, rng);
    const PointC gf = f.conj_gradient(z0);
    const Complex mu = hermitian_inner(g.conj_gradient(z0), gf) / std::max(gf.squaredNorm(), 1e-300);
    RealVector x(n2 + 2);
    x.head(n2) = realify(z0);
    x[n2] = mu.real();
    x[n2 + 1] = mu.imag();
    ++scan.samples;
    NewtonResult result = gauss_newton(residual, jacobian, x, 1e-12, 40);
    const PointC z = complexify(result.x.head(n2));
    scan.min_dependency = std::min(scan.min_dependency, gradient_dependency(z0, f, g));
    if (result.x.allFinite() && link_residual(z, link).norm() <= 1e-8) {
      scan.min_dependency = std::min(scan.min_dependency, gradient_dependency(z, f, g));
    }
    if (result.converged && result.residual <= 1e-10) {
      const bool seen = std::any_of(scan.solutions.begin(), scan.solutions.end(),
                                    [&](const PointC& s) { return (s - z).norm() <= 1e-6; });
      if (!seen) scan.solutions.push_back(z);
    }
  }
  return scan;
}

}  // namespace linkfold
