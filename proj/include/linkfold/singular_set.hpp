#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "linkfold/continuation.hpp"
#include "linkfold/geometry.hpp"

namespace linkfold {

/// Columns conj-grad f(z), conj-grad g(z), z; shape (n+1) x 3.
struct CriterionMatrix {
  Eigen::MatrixXcd columns;
};

CriterionMatrix criterion_matrix(const PointC& z, const PolyFunction& f, const PolyFunction& g);

/// Determinant of the 3x3 criterion matrix (n = 2 only), by cofactor
/// expansion along the first column.
Complex criterion_det(const PointC& z, const PolyFunction& f, const PolyFunction& g);

/// sigma_3 / sigma_1 of the complex criterion matrix; 0 when sigma_1 = 0.
double criterion_rank_defect(const PointC& z, const PolyFunction& f, const PolyFunction& g);

/// sigma_2 / sigma_1 of [conj-grad f, conj-grad g]. Small values mean the
/// two gradients are complex-dependent.
double gradient_dependency(const PointC& z, const PolyFunction& f, const PolyFunction& g);

/// Smallest singular value of dh restricted to T_z K, from an orthonormal
/// tangent frame. Independent of the three-vector criterion.
double direct_singularity_test(const PointC& z, const LinkSpec& link, const PolyFunction& g);

/// A point of S(h) together with the coefficients of
/// z = a * conj-grad f(z) + b * conj-grad g(z).
struct AugmentedPoint {
  PointC z;
  Complex a;
  Complex b;
};

/// The system {z - a grad f - b grad g = 0, link equations} in the real
/// unknowns (realify(z), Re a, Im a, Re b, Im b).
class AugmentedSystem {
 public:
  AugmentedSystem(const LinkSpec& link, const PolyFunction& g);

  int unknowns() const { return 2 * dim_ + 4; }
  int equations() const { return 2 * dim_ + 3; }

  RealVector residual(const RealVector& x) const;
  RealMatrix jacobian(const RealVector& x) const;
  RealVector state(const AugmentedPoint& p) const;
  AugmentedPoint point(const RealVector& x) const;
  /// Least-squares (a, b) for a given z.
  AugmentedPoint fit_coefficients(const PointC& z) const;

  /// Curve view; the initial orientation makes the image h turn
  /// counter-clockwise about the origin where possible.
  CurveSystem curve() const;

  const LinkSpec& link() const { return *link_; }
  const PolyFunction& g() const { return *g_; }

 private:
  const LinkSpec* link_;
  const PolyFunction* g_;
  int dim_;
};

struct CurveTrace {
  std::vector<AugmentedPoint> points;
  /// Unit tangents of the z-curve, realified.
  std::vector<RealVector> tangents;
  std::vector<double> arc_params;
  std::vector<Point2> image;
  bool closed = false;
  double arc_length = 0.0;

  std::size_t size() const { return points.size(); }
};

struct SeedOptions {
  int descent_iterations = 25;
  double descent_target = 1e-3;
  int newton_iterations = 40;
  double newton_tol = 1e-13;
  double accept_residual = 1e-10;
  double accept_defect = 1e-8;
  double dedup_distance = 1e-4;
};

/// Random link points driven onto S(h): descent on the squared criterion
/// defect in a retraction chart, then least-norm Newton on the augmented
/// system. Deterministic in rng_seed. Throws EmptyResult if nothing
/// converges.
std::vector<AugmentedPoint> seed_singular_points(const LinkSpec& link, const PolyFunction& g,
                                                 int n_samples, std::uint64_t rng_seed,
                                                 const SeedOptions& options = {});

struct TraceOptions {
  ContinuationOptions continuation;
  /// Steps are given relative to epsilon.
  double seed_tolerance = 1e-10;
};

CurveTrace trace_singular_curve(const AugmentedPoint& seed, const LinkSpec& link,
                                const PolyFunction& g, const TraceOptions& options = {});

/// Distance from z to the traced curve, by correcting onto the curve near
/// the closest stored sample.
double distance_to_trace(const PointC& z, const CurveTrace& trace, const LinkSpec& link,
                         const PolyFunction& g);

double hausdorff_distance(const CurveTrace& a, const CurveTrace& b, const LinkSpec& link,
                          const PolyFunction& g);

/// Traces every seed not already covered, merges duplicates (Hausdorff
/// distance <= 1e-4) and sorts by the realified first point.
std::vector<CurveTrace> collect_components(const std::vector<AugmentedPoint>& seeds,
                                           const LinkSpec& link, const PolyFunction& g,
                                           const TraceOptions& options = {});

/// Search for link points where conj-grad f and conj-grad g are complex
/// dependent (the locus the tracer does not handle).
struct DependencyScan {
  std::vector<PointC> solutions;
  /// Smallest gradient_dependency value seen at a link point (samples and
  /// Newton results that landed on the link).
  double min_dependency = 1.0;
  int samples = 0;
};

DependencyScan gradient_dependency_scan(const LinkSpec& link, const PolyFunction& g, int n_samples,
                                        std::uint64_t rng_seed);

/// Gaussian sample in R^{2n+2} projected onto the link; retries on failure.
PointC random_link_point(const LinkSpec& link, std::mt19937_64& rng);

}  // namespace linkfold
