#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "linkfold/singular_set.hpp"

namespace linkfold {

struct FoldOptions {
  /// Finite-difference steps, relative to epsilon.
  double jacobian_step = 1e-5;
  double hessian_step = 1e-4;
  /// sigma_2 / sigma_1 above this means the differential has rank 2.
  double rank_ratio = 1e-6;
  /// sigma_1 at or below this means rank 0.
  double rank_zero = 1e-10;
  /// Eigenvalues within dead_band * |H| of zero are degenerate.
  double dead_band = 1e-5;
};

struct LocalFoldData {
  int rank = 0;
  TangentFrame frame;
  /// Orthonormal kernel of dh, in chart coordinates: (2n-1) x (2n-2).
  RealMatrix kernel;
  /// Unit direction spanning the image of dh.
  Point2 image_dir;
  /// Unit normal to image_dir, pointing away from the reference center.
  Point2 normal;
  double sigma1 = 0.0;
  double sigma2 = 0.0;
};

/// Jacobian of h in a retraction chart at p by Richardson-extrapolated
/// central differences. Throws RankZero / RankTwo unless rank is 1.
LocalFoldData local_fold_data(const PointC& p, const LinkSpec& link, const PolyFunction& g,
                              const FoldOptions& options = {}, const Point2& center = Point2::Zero());

/// Central second differences of `fn` at the origin of R^dim, symmetrized.
RealMatrix finite_difference_hessian(const std::function<double(const RealVector&)>& fn, int dim,
                                     double step);

/// Hessian of u -> <h(chart(p, kernel * u)), normal>, symmetrized.
RealMatrix intrinsic_hessian(const LocalFoldData& data, const LinkSpec& link, const PolyFunction& g,
                             const FoldOptions& options = {});

enum class FoldKind { Definite, Indefinite, Degenerate };

const char* to_string(FoldKind kind);

struct FoldPoint {
  FoldKind kind = FoldKind::Degenerate;
  std::optional<int> absolute_index;
  int negative_eigenvalues = 0;
  RealVector eigenvalues;
};

/// Fold type from the eigenvalues of the transverse quadratic form. The
/// form has eigenvalues.size() = m - p + 1 variables.
FoldPoint classify_eigenvalues(const RealVector& eigenvalues, double dead_band);

FoldPoint classify_fold(const PointC& p, const LinkSpec& link, const PolyFunction& g,
                        const FoldOptions& options = {}, const Point2& center = Point2::Zero());

struct FoldRecord {
  int component_id = 0;
  FoldKind kind = FoldKind::Degenerate;
  std::optional<int> absolute_index;
  int negative_eigenvalues = 0;
  Point2 image_center = Point2::Zero();
  double image_radius_mean = 0.0;
  double image_radius_deviation = 0.0;
  bool embedding_ok = false;
  /// All classified samples agreed on (kind, absolute_index).
  bool consistent = true;
  int classified_points = 0;
  /// Classified samples in trace order.
  std::vector<FoldPoint> samples;
};

/// Classifies up to max_points evenly spaced samples of the trace (all of
/// them when max_points <= 0). A trace meeting the gradient-dependency
/// locus is reported DEGENERATE without classification.
FoldRecord classify_component(const CurveTrace& trace, int component_id, const LinkSpec& link,
                              const PolyFunction& g, const FoldOptions& options = {},
                              int max_points = 0);

/// Algebraic (Kasa) least-squares circle fit; returns the center.
Point2 fit_circle_center(const std::vector<Point2>& points);

/// Smallest image distance between samples that are not neighbours on the
/// closed polyline.
double min_nonadjacent_distance(const std::vector<Point2>& image, bool closed);

struct RoundVerdict {
  bool round = false;
  std::string failed_check;
  Point2 center = Point2::Zero();
  /// Mean radius per component, ascending.
  std::vector<double> radii;
  /// Component indices in ascending radius order.
  std::vector<int> order;
  std::vector<int> winding_numbers;
  double min_separation = 0.0;
};

RoundVerdict verify_round(const std::vector<CurveTrace>& traces, const std::vector<FoldRecord>& records);

/// max |h(alpha z) - alpha h(z)| over random z on K and unit alpha. Throws
/// NotApplicable unless f is homogeneous and g is linear.
double equivariance_error(const LinkSpec& link, const PolyFunction& g, int n_samples,
                          std::uint64_t rng_seed);

}  // namespace linkfold
