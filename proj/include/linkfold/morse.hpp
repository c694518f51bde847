#pragma once

#include <cstdint>
#include <vector>

#include "linkfold/fold_classify.hpp"

namespace linkfold {

/// The ray L_θ = {t e^{iθ} : t >= 0} in the target, and Q_θ = h^{-1}(L_θ),
/// cut out on K by Im(e^{-iθ} h) = 0 with Re(e^{-iθ} h) >= 0.
struct SliceSpec {
  double theta = 0.0;

  Complex rotation() const { return std::polar(1.0, -theta); }
};

struct CriticalPointRecord {
  PointC point;
  double value = 0.0;
  int morse_index = 0;
  RealVector hessian_eigenvalues;
  /// Norm of the function's gradient along the manifold at `point`.
  double gradient_norm = 0.0;
};

/// Points of the traced S(h) whose image lies on the ray, refined by Newton
/// on the augmented system plus Im(e^{-iθ} h) = 0. Sorted by value.
std::vector<PointC> slice_critical_points(const SliceSpec& slice, const std::vector<CurveTrace>& traces,
                                          const LinkSpec& link, const PolyFunction& g);

/// Morse index of psi = Re(e^{-iθ} h) on Q_θ at p, from a retraction chart
/// of Q_θ. Throws Degenerate on a dead-band eigenvalue.
CriticalPointRecord slice_morse_index(const PointC& p, const SliceSpec& slice, const LinkSpec& link,
                                      const PolyFunction& g, const FoldOptions& options = {});

/// Critical points of eta . h on K. They lie on S(h), so they are located
/// along each trace and then classified with a full chart Hessian.
std::vector<CriticalPointRecord> composed_morse(const Point2& eta, const std::vector<CurveTrace>& traces,
                                                const LinkSpec& link, const PolyFunction& g,
                                                const FoldOptions& options = {});

struct LinkComponent {
  std::vector<PointC> points;
  std::vector<Point2> image;
  bool closed = false;
  double arc_length = 0.0;
  Point2 image_center = Point2::Zero();
  double image_radius_mean = 0.0;
  double image_radius_deviation = 0.0;
};

struct LinkImage {
  std::vector<LinkComponent> components;
  /// Smallest image distance between points of different components.
  double min_component_distance = 0.0;
};

/// For n = 1 the link is a union of circles: traces every component hit by
/// n_samples random link points and records the images under h.
LinkImage trace_image_n1(const LinkSpec& link, const PolyFunction& g, int n_samples,
                         std::uint64_t rng_seed = 42);

}  // namespace linkfold
