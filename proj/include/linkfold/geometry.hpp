#pragma once

#include <vector>

#include "linkfold/polynomial.hpp"
#include "linkfold/types.hpp"

namespace linkfold {

/// The link K_f = f^{-1}(0) ∩ S_ε in C^{n+1}.
class LinkSpec {
 public:
  LinkSpec(ComplexPoly f, int n, double epsilon = 1.0);

  const PolyFunction& f() const { return f_; }
  int n() const { return n_; }
  int ambient_dim() const { return n_ + 1; }
  double epsilon() const { return epsilon_; }

 private:
  PolyFunction f_;
  int n_;
  double epsilon_;
};

/// Sum_j u_j conj(v_j).
Complex hermitian_inner(const PointC& u, const PointC& v);
/// Euclidean inner product of the realified vectors.
double real_inner(const PointC& u, const PointC& v);

/// (Re f(z), Im f(z), |z|^2 - ε^2).
Eigen::Vector3d link_residual(const PointC& z, const LinkSpec& link);

/// Real constraint system: the three link equations plus any number of
/// level conditions Re(w * g(z)) = 0. Holds pointers; the link and the
/// level functions must outlive it.
class ManifoldConstraints {
 public:
  explicit ManifoldConstraints(const LinkSpec& link);

  ManifoldConstraints with_level(const PolyFunction& g, Complex weight) const;

  const LinkSpec& link() const { return *link_; }
  int count() const { return 3 + static_cast<int>(levels_.size()); }
  int real_dim() const { return 2 * link_->ambient_dim(); }
  /// Dimension of the constrained manifold.
  int manifold_dim() const { return real_dim() - count(); }

  RealVector residual(const PointC& z) const;
  /// One row per constraint: the realified gradient.
  RealMatrix jacobian(const PointC& z) const;

 private:
  struct Level {
    const PolyFunction* g;
    Complex weight;
  };
  const LinkSpec* link_;
  std::vector<Level> levels_;
};

struct ProjectOptions {
  double tol = 1e-12;
  int max_iter = 50;
  /// Minimum singular value of the constraint Jacobian.
  double rank_tol = 1e-10;
};

struct Projection {
  PointC z;
  int iterations = 0;
  double residual = 0.0;
};

/// Gauss-Newton with least-norm (Moore-Penrose) correction steps. After the
/// residual drops below tol one more step is taken, so the result is a
/// smooth function of the start point to machine precision.
Projection project(const PointC& z0, const ManifoldConstraints& constraints,
                   const ProjectOptions& options = {});

PointC project_to_link(const PointC& z0, const LinkSpec& link, const ProjectOptions& options = {});

struct TangentFrame {
  PointC base_point;
  /// Orthonormal columns in realified coordinates.
  RealMatrix basis;

  int dim() const { return static_cast<int>(basis.cols()); }
  /// Coefficients of an ambient realified vector in this frame.
  RealVector coordinates(const RealVector& ambient) const { return basis.transpose() * ambient; }
};

TangentFrame tangent_frame(const PointC& p, const ManifoldConstraints& constraints,
                           double on_manifold_tol = 1e-10);
TangentFrame tangent_frame(const PointC& p, const LinkSpec& link);

/// Retraction chart: project(p + basis * u). chart(frame, 0) == p exactly.
PointC chart(const TangentFrame& frame, const RealVector& u, const ManifoldConstraints& constraints,
             const ProjectOptions& options = {});
PointC chart(const TangentFrame& frame, const RealVector& u, const LinkSpec& link);

/// Real gradient of Re(w * g) at z, in realified coordinates.
RealVector level_gradient(const PolyFunction& g, Complex weight, const PointC& z);

}  // namespace linkfold
