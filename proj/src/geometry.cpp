#include "linkfold/geometry.hpp"

#include <Eigen/SVD>

#include "linkfold/linalg.hpp"

namespace linkfold {

namespace {

void check_same_size(const PointC& u, const PointC& v) {
  if (u.size() != v.size()) {
    throw Error(ErrorKind::DimensionMismatch, "vectors of length " + std::to_string(u.size()) +
                                                  " and " + std::to_string(v.size()));
  }
}

void check_point(const PointC& z, const LinkSpec& link) {
  if (z.size() != link.ambient_dim()) {
    throw Error(ErrorKind::DimensionMismatch,
                "point has " + std::to_string(z.size()) + " coordinates, link lives in C^" +
                    std::to_string(link.ambient_dim()));
  }
  if (!all_finite(z)) throw Error(ErrorKind::NonFinite, "point has non-finite coordinates");
}

}  // namespace

LinkSpec::LinkSpec(ComplexPoly f, int n, double epsilon) : n_(n), epsilon_(epsilon) {
  if (n < 1) throw Error(ErrorKind::InvalidLink, "n must be at least 1");
  if (f.n_vars() != n + 1) {
    throw Error(ErrorKind::InvalidLink, "f has " + std::to_string(f.n_vars()) +
                                            " variables, expected " + std::to_string(n + 1));
  }
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw Error(ErrorKind::InvalidLink, "epsilon must be positive");
  }
  if (f.coefficient(Exponents(n + 1, 0)) != 0.0) {
    throw Error(ErrorKind::InvalidLink, "f(0) must vanish");
  }
  f_ = PolyFunction(std::move(f));
}

Complex hermitian_inner(const PointC& u, const PointC& v) {
  check_same_size(u, v);
  Complex sum = 0.0;
  for (Eigen::Index j = 0; j < u.size(); ++j) sum += u[j] * std::conj(v[j]);
  return sum;
}

double real_inner(const PointC& u, const PointC& v) {
  check_same_size(u, v);
  double sum = 0.0;
  for (Eigen::Index j = 0; j < u.size(); ++j) {
    sum += u[j].real() * v[j].real() + u[j].imag() * v[j].imag();
  }
  return sum;
}

Eigen::Vector3d link_residual(const PointC& z, const LinkSpec& link) {
  check_point(z, link);
  const Complex fz = link.f().value(z);
  const double eps = link.epsilon();
  return {fz.real(), fz.imag(), z.squaredNorm() - eps * eps};
}

RealVector level_gradient(const PolyFunction& g, Complex weight, const PointC& z) {
  return realify(std::conj(weight) * g.conj_gradient(z));
}

ManifoldConstraints::ManifoldConstraints(const LinkSpec& link) : link_(&link) {}

ManifoldConstraints ManifoldConstraints::with_level(const PolyFunction& g, Complex weight) const {
  if (g.n_vars() != link_->ambient_dim()) {
    throw Error(ErrorKind::DimensionMismatch, "level function variable count");
  }
  ManifoldConstraints out = *this;
  out.levels_.push_back({&g, weight});
  return out;
}

RealVector ManifoldConstraints::residual(const PointC& z) const {
  RealVector r(count());
  r.head<3>() = link_residual(z, *link_);
  for (std::size_t k = 0; k < levels_.size(); ++k) {
    r[3 + k] = (levels_[k].weight * levels_[k].g->value(z)).real();
  }
  return r;
}

RealMatrix ManifoldConstraints::jacobian(const PointC& z) const {
  check_point(z, *link_);
  RealMatrix jac(count(), real_dim());
  const PointC grad = link_->f().conj_gradient(z);
  jac.row(0) = realify(grad).transpose();
  jac.row(1) = realify(Complex(0.0, 1.0) * grad).transpose();
  jac.row(2) = 2.0 * realify(z).transpose();
  for (std::size_t k = 0; k < levels_.size(); ++k) {
    jac.row(3 + k) = level_gradient(*levels_[k].g, levels_[k].weight, z).transpose();
  }
  return jac;
}

Projection project(const PointC& z0, const ManifoldConstraints& constraints,
                   const ProjectOptions& options) {
  RealVector x = realify(z0);
  PointC z = z0;
  for (int iter = 0; iter <= options.max_iter; ++iter) {
    RealVector r = constraints.residual(z);
    const double norm = r.norm();
    if (!std::isfinite(norm)) throw Error(ErrorKind::NonConvergence, "residual became non-finite");

    RealMatrix jac = constraints.jacobian(z);
    Eigen::JacobiSVD<RealMatrix> svd(jac, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RealVector& s = svd.singularValues();
    if (s[s.size() - 1] < options.rank_tol) {
      throw Error(ErrorKind::RankDeficient, "constraint Jacobian singular value " +
                                                std::to_string(s[s.size() - 1]));
    }
    RealVector step = svd.matrixV() * (s.cwiseInverse().asDiagonal() * (svd.matrixU().transpose() * r));
    x -= step;
    z = complexify(x);
    if (norm <= options.tol) {
      return {z, iter, constraints.residual(z).norm()};
    }
  }
  throw Error(ErrorKind::NonConvergence, "projection did not converge in " +
                                             std::to_string(options.max_iter) + " iterations");
}

PointC project_to_link(const PointC& z0, const LinkSpec& link, const ProjectOptions& options) {
  check_point(z0, link);
  return project(z0, ManifoldConstraints(link), options).z;
}

TangentFrame tangent_frame(const PointC& p, const ManifoldConstraints& constraints,
                           double on_manifold_tol) {
  check_point(p, constraints.link());
  const double res = constraints.residual(p).norm();
  if (res > on_manifold_tol) {
    throw Error(ErrorKind::NotOnLink, "base point residual " + std::to_string(res));
  }
  RealMatrix normals = constraints.jacobian(p).transpose();
  return {p, orthogonal_complement(normals)};
}

TangentFrame tangent_frame(const PointC& p, const LinkSpec& link) {
  return tangent_frame(p, ManifoldConstraints(link));
}

PointC chart(const TangentFrame& frame, const RealVector& u, const ManifoldConstraints& constraints,
             const ProjectOptions& options) {
  if (u.size() != frame.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "chart coordinates of length " +
                                                  std::to_string(u.size()) + ", frame dimension " +
                                                  std::to_string(frame.dim()));
  }
  if (u.isZero(0.0)) return frame.base_point;
  PointC start = complexify(realify(frame.base_point) + frame.basis * u);
  return project(start, constraints, options).z;
}

PointC chart(const TangentFrame& frame, const RealVector& u, const LinkSpec& link) {
  return chart(frame, u, ManifoldConstraints(link));
}

}  // namespace linkfold
