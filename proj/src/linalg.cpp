#include "linkfold/linalg.hpp"

#include <Eigen/SVD>

namespace linkfold {

RealMatrix realify_matrix(const Eigen::MatrixXcd& m) {
  RealMatrix out(2 * m.rows(), 2 * m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double a = m(i, j).real();
      const double b = m(i, j).imag();
      out(2 * i, 2 * j) = a;
      out(2 * i, 2 * j + 1) = -b;
      out(2 * i + 1, 2 * j) = b;
      out(2 * i + 1, 2 * j + 1) = a;
    }
  }
  return out;
}

RealVector singular_values(const RealMatrix& m) {
  Eigen::JacobiSVD<RealMatrix> svd(m);
  return svd.singularValues();
}

RealVector least_norm_solve(const RealMatrix& a, const RealVector& b, double rcond) {
  Eigen::JacobiSVD<RealMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RealVector& s = svd.singularValues();
  const double cutoff = s.size() > 0 ? rcond * s[0] : 0.0;
  RealVector ub = svd.matrixU().transpose() * b;
  for (Eigen::Index k = 0; k < s.size(); ++k) ub[k] = s[k] > cutoff ? ub[k] / s[k] : 0.0;
  return svd.matrixV() * ub;
}

RealMatrix orthogonal_complement(const RealMatrix& constraints, double rank_tol) {
  const Eigen::Index dim = constraints.rows();
  const Eigen::Index k = constraints.cols();
  RealMatrix q(dim, dim);
  Eigen::Index filled = 0;

  // Modified Gram-Schmidt with one re-orthogonalization pass.
  auto orthogonalize = [&](RealVector v) {
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index c = 0; c < filled; ++c) v -= q.col(c).dot(v) * q.col(c);
    }
    return v;
  };

  for (Eigen::Index c = 0; c < k; ++c) {
    RealVector v = orthogonalize(constraints.col(c));
    double norm = v.norm();
    if (norm < rank_tol) {
      throw Error(ErrorKind::DimensionCollapse,
                  "constraint vector " + std::to_string(c) + " is dependent (residual norm " +
                      std::to_string(norm) + ")");
    }
    q.col(filled++) = v / norm;
  }

  // Complete with coordinate vectors, always taking the one that survives
  // projection best.
  std::vector<bool> used(dim, false);
  while (filled < dim) {
    Eigen::Index best = -1;
    double best_norm = -1.0;
    RealVector best_v;
    for (Eigen::Index e = 0; e < dim; ++e) {
      if (used[e]) continue;
      RealVector v = orthogonalize(RealVector::Unit(dim, e));
      double norm = v.norm();
      if (norm > best_norm + 1e-12) {
        best_norm = norm;
        best = e;
        best_v = std::move(v);
      }
    }
    if (best < 0 || best_norm < rank_tol) {
      throw Error(ErrorKind::DimensionCollapse, "could not complete orthonormal basis");
    }
    used[best] = true;
    q.col(filled++) = best_v / best_norm;
  }
  return q.rightCols(dim - k);
}

RealMatrix null_space(const RealMatrix& a, int rank) {
  Eigen::JacobiSVD<RealMatrix> svd(a, Eigen::ComputeFullV);
  return svd.matrixV().rightCols(a.cols() - rank);
}

}  // namespace linkfold
