#pragma once

#include "linkfold/types.hpp"

namespace linkfold {

/// Real representation of a complex matrix acting on interleaved realified
/// vectors: realify(M v) == realify_matrix(M) * realify(v).
RealMatrix realify_matrix(const Eigen::MatrixXcd& m);

/// Singular values in descending order.
RealVector singular_values(const RealMatrix& m);

/// Least-norm solution of the (possibly underdetermined) system A x = b,
/// discarding singular directions below `rcond * sigma_max`.
RealVector least_norm_solve(const RealMatrix& a, const RealVector& b, double rcond = 1e-14);

/// Orthonormal basis (as columns) of the orthogonal complement of the
/// span of `constraints` columns. Throws DimensionCollapse when a
/// constraint vector is dependent on the previous ones.
RealMatrix orthogonal_complement(const RealMatrix& constraints, double rank_tol = 1e-10);

/// Orthonormal basis of the null space of a wide matrix (columns), taken
/// from the right singular vectors beyond `rank`.
RealMatrix null_space(const RealMatrix& a, int rank);

}  // namespace linkfold
