#pragma once

// Sparse complex operators on truncated Hilbert spaces and the few dense
// tools (exponentials, diagonalization) used at desk scale.

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <complex>
#include <vector>

namespace gaugelab {

using Operator = Eigen::SparseMatrix<std::complex<double>>;
using Triplet = Eigen::Triplet<std::complex<double>>;

/// Dense conversion is refused above this dimension.
inline constexpr Eigen::Index kDenseLimit = 4096;

Eigen::MatrixXcd to_dense(const Operator& op);

/// max_ij |A_ij - conj(A_ji)|
double hermiticity_error(const Operator& op);

/// max_ij |A_ij|
double max_abs(const Operator& op);

Operator commutator(const Operator& a, const Operator& b);

/// Diagonal operator with the given real entries.
Operator diagonal_operator(const Eigen::VectorXd& diag);

/// exp(-i H t) for a Hermitian dense H.
Eigen::MatrixXcd propagator(const Eigen::MatrixXcd& hamiltonian, double t);

/// Restriction A[rows, cols].
Eigen::MatrixXcd restrict(const Operator& op, const std::vector<Eigen::Index>& rows,
                          const std::vector<Eigen::Index>& cols);

}  // namespace gaugelab
