#include "gaugelab/operators.hpp"

#include <Eigen/Eigenvalues>

#include <stdexcept>

namespace gaugelab {

Eigen::MatrixXcd to_dense(const Operator& op)
{
    if (op.rows() > kDenseLimit || op.cols() > kDenseLimit)
        throw std::length_error("to_dense: dimension above dense limit");
    return Eigen::MatrixXcd(op);
}

double hermiticity_error(const Operator& op)
{
    const Operator diff = op - Operator(op.adjoint());
    return max_abs(diff);
}

double max_abs(const Operator& op)
{
    double m = 0.0;
    for (Eigen::Index k = 0; k < op.outerSize(); ++k)
        for (Operator::InnerIterator it(op, k); it; ++it)
            m = std::max(m, std::abs(it.value()));
    return m;
}

Operator commutator(const Operator& a, const Operator& b)
{
    return Operator(a * b) - Operator(b * a);
}

Operator diagonal_operator(const Eigen::VectorXd& diag)
{
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(diag.size()));
    for (Eigen::Index i = 0; i < diag.size(); ++i)
        if (diag(i) != 0.0)
            t.emplace_back(i, i, diag(i));
    Operator op(diag.size(), diag.size());
    op.setFromTriplets(t.begin(), t.end());
    return op;
}

Eigen::MatrixXcd propagator(const Eigen::MatrixXcd& hamiltonian, double t)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hamiltonian);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("propagator: diagonalization failed");
    const Eigen::VectorXcd phases =
        (es.eigenvalues().cast<std::complex<double>>() * std::complex<double>(0.0, -t)).array().exp();
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

Eigen::MatrixXcd restrict(const Operator& op, const std::vector<Eigen::Index>& rows,
                          const std::vector<Eigen::Index>& cols)
{
    Eigen::MatrixXcd out(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j)
            out(i, j) = op.coeff(rows[i], cols[j]);
    return out;
}

}  // namespace gaugelab
