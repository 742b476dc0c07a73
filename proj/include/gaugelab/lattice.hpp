#pragma once

// Discretization substrate: a uniform periodic 1D grid, fields living on it,
// central differences, quadrature and discrete Fourier analysis.

#include <Eigen/Core>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace gaugelab {

using Index = Eigen::Index;
using cplx = std::complex<double>;

/// Uniform periodic grid, x_j = j * dx for j in [0, n_sites).
class Grid1D {
public:
    Grid1D(Index n_sites, double length);

    Index size() const { return n_sites_; }
    double length() const { return length_; }
    double spacing() const { return length_ / static_cast<double>(n_sites_); }
    double coordinate(Index j) const { return static_cast<double>(j) * spacing(); }
    Eigen::VectorXd coordinates() const;

    /// Wavenumber 2*pi*n/L of the n-th lattice mode.
    double wavenumber(int n) const { return 2.0 * std::numbers::pi * n / length_; }

    bool operator==(const Grid1D&) const = default;

private:
    Index n_sites_;
    double length_;
};

/// Throws std::invalid_argument for n_sites < 4 or non-positive length.
Grid1D make_grid(Index n_sites, double length);

/// Field of `Components` values of type Scalar per grid site.
template <typename Scalar, int Components = 1>
class Field {
public:
    using scalar_type = Scalar;
    using Values = Eigen::Matrix<Scalar, Eigen::Dynamic, Components>;
    static constexpr int components = Components;

    explicit Field(const Grid1D& grid) : grid_(grid), values_(Values::Zero(grid.size(), Components)) {}

    Field(const Grid1D& grid, Values values) : grid_(grid), values_(std::move(values))
    {
        if (values_.rows() != grid_.size())
            throw std::invalid_argument("field: value count does not match grid size");
        if (!values_.allFinite())
            throw std::invalid_argument("field: non-finite value");
    }

    /// Samples f(x) at every site. f returns Scalar for one component,
    /// or something assignable to a row otherwise.
    template <typename Fn>
    static Field sample(const Grid1D& grid, Fn&& f)
    {
        Values v(grid.size(), Components);
        for (Index j = 0; j < grid.size(); ++j) {
            if constexpr (Components == 1)
                v(j) = f(grid.coordinate(j));
            else
                v.row(j) = f(grid.coordinate(j));
        }
        return Field(grid, std::move(v));
    }

    const Grid1D& grid() const { return grid_; }
    Index size() const { return grid_.size(); }
    const Values& values() const { return values_; }
    Values& values() { return values_; }

    Field& operator+=(const Field& o) { check_same_grid(o); values_ += o.values_; return *this; }
    Field& operator-=(const Field& o) { check_same_grid(o); values_ -= o.values_; return *this; }
    Field& operator*=(Scalar s) { values_ *= s; return *this; }

    void check_same_grid(const Field& o) const
    {
        if (!(grid_ == o.grid_))
            throw std::invalid_argument("field: mismatched grids");
    }

private:
    Grid1D grid_;
    Values values_;
};

using ScalarField = Field<double, 1>;
using ComplexField = Field<cplx, 1>;
/// Two complex components (spin up, spin down) per site.
using SpinorField = Field<cplx, 2>;

template <typename S, int C>
Field<S, C> operator+(Field<S, C> a, const Field<S, C>& b) { return a += b; }
template <typename S, int C>
Field<S, C> operator-(Field<S, C> a, const Field<S, C>& b) { return a -= b; }
template <typename S, int C>
Field<S, C> operator*(S s, Field<S, C> a) { return a *= s; }

inline void require_same_grid(const Grid1D& a, const Grid1D& b)
{
    if (!(a == b))
        throw std::invalid_argument("mismatched grids");
}

/// (f_{j+1} - f_{j-1}) / (2 dx) with periodic wraparound.
template <typename S, int C>
Field<S, C> central_derivative(const Field<S, C>& f)
{
    const Index n = f.size();
    const double inv = 1.0 / (2.0 * f.grid().spacing());
    const auto& v = f.values();
    typename Field<S, C>::Values d(n, C);
    d.middleRows(1, n - 2) = (v.bottomRows(n - 2) - v.topRows(n - 2)) * inv;
    d.row(0) = (v.row(1) - v.row(n - 1)) * inv;
    d.row(n - 1) = (v.row(0) - v.row(n - 2)) * inv;
    return Field<S, C>(f.grid(), std::move(d));
}

/// Riemann sum sum_j f_j dx.
template <typename S>
S integrate(const Field<S, 1>& f)
{
    return f.values().sum() * f.grid().spacing();
}

/// sqrt(dx * sum_j |f_j|^2) over all components.
template <typename S, int C>
double grid_norm(const Field<S, C>& f)
{
    return std::sqrt(f.values().squaredNorm() * f.grid().spacing());
}

/// Pointwise product of a real field with every component of another field.
template <typename S, int C>
Field<S, C> multiply(const ScalarField& a, const Field<S, C>& f)
{
    require_same_grid(a.grid(), f.grid());
    typename Field<S, C>::Values v = f.values();
    for (int c = 0; c < C; ++c)
        v.col(c) = v.col(c).cwiseProduct(a.values().template cast<S>());
    return Field<S, C>(f.grid(), std::move(v));
}

/// Fourier component f_j = sum_n amplitude_n exp(i q_n x_j).
struct FourierMode {
    int n;
    double q;
    cplx amplitude;
};

/// Modes n in (-N/2, N/2], ascending. amplitude_n = (1/N) sum_j f_j exp(-i q_n x_j),
/// so Parseval reads sum_j |f_j|^2 dx = L * sum_n |amplitude_n|^2.
std::vector<FourierMode> dft_modes(const ScalarField& f);
std::vector<FourierMode> dft_modes(const ComplexField& f);

/// Inverse of dft_modes; modes absent from the list are taken as zero.
ComplexField inverse_dft(const Grid1D& grid, const std::vector<FourierMode>& modes);

/// Real part of a complex field; throws if the imaginary part exceeds tol.
ScalarField real_part(const ComplexField& f, double tol = 1e-12);

}  // namespace gaugelab
