#include "gaugelab/lattice.hpp"

#include <unsupported/Eigen/FFT>

namespace gaugelab {

Grid1D::Grid1D(Index n_sites, double length) : n_sites_(n_sites), length_(length)
{
    if (n_sites < 4)
        throw std::invalid_argument("grid: n_sites must be at least 4");
    if (!(length > 0.0) || !std::isfinite(length))
        throw std::invalid_argument("grid: length must be positive and finite");
}

Eigen::VectorXd Grid1D::coordinates() const
{
    Eigen::VectorXd x(n_sites_);
    for (Index j = 0; j < n_sites_; ++j)
        x(j) = coordinate(j);
    return x;
}

Grid1D make_grid(Index n_sites, double length) { return Grid1D(n_sites, length); }

namespace {

std::vector<FourierMode> spectrum(const Grid1D& grid, const Eigen::VectorXcd& values)
{
    const Index n = grid.size();
    Eigen::FFT<double> fft;
    Eigen::VectorXcd out(n);
    fft.fwd(out, values);

    const int lo = -static_cast<int>((n - 1) / 2);
    const int hi = static_cast<int>(n / 2);
    std::vector<FourierMode> modes;
    modes.reserve(static_cast<std::size_t>(n));
    for (int m = lo; m <= hi; ++m) {
        const Index bin = m < 0 ? m + n : m;
        modes.push_back({m, grid.wavenumber(m), out(bin) / static_cast<double>(n)});
    }
    return modes;
}

}  // namespace

std::vector<FourierMode> dft_modes(const ScalarField& f)
{
    return spectrum(f.grid(), f.values().cast<cplx>());
}

std::vector<FourierMode> dft_modes(const ComplexField& f) { return spectrum(f.grid(), f.values()); }

ComplexField inverse_dft(const Grid1D& grid, const std::vector<FourierMode>& modes)
{
    const Index n = grid.size();
    Eigen::VectorXcd bins = Eigen::VectorXcd::Zero(n);
    for (const auto& m : modes) {
        const Index bin = ((m.n % n) + n) % n;
        bins(bin) += m.amplitude * static_cast<double>(n);
    }
    Eigen::FFT<double> fft;
    Eigen::VectorXcd out(n);
    fft.inv(out, bins);
    return ComplexField(grid, std::move(out));
}

ScalarField real_part(const ComplexField& f, double tol)
{
    const double scale = std::max(1.0, f.values().cwiseAbs().maxCoeff());
    if (f.values().imag().cwiseAbs().maxCoeff() > tol * scale)
        throw std::domain_error("real_part: imaginary residue above tolerance");
    return ScalarField(f.grid(), f.values().real());
}

}  // namespace gaugelab
