#include "gaugelab/spin_strain.hpp"
#include "gaugelab/fit.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace gaugelab::spin {

const std::array<Eigen::Matrix2cd, 3>& pauli()
{
    static const std::array<Eigen::Matrix2cd, 3> s = [] {
        const cplx i(0.0, 1.0);
        std::array<Eigen::Matrix2cd, 3> m;
        m[0] << 0.0, 1.0, 1.0, 0.0;
        m[1] << 0.0, -i, i, 0.0;
        m[2] << 1.0, 0.0, 0.0, -1.0;
        return m;
    }();
    return s;
}

ElectricFieldConfig ElectricFieldConfig::uniform(const Grid1D& grid, const Eigen::Vector3d& e)
{
    const Eigen::VectorXd one = Eigen::VectorXd::Ones(grid.size());
    return {ScalarField(grid, e(0) * one), ScalarField(grid, e(1) * one), ScalarField(grid, e(2) * one)};
}

namespace {

void check_symmetric(const Eigen::Matrix3d& r)
{
    if (!r.allFinite())
        throw std::invalid_argument("strain: non-finite component");
    if (!(r.array() == r.transpose().array()).all())
        throw std::invalid_argument("strain: tensor must be symmetric");
}

// psi_a^dagger M psi_b at site j
cplx sandwich(const SpinorField::Values& a, const Eigen::Matrix2cd& m, const SpinorField::Values& b, Index j)
{
    return (a.row(j).conjugate() * m * b.row(j).transpose())(0, 0);
}

// Bilinears X - X^* times i are real; the residue is round-off relative to the largest entry.
ScalarField real_density(const ComplexField& f)
{
    const double scale = f.values().size() ? f.values().cwiseAbs().maxCoeff() : 0.0;
    return real_part(f, 1e-12 * std::max(1.0, scale));
}

}  // namespace

StrainTensor3::StrainTensor3(const Eigen::Matrix3d& r) : per_site_{r} { check_symmetric(r); }

StrainTensor3::StrainTensor3(std::vector<Eigen::Matrix3d> per_site) : per_site_(std::move(per_site))
{
    if (per_site_.empty())
        throw std::invalid_argument("strain: no sites");
    for (const auto& r : per_site_)
        check_symmetric(r);
}

std::vector<Matrix3c> transition_spin_current(const SpinorField& psi_f, const SpinorField& psi_i,
                                              const SpinOrbitConstants& c)
{
    require_same_grid(psi_f.grid(), psi_i.grid());
    const auto& f = psi_f.values();
    const auto& i = psi_i.values();
    const auto df = central_derivative(psi_f).values();
    const auto di = central_derivative(psi_i).values();
    const cplx pref(0.0, -c.mu_b / (2.0 * c.m));

    std::vector<Matrix3c> out(static_cast<std::size_t>(psi_i.size()), Matrix3c::Zero());
    for (Index j = 0; j < psi_i.size(); ++j)
        for (int a = 0; a < 3; ++a)
            out[static_cast<std::size_t>(j)](a, 0) =
                pref * (sandwich(df, pauli()[a], i, j) - sandwich(f, pauli()[a], di, j));
    return out;
}

SpinCurrentDensity spin_current(const SpinorField& psi, const SpinOrbitConstants& c)
{
    const auto full = transition_spin_current(psi, psi, c);
    SpinCurrentDensity out{psi.grid(), {}};
    out.values.reserve(full.size());
    for (const auto& m : full) {
        const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
        if (m.imag().cwiseAbs().maxCoeff() > 1e-12 * scale)
            throw std::logic_error("spin_current: imaginary residue above 1e-12");
        out.values.push_back(m.real());
    }
    return out;
}

ScalarField charge_current(const SpinorField& psi, const SpinOrbitConstants& c)
{
    const auto& v = psi.values();
    const auto dv = central_derivative(psi).values();
    const cplx pref(0.0, -c.mu_b / (2.0 * c.m));
    const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
    Eigen::VectorXcd out(psi.size());
    for (Index j = 0; j < psi.size(); ++j)
        out(j) = pref * (sandwich(dv, id, v, j) - sandwich(v, id, dv, j));
    return real_density(ComplexField(psi.grid(), std::move(out)));
}

ScalarField strain_spin_coupling_density(const SpinCurrentDensity& j, const StrainTensor3& r,
                                         const ElectricFieldConfig& e, double g)
{
    require_same_grid(j.grid, e.grid());
    if (!r.is_uniform() && static_cast<Index>(r.sites()) != j.grid.size())
        throw std::invalid_argument("strain: site count does not match grid");
    Eigen::VectorXd out(j.grid.size());
    for (Index s = 0; s < j.grid.size(); ++s)
        out(s) = coupling_contraction<double>(j.values[static_cast<std::size_t>(s)], r.at(s), e.at(s), g);
    return ScalarField(j.grid, std::move(out));
}

namespace {

// (sigma x E)_k = eps_kab sigma_a E_b
Eigen::Matrix2cd sigma_cross(int k, const Eigen::Vector3d& e)
{
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            if (const int eps = levi_civita(k, a, b); eps != 0)
                m += static_cast<double>(eps) * e(b) * pauli()[a];
    return m;
}

// -(i mu_B / 4m) sum_k w_k [ (d psi)^dagger (sigma x E)_k psi - psi^dagger (sigma x E)_k d psi ]
// where w_k = D_k / d_x, the weight of the single available derivative in component k.
ScalarField weighted_spin_orbit(const SpinorField& psi, const std::function<Eigen::Vector3d(Index)>& weights,
                                const ElectricFieldConfig& e, const SpinOrbitConstants& c)
{
    require_same_grid(psi.grid(), e.grid());
    const auto& v = psi.values();
    const auto dv = central_derivative(psi).values();
    const cplx pref(0.0, -c.mu_b / (4.0 * c.m));
    Eigen::VectorXcd out(psi.size());
    for (Index j = 0; j < psi.size(); ++j) {
        const Eigen::Vector3d w = weights(j);
        const Eigen::Vector3d ej = e.at(j);
        cplx acc = 0.0;
        for (int k = 0; k < 3; ++k) {
            if (w(k) == 0.0)
                continue;
            const Eigen::Matrix2cd a = sigma_cross(k, ej);
            acc += w(k) * (sandwich(dv, a, v, j) - sandwich(v, a, dv, j));
        }
        out(j) = pref * acc;
    }
    return real_density(ComplexField(psi.grid(), std::move(out)));
}

}  // namespace

ScalarField spin_orbit_density(const SpinorField& psi, const ElectricFieldConfig& e, const SpinOrbitConstants& c)
{
    return weighted_spin_orbit(psi, [](Index) { return Eigen::Vector3d(1.0, 0.0, 0.0); }, e, c);
}

ScalarField covariant_spin_orbit_density(const SpinorField& psi, const StrainTensor3& r,
                                         const ElectricFieldConfig& e, double g, const SpinOrbitConstants& c)
{
    if (!r.is_uniform() && static_cast<Index>(r.sites()) != psi.size())
        throw std::invalid_argument("strain: site count does not match grid");
    // D_k psi = (delta_kx - g R_kx) d_x psi
    return weighted_spin_orbit(
        psi, [&](Index j) { return Eigen::Vector3d(Eigen::Vector3d::UnitX() - g * r.at(j).col(0)); }, e, c);
}

SpinorField plane_wave(const Grid1D& grid, int n, Spin s)
{
    const double k = grid.wavenumber(n);
    const double norm = 1.0 / std::sqrt(grid.length());
    const int comp = static_cast<int>(s);
    return SpinorField::sample(grid, [&](double x) {
        Eigen::RowVector2cd row = Eigen::RowVector2cd::Zero();
        row(comp) = norm * std::exp(cplx(0.0, k * x));
        return row;
    });
}

cplx spin_flip_matrix_element(const Grid1D& grid, int n, Spin s, int n_prime, Spin s_prime,
                              const Eigen::Matrix3d& r, const Eigen::Vector3d& e, double g,
                              const SpinOrbitConstants& c)
{
    check_symmetric(r);
    const auto j = transition_spin_current(plane_wave(grid, n_prime, s_prime), plane_wave(grid, n, s), c);
    Eigen::VectorXcd dens(grid.size());
    for (Index site = 0; site < grid.size(); ++site)
        dens(site) = coupling_contraction<cplx>(j[static_cast<std::size_t>(site)], r, e, g);
    return integrate(ComplexField(grid, std::move(dens)));
}

RelaxationResult relaxation_toy(const RelaxationParams& p)
{
    if (!(p.correlation_time > 0.0))
        throw std::invalid_argument("relaxation: correlation_time must be positive");
    if (!(p.dt > 0.0) || p.dt >= 0.5 * p.correlation_time)
        throw std::invalid_argument("relaxation: dt must be positive and below correlation_time / 2");
    if (p.n_steps < 1 || p.n_realizations < 2)
        throw std::invalid_argument("relaxation: need n_steps >= 1 and n_realizations >= 2");
    if (!(p.strain_amplitude >= 0.0))
        throw std::invalid_argument("relaxation: strain_amplitude must be non-negative");

    RelaxationResult res;
    res.effective_coupling = std::abs(p.coupling * p.field(2));
    const double noise_scale = res.effective_coupling * p.strain_amplitude;
    if (p.dt * std::max(0.5 * std::abs(p.splitting), noise_scale) > 0.1)
        throw std::invalid_argument("relaxation: dt too large for the precession or noise scale");

    const auto n_t = static_cast<std::size_t>(p.n_steps) + 1;
    std::vector<double> sum(n_t, 0.0), sum_sq(n_t, 0.0);
    const double decay = std::exp(-p.dt / p.correlation_time);
    const double kick = p.strain_amplitude * std::sqrt(1.0 - decay * decay);
    const double hz = 0.5 * p.splitting;

    for (int r = 0; r < p.n_realizations; ++r) {
        if (res.effective_coupling == 0.0) {
            // diagonal Hamiltonian: populations never move
            for (std::size_t n = 0; n < n_t; ++n) {
                sum[n] += 1.0;
                sum_sq[n] += 1.0;
            }
            continue;
        }
        std::seed_seq seq{static_cast<std::uint32_t>(p.seed), static_cast<std::uint32_t>(p.seed >> 32),
                          static_cast<std::uint32_t>(r)};
        std::mt19937_64 rng(seq);
        std::normal_distribution<double> normal(0.0, 1.0);
        double xi = p.strain_amplitude * normal(rng);
        cplx up = 1.0, down = 0.0;
        sum[0] += 1.0;
        sum_sq[0] += 1.0;
        for (std::size_t n = 1; n < n_t; ++n) {
            const double bx = res.effective_coupling * xi;
            const double h = std::hypot(bx, hz);
            const double th = h * p.dt;
            const double cs = std::cos(th), sn = std::sin(th);
            const double nx = h > 0.0 ? bx / h : 0.0, nz = h > 0.0 ? hz / h : 0.0;
            // exp(-i th n.sigma) = cos th - i sin th (nx sigma_x + nz sigma_z)
            const cplx u2 = cplx(cs, -sn * nz) * up + cplx(0.0, -sn * nx) * down;
            const cplx d2 = cplx(0.0, -sn * nx) * up + cplx(cs, sn * nz) * down;
            up = u2;
            down = d2;
            xi = decay * xi + kick * normal(rng);
            const double sz = std::norm(up) - std::norm(down);
            sum[n] += sz;
            sum_sq[n] += sz * sz;
        }
    }

    const double nr = static_cast<double>(p.n_realizations);
    std::vector<double> fit_t, fit_y;
    for (std::size_t n = 0; n < n_t; ++n) {
        const double t = static_cast<double>(n) * p.dt;
        const double mean = sum[n] / nr;
        const double var = std::max(0.0, (sum_sq[n] / nr - mean * mean) * nr / (nr - 1.0));
        res.t.push_back(t);
        res.sz_mean.push_back(mean);
        res.sz_stderr.push_back(std::sqrt(var / nr));
        if (t >= p.fit_start && mean > 0.0) {
            fit_t.push_back(t);
            fit_y.push_back(-std::log(mean));
        }
    }
    if (res.effective_coupling != 0.0 && fit_t.size() >= 2)
        res.rate = linear_fit(fit_t, fit_y).slope;
    return res;
}

}  // namespace gaugelab::spin
