#include "gaugelab/elastodynamics.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gaugelab::elasto {

bool ElasticState1D::is_gauge_fixed() const { return (strain_momentum.values().array() == 0.0).all(); }

ElasticState1D make_state(const ScalarField& phi, const ScalarField& dphi_dt, double c_s,
                          std::optional<ScalarField> strain)
{
    if (!(c_s > 0.0))
        throw std::invalid_argument("c_s must be positive");
    phi.check_same_grid(dphi_dt);
    ScalarField rx = strain ? *strain : ScalarField(phi.grid());
    phi.check_same_grid(rx);
    return {phi, (1.0 / (c_s * c_s)) * dphi_dt, std::move(rx), ScalarField(phi.grid()), c_s, 0.0};
}

double courant_number(const ElasticState1D& state, double dt) { return state.c_s * dt / state.grid().spacing(); }

ScalarField hamiltonian_density(const ElasticState1D& state)
{
    if (!state.is_gauge_fixed())
        throw std::invalid_argument("hamiltonian_density: state is not gauge fixed");
    const double dx = state.grid().spacing();
    const double c2 = state.c_s * state.c_s;
    const Eigen::VectorXd& phi = state.phi.values();
    const Index n = phi.size();

    Eigen::VectorXd grad(n);
    grad.head(n - 1) = (phi.tail(n - 1) - phi.head(n - 1)) / dx;
    grad(n - 1) = (phi(0) - phi(n - 1)) / dx;

    // (1/c^2)(d_t phi)^2 = c^2 pi^2
    Eigen::VectorXd dens = 0.5 * (c2 * state.pi_phi.values().array().square() + grad.array().square()).matrix();
    return ScalarField(state.grid(), std::move(dens));
}

double total_energy(const ElasticState1D& state) { return integrate(hamiltonian_density(state)); }

ElasticState1D apply_gauge_fixing(ElasticState1D state)
{
    state.strain_momentum.values().setZero();
    return state;
}

Eigen::VectorXd laplacian(const Eigen::VectorXd& f, double dx)
{
    const Index n = f.size();
    Eigen::VectorXd out(n);
    const double inv = 1.0 / (dx * dx);
    out.segment(1, n - 2) = (f.tail(n - 2) - 2.0 * f.segment(1, n - 2) + f.head(n - 2)) * inv;
    out(0) = (f(1) - 2.0 * f(0) + f(n - 1)) * inv;
    out(n - 1) = (f(0) - 2.0 * f(n - 1) + f(n - 2)) * inv;
    return out;
}

namespace {

void check_params(const ElasticState1D& state, const EvolveParams& params)
{
    if (!(params.dt > 0.0))
        throw std::invalid_argument("evolve: dt must be positive");
    if (params.n_steps < 1)
        throw std::invalid_argument("evolve: n_steps must be at least 1");
    if (params.snapshot_stride < 1)
        throw std::invalid_argument("evolve: snapshot_stride must be at least 1");
    if (courant_number(state, params.dt) > kMaxCourant)
        throw std::invalid_argument("evolve: Courant number c_s dt / dx exceeds 0.9");
    if (!state.is_gauge_fixed())
        throw std::invalid_argument("evolve: state is not gauge fixed");
}

}  // namespace

ElasticState1D evolve_leapfrog(ElasticState1D state, const EvolveParams& params,
                               const std::function<void(const ElasticState1D&)>& observer)
{
    check_params(state, params);
    const double dt = params.dt;
    const double dx = state.grid().spacing();
    const double c2 = state.c_s * state.c_s;
    const double t0 = state.t;

    Eigen::VectorXd phi = state.phi.values();
    Eigen::VectorXd vel = c2 * state.pi_phi.values();

    auto publish = [&](int step) {
        state.phi.values() = phi;
        state.pi_phi.values() = vel / c2;
        state.t = t0 + step * dt;
    };

    if (observer)
        observer(state);
    for (int step = 1; step <= params.n_steps; ++step) {
        vel.noalias() += (0.5 * dt * c2) * laplacian(phi, dx);
        phi.noalias() += dt * vel;
        vel.noalias() += (0.5 * dt * c2) * laplacian(phi, dx);
        if (step % params.snapshot_stride == 0 || step == params.n_steps) {
            publish(step);
            if (observer && step % params.snapshot_stride == 0)
                observer(state);
        }
    }
    return state;
}

Trajectory evolve_leapfrog(const ElasticState1D& state, const EvolveParams& params)
{
    Trajectory traj;
    traj.snapshots.reserve(static_cast<std::size_t>(params.n_steps / std::max(1, params.snapshot_stride) + 1));
    evolve_leapfrog(state, params, [&](const ElasticState1D& s) { traj.snapshots.push_back(s); });
    return traj;
}

namespace {

std::size_t next_pow2(std::size_t n)
{
    std::size_t p = 1;
    while (p < n)
        p <<= 1;
    return p;
}

// Frequency (cycles per sample, in [-1/2, 1/2)) of the spectral peak of s.
double peak_frequency(const Eigen::VectorXcd& s)
{
    const auto len = static_cast<std::size_t>(s.size());
    const std::size_t padded = next_pow2(8 * len);
    Eigen::VectorXcd buf = Eigen::VectorXcd::Zero(static_cast<Index>(padded));
    for (std::size_t t = 0; t < len; ++t) {
        const double w = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * t / static_cast<double>(len - 1)));
        buf(static_cast<Index>(t)) = w * s(static_cast<Index>(t));
    }
    Eigen::FFT<double> fft;
    Eigen::VectorXcd spec(static_cast<Index>(padded));
    fft.fwd(spec, buf);
    const Eigen::VectorXd mag = spec.cwiseAbs();

    Index k = 0;
    mag.maxCoeff(&k);
    const Index p = static_cast<Index>(padded);
    const double a = mag((k - 1 + p) % p), b = mag(k), c = mag((k + 1) % p);
    const double denom = a - 2.0 * b + c;
    const double delta = denom != 0.0 ? 0.5 * (a - c) / denom : 0.0;
    double f = (static_cast<double>(k) + delta) / static_cast<double>(padded);
    if (f >= 0.5)
        f -= 1.0;
    return f;
}

}  // namespace

std::vector<DispersionPoint> measure_dispersion(const Trajectory& trajectory, std::span<const int> modes)
{
    const auto& snaps = trajectory.snapshots;
    if (snaps.size() < 3)
        throw std::invalid_argument("measure_dispersion: need at least three snapshots");
    const double dt = snaps[1].t - snaps[0].t;
    if (!(dt > 0.0))
        throw std::invalid_argument("measure_dispersion: snapshots must advance in time");
    for (std::size_t i = 1; i < snaps.size(); ++i)
        if (std::abs((snaps[i].t - snaps[i - 1].t) - dt) > 1e-9 * dt)
            throw std::invalid_argument("measure_dispersion: snapshots are not uniformly spaced");

    const Grid1D& grid = trajectory.grid();
    const Index n_sites = grid.size();
    const auto n_times = static_cast<Index>(snaps.size());

    // amplitudes(t, bin) with bin = n mod N
    Eigen::MatrixXcd amplitudes(n_times, n_sites);
    Eigen::FFT<double> fft;
    Eigen::VectorXcd out(n_sites);
    for (Index t = 0; t < n_times; ++t) {
        const Eigen::VectorXcd in = snaps[static_cast<std::size_t>(t)].phi.values().cast<cplx>();
        fft.fwd(out, in);
        amplitudes.row(t) = out.transpose() / static_cast<double>(n_sites);
    }
    const double global = amplitudes.cwiseAbs().maxCoeff();

    std::vector<int> selected(modes.begin(), modes.end());
    if (selected.empty())
        for (int m = -static_cast<int>((n_sites - 1) / 2); m <= static_cast<int>(n_sites / 2); ++m)
            selected.push_back(m);

    const double duration = dt * static_cast<double>(n_times - 1);
    std::vector<DispersionPoint> result;
    result.reserve(selected.size());
    for (int m : selected) {
        if (2 * std::abs(m) > n_sites)
            throw std::invalid_argument("measure_dispersion: mode outside the grid band");
        const Index bin = ((m % n_sites) + n_sites) % n_sites;
        const Eigen::VectorXcd series = amplitudes.col(bin);
        const double amp = series.cwiseAbs().maxCoeff();
        DispersionPoint p{m, grid.wavenumber(m), 0.0, amp, true};
        if (amp > 1e-12 * global && amp > 0.0) {
            p.omega = 2.0 * std::numbers::pi * std::abs(peak_frequency(series)) / dt;
            p.resolved = p.omega * duration >= 4.0 * std::numbers::pi;
        }
        result.push_back(p);
    }
    return result;
}

}  // namespace gaugelab::elasto
