#pragma once

// Classical dynamics of the gauge-fixed 1D elastic field: the phonon
// component phi = R_01 obeys the wave equation, the strain R_x = R_11 is
// static data.

#include "gaugelab/lattice.hpp"

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace gaugelab::elasto {

/// phi with conjugate momentum pi_phi = (1/c_s^2) d_t phi, and the strain
/// R_x with its momentum (zeroed by gauge fixing).
struct ElasticState1D {
    ScalarField phi;
    ScalarField pi_phi;
    ScalarField strain;
    ScalarField strain_momentum;
    double c_s = 1.0;
    double t = 0.0;

    const Grid1D& grid() const { return phi.grid(); }
    bool is_gauge_fixed() const;
};

/// State from phi and its time derivative; strain defaults to zero.
ElasticState1D make_state(const ScalarField& phi, const ScalarField& dphi_dt, double c_s,
                          std::optional<ScalarField> strain = std::nullopt);

struct EvolveParams {
    double dt = 0.0;
    int n_steps = 1;
    int snapshot_stride = 1;
};

inline constexpr double kMaxCourant = 0.9;

/// Courant number c_s dt / dx.
double courant_number(const ElasticState1D& state, double dt);

/// 1/2 [ (1/c_s^2)(d_t phi)^2 + (d_x phi)^2 ]. The gradient is the central
/// difference on the staggered half-sites, (phi_{j+1} - phi_j)/dx, which is the
/// energy the leapfrog stencil conserves. Requires a gauge-fixed state.
ScalarField hamiltonian_density(const ElasticState1D& state);

double total_energy(const ElasticState1D& state);

/// Zeroes the strain momentum, keeping the strain itself.
ElasticState1D apply_gauge_fixing(ElasticState1D state);

/// Discrete d_x^2 with the compact three-point stencil.
Eigen::VectorXd laplacian(const Eigen::VectorXd& f, double dx);

/// Kick-drift-kick steps of d_t^2 phi = c_s^2 d_x^2 phi. The strain is
/// never touched. `observer` sees the state after every `snapshot_stride`
/// steps and once before the first step.
ElasticState1D evolve_leapfrog(ElasticState1D state, const EvolveParams& params,
                               const std::function<void(const ElasticState1D&)>& observer);

struct Trajectory {
    std::vector<ElasticState1D> snapshots;  // uniformly spaced in time, first is the initial state

    const Grid1D& grid() const { return snapshots.front().grid(); }
};

/// Stores every snapshot_stride-th state; rejects Courant numbers above
/// kMaxCourant and non gauge-fixed states before stepping.
Trajectory evolve_leapfrog(const ElasticState1D& state, const EvolveParams& params);

struct DispersionPoint {
    int n;
    double q;
    double omega;
    double amplitude;  // peak mode amplitude over the trajectory
    bool resolved;     // omega * T >= 4 pi, or the mode carries no signal
};

/// Dominant temporal frequency of each spatial Fourier mode, from a
/// Hann-windowed, zero-padded spectrum of the mode amplitude with a three-point
/// quadratic peak refinement. Empty `modes` selects every mode.
std::vector<DispersionPoint> measure_dispersion(const Trajectory& trajectory, std::span<const int> modes = {});

}  // namespace gaugelab::elasto
