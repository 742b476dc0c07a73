#pragma once

// Spin-orbit density of a Pauli spinor in 1D transport, its covariant
// extension under local translations, the spin-current density and its
// coupling to strain, -(g/2) eps_ijk J_il R_kl E_j. Also a two-level toy model
// of spin relaxation driven by strain noise through that coupling.

#include "gaugelab/electron_phonon.hpp"
#include "gaugelab/lattice.hpp"

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <vector>

namespace gaugelab::spin {

using eph::Spin;
using Matrix3c = Eigen::Matrix<cplx, 3, 3>;

/// Pauli matrices sigma_x, sigma_y, sigma_z.
const std::array<Eigen::Matrix2cd, 3>& pauli();

/// Totally antisymmetric symbol, indices in {0, 1, 2}.
constexpr int levi_civita(int i, int j, int k)
{
    return (i - j) * (j - k) * (k - i) / 2;
}

struct SpinOrbitConstants {
    double mu_b = 1.0;  // Bohr magneton
    double m = 1.0;     // bare electron mass of the spin-orbit term
};

struct ElectricFieldConfig {
    ScalarField ex, ey, ez;

    static ElectricFieldConfig uniform(const Grid1D& grid, const Eigen::Vector3d& e);
    Eigen::Vector3d at(Index j) const { return {ex.values()(j), ey.values()(j), ez.values()(j)}; }
    const Grid1D& grid() const { return ex.grid(); }
};

/// Space-like symmetric strain R_kl, uniform or one matrix per site.
class StrainTensor3 {
public:
    /// Throws unless r is exactly symmetric.
    explicit StrainTensor3(const Eigen::Matrix3d& r);
    explicit StrainTensor3(std::vector<Eigen::Matrix3d> per_site);

    bool is_uniform() const { return per_site_.size() == 1; }
    const Eigen::Matrix3d& at(Index j) const { return per_site_[is_uniform() ? 0 : static_cast<std::size_t>(j)]; }
    std::size_t sites() const { return per_site_.size(); }

private:
    std::vector<Eigen::Matrix3d> per_site_;
};

/// J_il per site (spin index i, transport index l). Only the l = x column is
/// populated for 1D wavefunctions.
struct SpinCurrentDensity {
    Grid1D grid;
    std::vector<Eigen::Matrix3d> values;
};

/// Bilinear current between two spinors,
/// -(i mu_B / 2m) [ (d_l psi_f^dagger) sigma_i psi_i - psi_f^dagger sigma_i d_l psi_i ].
std::vector<Matrix3c> transition_spin_current(const SpinorField& psi_f, const SpinorField& psi_i,
                                              const SpinOrbitConstants& c);

/// The diagonal case, verified real to 1e-12 before the imaginary part is dropped.
SpinCurrentDensity spin_current(const SpinorField& psi, const SpinOrbitConstants& c);

/// Charge-current analog: the same bilinear with sigma_i replaced by the identity.
ScalarField charge_current(const SpinorField& psi, const SpinOrbitConstants& c);

/// -(g/2) eps_ijk J_il R_kl E_j at one site, through (J R^T) and the Levi-Civita contraction.
template <typename Scalar>
Scalar coupling_contraction(const Eigen::Matrix<Scalar, 3, 3>& j, const Eigen::Matrix3d& r,
                            const Eigen::Vector3d& e, double g)
{
    // m_ik = sum_l J_il R_kl, s_j = sum_ik eps_ijk m_ik
    const Eigen::Matrix<Scalar, 3, 3> m = j * r.transpose().template cast<Scalar>();
    const Scalar s0 = m(2, 1) - m(1, 2);
    const Scalar s1 = m(0, 2) - m(2, 0);
    const Scalar s2 = m(1, 0) - m(0, 1);
    return -0.5 * g * (s0 * e(0) + s1 * e(1) + s2 * e(2));
}

ScalarField strain_spin_coupling_density(const SpinCurrentDensity& j, const StrainTensor3& r,
                                         const ElectricFieldConfig& e, double g);

/// Strain-free spin-orbit density
/// -(i mu_B / 4m) (grad psi^dagger . sigma x E psi - psi^dagger sigma x E . grad psi).
ScalarField spin_orbit_density(const SpinorField& psi, const ElectricFieldConfig& e,
                               const SpinOrbitConstants& c);

/// spin_orbit_density with grad replaced by the covariant derivative
/// D_k = d_k - g R_kl d_l (1D: only d_x acts).
ScalarField covariant_spin_orbit_density(const SpinorField& psi, const StrainTensor3& r,
                                         const ElectricFieldConfig& e, double g, const SpinOrbitConstants& c);

/// Normalized plane wave e^{i k_n x} chi_s / sqrt(L).
SpinorField plane_wave(const Grid1D& grid, int n, Spin s);

/// <k' s'| H'_SO |k s> as the grid integral of the transition coupling density.
cplx spin_flip_matrix_element(const Grid1D& grid, int n, Spin s, int n_prime, Spin s_prime,
                              const Eigen::Matrix3d& r, const Eigen::Vector3d& e, double g,
                              const SpinOrbitConstants& c);

struct RelaxationParams {
    double coupling = 0.1;          // lambda
    double correlation_time = 0.5;  // Ornstein-Uhlenbeck tau_c
    Eigen::Vector3d field{0.0, 0.0, 1.0};
    double strain_amplitude = 1.0;  // stationary std of the strain noise
    double splitting = 1.0;         // Delta
    double dt = 0.05;
    int n_steps = 2000;
    int n_realizations = 2000;
    std::uint64_t seed = 1;
    double fit_start = 1.0;         // decay rate fitted for t >= fit_start
};

struct RelaxationResult {
    std::vector<double> t;
    std::vector<double> sz_mean;
    std::vector<double> sz_stderr;
    double effective_coupling = 0.0;  // lambda |E_z|
    double rate = 0.0;
};

/// Ensemble of spins under H(t) = Delta/2 sigma_z + lambda_eff xi(t) sigma_x, with xi an
/// Ornstein-Uhlenbeck strain fluctuation and lambda_eff = lambda |E_z|. With E along z only
/// sigma_x and sigma_y couple to strain; in-plane E components couple sigma_z, which cannot
/// change <sigma_z>, and are left out. Realization r draws from (seed, r) alone.
/// Rejects dt >= tau_c / 2 and dt * max(Delta / 2, lambda_eff * amplitude) > 0.1.
RelaxationResult relaxation_toy(const RelaxationParams& params);

}  // namespace gaugelab::spin
