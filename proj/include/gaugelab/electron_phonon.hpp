#pragma once

// Electron-phonon interaction induced by the symmetrized coupling
// -1/2 g0 psi^dagger (d_x phi) psi on a plane-wave electron basis:
//   H_I = sum_{k,q,s} [ M(q) c^dagger_{k+q,s} c_{k,s} a_q + h.c. ],
//   M(q) = (g0/2) i q (2 L rho omega_q)^{-1/2}.

#include "gaugelab/lattice.hpp"
#include "gaugelab/operators.hpp"
#include "gaugelab/phonon.hpp"

#include <functional>
#include <map>
#include <optional>
#include <vector>

namespace gaugelab::eph {

enum class Spin { up = 0, down = 1 };

struct Orbital {
    int n;  // k = 2 pi n / L
    double k;
    Spin spin;
};

/// Occupation-number states of n_electrons fermions in a plane-wave window.
class ElectronBasis {
public:
    /// Orbitals k_n for every n in `ns` and every spin in `spins`.
    ElectronBasis(double length, std::vector<int> ns, std::vector<Spin> spins, int n_electrons = 1,
                  std::size_t dimension_limit = phonon::kDefaultDimensionLimit);

    /// |n| <= n_k, both spins.
    static ElectronBasis window(double length, int n_k, int n_electrons = 1);

    double length() const { return length_; }
    int n_electrons() const { return n_electrons_; }
    const std::vector<Orbital>& orbitals() const { return orbitals_; }
    std::optional<std::size_t> orbital_index(int n, Spin s) const;

    Index dimension() const { return static_cast<Index>(states_.size()); }
    /// Occupied orbital indices of state i, ascending.
    const std::vector<int>& state(Index i) const { return states_[static_cast<std::size_t>(i)]; }
    std::optional<Index> index_of(const std::vector<int>& occupied) const;

    /// c^dagger_to c_from acting on state i: target index and fermionic sign,
    /// or nothing when the result vanishes.
    std::optional<std::pair<Index, int>> hop(Index i, std::size_t to, std::size_t from) const;

private:
    double length_;
    int n_electrons_;
    std::vector<Orbital> orbitals_;
    std::map<std::pair<int, int>, std::size_t> orbital_lookup_;
    std::vector<std::vector<int>> states_;
    std::map<std::vector<int>, Index> index_;
};

/// Electron states times phonon states; index = electron * dim_ph + phonon.
class JointBasis {
public:
    /// Rejects incommensurate electron and phonon lengths.
    JointBasis(ElectronBasis electrons, phonon::FockBasis phonons);

    const ElectronBasis& electrons() const { return electrons_; }
    const phonon::FockBasis& phonons() const { return phonons_; }
    Index dimension() const { return electrons_.dimension() * phonons_.dimension(); }
    Index index(Index electron, Index phonon) const { return electron * phonons_.dimension() + phonon; }
    Index electron_part(Index i) const { return i / phonons_.dimension(); }
    Index phonon_part(Index i) const { return i % phonons_.dimension(); }

    /// Single electron in orbital (n, s) with the given phonon occupation (vacuum by default).
    Index single_electron_state(int n, Spin s, std::optional<phonon::Occupation> occ = std::nullopt) const;

    /// Total momentum in units of 2 pi / L: sum of electron and phonon lattice indices.
    long total_momentum_index(Index i) const;

private:
    ElectronBasis electrons_;
    phonon::FockBasis phonons_;
};

/// Fourier data U(q) = int dx e^{-iqx} U(x) of a real lattice potential.
class LatticePotential {
public:
    /// Samples U(q) from U(x) on its grid.
    static LatticePotential from_field(const ScalarField& u);
    /// Tabulated U(q_n); conjugate symmetry U(-q) = U(q)* is checked to 1e-12.
    static LatticePotential from_table(double length, std::map<int, cplx> table);

    double length() const { return length_; }
    /// U(q_n); zero for modes absent from a table.
    cplx fourier(int n) const;

private:
    double length_ = 1.0;
    std::map<int, cplx> table_;
};

/// g0 / 2 identified from the potential: |U(q)| / L (the mean of U(x) at q = 0).
/// q must be a lattice wavenumber 2 pi n / L.
double coupling_from_potential(const LatticePotential& u, double q);

/// g0 for a given phonon mode.
using CouplingProfile = std::function<double(const phonon::PhononMode&)>;

CouplingProfile constant_coupling(double g0);
/// g0(q) = 2 |U(q)| / L
CouplingProfile potential_coupling(LatticePotential u);

/// M(q) for one mode of the basis.
cplx coupling_element(const phonon::ModeSet& modes, std::size_t mode, double g0);

/// Hermitian interaction operator on the joint basis. Scattering out of the
/// electron window is dropped.
Operator interaction_hamiltonian(const JointBasis& joint, const CouplingProfile& g0);
Operator interaction_hamiltonian(const JointBasis& joint, double g0);

/// Kinetic energy k^2 / (2 m*) of each electron state.
Eigen::VectorXd electron_energies(const ElectronBasis& basis, double m_star);

/// H_0 = sum E_k n_k + sum omega_q n_q, diagonal.
Eigen::VectorXd free_energies(const JointBasis& joint, double m_star);

/// Diagonal total-momentum operator (2 pi / L) * total_momentum_index.
Operator total_momentum_operator(const JointBasis& joint);

struct System {
    JointBasis basis;
    Eigen::VectorXd h0;  // diagonal of H_0
    Operator h_int;

    Operator hamiltonian() const;
};

System build_system(JointBasis joint, double m_star, const CouplingProfile& g0);
System build_system(JointBasis joint, double m_star, double g0);

/// Median spacing of the free energies of states coupled to `initial`.
double mean_level_spacing(const System& sys, Index initial);

/// 2 pi sum_f |<f|H_I|i>|^2 delta_eta(E_f - E_i), Gaussian delta of width eta.
/// eta defaults to twice mean_level_spacing.
double golden_rule_rate(const System& sys, Index initial, std::optional<double> eta = std::nullopt);

/// Boltzmann average of golden_rule_rate over the phonon states of the basis,
/// for an electron in orbital (n, s).
double thermal_golden_rule_rate(const System& sys, int n, Spin s, double temperature,
                                std::optional<double> eta = std::nullopt);

/// States reachable from `initial` through nonzero elements of H_I.
std::vector<Index> reachable_subspace(const System& sys, Index initial);

/// 1 - |<i| exp(-iHt) |i>|^2 for each t, by exact diagonalization on the
/// reachable subspace (dimension at most kDenseLimit).
std::vector<double> transition_probability(const System& sys, Index initial, const std::vector<double>& times);

struct ShiftComparison {
    double exact = 0.0;        // eigenvalue with largest overlap on |i>, minus E_i
    double pt2 = 0.0;          // sum_f |V_fi|^2 / (E_i - E_f)
    double min_gap = 0.0;      // min |E_i - E_f| over coupled f
    double max_coupling = 0.0; // max |V_fi|
    bool comparable = true;    // false when min_gap < 10 max_coupling
};

ShiftComparison exact_shift_vs_pt(const System& sys, Index initial);

}  // namespace gaugelab::eph
