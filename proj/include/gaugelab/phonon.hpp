#pragma once

// Second quantization of the phonon field: acoustic mode spectrum, truncated
// occupation-number basis, ladder operators and the field operator
//   phi(x, t) = sum_q (2 L rho omega_q)^{-1/2} [a_q e^{i(qx - w t)} + h.c.].

#include "gaugelab/lattice.hpp"
#include "gaugelab/operators.hpp"

#include <map>
#include <optional>
#include <span>
#include <vector>

namespace gaugelab::phonon {

struct PhononMode {
    int n;         // lattice index, q = 2 pi n / L
    double q;
    double omega;  // c_s |q|
};

struct ModeSet {
    std::vector<PhononMode> modes;  // sorted by q, q = 0 never present
    double rho = 1.0;
    double length = 1.0;

    std::size_t size() const { return modes.size(); }
    /// (2 L rho omega)^{-1/2}
    double amplitude(std::size_t mode) const;
    /// Position of lattice mode n in `modes`, if present.
    std::optional<std::size_t> find(int n) const;
};

/// Rejects an empty list, n = 0, duplicates and |n| >= n_sites / 2.
ModeSet mode_spectrum(const Grid1D& grid, double c_s, std::span<const int> n_list, double rho = 1.0);

using Occupation = std::vector<int>;

inline constexpr std::size_t kDefaultDimensionLimit = 200000;

/// Occupation vectors with n_q <= n_max and, optionally, sum_q n_q <= total_cap,
/// in lexicographic order.
class FockBasis {
public:
    FockBasis(ModeSet modes, int n_max, std::optional<int> total_cap = std::nullopt,
              std::size_t dimension_limit = kDefaultDimensionLimit);

    const ModeSet& modes() const { return modes_; }
    int n_max() const { return n_max_; }
    std::optional<int> total_cap() const { return total_cap_; }
    Index dimension() const { return static_cast<Index>(states_.size()); }
    const Occupation& state(Index i) const { return states_[static_cast<std::size_t>(i)]; }
    std::optional<Index> index_of(const Occupation& occ) const;

    /// Free energy sum_q omega_q n_q of basis state i.
    double energy(Index i) const;

    /// States from which every creation operator stays inside the basis:
    /// n_q <= n_max - 1 for all q and, with a cap, sum n_q <= cap - 1.
    std::vector<Index> protected_states() const;

private:
    ModeSet modes_;
    int n_max_;
    std::optional<int> total_cap_;
    std::vector<Occupation> states_;
    std::map<Occupation, Index> index_;
};

enum class LadderKind { create, annihilate };

/// a_q or a_q^dagger for modes()[mode]. Creation out of the truncated space maps to zero.
Operator ladder_operator(const FockBasis& basis, std::size_t mode, LadderKind kind);

Operator number_operator(const FockBasis& basis, std::size_t mode);

/// sum_q omega_q a_q^dagger a_q, without zero-point energy.
Operator free_hamiltonian(const FockBasis& basis);

/// Heisenberg-picture phonon field at (x, t).
Operator field_operator(const FockBasis& basis, double x, double t);

/// Truncated coherent state of one mode (others in vacuum), renormalized.
Eigen::VectorXcd coherent_state(const FockBasis& basis, std::size_t mode, cplx alpha);

}  // namespace gaugelab::phonon
