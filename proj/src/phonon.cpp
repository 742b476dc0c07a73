#include "gaugelab/phonon.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace gaugelab::phonon {

double ModeSet::amplitude(std::size_t mode) const
{
    return 1.0 / std::sqrt(2.0 * length * rho * modes.at(mode).omega);
}

std::optional<std::size_t> ModeSet::find(int n) const
{
    for (std::size_t i = 0; i < modes.size(); ++i)
        if (modes[i].n == n)
            return i;
    return std::nullopt;
}

ModeSet mode_spectrum(const Grid1D& grid, double c_s, std::span<const int> n_list, double rho)
{
    if (!(c_s > 0.0))
        throw std::invalid_argument("mode_spectrum: c_s must be positive");
    if (!(rho > 0.0))
        throw std::invalid_argument("mode_spectrum: rho must be positive");
    if (n_list.empty())
        throw std::invalid_argument("mode_spectrum: empty mode list");
    std::set<int> seen;
    ModeSet set;
    set.rho = rho;
    set.length = grid.length();
    for (int n : n_list) {
        if (n == 0)
            throw std::invalid_argument("mode_spectrum: zero mode has no finite field amplitude");
        if (2 * static_cast<Index>(std::abs(n)) >= grid.size())
            throw std::invalid_argument("mode_spectrum: |n| must be below n_sites / 2");
        if (!seen.insert(n).second)
            throw std::invalid_argument("mode_spectrum: duplicate mode");
        const double q = grid.wavenumber(n);
        set.modes.push_back({n, q, c_s * std::abs(q)});
    }
    std::sort(set.modes.begin(), set.modes.end(), [](const auto& a, const auto& b) { return a.q < b.q; });
    return set;
}

FockBasis::FockBasis(ModeSet modes, int n_max, std::optional<int> total_cap, std::size_t dimension_limit)
    : modes_(std::move(modes)), n_max_(n_max), total_cap_(total_cap)
{
    if (n_max < 1)
        throw std::invalid_argument("fock basis: n_max must be at least 1");
    if (total_cap && *total_cap < 0)
        throw std::invalid_argument("fock basis: total cap must be non-negative");
    if (modes_.modes.empty())
        throw std::invalid_argument("fock basis: no modes");

    const std::size_t m = modes_.size();
    Occupation occ(m, 0);
    int total = 0;
    // odometer over occupations, last mode fastest: lexicographic order
    while (true) {
        if (!total_cap_ || total <= *total_cap_) {
            if (states_.size() >= dimension_limit)
                throw std::length_error("fock basis: dimension above limit");
            states_.push_back(occ);
        }
        std::size_t pos = m;
        while (pos > 0) {
            --pos;
            const bool room = occ[pos] < n_max_ && (!total_cap_ || total < *total_cap_);
            if (room) {
                ++occ[pos];
                ++total;
                break;
            }
            total -= occ[pos];
            occ[pos] = 0;
            if (pos == 0) {
                pos = m + 1;  // exhausted
                break;
            }
        }
        if (pos == m + 1)
            break;
    }
    for (std::size_t i = 0; i < states_.size(); ++i)
        index_.emplace(states_[i], static_cast<Index>(i));
}

std::optional<Index> FockBasis::index_of(const Occupation& occ) const
{
    const auto it = index_.find(occ);
    if (it == index_.end())
        return std::nullopt;
    return it->second;
}

double FockBasis::energy(Index i) const
{
    const Occupation& occ = state(i);
    double e = 0.0;
    for (std::size_t q = 0; q < occ.size(); ++q)
        e += modes_.modes[q].omega * occ[q];
    return e;
}

std::vector<Index> FockBasis::protected_states() const
{
    std::vector<Index> out;
    for (Index i = 0; i < dimension(); ++i) {
        const Occupation& occ = state(i);
        int total = 0;
        bool ok = true;
        for (int n : occ) {
            total += n;
            ok = ok && n <= n_max_ - 1;
        }
        if (total_cap_)
            ok = ok && total <= *total_cap_ - 1;
        if (ok)
            out.push_back(i);
    }
    return out;
}

Operator ladder_operator(const FockBasis& basis, std::size_t mode, LadderKind kind)
{
    if (mode >= basis.modes().size())
        throw std::out_of_range("ladder_operator: unknown mode");
    std::vector<Triplet> t;
    for (Index i = 0; i < basis.dimension(); ++i) {
        Occupation occ = basis.state(i);
        const int n = occ[mode];
        if (kind == LadderKind::annihilate) {
            if (n == 0)
                continue;
            occ[mode] = n - 1;
            if (auto j = basis.index_of(occ))
                t.emplace_back(*j, i, std::sqrt(static_cast<double>(n)));
        } else {
            occ[mode] = n + 1;
            if (auto j = basis.index_of(occ))
                t.emplace_back(*j, i, std::sqrt(static_cast<double>(n + 1)));
        }
    }
    Operator op(basis.dimension(), basis.dimension());
    op.setFromTriplets(t.begin(), t.end());
    return op;
}

Operator number_operator(const FockBasis& basis, std::size_t mode)
{
    if (mode >= basis.modes().size())
        throw std::out_of_range("number_operator: unknown mode");
    Eigen::VectorXd d(basis.dimension());
    for (Index i = 0; i < basis.dimension(); ++i)
        d(i) = basis.state(i)[mode];
    return diagonal_operator(d);
}

Operator free_hamiltonian(const FockBasis& basis)
{
    Eigen::VectorXd d(basis.dimension());
    for (Index i = 0; i < basis.dimension(); ++i)
        d(i) = basis.energy(i);
    return diagonal_operator(d);
}

Operator field_operator(const FockBasis& basis, double x, double t)
{
    Operator phi(basis.dimension(), basis.dimension());
    const auto& modes = basis.modes();
    for (std::size_t q = 0; q < modes.size(); ++q) {
        const auto& m = modes.modes[q];
        const cplx phase = std::exp(cplx(0.0, m.q * x - m.omega * t));
        const Operator a = ladder_operator(basis, q, LadderKind::annihilate);
        const Operator term = (modes.amplitude(q) * phase) * a;
        phi += term + Operator(term.adjoint());
    }
    return phi;
}

Eigen::VectorXcd coherent_state(const FockBasis& basis, std::size_t mode, cplx alpha)
{
    if (mode >= basis.modes().size())
        throw std::out_of_range("coherent_state: unknown mode");
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(basis.dimension());
    Occupation occ(basis.modes().size(), 0);
    cplx coeff = 1.0;  // alpha^n / sqrt(n!)
    for (int n = 0; n <= basis.n_max(); ++n) {
        occ[mode] = n;
        if (auto i = basis.index_of(occ))
            v(*i) = coeff;
        coeff *= alpha / std::sqrt(static_cast<double>(n + 1));
    }
    return v / v.norm();
}

}  // namespace gaugelab::phonon
