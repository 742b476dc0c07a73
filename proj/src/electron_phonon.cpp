#include "gaugelab/electron_phonon.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace gaugelab::eph {

namespace {

double binomial(std::size_t n, std::size_t k)
{
    double r = 1.0;
    for (std::size_t i = 1; i <= k; ++i)
        r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
}

}  // namespace

ElectronBasis::ElectronBasis(double length, std::vector<int> ns, std::vector<Spin> spins, int n_electrons,
                             std::size_t dimension_limit)
    : length_(length), n_electrons_(n_electrons)
{
    if (!(length > 0.0))
        throw std::invalid_argument("electron basis: length must be positive");
    if (ns.empty() || spins.empty())
        throw std::invalid_argument("electron basis: empty orbital set");
    std::sort(ns.begin(), ns.end());
    if (std::adjacent_find(ns.begin(), ns.end()) != ns.end())
        throw std::invalid_argument("electron basis: duplicate wavenumber");
    for (int n : ns)
        for (Spin s : spins) {
            if (orbital_lookup_.count({n, static_cast<int>(s)}))
                throw std::invalid_argument("electron basis: duplicate spin");
            orbital_lookup_.emplace(std::pair{n, static_cast<int>(s)}, orbitals_.size());
            orbitals_.push_back({n, 2.0 * std::numbers::pi * n / length, s});
        }

    const std::size_t n_orb = orbitals_.size();
    if (n_electrons < 0 || static_cast<std::size_t>(n_electrons) > n_orb)
        throw std::invalid_argument("electron basis: electron count out of range");
    if (binomial(n_orb, static_cast<std::size_t>(n_electrons)) > static_cast<double>(dimension_limit))
        throw std::length_error("electron basis: dimension above limit");

    // combinations in lexicographic order
    std::vector<int> comb(static_cast<std::size_t>(n_electrons));
    for (int i = 0; i < n_electrons; ++i)
        comb[static_cast<std::size_t>(i)] = i;
    while (true) {
        index_.emplace(comb, static_cast<Index>(states_.size()));
        states_.push_back(comb);
        int i = n_electrons - 1;
        while (i >= 0 && comb[static_cast<std::size_t>(i)] == static_cast<int>(n_orb) - n_electrons + i)
            --i;
        if (i < 0)
            break;
        ++comb[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < n_electrons; ++j)
            comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
    }
}

ElectronBasis ElectronBasis::window(double length, int n_k, int n_electrons)
{
    if (n_k < 0)
        throw std::invalid_argument("electron basis: n_k must be non-negative");
    std::vector<int> ns;
    for (int n = -n_k; n <= n_k; ++n)
        ns.push_back(n);
    return ElectronBasis(length, std::move(ns), {Spin::up, Spin::down}, n_electrons);
}

std::optional<std::size_t> ElectronBasis::orbital_index(int n, Spin s) const
{
    const auto it = orbital_lookup_.find({n, static_cast<int>(s)});
    if (it == orbital_lookup_.end())
        return std::nullopt;
    return it->second;
}

std::optional<Index> ElectronBasis::index_of(const std::vector<int>& occupied) const
{
    const auto it = index_.find(occupied);
    if (it == index_.end())
        return std::nullopt;
    return it->second;
}

std::optional<std::pair<Index, int>> ElectronBasis::hop(Index i, std::size_t to, std::size_t from) const
{
    std::vector<int> occ = state(i);
    const auto f = std::find(occ.begin(), occ.end(), static_cast<int>(from));
    if (f == occ.end())
        return std::nullopt;
    if (to == from)
        return std::pair{i, 1};
    int sign = ((f - occ.begin()) % 2 == 0) ? 1 : -1;
    occ.erase(f);
    const auto pos = std::lower_bound(occ.begin(), occ.end(), static_cast<int>(to));
    if (pos != occ.end() && *pos == static_cast<int>(to))
        return std::nullopt;
    if ((pos - occ.begin()) % 2 != 0)
        sign = -sign;
    occ.insert(pos, static_cast<int>(to));
    const auto j = index_of(occ);
    if (!j)
        return std::nullopt;
    return std::pair{*j, sign};
}

JointBasis::JointBasis(ElectronBasis electrons, phonon::FockBasis phonons)
    : electrons_(std::move(electrons)), phonons_(std::move(phonons))
{
    const double le = electrons_.length(), lp = phonons_.modes().length;
    if (std::abs(le - lp) > 1e-12 * std::max(le, lp))
        throw std::invalid_argument("joint basis: electron and phonon lengths are incommensurate");
}

Index JointBasis::single_electron_state(int n, Spin s, std::optional<phonon::Occupation> occ) const
{
    if (electrons_.n_electrons() != 1)
        throw std::logic_error("single_electron_state: basis holds more than one electron");
    const auto orb = electrons_.orbital_index(n, s);
    if (!orb)
        throw std::out_of_range("single_electron_state: orbital outside the window");
    const phonon::Occupation vac(phonons_.modes().size(), 0);
    const auto p = phonons_.index_of(occ ? *occ : vac);
    if (!p)
        throw std::out_of_range("single_electron_state: phonon occupation outside the basis");
    const auto e = electrons_.index_of({static_cast<int>(*orb)});
    return index(*e, *p);
}

long JointBasis::total_momentum_index(Index i) const
{
    long total = 0;
    for (int orb : electrons_.state(electron_part(i)))
        total += electrons_.orbitals()[static_cast<std::size_t>(orb)].n;
    const auto& occ = phonons_.state(phonon_part(i));
    for (std::size_t q = 0; q < occ.size(); ++q)
        total += static_cast<long>(phonons_.modes().modes[q].n) * occ[q];
    return total;
}

LatticePotential LatticePotential::from_field(const ScalarField& u)
{
    LatticePotential p;
    p.length_ = u.grid().length();
    for (const auto& m : dft_modes(u))
        p.table_[m.n] = m.amplitude * u.grid().length();
    return p;
}

LatticePotential LatticePotential::from_table(double length, std::map<int, cplx> table)
{
    if (!(length > 0.0))
        throw std::invalid_argument("lattice potential: length must be positive");
    for (const auto& [n, v] : table) {
        const auto it = table.find(-n);
        const cplx partner = it == table.end() ? cplx(0.0) : it->second;
        if (std::abs(partner - std::conj(v)) > 1e-12 * std::max(1.0, std::abs(v)))
            throw std::invalid_argument("lattice potential: U(-q) must equal conj(U(q))");
    }
    LatticePotential p;
    p.length_ = length;
    p.table_ = std::move(table);
    return p;
}

cplx LatticePotential::fourier(int n) const
{
    const auto it = table_.find(n);
    return it == table_.end() ? cplx(0.0) : it->second;
}

double coupling_from_potential(const LatticePotential& u, double q)
{
    const double unit = 2.0 * std::numbers::pi / u.length();
    const double n = std::round(q / unit);
    if (std::abs(q - n * unit) > 1e-9 * std::max(1.0, std::abs(q)))
        throw std::invalid_argument("coupling_from_potential: q is not a lattice wavenumber");
    return std::abs(u.fourier(static_cast<int>(n))) / u.length();
}

CouplingProfile constant_coupling(double g0)
{
    return [g0](const phonon::PhononMode&) { return g0; };
}

CouplingProfile potential_coupling(LatticePotential u)
{
    return [u = std::move(u)](const phonon::PhononMode& m) { return 2.0 * coupling_from_potential(u, m.q); };
}

cplx coupling_element(const phonon::ModeSet& modes, std::size_t mode, double g0)
{
    return 0.5 * g0 * cplx(0.0, modes.modes.at(mode).q) * modes.amplitude(mode);
}

Operator interaction_hamiltonian(const JointBasis& joint, const CouplingProfile& g0)
{
    const auto& el = joint.electrons();
    const auto& ph = joint.phonons();
    const auto& modes = ph.modes();

    std::vector<cplx> m_q(modes.size());
    for (std::size_t q = 0; q < modes.size(); ++q)
        m_q[q] = coupling_element(modes, q, g0(modes.modes[q]));

    // Absorption part c^dagger_{k+q} c_k a_q; the emission part is its adjoint.
    std::vector<Triplet> t;
    for (Index e = 0; e < el.dimension(); ++e) {
        for (Index p = 0; p < ph.dimension(); ++p) {
            const auto& occ = ph.state(p);
            for (std::size_t q = 0; q < modes.size(); ++q) {
                if (occ[q] == 0 || m_q[q] == cplx(0.0))
                    continue;
                phonon::Occupation lowered = occ;
                --lowered[q];
                const Index p2 = *ph.index_of(lowered);
                const double bose = std::sqrt(static_cast<double>(occ[q]));
                for (int from : el.state(e)) {
                    const Orbital& o = el.orbitals()[static_cast<std::size_t>(from)];
                    const auto to = el.orbital_index(o.n + modes.modes[q].n, o.spin);
                    if (!to)
                        continue;  // outside the window
                    const auto h = el.hop(e, *to, static_cast<std::size_t>(from));
                    if (!h)
                        continue;
                    t.emplace_back(joint.index(h->first, p2), joint.index(e, p),
                                   m_q[q] * bose * static_cast<double>(h->second));
                }
            }
        }
    }
    Operator absorb(joint.dimension(), joint.dimension());
    absorb.setFromTriplets(t.begin(), t.end());
    Operator h = absorb + Operator(absorb.adjoint());
    h.prune(cplx(0.0));
    return h;
}

Operator interaction_hamiltonian(const JointBasis& joint, double g0)
{
    return interaction_hamiltonian(joint, constant_coupling(g0));
}

Eigen::VectorXd electron_energies(const ElectronBasis& basis, double m_star)
{
    if (!(m_star > 0.0))
        throw std::invalid_argument("m_star must be positive");
    Eigen::VectorXd e(basis.dimension());
    for (Index i = 0; i < basis.dimension(); ++i) {
        double s = 0.0;
        for (int orb : basis.state(i)) {
            const double k = basis.orbitals()[static_cast<std::size_t>(orb)].k;
            s += k * k / (2.0 * m_star);
        }
        e(i) = s;
    }
    return e;
}

Eigen::VectorXd free_energies(const JointBasis& joint, double m_star)
{
    const Eigen::VectorXd ee = electron_energies(joint.electrons(), m_star);
    const Index dp = joint.phonons().dimension();
    Eigen::VectorXd e(joint.dimension());
    for (Index i = 0; i < joint.electrons().dimension(); ++i)
        for (Index p = 0; p < dp; ++p)
            e(joint.index(i, p)) = ee(i) + joint.phonons().energy(p);
    return e;
}

Operator total_momentum_operator(const JointBasis& joint)
{
    const double unit = 2.0 * std::numbers::pi / joint.electrons().length();
    Eigen::VectorXd d(joint.dimension());
    for (Index i = 0; i < joint.dimension(); ++i)
        d(i) = unit * static_cast<double>(joint.total_momentum_index(i));
    return diagonal_operator(d);
}

Operator System::hamiltonian() const { return diagonal_operator(h0) + h_int; }

System build_system(JointBasis joint, double m_star, const CouplingProfile& g0)
{
    Eigen::VectorXd h0 = free_energies(joint, m_star);
    Operator hi = interaction_hamiltonian(joint, g0);
    return {std::move(joint), std::move(h0), std::move(hi)};
}

System build_system(JointBasis joint, double m_star, double g0)
{
    return build_system(std::move(joint), m_star, constant_coupling(g0));
}

namespace {

void check_state(const System& sys, Index initial)
{
    if (initial < 0 || initial >= sys.basis.dimension())
        throw std::out_of_range("initial state outside the joint basis");
}

}  // namespace

double mean_level_spacing(const System& sys, Index initial)
{
    check_state(sys, initial);
    std::vector<double> e;
    for (Operator::InnerIterator it(sys.h_int, initial); it; ++it)
        e.push_back(sys.h0(it.row()));
    std::sort(e.begin(), e.end());
    std::vector<double> gaps;
    for (std::size_t i = 1; i < e.size(); ++i)
        if (e[i] - e[i - 1] > 1e-12)
            gaps.push_back(e[i] - e[i - 1]);
    if (gaps.empty())
        throw std::domain_error("mean_level_spacing: fewer than two distinct coupled levels");
    std::nth_element(gaps.begin(), gaps.begin() + static_cast<long>(gaps.size() / 2), gaps.end());
    return gaps[gaps.size() / 2];
}

double golden_rule_rate(const System& sys, Index initial, std::optional<double> eta)
{
    check_state(sys, initial);
    if (sys.h_int.col(initial).nonZeros() == 0)
        return 0.0;
    const double width = eta ? *eta : 2.0 * mean_level_spacing(sys, initial);
    if (!(width > 0.0))
        throw std::invalid_argument("golden_rule_rate: broadening must be positive");
    const double norm = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * width);
    double rate = 0.0;
    for (Operator::InnerIterator it(sys.h_int, initial); it; ++it) {
        const double de = sys.h0(it.row()) - sys.h0(initial);
        rate += std::norm(it.value()) * norm * std::exp(-0.5 * de * de / (width * width));
    }
    return 2.0 * std::numbers::pi * rate;
}

double thermal_golden_rule_rate(const System& sys, int n, Spin s, double temperature, std::optional<double> eta)
{
    const auto& ph = sys.basis.phonons();
    if (!(temperature > 0.0))
        return golden_rule_rate(sys, sys.basis.single_electron_state(n, s), eta);
    double z = 0.0, rate = 0.0;
    for (Index p = 0; p < ph.dimension(); ++p) {
        const double w = std::exp(-ph.energy(p) / temperature);
        z += w;
        rate += w * golden_rule_rate(sys, sys.basis.single_electron_state(n, s, ph.state(p)), eta);
    }
    return rate / z;
}

std::vector<Index> reachable_subspace(const System& sys, Index initial)
{
    check_state(sys, initial);
    std::vector<char> seen(static_cast<std::size_t>(sys.basis.dimension()), 0);
    std::vector<Index> order{initial};
    seen[static_cast<std::size_t>(initial)] = 1;
    std::deque<Index> queue{initial};
    while (!queue.empty()) {
        const Index j = queue.front();
        queue.pop_front();
        for (Operator::InnerIterator it(sys.h_int, j); it; ++it) {
            const Index i = it.row();
            if (!seen[static_cast<std::size_t>(i)]) {
                seen[static_cast<std::size_t>(i)] = 1;
                order.push_back(i);
                queue.push_back(i);
            }
        }
    }
    std::sort(order.begin(), order.end());
    return order;
}

namespace {

struct Subspace {
    std::vector<Index> states;
    Index local_initial;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver;
};

Subspace diagonalize_reachable(const System& sys, Index initial)
{
    Subspace s;
    s.states = reachable_subspace(sys, initial);
    if (static_cast<Index>(s.states.size()) > kDenseLimit)
        throw std::length_error("reachable subspace above dense limit");
    s.local_initial = std::lower_bound(s.states.begin(), s.states.end(), initial) - s.states.begin();
    Eigen::MatrixXcd h = restrict(sys.h_int, s.states, s.states);
    for (std::size_t i = 0; i < s.states.size(); ++i)
        h(static_cast<Index>(i), static_cast<Index>(i)) += sys.h0(s.states[i]);
    s.solver.compute(h);
    if (s.solver.info() != Eigen::Success)
        throw std::runtime_error("diagonalization failed");
    return s;
}

}  // namespace

std::vector<double> transition_probability(const System& sys, Index initial, const std::vector<double>& times)
{
    const Subspace s = diagonalize_reachable(sys, initial);
    const Eigen::VectorXd weight = s.solver.eigenvectors().row(s.local_initial).cwiseAbs2().transpose();
    const Eigen::VectorXd& lambda = s.solver.eigenvalues();
    std::vector<double> p;
    p.reserve(times.size());
    for (double t : times) {
        cplx amp = 0.0;
        for (Index n = 0; n < lambda.size(); ++n)
            amp += weight(n) * std::exp(cplx(0.0, -lambda(n) * t));
        p.push_back(1.0 - std::norm(amp));
    }
    return p;
}

ShiftComparison exact_shift_vs_pt(const System& sys, Index initial)
{
    const Subspace s = diagonalize_reachable(sys, initial);
    ShiftComparison out;
    Index best = 0;
    s.solver.eigenvectors().row(s.local_initial).cwiseAbs2().maxCoeff(&best);
    const double ei = sys.h0(initial);
    out.exact = s.solver.eigenvalues()(best) - ei;

    out.min_gap = std::numeric_limits<double>::infinity();
    for (Operator::InnerIterator it(sys.h_int, initial); it; ++it) {
        const double gap = ei - sys.h0(it.row());
        out.pt2 += std::norm(it.value()) / gap;
        out.min_gap = std::min(out.min_gap, std::abs(gap));
        out.max_coupling = std::max(out.max_coupling, std::abs(it.value()));
    }
    out.comparable = out.min_gap >= 10.0 * out.max_coupling;
    return out;
}

}  // namespace gaugelab::eph
