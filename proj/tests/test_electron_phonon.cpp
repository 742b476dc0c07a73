#include <doctest.h>

#include "gaugelab/electron_phonon.hpp"
#include "gaugelab/fit.hpp"

#include <Eigen/Eigenvalues>

#include <bit>
#include <algorithm>
#include <cmath>
#include <numbers>

using namespace gaugelab;
using namespace gaugelab::eph;
using std::numbers::pi;

namespace {

System small_system(double g0, int n_k = 3, std::vector<int> ph = {-2, -1, 1, 2}, int cap = 2, double len = 10.0)
{
    const Grid1D grid(16, len);
    const phonon::FockBasis fb(phonon::mode_spectrum(grid, 1.0, ph, 1.0), cap, cap);
    return build_system(JointBasis(ElectronBasis::window(len, n_k), fb), 1.0, g0);
}

// c^dagger_to c_from on an occupation bitmask with Jordan-Wigner signs.
std::optional<std::pair<unsigned, int>> jw_hop(unsigned mask, unsigned to, unsigned from)
{
    if (!(mask >> from & 1u))
        return std::nullopt;
    int sign = std::popcount(mask & ((1u << from) - 1u)) % 2 ? -1 : 1;
    mask &= ~(1u << from);
    if (mask >> to & 1u)
        return std::nullopt;
    if (std::popcount(mask & ((1u << to) - 1u)) % 2)
        sign = -sign;
    return std::pair{mask | (1u << to), sign};
}

}  // namespace

TEST_CASE("fermionic hops agree with Jordan-Wigner strings")
{
    const ElectronBasis b(6.0, {-1, 0, 1}, {Spin::up, Spin::down}, 3);
    CHECK(b.dimension() == 20);
    for (Index i = 0; i < b.dimension(); ++i) {
        unsigned mask = 0;
        for (int o : b.state(i))
            mask |= 1u << o;
        for (unsigned to = 0; to < 6; ++to)
            for (unsigned from = 0; from < 6; ++from) {
                if (to == from)
                    continue;
                const auto got = b.hop(i, to, from);
                const auto want = jw_hop(mask, to, from);
                REQUIRE(got.has_value() == want.has_value());
                if (!got)
                    continue;
                unsigned target = 0;
                for (int o : b.state(got->first))
                    target |= 1u << o;
                CHECK(target == want->first);
                CHECK(got->second == want->second);
            }
    }
}

TEST_CASE("coupling from the lattice potential")
{
    const Grid1D g(64, 5.0);
    const double u0 = 0.8;
    const auto flat = LatticePotential::from_field(ScalarField::sample(g, [&](double) { return u0; }));
    CHECK(coupling_from_potential(flat, 0.0) == doctest::Approx(u0).epsilon(1e-14));

    const double q1 = g.wavenumber(3);
    const auto wave = LatticePotential::from_field(ScalarField::sample(g, [&](double x) { return u0 * std::cos(q1 * x); }));
    CHECK(coupling_from_potential(wave, q1) == doctest::Approx(u0 / 2.0).epsilon(1e-13));
    CHECK(coupling_from_potential(wave, -q1) == doctest::Approx(u0 / 2.0).epsilon(1e-13));
    CHECK(coupling_from_potential(wave, 0.0) <= 1e-14);

    const auto zero = LatticePotential::from_field(ScalarField(g));
    CHECK(coupling_from_potential(zero, q1) == 0.0);
    CHECK_THROWS_AS(coupling_from_potential(wave, 0.5 * q1), std::invalid_argument);

    CHECK_THROWS_AS(LatticePotential::from_table(5.0, {{1, cplx(1.0, 1.0)}, {-1, cplx(1.0, 1.0)}}), std::invalid_argument);
    const auto table = LatticePotential::from_table(5.0, {{1, cplx(1.0, 1.0)}, {-1, cplx(1.0, -1.0)}});
    CHECK(coupling_from_potential(table, g.wavenumber(1)) == doctest::Approx(std::sqrt(2.0) / 5.0));

    // U(q)-table coupling reproduces the constant-g0 operator when |U(q)| / L = g0 / 2
    const double g0 = 0.3, len = 10.0;
    const std::map<int, cplx> tab{{-2, 0.5 * g0 * len}, {-1, 0.5 * g0 * len}, {1, 0.5 * g0 * len}, {2, 0.5 * g0 * len}};
    const auto prof = potential_coupling(LatticePotential::from_table(len, tab));
    const auto a = small_system(g0);
    const auto b = build_system(a.basis, 1.0, prof);
    CHECK(max_abs(Operator(a.h_int - b.h_int)) <= 1e-15);
}

TEST_CASE("interaction matrix element against position-space quadrature")
{
    const double len = 8.0, rho = 1.3, c_s = 0.7, g0 = 0.45;
    const Grid1D grid(256, len);
    const std::vector<int> ns{-2, 1, 3};
    const phonon::FockBasis fb(phonon::mode_spectrum(grid, c_s, ns, rho), 2);
    const JointBasis joint(ElectronBasis::window(len, 5), fb);
    const Operator h = interaction_hamiltonian(joint, g0);

    for (std::size_t qi = 0; qi < ns.size(); ++qi) {
        const auto& mode = fb.modes().modes[qi];
        for (int nq : {1, 2}) {
            for (int k : {-1, 0, 2}) {
                phonon::Occupation occ(ns.size(), 0), lowered(ns.size(), 0);
                occ[qi] = nq;
                lowered[qi] = nq - 1;
                const Index i = joint.single_electron_state(k, Spin::up, occ);
                const Index f = joint.single_electron_state(k + mode.n, Spin::up, lowered);
                const cplx elem = h.coeff(f, i);

                // H density = +(1/2) g0 psi^dagger (d_x phi) psi, with the absorption part of phi
                // contributing sqrt(n_q) (2 L rho w)^{-1/2} e^{iqx}; integrated on the grid
                const double amp = std::sqrt(nq / (2.0 * len * rho * mode.omega));
                const double kf = grid.wavenumber(k + mode.n), ki = grid.wavenumber(k);
                cplx quad = 0.0;
                for (Index j = 0; j < grid.size(); ++j) {
                    const double x = grid.coordinate(j);
                    const cplx psi_f = std::exp(cplx(0.0, kf * x)) / std::sqrt(len);
                    const cplx psi_i = std::exp(cplx(0.0, ki * x)) / std::sqrt(len);
                    const cplx dphi = cplx(0.0, mode.q) * amp * std::exp(cplx(0.0, mode.q * x));
                    quad += std::conj(psi_f) * 0.5 * g0 * dphi * psi_i * grid.spacing();
                }
                CHECK(std::abs(elem - quad) <= 1e-13);
                CHECK(std::abs(std::abs(elem) - 0.5 * g0 * std::abs(mode.q) * amp) <= 1e-14);
            }
        }
    }
}

TEST_CASE("operator invariants")
{
    const auto sys = small_system(0.3);
    CHECK(hermiticity_error(sys.h_int) <= 1e-12);
    CHECK(max_abs(commutator(sys.hamiltonian(), total_momentum_operator(sys.basis))) == 0.0);

    const auto& el = sys.basis.electrons();
    for (Index c = 0; c < sys.h_int.outerSize(); ++c)
        for (Operator::InnerIterator it(sys.h_int, c); it; ++it) {
            CHECK(sys.basis.total_momentum_index(it.row()) == sys.basis.total_momentum_index(it.col()));
            const int from = el.state(sys.basis.electron_part(it.col()))[0];
            const int to = el.state(sys.basis.electron_part(it.row()))[0];
            CHECK(el.orbitals()[static_cast<std::size_t>(from)].spin == el.orbitals()[static_cast<std::size_t>(to)].spin);
        }

    CHECK(small_system(0.0).h_int.nonZeros() == 0);

    // many-electron bases keep the same invariants
    const Grid1D grid(16, 10.0);
    const std::vector<int> ns{-1, 1, 2};
    const phonon::FockBasis fb(phonon::mode_spectrum(grid, 1.0, ns), 1);
    const auto two = build_system(JointBasis(ElectronBasis(10.0, {-1, 0, 1, 2}, {Spin::up, Spin::down}, 2), fb), 1.0, 0.4);
    CHECK(hermiticity_error(two.h_int) <= 1e-12);
    CHECK(max_abs(commutator(two.hamiltonian(), total_momentum_operator(two.basis))) == 0.0);

    CHECK_THROWS_AS(JointBasis(ElectronBasis::window(9.0, 2), fb), std::invalid_argument);
}

TEST_CASE("golden-rule rate")
{
    const auto sys = small_system(0.2, 4, {-3, -2, -1, 1, 2, 3}, 1);
    const Index init = sys.basis.single_electron_state(2, Spin::up);
    const double eta = 0.3;
    const double r1 = golden_rule_rate(sys, init, eta);
    CHECK(r1 > 0.0);
    const auto doubled = build_system(sys.basis, 1.0, 0.4);
    CHECK(golden_rule_rate(doubled, init, eta) / r1 == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(golden_rule_rate(build_system(sys.basis, 1.0, 0.0), init, eta) == 0.0);
    for (Index i = 0; i < sys.basis.dimension(); i += 7)
        CHECK(golden_rule_rate(sys, i, eta) >= 0.0);

    // zero temperature reduces to the vacuum rate
    CHECK(thermal_golden_rule_rate(sys, 2, Spin::up, 0.0, eta) == r1);
    CHECK(thermal_golden_rule_rate(sys, 2, Spin::up, 0.5, eta) > 0.0);
}

TEST_CASE("golden-rule rate matches exact short-time evolution")
{
    const double len = 200.0, c_s = 0.5, g0 = 0.03;
    const Grid1D grid(512, len);
    std::vector<int> ns;
    for (int n = -40; n <= 128; ++n)
        if (n != 0)
            ns.push_back(n);
    const phonon::FockBasis fb(phonon::mode_spectrum(grid, c_s, ns), 1, 1);
    const auto sys = build_system(JointBasis(ElectronBasis::window(len, 80), fb), 1.0, g0);
    const Index init = sys.basis.single_electron_state(48, Spin::up);
    const double gamma = golden_rule_rate(sys, init);

    std::vector<double> t;
    for (int i = 0; i <= 80; ++i)
        t.push_back(i);
    const auto p = transition_probability(sys, init, t);
    CHECK(p.front() <= 1e-12);
    CHECK(*std::max_element(p.begin(), p.end()) <= 0.1);
    CHECK(std::abs(linear_fit(t, p).slope / gamma - 1.0) <= 0.1);
}

TEST_CASE("exact shift versus second order")
{
    const auto zero = small_system(0.0);
    const auto z = exact_shift_vs_pt(zero, zero.basis.single_electron_state(1, Spin::up));
    CHECK(z.exact == 0.0);
    CHECK(z.pt2 == 0.0);

    std::vector<double> g0s{0.2, 0.1, 0.05}, rel;
    for (double g0 : g0s) {
        const auto sys = small_system(g0, 4, {-3, -2, -1, 1, 2, 3}, 2);
        const auto c = exact_shift_vs_pt(sys, sys.basis.single_electron_state(1, Spin::up));
        CHECK(c.comparable);
        rel.push_back(std::abs(c.exact - c.pt2) / std::abs(c.pt2));
    }
    CHECK(std::abs(log_log_slope(g0s, rel) - 2.0) <= 0.2);
}

TEST_CASE("dimension-4 problem against the closed form")
{
    const double len = 7.0, c_s = 1.3, rho = 0.9, m_star = 0.8, g0 = 0.5;
    const Grid1D grid(16, len);
    const std::vector<int> one{1};
    const phonon::FockBasis fb(phonon::mode_spectrum(grid, c_s, one, rho), 1);
    const auto sys = build_system(JointBasis(ElectronBasis(len, {0, 1}, {Spin::up}), fb), m_star, g0);
    REQUIRE(sys.basis.dimension() == 4);

    const double q = 2.0 * pi / len, w = c_s * q, e1 = q * q / (2.0 * m_star);
    const cplx m = 0.5 * g0 * cplx(0.0, q) / std::sqrt(2.0 * len * rho * w);
    // basis order (k0, 0), (k0, 1), (k1, 0), (k1, 1); (k0 + 1 phonon) <-> (k1, vacuum)
    Eigen::Matrix4cd h = Eigen::Matrix4cd::Zero();
    h.diagonal() << 0.0, w, e1, e1 + w;
    h(2, 1) = m;
    h(1, 2) = std::conj(m);
    CHECK((to_dense(sys.hamiltonian()) - h).cwiseAbs().maxCoeff() <= 1e-12);

    // shift of |k1, 0>: the 2x2 block [[e1, m], [m*, w]] by hand
    const double mean = 0.5 * (e1 + w), half = 0.5 * (e1 - w);
    const double split = std::sqrt(half * half + std::norm(m));
    const double level = half > 0 ? mean + split : mean - split;
    const auto c = exact_shift_vs_pt(sys, sys.basis.single_electron_state(1, Spin::up));
    CHECK(std::abs(c.exact - (level - e1)) <= 1e-12);
    CHECK(std::abs(c.pt2 - std::norm(m) / (e1 - w)) <= 1e-15);
}

TEST_CASE("reachable subspace and transition probability")
{
    const auto sys = small_system(0.3, 3, {-1, 1}, 1);
    const Index init = sys.basis.single_electron_state(0, Spin::down);
    const auto reach = reachable_subspace(sys, init);
    CHECK(std::is_sorted(reach.begin(), reach.end()));
    CHECK(std::binary_search(reach.begin(), reach.end(), init));
    for (Index i : reach)
        CHECK(sys.basis.total_momentum_index(i) == 0);
    const std::vector<double> t{0.0, 1.0, 2.0};
    const auto p = transition_probability(sys, init, t);
    CHECK(p[0] <= 1e-14);
    CHECK(p[1] > 0.0);

    // the same probability from a dense propagator on the whole basis
    const Eigen::MatrixXcd u = propagator(to_dense(sys.hamiltonian()), 2.0);
    CHECK(std::abs(p[2] - (1.0 - std::norm(u(init, init)))) <= 1e-12);
}
