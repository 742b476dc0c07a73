#include <doctest.h>

#include "gaugelab/fit.hpp"
#include "gaugelab/spin_strain.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace gaugelab;
using namespace gaugelab::spin;
using std::numbers::pi;

namespace {

std::mt19937_64 rng(2024);
std::uniform_real_distribution<double> uni(-1.0, 1.0);

Eigen::Matrix3d random_matrix()
{
    Eigen::Matrix3d m;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            m(i, j) = uni(rng);
    return m;
}

Eigen::Matrix3d random_symmetric()
{
    const Eigen::Matrix3d a = random_matrix();
    return 0.5 * (a + a.transpose());
}

// -(g/2) sum over all 81 (i, j, k, l) of eps_ijk J_il R_kl E_j
template <typename S>
S brute(const Eigen::Matrix<S, 3, 3>& j, const Eigen::Matrix3d& r, const Eigen::Vector3d& e, double g)
{
    S s = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int jj = 0; jj < 3; ++jj)
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l) {
                    const int eps = (i == jj || jj == k || i == k) ? 0
                                    : ((i == 0 && jj == 1) || (i == 1 && jj == 2) || (i == 2 && jj == 0)) ? 1
                                                                                                         : -1;
                    s += static_cast<double>(eps) * j(i, l) * r(k, l) * e(jj);
                }
    return -0.5 * g * s;
}

SpinorField spinor(const Grid1D& g, int n_up, cplx a_up, int n_down, cplx a_down)
{
    return SpinorField::sample(g, [&](double x) {
        return Eigen::RowVector2cd(a_up * std::exp(cplx(0.0, g.wavenumber(n_up) * x)),
                                   a_down * std::exp(cplx(0.0, g.wavenumber(n_down) * x)));
    });
}

const SpinOrbitConstants kSo{1.3, 0.7};

}  // namespace

TEST_CASE("Pauli algebra and the Levi-Civita symbol")
{
    const auto& s = pauli();
    const cplx i(0.0, 1.0);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            Eigen::Matrix2cd expect = (a == b ? 1.0 : 0.0) * Eigen::Matrix2cd::Identity();
            for (int c = 0; c < 3; ++c)
                expect += i * static_cast<double>(levi_civita(a, b, c)) * s[c];
            CHECK((s[a] * s[b] - expect).cwiseAbs().maxCoeff() == 0.0);
        }
    CHECK(levi_civita(0, 1, 2) == 1);
    CHECK(levi_civita(1, 0, 2) == -1);
    CHECK(levi_civita(2, 0, 1) == 1);
    CHECK(levi_civita(1, 1, 2) == 0);
}

TEST_CASE("strain must be symmetric")
{
    Eigen::Matrix3d r = Eigen::Matrix3d::Identity();
    r(0, 1) = 0.1;
    CHECK_THROWS_AS(StrainTensor3{r}, std::invalid_argument);
    r(1, 0) = 0.1;
    CHECK_NOTHROW(StrainTensor3{r});
    CHECK_THROWS_AS(StrainTensor3(std::vector<Eigen::Matrix3d>{}), std::invalid_argument);
}

TEST_CASE("spin current of simple spinors")
{
    const Grid1D g(64, 2.0 * pi);
    const auto flat = spin_current(spinor(g, 0, cplx(0.3, 0.2), 0, cplx(-0.5, 0.1)), kSo);
    for (const auto& j : flat.values)
        CHECK(j.cwiseAbs().maxCoeff() == 0.0);

    const int n = 3;
    const double k = g.wavenumber(n);
    const double k_num = std::sin(k * g.spacing()) / g.spacing();
    // e^{ikx}|up>: J_zx = -(mu_B / m) k_num, the symbolic value with the stencil eigenvalue for k
    const auto up = spin_current(spinor(g, n, 1.0, 0, 0.0), kSo);
    const auto down = spin_current(spinor(g, 0, 0.0, n, 1.0), kSo);
    for (Index j = 0; j < g.size(); j += 5) {
        const auto& ju = up.values[static_cast<std::size_t>(j)];
        CHECK(std::abs(ju(2, 0) + kSo.mu_b * k_num / kSo.m) <= 1e-12);
        CHECK(std::abs(std::abs(ju(2, 0)) - kSo.mu_b * k / kSo.m) <= kSo.mu_b * k * k * k * g.spacing() * g.spacing() / kSo.m);
        CHECK(std::abs(ju(0, 0)) <= 1e-14);
        CHECK(std::abs(ju(1, 0)) <= 1e-14);
        CHECK(ju.rightCols(2).cwiseAbs().maxCoeff() == 0.0);
        CHECK(std::abs(down.values[static_cast<std::size_t>(j)](2, 0) + ju(2, 0)) <= 1e-12);
    }

    // up at +k, down at -k: no charge current, spin currents add
    const cplx h(1.0 / std::sqrt(2.0), 0.0);
    const auto mix = spinor(g, n, h, -n, h);
    const auto jm = spin_current(mix, kSo);
    const auto jc = charge_current(mix, kSo);
    CHECK(jc.values().cwiseAbs().maxCoeff() <= 1e-12);
    for (const auto& m : jm.values)
        CHECK(std::abs(m(2, 0) + kSo.mu_b * k_num / kSo.m) <= 1e-12);
    const auto jc_up = charge_current(spinor(g, n, 1.0, 0, 0.0), kSo);
    CHECK(std::abs(jc_up.values()(0) + kSo.mu_b * k_num / kSo.m) <= 1e-12);
}

TEST_CASE("contraction equals the 81-term sum")
{
    for (int t = 0; t < 200; ++t) {
        const Eigen::Matrix3d j = random_matrix(), r = random_symmetric();
        const Eigen::Vector3d e(uni(rng), uni(rng), uni(rng));
        const double g = uni(rng);
        CHECK(std::abs(coupling_contraction<double>(j, r, e, g) - brute<double>(j, r, e, g)) <= 1e-14);
        const Matrix3c jc = j.cast<cplx>() + cplx(0.0, 1.0) * random_matrix().cast<cplx>();
        CHECK(std::abs(coupling_contraction<cplx>(jc, r, e, g) - brute<cplx>(jc, r, e, g)) <= 1e-14);
    }
}

TEST_CASE("coupling density: vanishing cases and linearity")
{
    const Grid1D g(32, 2.0 * pi);
    const auto psi = SpinorField::sample(g, [](double x) {
        return Eigen::RowVector2cd(std::exp(cplx(0.0, 2.0 * x)) * (1.0 + 0.2 * std::cos(x)), cplx(0.3 * std::sin(x), 0.4));
    });
    const auto j = spin_current(psi, kSo);
    const StrainTensor3 r(random_symmetric());
    const Eigen::Vector3d ev(0.4, -0.7, 0.9);
    const auto e = ElectricFieldConfig::uniform(g, ev);
    const double gc = 0.3;

    CHECK(strain_spin_coupling_density(j, r, ElectricFieldConfig::uniform(g, Eigen::Vector3d::Zero()), gc).values().cwiseAbs().maxCoeff() == 0.0);
    CHECK(strain_spin_coupling_density(j, StrainTensor3(Eigen::Matrix3d::Zero()), e, gc).values().cwiseAbs().maxCoeff() == 0.0);

    // J only in the spin row z, E along z: nothing survives
    SpinCurrentDensity jz{g, {}};
    for (Index s = 0; s < g.size(); ++s) {
        Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
        m.row(2) = Eigen::RowVector3d(uni(rng), uni(rng), uni(rng));
        jz.values.push_back(m);
    }
    const auto ez = ElectricFieldConfig::uniform(g, Eigen::Vector3d(0.0, 0.0, 1.7));
    CHECK(strain_spin_coupling_density(jz, r, ez, gc).values().cwiseAbs().maxCoeff() == 0.0);

    const auto base = strain_spin_coupling_density(j, r, e, gc).values();
    SpinCurrentDensity j2 = j;
    for (auto& m : j2.values)
        m *= 2.0;
    CHECK(strain_spin_coupling_density(j2, r, e, gc).values() == (2.0 * base).eval());
    CHECK(strain_spin_coupling_density(j, StrainTensor3(Eigen::Matrix3d(4.0 * r.at(0))), e, gc).values() == (4.0 * base).eval());
    CHECK(strain_spin_coupling_density(j, r, ElectricFieldConfig::uniform(g, 0.5 * ev), gc).values() == (0.5 * base).eval());
    const auto scaled = strain_spin_coupling_density(j, r, ElectricFieldConfig::uniform(g, 3.0 * ev), gc).values();
    CHECK((scaled - 3.0 * base).cwiseAbs().maxCoeff() <= 1e-14 * std::max(1.0, base.cwiseAbs().maxCoeff()));
}

TEST_CASE("covariant density decomposes into spin-orbit plus strain coupling")
{
    const Grid1D g(48, 3.0);
    for (int c = 0; c < 20; ++c) {
        SpinorField::Values v(g.size(), 2);
        Eigen::VectorXd ex(g.size()), ey(g.size()), ez(g.size());
        std::vector<Eigen::Matrix3d> strain;
        for (Index j = 0; j < g.size(); ++j) {
            v(j, 0) = cplx(uni(rng), uni(rng));
            v(j, 1) = cplx(uni(rng), uni(rng));
            ex(j) = uni(rng);
            ey(j) = uni(rng);
            ez(j) = uni(rng);
            strain.push_back(random_symmetric());
        }
        const SpinorField psi(g, v);
        const ElectricFieldConfig e{ScalarField(g, ex), ScalarField(g, ey), ScalarField(g, ez)};
        const StrainTensor3 r(strain);
        const double gc = 0.4;
        const auto lhs = covariant_spin_orbit_density(psi, r, e, gc, kSo);
        const auto rhs = spin_orbit_density(psi, e, kSo) + strain_spin_coupling_density(spin_current(psi, kSo), r, e, gc);
        CHECK((lhs.values() - rhs.values()).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("spin-orbit density of a plane wave")
{
    // e^{ikx}|up> with E = E_z: (sigma x E)_x = sigma_y E_z, whose up-up element vanishes
    const Grid1D g(32, 2.0 * pi);
    const auto psi = spinor(g, 2, 1.0, 0, 0.0);
    const auto ez = ElectricFieldConfig::uniform(g, Eigen::Vector3d(0.0, 0.0, 1.0));
    CHECK(spin_orbit_density(psi, ez, kSo).values().cwiseAbs().maxCoeff() <= 1e-14);
    // E = E_y: (sigma x E)_x = -sigma_z E_y, density (mu_B / 2m) k_num E_y
    const auto ey = ElectricFieldConfig::uniform(g, Eigen::Vector3d(0.0, 1.0, 0.0));
    const double k_num = std::sin(g.wavenumber(2) * g.spacing()) / g.spacing();
    CHECK((spin_orbit_density(psi, ey, kSo).values().array() - kSo.mu_b * k_num / (2.0 * kSo.m)).abs().maxCoeff() <= 1e-12);
}

TEST_CASE("spin-flip matrix elements")
{
    const Grid1D g(32, 2.0 * pi);
    const Eigen::Vector3d ez(0.0, 0.0, 1.3);
    Eigen::Matrix3d r = Eigen::Matrix3d::Zero();
    r(0, 0) = 0.4;              // R_xx: couples sigma_y
    r(1, 0) = r(0, 1) = -0.25;  // R_yx: couples sigma_x
    const double gc = 0.2;

    CHECK(std::abs(spin_flip_matrix_element(g, 2, Spin::up, 2, Spin::down, r, ez, 0.0, kSo)) == 0.0);

    // independent oracle: plane-wave current J_ix = -(mu / m) k_num <s'|sigma_i|s> for n' = n, zero otherwise
    const int n_k = 3;
    Eigen::MatrixXcd window(2 * (2 * n_k + 1), 2 * (2 * n_k + 1));
    Index row = 0;
    for (int np = -n_k; np <= n_k; ++np)
        for (Spin sp : {Spin::up, Spin::down}) {
            Index col = 0;
            for (int n = -n_k; n <= n_k; ++n)
                for (Spin s : {Spin::up, Spin::down}) {
                    const cplx got = spin_flip_matrix_element(g, n, s, np, sp, r, ez, gc, kSo);
                    window(row, col++) = got;
                    cplx want = 0.0;
                    if (n == np) {
                        const double k_num = std::sin(g.wavenumber(n) * g.spacing()) / g.spacing();
                        Matrix3c j = Matrix3c::Zero();
                        for (int i = 0; i < 3; ++i)
                            j(i, 0) = -kSo.mu_b / kSo.m * k_num * pauli()[i](static_cast<int>(sp), static_cast<int>(s));
                        want = brute<cplx>(j, r, ez, gc);
                    }
                    CHECK(std::abs(got - want) <= 1e-14);
                    if (s == sp)
                        CHECK(std::abs(got) < 1e-14);
                }
            ++row;
        }
    CHECK((window - window.adjoint()).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(std::abs(spin_flip_matrix_element(g, 2, Spin::up, 2, Spin::down, r, ez, gc, kSo)) > 1e-3);

    // only R_3l components: no coupling at all
    Eigen::Matrix3d rz = Eigen::Matrix3d::Zero();
    rz(2, 2) = 0.5;
    rz(2, 0) = rz(0, 2) = 0.3;
    for (Spin s : {Spin::up, Spin::down})
        for (Spin sp : {Spin::up, Spin::down})
            CHECK(std::abs(spin_flip_matrix_element(g, 1, s, 1, sp, rz, ez, gc, kSo)) == 0.0);
}

TEST_CASE("relaxation toy")
{
    RelaxationParams p;
    p.n_steps = 400;
    p.n_realizations = 200;

    SUBCASE("no coupling, no decay")
    {
        p.coupling = 0.0;
        const auto r = relaxation_toy(p);
        CHECK(r.t.size() == 401);
        for (double s : r.sz_mean)
            CHECK(s == 1.0);
        CHECK(r.rate == 0.0);
    }
    SUBCASE("zero field maps to zero coupling")
    {
        p.field = Eigen::Vector3d::Zero();
        const auto r = relaxation_toy(p);
        CHECK(r.effective_coupling == 0.0);
        for (double s : r.sz_mean)
            CHECK(s == 1.0);
    }
    SUBCASE("in-plane field components are ignored")
    {
        p.field = Eigen::Vector3d(5.0, -2.0, 1.0);
        CHECK(relaxation_toy(p).effective_coupling == doctest::Approx(p.coupling));
    }
    SUBCASE("unstable steps are rejected")
    {
        p.dt = 0.3;
        CHECK_THROWS_AS(relaxation_toy(p), std::invalid_argument);
        p.dt = 0.05;
        p.coupling = 10.0;
        CHECK_THROWS_AS(relaxation_toy(p), std::invalid_argument);
    }
    SUBCASE("same seed, same curve; other seed, other curve")
    {
        const auto a = relaxation_toy(p), b = relaxation_toy(p);
        CHECK(a.sz_mean == b.sz_mean);
        p.seed = 99;
        CHECK(relaxation_toy(p).sz_mean != a.sz_mean);
    }
    SUBCASE("decay rate near the weak-coupling estimate")
    {
        p.n_steps = 2000;
        p.n_realizations = 1000;
        const auto r = relaxation_toy(p);
        const double sb = p.coupling * p.strain_amplitude;
        const double tau = p.correlation_time, d = p.splitting;
        const double expect = 4.0 * sb * sb * tau / (1.0 + d * d * tau * tau);
        CHECK(r.rate == doctest::Approx(expect).epsilon(0.15));
        CHECK(r.sz_stderr.back() > 0.0);
    }
}
