#include "gaugelab/gauge_field.hpp"

namespace gaugelab::gauge {

void CouplingConstants::validate() const
{
    if (!(c_s > 0.0))
        throw std::invalid_argument("c_s must be positive");
    if (!(m_star > 0.0))
        throw std::invalid_argument("m_star must be positive");
    if (!(rho > 0.0))
        throw std::invalid_argument("rho must be positive");
    if (!std::isfinite(g))
        throw std::invalid_argument("g must be finite");
}

ElasticTensorField::ElasticTensorField(const Grid1D& grid) : r00_(grid), r01_(grid), r11_(grid) {}

ElasticTensorField::ElasticTensorField(ScalarField r00, ScalarField r01, ScalarField r11)
    : r00_(std::move(r00)), r01_(std::move(r01)), r11_(std::move(r11))
{
    r00_.check_same_grid(r01_);
    r00_.check_same_grid(r11_);
}

const ScalarField& ElasticTensorField::component(int mu, int nu) const
{
    if (mu < 0 || mu > 1 || nu < 0 || nu > 1)
        throw std::out_of_range("tensor index out of range");
    if (mu == 0 && nu == 0)
        return r00_;
    if (mu == 1 && nu == 1)
        return r11_;
    return r01_;
}

GaugeParameter GaugeParameter::spatial(ScalarField a1, double scale)
{
    const Grid1D grid = a1.grid();
    return {ScalarField(grid), std::move(a1), ScalarField(grid), ScalarField(grid), scale};
}

namespace {

bool resolved(const ScalarField& f)
{
    const auto modes = dft_modes(f);
    double peak = 0.0;
    for (const auto& m : modes)
        peak = std::max(peak, std::abs(m.amplitude));
    const double dx = f.grid().spacing();
    for (const auto& m : modes)
        if (std::abs(m.amplitude) > 1e-12 * peak && std::abs(m.q) * dx >= 1.0)
            return false;
    return true;
}

}  // namespace

bool GaugeParameter::is_resolved() const { return resolved(a0) && resolved(a1); }

SpinorField translate_wavefunction(const SpinorField& psi, const ScalarField& delta_a)
{
    require_same_grid(psi.grid(), delta_a.grid());
    return psi - multiply(delta_a, central_derivative(psi));
}

ElasticTensorField gauge_transform(const ElasticTensorField& r, const GaugeParameter& a)
{
    require_same_grid(r.grid(), a.a0.grid());
    require_same_grid(r.grid(), a.a1.grid());
    const double s = a.scale;
    const ScalarField d1_a0 = central_derivative(a.a0);
    const ScalarField d1_a1 = central_derivative(a.a1);

    ScalarField r00 = r.time_time() - (2.0 * s) * a.d0_a0;
    ScalarField r01 = r.mixed() - s * (a.d0_a1 + d1_a0);
    ScalarField r11 = r.space_space() - (2.0 * s) * d1_a1;
    return ElasticTensorField(std::move(r00), std::move(r01), std::move(r11));
}

SpinorField covariant_derivative(const SpinorField& psi, const ElasticTensorField& r,
                                 const CouplingConstants& c, Direction direction)
{
    require_same_grid(psi.grid(), r.grid());
    const SpinorField dpsi = central_derivative(psi);
    if (direction == Direction::space) {
        ScalarField factor(r.grid(), Eigen::VectorXd::Ones(r.grid().size()) - c.g * r.space_space().values());
        return multiply(factor, dpsi);
    }
    return multiply(ScalarField(r.grid(), -c.g0() * r.mixed().values()), dpsi);
}

SpinorField potential_commutator(const SpinorField& psi, const ElasticTensorField& r,
                                 const CouplingConstants& c)
{
    require_same_grid(psi.grid(), r.grid());
    const ScalarField w0(r.grid(), -c.g0() * r.mixed().values());
    const ScalarField w1(r.grid(), -c.g * r.space_space().values());
    auto apply = [](const ScalarField& w, const SpinorField& f) { return multiply(w, central_derivative(f)); };
    SpinorField out = apply(w0, apply(w1, psi)) - apply(w1, apply(w0, psi));
    out *= cplx(0.0, 1.0);
    return out;
}

ScalarField FieldStrength::component(int mu, int nu, int beta) const
{
    if (mu < 0 || mu > 1 || nu < 0 || nu > 1 || beta < 0 || beta > 1)
        throw std::out_of_range("field strength index out of range");
    if (mu == nu)
        return ScalarField(g010.grid());
    const ScalarField& g = beta == 0 ? g010 : g011;
    return mu == 0 ? g : ScalarField(g.grid(), -g.values());
}

FieldStrength field_strength_linear(const ElasticTensorField& r, const ElasticTensorField& dr_dt,
                                    double c_s)
{
    require_same_grid(r.grid(), dr_dt.grid());
    if (!(c_s > 0.0))
        throw std::invalid_argument("c_s must be positive");
    const double inv_c = 1.0 / c_s;
    // G_{01 beta} = d_0 R_{1 beta} - d_1 R_{0 beta}
    ScalarField g010 = inv_c * dr_dt.component(1, 0) - central_derivative(r.component(0, 0));
    ScalarField g011 = inv_c * dr_dt.component(1, 1) - central_derivative(r.component(0, 1));
    return {std::move(g010), std::move(g011)};
}

ElasticTensorField covariant_shift(const ElasticTensorField& r, const ScalarField& delta_a,
                                   const CouplingConstants& c)
{
    require_same_grid(r.grid(), delta_a.grid());
    if (c.g == 0.0)
        throw std::invalid_argument("covariant_shift: g must be nonzero");
    const Eigen::VectorXd& rx = r.space_space().values();
    const Eigen::VectorXd d_da = central_derivative(delta_a).values();
    const Eigen::VectorXd d_rx = central_derivative(r.space_space()).values();
    Eigen::VectorXd shifted = rx - (1.0 / c.g) * (Eigen::VectorXd::Ones(rx.size()) - c.g * rx).cwiseProduct(d_da)
                              - delta_a.values().cwiseProduct(d_rx);
    return ElasticTensorField(r.time_time(), r.mixed(), ScalarField(r.grid(), std::move(shifted)));
}

double covariance_residual(const SpinorField& psi, const ElasticTensorField& r,
                           const GaugeParameter& a, double eps, const CouplingConstants& c)
{
    require_same_grid(psi.grid(), r.grid());
    if (!a.is_resolved())
        throw std::invalid_argument("covariance_residual: gauge parameter not resolved by the grid");
    const ScalarField delta_a = (eps * a.scale) * a.a1;

    const SpinorField psi_t = translate_wavefunction(psi, delta_a);
    const ElasticTensorField r_t = covariant_shift(r, delta_a, c);
    const SpinorField lhs = covariant_derivative(psi_t, r_t, c, Direction::space);
    const SpinorField rhs = translate_wavefunction(covariant_derivative(psi, r, c, Direction::space), delta_a);
    return grid_norm(lhs - rhs);
}

ComplexField symmetrized_interaction_density(const SpinorField& psi, const ScalarField& r, double g0)
{
    require_same_grid(psi.grid(), r.grid());
    const Eigen::VectorXd dr = central_derivative(r).values();
    const Eigen::VectorXd dens = psi.values().rowwise().squaredNorm();
    return ComplexField(r.grid(), (-0.5 * g0 * dr.cwiseProduct(dens)).cast<cplx>());
}

ComplexField raw_interaction_density(const SpinorField& psi, const ScalarField& r, double g0)
{
    require_same_grid(psi.grid(), r.grid());
    const SpinorField dpsi = central_derivative(psi);
    Eigen::VectorXcd out(psi.size());
    for (Index j = 0; j < psi.size(); ++j)
        out(j) = -g0 * r.values()(j) * psi.values().row(j).dot(dpsi.values().row(j));
    return ComplexField(r.grid(), std::move(out));
}

ScalarField sawtooth(const Grid1D& grid, double slope)
{
    return ScalarField::sample(grid, [slope](double x) { return slope * x; });
}

}  // namespace gaugelab::gauge
