#pragma once

// Local translations of spinors, the symmetric elastic potential R_{mu nu}
// in 1+1 dimensions, covariant derivatives, the linearized field strength and
// a numerical first-order covariance check.
//
// Coordinates are x^0 = c_s t and x^1 = x. Time derivatives are never taken
// numerically here: callers supply d/dx^0 of any field that depends on time.

#include "gaugelab/lattice.hpp"

namespace gaugelab::gauge {

struct CouplingConstants {
    double g = 0.1;       // space-sector coupling, g R_x dimensionless
    double c_s = 1.0;     // sound speed
    double m_star = 1.0;  // electron effective mass
    double rho = 1.0;     // mass density

    /// Time-sector coupling g0 = c_s g.
    double g0() const { return c_s * g; }

    /// Throws std::invalid_argument unless c_s, m_star, rho are positive.
    void validate() const;
};

/// Symmetric tensor R_{mu nu}, mu, nu in {0, 1}. Only R_00, R_01 and R_11 are
/// stored, so R_10 is R_01 by construction.
class ElasticTensorField {
public:
    explicit ElasticTensorField(const Grid1D& grid);
    ElasticTensorField(ScalarField r00, ScalarField r01, ScalarField r11);

    const Grid1D& grid() const { return r00_.grid(); }

    /// R_00
    const ScalarField& time_time() const { return r00_; }
    /// R = R_01 = R_10, the phonon potential.
    const ScalarField& mixed() const { return r01_; }
    /// R_x = R_11, the strain potential.
    const ScalarField& space_space() const { return r11_; }

    const ScalarField& component(int mu, int nu) const;

private:
    ScalarField r00_, r01_, r11_;
};

/// Translation parameter a_mu(x). The applied parameter is scale * a_mu.
/// d0_a holds d/dx^0 of each component (zero for static translations).
struct GaugeParameter {
    ScalarField a0;
    ScalarField a1;
    ScalarField d0_a0;
    ScalarField d0_a1;
    double scale = 1.0;

    /// Static, space-only translation a = (0, a1(x)).
    static GaugeParameter spatial(ScalarField a1, double scale = 1.0);

    /// True when every Fourier component above 1e-12 of the largest satisfies |q| dx < 1.
    bool is_resolved() const;
};

enum class Direction { time, space };

/// psi' = [1 - i delta_a p] psi = psi - delta_a * d_x psi.
SpinorField translate_wavefunction(const SpinorField& psi, const ScalarField& delta_a);

/// R'_{mu nu} = R_{mu nu} - d_mu a_nu - d_nu a_mu.
ElasticTensorField gauge_transform(const ElasticTensorField& r, const GaugeParameter& a);

/// space: (1 - g R_x) d_x psi.  time: the potential term -g0 R d_x psi, to be
/// added by the caller to d_t psi.
SpinorField covariant_derivative(const SpinorField& psi, const ElasticTensorField& r,
                                 const CouplingConstants& c, Direction direction);

/// i [gW_0, gW_1] psi with gW_0 psi = -g0 R d_x psi and gW_1 psi = -g R_x d_x psi,
/// i.e. the non-abelian part of the field strength acting on a test spinor.
SpinorField potential_commutator(const SpinorField& psi, const ElasticTensorField& r,
                                 const CouplingConstants& c);

/// Independent components G_{01 beta} of the linear field strength
/// G_{mu nu beta} = d_mu R_{nu beta} - d_nu R_{mu beta}.
struct FieldStrength {
    ScalarField g010;
    ScalarField g011;

    /// Any G_{mu nu beta}; antisymmetry in (mu, nu) holds by construction.
    ScalarField component(int mu, int nu, int beta) const;
};

/// dr_dt holds the time derivative d/dt of each component; d_0 = (1/c_s) d/dt.
FieldStrength field_strength_linear(const ElasticTensorField& r, const ElasticTensorField& dr_dt,
                                    double c_s);

/// Strain potential after a static spatial translation delta_a, chosen so the
/// spatial covariant derivative transforms as D' psi' = tau(delta_a) D psi to first order:
///   R_x' = R_x - (1/g)(1 - g R_x) d_x delta_a - delta_a d_x R_x.
ElasticTensorField covariant_shift(const ElasticTensorField& r, const ScalarField& delta_a,
                                   const CouplingConstants& c);

/// || D'_x psi' - tau(delta_a) D_x psi || with delta_a = eps * scale * a1,
/// psi' = translate_wavefunction(psi, delta_a) and R' from covariant_shift.
/// Scales as eps^2.
double covariance_residual(const SpinorField& psi, const ElasticTensorField& r,
                           const GaugeParameter& a, double eps, const CouplingConstants& c);

/// psi^dagger (-1/2 g0 d_x R) psi per site.
ComplexField symmetrized_interaction_density(const SpinorField& psi, const ScalarField& r,
                                             double g0);

/// psi^dagger (-g0 R d_x psi) per site, the ordering before symmetrization.
ComplexField raw_interaction_density(const SpinorField& psi, const ScalarField& r, double g0);

/// Periodic sawtooth realizing slope * x on [0, L); jumps at the wrap.
ScalarField sawtooth(const Grid1D& grid, double slope);

}  // namespace gaugelab::gauge
