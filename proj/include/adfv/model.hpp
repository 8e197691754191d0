#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace adfv {

using ScalarFn = std::function<double(double)>;

/// Configuration problems (bad energy family, invalid regularisation, ...).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A potential together with its first two derivatives.
/// Builtins carry analytic derivatives; parsed expressions fall back to
/// 4th-order central differences with step max(1e-5, 1e-5*|x|).
struct Potential {
    ScalarFn f;
    ScalarFn d1;
    ScalarFn d2;
    std::string descr = "zero";

    double operator()(double x) const { return f(x); }
};

Potential zero_potential();
Potential quadratic_potential(double a);                       // a*x^2/2
Potential double_well_potential();                             // x^4/4 - x^2/2
Potential gaussian_potential(double a, double sigma);          // -a*exp(-x^2/(2 sigma^2))
Potential power_law_potential(double a, double b);             // |x|^a/a - |x|^b/b
Potential morse_potential(double cr, double lr, double ca, double la);
Potential expression_potential(const std::string& src);
Potential expression_potential(const std::string& src, const std::string& d1_src);

/// 4th-order central difference of f at x with the documented step rule.
double central_derivative(const ScalarFn& f, double x);

enum class EnergyKind { PorousMedium, Boltzmann, Custom };

/// Internal energy density H with derivatives.
/// PorousMedium: H(s) = s^m/(m-1), m > 1.  Boltzmann: H(s) = s*log(s) - s,
/// extended by continuity with H(0) = 0.
struct EnergyFamily {
    EnergyKind kind = EnergyKind::PorousMedium;
    double m = 2.0;  // porous-medium exponent, ignored otherwise
    ScalarFn H;
    ScalarFn Hp;   // H'
    ScalarFn Hpp;  // H''

    /// H'(0) finite? (false for Boltzmann: log 0 = -inf)
    bool hp_finite_at_zero = true;
};

EnergyFamily porous_medium_energy(double m);
EnergyFamily boltzmann_energy();
/// Custom family from expression triples; H' and H'' are cross-checked against
/// numerical differentiation on a log-spaced sample grid (rel. tol 1e-6).
EnergyFamily custom_energy(const std::string& h_src, const std::string& hp_src,
                           const std::string& hpp_src);

/// Convex K with s*K''(s) = H''(s) (exactly for eps = 0, else K''(s) = H''(s)/(s+eps)),
/// shifted by a linear function so that K and K' are bounded below by 0 on the
/// sampled range. Differences K'(y)-K'(x) are unaffected by the shift.
struct AuxiliaryFunctional {
    ScalarFn K;
    ScalarFn Kp;  // K'
    double lower_bound = 0.0;  // C_K on the sampled range
    double epsilon = 0.0;
    bool kp_finite_at_zero = true;
};

/// Closed forms: m > 2 gives K(s) = m*s^(m-1)/((m-1)(m-2)); m = 2 gives
/// K(s) = 2*(s*log s - s) through the relaxed integrability route. For eps > 0
/// the quadrature table K''(s) = H''(s)/(s+eps) anchored at K(1) = K'(1) = 0 is
/// cached on a log-spaced grid with monotone Hermite interpolation.
/// eps = 0 with H''(s)/s non-integrable at 0 (Boltzmann, porous medium m < 2)
/// is a configuration error; the relaxed condition lim eps*H''(eps) = 0 only
/// rescues m = 2 in closed form.
AuxiliaryFunctional build_auxiliary(const EnergyFamily& energy, double eps);

enum class RhoStarStarPolicy { Explicit, Implicit, Midpoint };

std::string to_string(RhoStarStarPolicy p);
RhoStarStarPolicy rho_policy_from_string(const std::string& s);

struct PotentialSpec {
    Potential V = zero_potential();
    Potential W = zero_potential();
};

struct ModelSpec {
    EnergyFamily energy;
    PotentialSpec potentials;
    ScalarFn initial_datum;
    std::string initial_descr;
    RhoStarStarPolicy policy = RhoStarStarPolicy::Midpoint;
    bool positivity_required = false;  // forced for Boltzmann

    /// Sample rho0 on [-L, L]: nonnegative everywhere, strictly positive when
    /// positivity is required. Throws ConfigError otherwise.
    void validate_initial_datum(double L) const;
};

ModelSpec make_model(EnergyFamily energy, PotentialSpec potentials, ScalarFn rho0,
                     std::string rho0_descr, RhoStarStarPolicy policy);

/// Generalised entropic average mu = (H'(y)-H'(x))/(K'(y)-K'(x)), with
/// mu = x when x = y; always lies in [x, y]. Arguments may be given in either
/// order; negative inputs are rejected, as is x = 0 when K' blows up at 0.
double entropic_average(double x, double y, const EnergyFamily& energy,
                        const AuxiliaryFunctional& aux);

}  // namespace adfv
