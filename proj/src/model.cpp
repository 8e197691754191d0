#include "adfv/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "adfv/expr.hpp"
#include "adfv/quadrature.hpp"

namespace adfv {

double central_derivative(const ScalarFn& f, double x) {
    const double h = std::max(1e-5, 1e-5 * std::abs(x));
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}

namespace {

double sign(double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }

std::vector<double> log_spaced(double lo, double hi, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    const double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < n; ++i)
        v[static_cast<std::size_t>(i)] = std::exp(llo + (lhi - llo) * i / (n - 1));
    return v;
}

}  // namespace

Potential zero_potential() {
    auto z = [](double) { return 0.0; };
    return Potential{z, z, z, "zero"};
}

Potential quadratic_potential(double a) {
    return Potential{[a](double x) { return 0.5 * a * x * x; },
                     [a](double x) { return a * x; },
                     [a](double) { return a; },
                     "quadratic(" + std::to_string(a) + ")"};
}

Potential double_well_potential() {
    return Potential{[](double x) { return 0.25 * x * x * x * x - 0.5 * x * x; },
                     [](double x) { return x * x * x - x; },
                     [](double x) { return 3.0 * x * x - 1.0; },
                     "double_well"};
}

Potential gaussian_potential(double a, double sigma) {
    const double s2 = sigma * sigma;
    return Potential{[a, s2](double x) { return -a * std::exp(-x * x / (2 * s2)); },
                     [a, s2](double x) { return a * x / s2 * std::exp(-x * x / (2 * s2)); },
                     [a, s2](double x) {
                         return a / s2 * (1.0 - x * x / s2) * std::exp(-x * x / (2 * s2));
                     },
                     "gaussian(" + std::to_string(a) + "," + std::to_string(sigma) + ")"};
}

Potential power_law_potential(double a, double b) {
    auto f = [a, b](double x) {
        const double r = std::abs(x);
        return std::pow(r, a) / a - std::pow(r, b) / b;
    };
    auto d1 = [a, b](double x) {
        const double r = std::abs(x);
        return sign(x) * (std::pow(r, a - 1) - std::pow(r, b - 1));
    };
    auto d2 = [a, b](double x) {
        const double r = std::abs(x);
        return (a - 1) * std::pow(r, a - 2) - (b - 1) * std::pow(r, b - 2);
    };
    return Potential{f, d1, d2, "power_law(" + std::to_string(a) + "," + std::to_string(b) + ")"};
}

Potential morse_potential(double cr, double lr, double ca, double la) {
    auto f = [=](double x) {
        const double r = std::abs(x);
        return cr * std::exp(-r / lr) - ca * std::exp(-r / la);
    };
    auto d1 = [=](double x) {
        const double r = std::abs(x);
        return sign(x) * (-cr / lr * std::exp(-r / lr) + ca / la * std::exp(-r / la));
    };
    auto d2 = [=](double x) {
        const double r = std::abs(x);
        return cr / (lr * lr) * std::exp(-r / lr) - ca / (la * la) * std::exp(-r / la);
    };
    return Potential{f, d1, d2, "morse"};
}

Potential expression_potential(const std::string& src) {
    Expression e = parse_expression(src);
    ScalarFn f = [e](double x) { return e.eval(x); };
    ScalarFn d1 = [f](double x) { return central_derivative(f, x); };
    ScalarFn d2 = [d1](double x) { return central_derivative(d1, x); };
    return Potential{f, d1, d2, "expr:" + src};
}

Potential expression_potential(const std::string& src, const std::string& d1_src) {
    Expression e = parse_expression(src);
    Expression ed = parse_expression(d1_src);
    ScalarFn f = [e](double x) { return e.eval(x); };
    ScalarFn d1 = [ed](double x) { return ed.eval(x); };
    ScalarFn d2 = [d1](double x) { return central_derivative(d1, x); };
    return Potential{f, d1, d2, "expr:" + src};
}

namespace {

void spot_check_convexity(const EnergyFamily& e) {
    for (double s : log_spaced(1e-6, 1e3, 32)) {
        const double v = e.Hpp(s);
        if (!(v > 0.0) || !std::isfinite(v))
            throw ConfigError("energy family: H''(s) must be positive for s > 0 (failed at s = " +
                              std::to_string(s) + ")");
    }
}

}  // namespace

EnergyFamily porous_medium_energy(double m) {
    if (!(m > 1.0)) throw ConfigError("porous medium energy requires exponent m > 1");
    EnergyFamily e;
    e.kind = EnergyKind::PorousMedium;
    e.m = m;
    e.H = [m](double s) { return s <= 0.0 ? 0.0 : std::pow(s, m) / (m - 1); };
    e.Hp = [m](double s) { return s <= 0.0 ? 0.0 : m * std::pow(s, m - 1) / (m - 1); };
    e.Hpp = [m](double s) { return m * std::pow(s, m - 2); };
    e.hp_finite_at_zero = true;
    spot_check_convexity(e);
    return e;
}

EnergyFamily boltzmann_energy() {
    EnergyFamily e;
    e.kind = EnergyKind::Boltzmann;
    e.H = [](double s) { return s <= 0.0 ? 0.0 : s * std::log(s) - s; };
    e.Hp = [](double s) { return std::log(s); };
    e.Hpp = [](double s) { return 1.0 / s; };
    e.hp_finite_at_zero = false;
    spot_check_convexity(e);
    return e;
}

EnergyFamily custom_energy(const std::string& h_src, const std::string& hp_src,
                           const std::string& hpp_src) {
    Expression h = parse_expression(h_src);
    Expression hp = parse_expression(hp_src);
    Expression hpp = parse_expression(hpp_src);
    EnergyFamily e;
    e.kind = EnergyKind::Custom;
    e.H = [h](double s) { return h.eval(s); };
    e.Hp = [hp](double s) { return hp.eval(s); };
    e.Hpp = [hpp](double s) { return hpp.eval(s); };
    // Supplied derivatives must agree with numerical differentiation on a
    // sample grid; symbolic verification is out of contract.
    for (double s : log_spaced(1e-3, 1e3, 48)) {
        const double fd1 = central_derivative(e.H, s);
        if (std::abs(fd1 - e.Hp(s)) > 1e-6 * std::max(1.0, std::abs(fd1)))
            throw ConfigError("custom energy: H' disagrees with dH/ds at s = " + std::to_string(s));
        const double fd2 = central_derivative(e.Hp, s);
        if (std::abs(fd2 - e.Hpp(s)) > 1e-6 * std::max(1.0, std::abs(fd2)))
            throw ConfigError("custom energy: H'' disagrees with dH'/ds at s = " +
                              std::to_string(s));
    }
    spot_check_convexity(e);
    e.hp_finite_at_zero = std::isfinite(e.Hp(0.0));
    return e;
}

namespace {

/// Log-spaced table of K' and K with exact nodal derivatives, evaluated by
/// cubic Hermite interpolation (monotone here since K'' > 0).
class AuxTable {
public:
    AuxTable(ScalarFn kpp, double s_min, double s_max, int per_decade) : kpp_(std::move(kpp)) {
        const int decades = static_cast<int>(std::round(std::log10(s_max / s_min)));
        const int n = decades * per_decade + 1;
        nodes_ = log_spaced(s_min, s_max, n);
        // locate the node closest to 1 for anchoring
        std::size_t anchor = 0;
        for (std::size_t j = 0; j < nodes_.size(); ++j)
            if (std::abs(nodes_[j] - 1.0) < std::abs(nodes_[anchor] - 1.0)) anchor = j;
        nodes_[anchor] = 1.0;

        kp_.assign(nodes_.size(), 0.0);
        for (std::size_t j = 1; j < nodes_.size(); ++j)
            kp_[j] = kp_[j - 1] + gauss5(kpp_, nodes_[j - 1], nodes_[j]);
        const double kp1 = kp_[anchor];
        for (auto& v : kp_) v -= kp1;

        k_.assign(nodes_.size(), 0.0);
        for (std::size_t j = 1; j < nodes_.size(); ++j) {
            const double a = nodes_[j - 1], b = nodes_[j], d = b - a;
            // exact integral of the Hermite cubic matching K' and K'' at the ends
            k_[j] = k_[j - 1] + d * (0.5 * (kp_[j - 1] + kp_[j]) + d * (kpp_(a) - kpp_(b)) / 12.0);
        }
        const double k1 = k_[anchor];
        for (auto& v : k_) v -= k1;
    }

    double kp(double s) const { return eval(s, kp_, kpp_); }

    double k(double s) const {
        ScalarFn deriv = [this](double t) { return eval_in_range(t, kp_, kpp_); };
        return eval(s, k_, deriv);
    }

private:
    ScalarFn kpp_;
    std::vector<double> nodes_;
    std::vector<double> kp_;
    std::vector<double> k_;

    double eval(double s, const std::vector<double>& vals, const ScalarFn& deriv) const {
        if (s <= nodes_.front())
            return vals.front() + deriv(nodes_.front()) * (s - nodes_.front());
        if (s >= nodes_.back()) return vals.back() + deriv(nodes_.back()) * (s - nodes_.back());
        return eval_in_range(s, vals, deriv);
    }

    double eval_in_range(double s, const std::vector<double>& vals, const ScalarFn& deriv) const {
        auto it = std::upper_bound(nodes_.begin(), nodes_.end(), s);
        std::size_t j = static_cast<std::size_t>(it - nodes_.begin());
        if (j == 0) j = 1;
        if (j >= nodes_.size()) j = nodes_.size() - 1;
        const double a = nodes_[j - 1], b = nodes_[j], d = b - a;
        const double t = (s - a) / d;
        const double ya = vals[j - 1], yb = vals[j];
        const double ma = deriv(a) * d, mb = deriv(b) * d;
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * ya + (t3 - 2 * t2 + t) * ma + (-2 * t3 + 3 * t2) * yb +
               (t3 - t2) * mb;
    }
};

}  // namespace

AuxiliaryFunctional build_auxiliary(const EnergyFamily& energy, double eps) {
    if (eps < 0.0) throw ConfigError("build_auxiliary: eps must be nonnegative");

    AuxiliaryFunctional aux;
    aux.epsilon = eps;
    aux.lower_bound = 0.0;

    ScalarFn kp_raw, k_raw;
    std::shared_ptr<AuxTable> table;
    bool kp_finite = true;

    if (eps == 0.0) {
        if (energy.kind == EnergyKind::Boltzmann)
            throw ConfigError(
                "build_auxiliary: H''(s)/s = 1/s^2 is not integrable at 0 for linear diffusion; "
                "a regularisation eps > 0 is required (relaxed condition lim eps*H''(eps) = 0 "
                "does not hold in closed form)");
        if (energy.kind != EnergyKind::PorousMedium)
            throw ConfigError("build_auxiliary: eps = 0 supported only for porous medium m >= 2");
        const double m = energy.m;
        if (m < 2.0)
            throw ConfigError(
                "build_auxiliary: H''(s)/s is not integrable at 0 for porous medium m < 2; "
                "set eps > 0 (the relaxed condition lim eps*H''(eps) = 0 applies)");
        if (m == 2.0) {
            // K'' = 2/s: K = 2(s log s - s), continuous extension K(0) = 0.
            kp_raw = [](double s) { return 2.0 * std::log(s); };
            k_raw = [](double s) { return s <= 0.0 ? 0.0 : 2.0 * (s * std::log(s) - s); };
            kp_finite = false;
        } else {
            kp_raw = [m](double s) { return s <= 0.0 ? 0.0 : m * std::pow(s, m - 2) / (m - 2); };
            k_raw = [m](double s) {
                return s <= 0.0 ? 0.0 : m * std::pow(s, m - 1) / ((m - 1) * (m - 2));
            };
            kp_finite = true;
        }
    } else {
        ScalarFn hpp = energy.Hpp;
        ScalarFn kpp = [hpp, eps](double s) { return hpp(s) / (s + eps); };
        table = std::make_shared<AuxTable>(kpp, 1e-12, 1e6, 96);
        kp_raw = [table](double s) { return table->kp(s); };
        k_raw = [table](double s) { return table->k(s); };
        // K'(0) stays finite iff H''(s)/(s+eps) is integrable at 0, which holds
        // for every porous-medium exponent m > 1 but not for Boltzmann.
        kp_finite = energy.kind != EnergyKind::Boltzmann;
    }

    // Linear shift so K' >= 0 and min K = 0 on the sampled range; differences of
    // K' and mass-weighted sums of K are unaffected by it.
    const std::vector<double> sample = log_spaced(1e-8, 1e3, 256);
    double min_kp = std::numeric_limits<double>::infinity();
    for (double s : sample) min_kp = std::min(min_kp, kp_raw(s));
    const double a = -min_kp;
    double min_k = k_raw(0.0);
    for (double s : sample) min_k = std::min(min_k, k_raw(s) + a * s);
    const double b = -min_k;

    aux.Kp = [kp_raw, a](double s) { return kp_raw(s) + a; };
    aux.K = [k_raw, a, b](double s) { return k_raw(s) + a * s + b; };
    aux.kp_finite_at_zero = kp_finite;
    return aux;
}

std::string to_string(RhoStarStarPolicy p) {
    switch (p) {
        case RhoStarStarPolicy::Explicit: return "explicit";
        case RhoStarStarPolicy::Implicit: return "implicit";
        case RhoStarStarPolicy::Midpoint: return "midpoint";
    }
    return "midpoint";
}

RhoStarStarPolicy rho_policy_from_string(const std::string& s) {
    if (s == "explicit") return RhoStarStarPolicy::Explicit;
    if (s == "implicit") return RhoStarStarPolicy::Implicit;
    if (s == "midpoint") return RhoStarStarPolicy::Midpoint;
    throw ConfigError("unknown rho** policy '" + s + "' (expected explicit|implicit|midpoint)");
}

void ModelSpec::validate_initial_datum(double L) const {
    double min_v = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 2048; ++i) {
        const double x = -L + 2 * L * (i + 0.5) / 2048;
        const double v = initial_datum(x);
        if (!std::isfinite(v)) throw ConfigError("initial datum is not finite at x = " + std::to_string(x));
        min_v = std::min(min_v, v);
    }
    if (min_v < 0.0) throw ConfigError("initial datum must be nonnegative");
    if (positivity_required && !(min_v > 0.0))
        throw ConfigError("linear diffusion requires a strictly positive initial datum");
}

ModelSpec make_model(EnergyFamily energy, PotentialSpec potentials, ScalarFn rho0,
                     std::string rho0_descr, RhoStarStarPolicy policy) {
    ModelSpec m;
    m.positivity_required = energy.kind == EnergyKind::Boltzmann;
    m.energy = std::move(energy);
    m.potentials = std::move(potentials);
    m.initial_datum = std::move(rho0);
    m.initial_descr = std::move(rho0_descr);
    m.policy = policy;
    return m;
}

double entropic_average(double x, double y, const EnergyFamily& energy,
                        const AuxiliaryFunctional& aux) {
    if (x < 0.0 || y < 0.0) throw std::invalid_argument("entropic_average: arguments must be nonnegative");
    if (x > y) std::swap(x, y);
    if (x == y) return x;
    if (x == 0.0 && !aux.kp_finite_at_zero)
        throw std::invalid_argument("entropic_average: K' is undefined at 0 for this energy; "
                                    "use a regularised auxiliary functional");
    // m = 3: H'/K' differences simplify exactly to the arithmetic mean; the
    // generic quotient loses digits to cancellation for nearby arguments.
    if (energy.kind == EnergyKind::PorousMedium && energy.m == 3.0 && aux.epsilon == 0.0)
        return 0.5 * (x + y);
    // The exact quotient lies in [x, y] by the mean value theorem; clamp so
    // tabulated K' interpolation error cannot push it outside.
    const double mu = (energy.Hp(y) - energy.Hp(x)) / (aux.Kp(y) - aux.Kp(x));
    return std::min(std::max(mu, x), y);
}

}  // namespace adfv
