#pragma once

// Chain-plus-field parameters and the coefficient algebra shared by every
// equation of motion.
//
// An XXZ chain (couplings J, J, J(1 + delta)) in a field of magnitude B tilted
// by theta from the chain axis is rewritten in the field frame. The part of the
// exchange that commutes with the total field-frame spin carries
//   c0 = J (1 + delta sin^2(theta) / 2)        isotropic exchange
//   c1 = J delta (3 cos^2(theta) - 1) / 2      effective cubic nonlinearity
// while the parts that change the field-frame magnetization by one or two
// quanta carry
//   c2 = J delta sin(2 theta) / 4,   c3 = J delta sin^2(theta) / 4.
// c1 vanishes at the magic angle arccos(sqrt(1/3)), where the chain behaves as
// an isotropic ferromagnet and only linear spin waves propagate.

#include "xxz/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <string_view>
#include <type_traits>

namespace xxz {

template <typename Real = double>
struct ModelParams {
    Real J = 1;     // exchange coupling, J > 0
    Real delta = 0; // anisotropy offset Delta - 1
    Real theta = 0; // field angle, radians
    Real B = 1;     // field magnitude, B > 0
    Real S = 1;     // site spin, S >= 1/2
    Real hbar = 1;

    bool operator==(const ModelParams&) const = default;
};

template <typename Real = double>
struct Coefficients {
    Real c0;
    Real c1;
    Real c2;
    Real c3;
    Real V;   // constant potential 2 S c1 + B
    Real chi; // gauge frequency V / hbar
    Real theta_magic;
};

enum class RegimeKind { Bright, Dark, Linear };

struct Regime {
    RegimeKind kind;
    double lambda; // B / J
    bool admissible;
};

inline constexpr double kLambdaMin = 10.0;
inline constexpr double kLambdaMax = 1000.0;

template <typename Real = double>
Real magic_angle()
{
    using std::acos;
    using std::sqrt;
    return acos(sqrt(Real(1) / Real(3)));
}

namespace detail {

inline double two_sum(double a, double b, double& err)
{
    const double s = a + b;
    const double bb = s - a;
    err = (a - (s - bb)) + (b - bb);
    return s;
}

// 3 cos^2(theta) - 1 = 3 sin(theta0 - u) sin(theta0 + u), u = theta folded into
// [0, pi/2]. Folding and the difference theta0 - u are carried in double-double
// so the result keeps full relative accuracy next to every zero crossing.
inline double anisotropy_factor_accurate(double theta)
{
    constexpr double pi_hi = 0x1.921fb54442d18p+1;
    constexpr double pi_lo = 0x1.1a62633145c07p-53;
    constexpr double th0_hi = 0x1.e91f42805715dp-1;
    constexpr double th0_lo = -0x1.6ed0c200507f4p-56;

    const double t = std::abs(theta);
    const double k = std::nearbyint(t / pi_hi);
    double u_hi = t;
    double u_lo = 0;
    if (k != 0) {
        const double p = k * pi_hi;
        const double p_err = std::fma(k, pi_hi, -p);
        u_hi = two_sum(t - p, -(p_err + k * pi_lo), u_lo);
    }
    if (u_hi < 0) {
        u_hi = -u_hi;
        u_lo = -u_lo;
    }
    double d1_err = 0;
    const double d1_hi = two_sum(th0_hi, -u_hi, d1_err);
    const double d1 = d1_hi + (d1_err + th0_lo - u_lo);
    const double d2 = (th0_hi + u_hi) + (th0_lo + u_lo);
    return 3 * std::sin(d1) * std::sin(d2);
}

template <typename Real>
Real anisotropy_factor(Real theta)
{
    if constexpr (std::is_same_v<Real, double>) {
        return anisotropy_factor_accurate(theta);
    } else {
        using std::cos;
        const Real c = cos(theta);
        return 3 * c * c - 1;
    }
}

} // namespace detail

template <typename Real>
void validate(const ModelParams<Real>& p)
{
    using std::isfinite;
    auto finite = [](Real v) { return isfinite(v); };
    if (!finite(p.J) || !(p.J > 0))
        throw ParameterError("J must be finite and > 0");
    if (!finite(p.delta))
        throw ParameterError("delta must be finite");
    if (!finite(p.theta))
        throw ParameterError("theta must be finite");
    if (!finite(p.B) || !(p.B > 0))
        throw ParameterError("B must be finite and > 0");
    if (!finite(p.S) || !(p.S >= Real(0.5)))
        throw ParameterError("S must be finite and >= 1/2");
    if (!finite(p.hbar) || !(p.hbar > 0))
        throw ParameterError("hbar must be finite and > 0");
}

template <typename Real>
Coefficients<Real> compute_coefficients(const ModelParams<Real>& p)
{
    using std::sin;
    validate(p);
    const Real s = sin(p.theta);
    Coefficients<Real> k{};
    k.c0 = p.J * (1 + p.delta * s * s / 2);
    k.c1 = p.J * p.delta * detail::anisotropy_factor(p.theta) / 2;
    k.c2 = p.J * p.delta * sin(2 * p.theta) / 4;
    k.c3 = p.J * p.delta * s * s / 4;
    k.V = 2 * p.S * k.c1 + p.B;
    k.chi = k.V / p.hbar;
    k.theta_magic = magic_angle<Real>();
    return k;
}

// Linear when |c1| <= 1e-12 J; the window flag marks 10 <= B/J <= 1000.
template <typename Real>
Regime classify_regime(const ModelParams<Real>& p)
{
    const auto k = compute_coefficients(p);
    const double c1 = static_cast<double>(k.c1);
    const double tol = 1e-12 * static_cast<double>(p.J);
    Regime r{};
    r.kind = c1 > tol ? RegimeKind::Bright : (c1 < -tol ? RegimeKind::Dark : RegimeKind::Linear);
    r.lambda = static_cast<double>(p.B / p.J);
    r.admissible = r.lambda >= kLambdaMin && r.lambda <= kLambdaMax;
    return r;
}

inline std::string_view to_string(RegimeKind k)
{
    switch (k) {
    case RegimeKind::Bright:
        return "bright";
    case RegimeKind::Dark:
        return "dark";
    case RegimeKind::Linear:
        return "linear";
    }
    return "unknown";
}

} // namespace xxz
