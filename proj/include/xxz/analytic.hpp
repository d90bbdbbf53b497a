#pragma once

// Closed-form solutions of the constant-potential NLS
//   i hbar phi_t + c0 S phi_xx + 2 c1 |phi|^2 phi = V phi,   V = 2 S c1 + B,
// and the gauge transform to the envelope frame where V is removed.

#include "xxz/errors.hpp"
#include "xxz/grid.hpp"
#include "xxz/model.hpp"

#include <cmath>
#include <complex>

namespace xxz {

enum class SolitonKind { Bright, Dark };

template <typename Real = double>
struct SolitonParams {
    Real A = 1;  // amplitude (background level for dark)
    Real v1 = 0; // dimensionless velocity constant
    Real x0 = 0; // initial center

    bool operator==(const SolitonParams&) const = default;
};

template <typename Real = double>
struct Kinematics {
    Real v;     // group velocity
    Real gamma; // carrier wavenumber
    Real omega; // carrier frequency
    Real width; // sech/tanh argument equals 1 one width from center
};

template <typename Real>
void validate(const SolitonParams<Real>& sp)
{
    using std::isfinite;
    if (!isfinite(sp.A) || !(sp.A > 0))
        throw ParameterError("soliton amplitude A must be finite and > 0");
    if (!isfinite(sp.v1))
        throw ParameterError("v1 must be finite");
    if (!isfinite(sp.x0))
        throw ParameterError("x0 must be finite");
}

template <typename Real>
Kinematics<Real> soliton_kinematics(const Coefficients<Real>& k, const ModelParams<Real>& p,
                                    const SolitonParams<Real>& sp, SolitonKind kind)
{
    using std::sqrt;
    validate(sp);
    if (kind == SolitonKind::Bright && !(k.c1 > 0))
        throw RegimeMismatchError("bright soliton requires c1 > 0 (field angle below the magic angle)");
    if (kind == SolitonKind::Dark && !(k.c1 < 0))
        throw RegimeMismatchError("dark soliton requires c1 < 0 (field angle above the magic angle)");

    const Real c0S = k.c0 * p.S;
    Kinematics<Real> kin{};
    kin.v = sp.v1 * sqrt(c0S / p.hbar);
    kin.gamma = p.hbar * kin.v / (2 * c0S);
    const Real doppler = p.hbar * kin.v * kin.v / (4 * c0S);
    const Real A2 = sp.A * sp.A;
    if (kind == SolitonKind::Bright) {
        kin.omega = k.c1 * (2 * p.S - A2) / p.hbar + p.B / p.hbar + doppler;
        kin.width = sqrt(c0S / k.c1) / sp.A;
    } else {
        kin.omega = 2 * k.c1 * (p.S - A2) / p.hbar + p.B / p.hbar + doppler;
        kin.width = sqrt(c0S / (-k.c1)) / sp.A;
    }
    return kin;
}

template <typename Real>
std::complex<Real> bright_soliton(const Coefficients<Real>& k, const ModelParams<Real>& p,
                                  const SolitonParams<Real>& sp, Real x, Real t)
{
    using std::cosh;
    const auto kin = soliton_kinematics(k, p, sp, SolitonKind::Bright);
    const Real arg = (x - sp.x0 - kin.v * t) / kin.width;
    return std::polar(sp.A / cosh(arg), kin.gamma * x - kin.omega * t);
}

template <typename Real>
std::complex<Real> dark_soliton(const Coefficients<Real>& k, const ModelParams<Real>& p,
                                const SolitonParams<Real>& sp, Real x, Real t)
{
    using std::tanh;
    const auto kin = soliton_kinematics(k, p, sp, SolitonKind::Dark);
    const Real arg = (x - sp.x0 - kin.v * t) / kin.width;
    // polar() needs a non-negative radius; fold the tanh sign into the value.
    return sp.A * tanh(arg) * std::polar(Real(1), kin.gamma * x - kin.omega * t);
}

template <typename Real>
std::complex<Real> soliton(SolitonKind kind, const Coefficients<Real>& k, const ModelParams<Real>& p,
                           const SolitonParams<Real>& sp, Real x, Real t)
{
    return kind == SolitonKind::Bright ? bright_soliton(k, p, sp, x, t) : dark_soliton(k, p, sp, x, t);
}

// Linear dispersion Omega = (c0 S k^2 + V) / hbar of the magic-angle plane waves.
template <typename Real>
Real plane_wave_frequency(const Coefficients<Real>& k, const ModelParams<Real>& p, Real wavenumber)
{
    return (k.c0 * p.S * wavenumber * wavenumber + k.V) / p.hbar;
}

template <typename Real = double>
struct PlaneWaveValue {
    std::complex<Real> value;
    // Set when |c1| > 1e-12 J: the linear dispersion is then only approximate.
    bool nonlinear_warning;
};

template <typename Real>
PlaneWaveValue<Real> plane_wave(const Coefficients<Real>& k, const ModelParams<Real>& p, Real wavenumber, Real A,
                                Real x, Real t)
{
    using std::abs;
    const Real omega = plane_wave_frequency(k, p, wavenumber);
    return {std::polar(A, wavenumber * x - omega * t), abs(k.c1) > Real(1e-12) * p.J};
}

enum class GaugeDirection { ToLab, ToEnvelope };

// Lab field phi(x, t) = exp(-i chi t) psi(xi, t) with xi = x sqrt(hbar / (c0 S)).
// ToLab expects `f` on the xi grid and returns it on the x grid; ToEnvelope inverts.
inline Field gauge_transform(const Field& f, const Coefficients<double>& k, const ModelParams<double>& p, double t,
                             GaugeDirection dir)
{
    const double xi_per_x = std::sqrt(p.hbar / (k.c0 * p.S));
    const double sign = dir == GaugeDirection::ToLab ? -1.0 : 1.0;
    const std::complex<double> phase = std::polar(1.0, sign * k.chi * t);
    const Grid g = dir == GaugeDirection::ToLab ? f.grid.scaled(1.0 / xi_per_x) : f.grid.scaled(xi_per_x);
    return Field(g, f.values * phase, f.time);
}

} // namespace xxz
