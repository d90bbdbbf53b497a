#pragma once

// Method-of-lines integration of the long-wave envelope equations on a
// uniform grid: second-order central Laplacian in space, classical RK4 in
// time. Supported right-hand sides:
//
//   Nls          i hbar phi_t = -c0 S phi_xx + V phi - 2 c1 |phi|^2 phi
//   Extended     Nls plus the one- and two-quantum terms
//                  + 2 c2 sqrt(2S) ((5/2)|phi|^2 + (5/4) phi^2 - S)
//                  - c3 (4 S conj(phi) - 3 conj(phi) |phi|^2 - phi^3)
//   ExtendedPhi  as Extended with the c2 bracket multiplied by phi
//                (sensitivity study only; not the published equation)
//   Envelope     i psi_t + psi_xixi + 2 (c1 / hbar) |psi|^2 psi = 0 on the xi grid

#include "xxz/errors.hpp"
#include "xxz/grid.hpp"
#include "xxz/model.hpp"
#include "xxz/rk4.hpp"

#include <cmath>
#include <complex>
#include <vector>

namespace xxz {

enum class ContinuumModel { Nls, Extended, ExtendedPhi, Envelope };

Equation equation_of(ContinuumModel m);

// Central second difference. Periodic wraps; FixedEnds yields 0 at both edges.
template <typename Real>
void laplacian_into(const CVector<Real>& f, const Grid& g, CVector<Real>& out)
{
    const Eigen::Index n = f.size();
    const Real inv_dx2 = Real(1) / (Real(g.dx()) * Real(g.dx()));
    out.resize(n);
    for (Eigen::Index i = 1; i + 1 < n; ++i)
        out[i] = (f[i + 1] + f[i - 1] - Real(2) * f[i]) * inv_dx2;
    if (g.bc() == Boundary::Periodic) {
        out[0] = (f[1] + f[n - 1] - Real(2) * f[0]) * inv_dx2;
        out[n - 1] = (f[0] + f[n - 2] - Real(2) * f[n - 1]) * inv_dx2;
    } else {
        out[0] = 0;
        out[n - 1] = 0;
    }
}

Field laplacian(const Field& f);

// Pointwise dphi/dt for `model`. Edge samples of FixedEnds grids get 0.
template <typename Real>
void continuum_rhs_into(const CVector<Real>& f, const Grid& g, const Coefficients<Real>& k, const ModelParams<Real>& p,
                        ContinuumModel model, CVector<Real>& out)
{
    using C = std::complex<Real>;
    laplacian_into(f, g, out);
    const Eigen::Index n = f.size();
    const C minus_i_over_hbar(0, -1 / p.hbar);
    const Real c0S = k.c0 * p.S;
    const Real c2s = 2 * k.c2 * std::sqrt(2 * p.S);

    if (model == ContinuumModel::Envelope) {
        const Real g1 = 2 * k.c1 / p.hbar;
        for (Eigen::Index i = 0; i < n; ++i)
            out[i] = C(0, 1) * (out[i] + g1 * std::norm(f[i]) * f[i]);
    } else {
        for (Eigen::Index i = 0; i < n; ++i) {
            const C phi = f[i];
            const Real a2 = std::norm(phi);
            C h = -c0S * out[i] + k.V * phi - 2 * k.c1 * a2 * phi;
            if (model != ContinuumModel::Nls) {
                C bracket = Real(2.5) * a2 + Real(1.25) * phi * phi - p.S;
                if (model == ContinuumModel::ExtendedPhi)
                    bracket *= phi;
                const C pc = std::conj(phi);
                h += c2s * bracket - k.c3 * (4 * p.S * pc - Real(3) * pc * a2 - phi * phi * phi);
            }
            out[i] = minus_i_over_hbar * h;
        }
    }
    if (g.bc() == Boundary::FixedEnds) {
        out[0] = 0;
        out[n - 1] = 0;
    }
}

Field rhs_nls(const Field& f, const Coefficients<double>& k, const ModelParams<double>& p);
Field rhs_full_continuum(const Field& f, const Coefficients<double>& k, const ModelParams<double>& p,
                         bool phi_weighted_c2 = false);
Field rhs_envelope(const Field& f, const Coefficients<double>& k, const ModelParams<double>& p);

// safety * hbar / (4 c0 S / dx^2 + |V| + 2|c1| m^2 + 2|c2| sqrt(2S)(1 + m) + 4|c3| S),
// m = max |phi|. For the Envelope model the lab potential is absent and the
// kinetic term is 4 / dxi^2 in units of 1/time.
double stability_dt(const Grid& g, const Coefficients<double>& k, const ModelParams<double>& p, const Field& f,
                    double safety, ContinuumModel model = ContinuumModel::Nls);

// Safety factor used when the caller does not fix dt.
inline constexpr double kContinuumDefaultSafety = 0.25;

struct EvolveOptions {
    double ceiling = kDefaultAmplitudeCeiling;
};

// RK4 march of `initial` to t_end, recording the requested snapshot times.
// dt <= 0 selects stability_dt(..., kContinuumDefaultSafety). A dt above the
// safety-1 bound raises StepSizeError.
Trajectory evolve(const Field& initial, const Coefficients<double>& k, const ModelParams<double>& p,
                  ContinuumModel model, double dt, double t_end, std::vector<double> snapshot_times,
                  const EvolveOptions& opts = {});

} // namespace xxz
