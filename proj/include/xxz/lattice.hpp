#pragma once

// Coherent-amplitude dynamics of the bosonized chain.
//
// Each site carries a complex amplitude alpha_j (the Holstein-Primakoff boson
// in a product of Glauber coherent states). Both variants are Hamiltonian
// flows i hbar d(alpha_j)/dt = dE/d(conj alpha_j) of a real energy functional:
//
//  Simplified (field-frame magnetization conserving terms only):
//    E = sum_j [ -c0 S (conj(a_j) a_{j+1} + c.c.) + B n_j
//                - (c0 + c1) n_j (n_{j+1} - 2S)
//                + (c0/4)(n_j conj(a_j) a_{j+1} + conj(a_j) n_{j+1} a_{j+1} + c.c.) ]
//
//  Full, adding the one- and two-quantum terms:
//    + c2 sqrt(2S) sum_j [ P_j (n_{j+1} + n_{j-1}) + P_j n_j / 2 - 2S P_j ],  P_j = 2 Re a_j
//    - 2 c3 S sum_j 2 Re(a_j a_{j+1}) (1 - (n_j + n_{j+1}) / (4S))
//
// The full-model gradient reproduces the printed operator equation of motion
// term by term once every "j +- 1" is read as a sum over both neighbours.

#include "xxz/errors.hpp"
#include "xxz/grid.hpp"
#include "xxz/model.hpp"
#include "xxz/rk4.hpp"

#include <cmath>
#include <complex>
#include <vector>

namespace xxz {

enum class LatticeVariant { Simplified, Full };

template <typename Real = double>
struct LatticeState {
    CVector<Real> amplitudes;
    Real time = 0;
    Boundary boundary = Boundary::Periodic;
};

template <typename Real = double>
struct LatticeModel {
    LatticeVariant variant = LatticeVariant::Simplified;
    ModelParams<Real> params;
    Coefficients<Real> coeffs;

    LatticeModel() = default;
    LatticeModel(LatticeVariant v, const ModelParams<Real>& p) : variant(v), params(p), coeffs(compute_coefficients(p)) {}
};

namespace detail {

template <typename Real>
void validate_state(const LatticeState<Real>& s)
{
    if (s.amplitudes.size() < 3)
        throw ParameterError("lattice state needs at least 3 sites");
    for (Eigen::Index i = 0; i < s.amplitudes.size(); ++i) {
        using std::isfinite;
        if (!isfinite(s.amplitudes[i].real()) || !isfinite(s.amplitudes[i].imag()))
            throw NumericBlowupError("non-finite lattice amplitude at site " + std::to_string(i),
                                     static_cast<std::size_t>(i), static_cast<double>(s.time), static_cast<double>(i));
    }
}

// Writes dE/d(conj alpha_j) for every site; edges of a FixedEnds chain get 0.
template <typename Real>
void energy_gradient(const CVector<Real>& a, Boundary bc, const LatticeModel<Real>& m, bool full, CVector<Real>& g)
{
    using C = std::complex<Real>;
    const auto& k = m.coeffs;
    const Real S = m.params.S;
    const Real c0S = k.c0 * S;
    const Real onsite = m.params.B + 2 * S * (k.c0 + k.c1);
    const Real quarter_c0 = k.c0 / 4;
    const Real c01 = k.c0 + k.c1;
    const Real c2s = k.c2 * std::sqrt(2 * S);
    const Real c3s = 2 * k.c3 * S;
    const Real inv4S = 1 / (4 * S);
    const Eigen::Index n = a.size();
    const bool periodic = bc == Boundary::Periodic;

    g.resize(n);
    const Eigen::Index first = periodic ? 0 : 1;
    const Eigen::Index last = periodic ? n : n - 1;
    if (!periodic) {
        g[0] = C(0);
        g[n - 1] = C(0);
    }
    for (Eigen::Index j = first; j < last; ++j) {
        const C aj = a[j];
        const C ap = a[j + 1 == n ? 0 : j + 1];
        const C am = a[j == 0 ? n - 1 : j - 1];
        const Real nj = std::norm(aj);
        const Real np = std::norm(ap);
        const Real nm = std::norm(am);
        const C sum = ap + am;

        C out = -c0S * sum + onsite * aj;
        out += quarter_c0 * (Real(2) * nj * sum + np * ap + nm * am + std::conj(sum) * aj * aj);
        out -= c01 * aj * (np + nm);
        if (full) {
            const Real Pp = 2 * ap.real();
            const Real Pm = 2 * am.real();
            const Real Pj = 2 * aj.real();
            out += c2s * (C(np + nm + nj / 2 - 2 * S) + aj * (Pp + Pm + Pj / 2));
            const C neighbours = std::conj(ap) * (1 - (nj + np) * inv4S) + std::conj(am) * (1 - (nm + nj) * inv4S);
            const Real bond_re = 2 * ((aj * ap).real() + (am * aj).real());
            out -= c3s * (neighbours - aj * (bond_re * inv4S));
        }
        g[j] = out;
    }
}

} // namespace detail

// d(alpha)/dt for the chosen variant: (1 / (i hbar)) dE/d(conj alpha).
template <typename Real>
void lattice_rhs_into(const CVector<Real>& a, Boundary bc, const LatticeModel<Real>& m, CVector<Real>& out)
{
    detail::energy_gradient(a, bc, m, m.variant == LatticeVariant::Full, out);
    out *= std::complex<Real>(0, -1 / m.params.hbar);
}

template <typename Real>
CVector<Real> rhs_simplified(const LatticeState<Real>& s, const LatticeModel<Real>& m)
{
    if (m.variant != LatticeVariant::Simplified)
        throw ParameterError("rhs_simplified requires a Simplified lattice model");
    detail::validate_state(s);
    CVector<Real> out;
    lattice_rhs_into(s.amplitudes, s.boundary, m, out);
    return out;
}

template <typename Real>
CVector<Real> rhs_full(const LatticeState<Real>& s, const LatticeModel<Real>& m)
{
    if (m.variant != LatticeVariant::Full)
        throw ParameterError("rhs_full requires a Full lattice model");
    detail::validate_state(s);
    CVector<Real> out;
    lattice_rhs_into(s.amplitudes, s.boundary, m, out);
    return out;
}

template <typename Real>
Real norm(const LatticeState<Real>& s)
{
    return s.amplitudes.squaredNorm();
}

namespace detail {

template <typename Real>
Real energy(const LatticeState<Real>& s, const LatticeModel<Real>& m, bool full)
{
    using C = std::complex<Real>;
    validate_state(s);
    const auto& a = s.amplitudes;
    const auto& k = m.coeffs;
    const Real S = m.params.S;
    const Eigen::Index n = a.size();
    const Eigen::Index bonds = s.boundary == Boundary::Periodic ? n : n - 1;
    const Real c2s = k.c2 * std::sqrt(2 * S);
    const Real inv4S = 1 / (4 * S);

    Real e = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
        const Real nj = std::norm(a[j]);
        e += m.params.B * nj;
        if (full)
            e += c2s * (2 * a[j].real()) * (nj / 2 - 2 * S);
    }
    for (Eigen::Index j = 0; j < bonds; ++j) {
        const C aj = a[j];
        const C ap = a[(j + 1) % n];
        const Real nj = std::norm(aj);
        const Real np = std::norm(ap);
        const C hop = std::conj(aj) * ap;
        e += -k.c0 * S * 2 * hop.real();
        e += -(k.c0 + k.c1) * nj * (np - 2 * S);
        e += k.c0 / 4 * 2 * ((nj + np) * hop).real();
        if (full) {
            e += c2s * (2 * aj.real() * np + 2 * ap.real() * nj);
            e += -2 * k.c3 * S * 2 * (aj * ap).real() * (1 - (nj + np) * inv4S);
        }
    }
    return e;
}

} // namespace detail

template <typename Real>
Real energy_simplified(const LatticeState<Real>& s, const LatticeModel<Real>& m)
{
    return detail::energy(s, m, false);
}

template <typename Real>
Real energy_full(const LatticeState<Real>& s, const LatticeModel<Real>& m)
{
    return detail::energy(s, m, true);
}

template <typename Real>
Real energy(const LatticeState<Real>& s, const LatticeModel<Real>& m)
{
    return detail::energy(s, m, m.variant == LatticeVariant::Full);
}

// Safety factor of the default lattice step; see lattice_default_dt.
inline constexpr double kLatticeDefaultSafety = 0.02;

// safety * hbar / (4 c0 S + |V| + 2 |c1| max |alpha|^2): a spectral-radius
// estimate of the linearized flow scaled well inside the RK4 stability region.
template <typename Real>
Real lattice_default_dt(const LatticeState<Real>& s, const LatticeModel<Real>& m,
                        Real safety = Real(kLatticeDefaultSafety))
{
    using std::abs;
    const auto& k = m.coeffs;
    const Real amax2 = s.amplitudes.size() ? s.amplitudes.cwiseAbs2().maxCoeff() : Real(0);
    return safety * m.params.hbar / (4 * k.c0 * m.params.S + abs(k.V) + 2 * abs(k.c1) * amax2);
}

template <typename Real>
LatticeState<Real> step_rk4(const LatticeState<Real>& s, const LatticeModel<Real>& m, Real dt,
                            Real ceiling = Real(kDefaultAmplitudeCeiling))
{
    if (!(dt > 0))
        throw ParameterError("lattice time step must be > 0");
    detail::validate_state(s);
    LatticeState<Real> next = s;
    Rk4<Real> rk(s.amplitudes.size());
    rk.step(next.amplitudes, dt, [&](const CVector<Real>& y, CVector<Real>& out) { lattice_rhs_into(y, s.boundary, m, out); });
    next.time = s.time + dt;
    if (const auto bad = first_runaway(next.amplitudes, ceiling); bad >= 0)
        throw_runaway(Grid::sites(static_cast<std::size_t>(s.amplitudes.size()), 0.0, s.boundary), bad,
                      static_cast<double>(next.time));
    return next;
}

// Samples each site at times in `snapshot_times`; sites are labelled by
// `sites` (unit spacing). dt <= 0 selects lattice_default_dt.
Trajectory evolve_lattice(const LatticeState<double>& initial, const LatticeModel<double>& m, double dt, double t_end,
                          std::vector<double> snapshot_times, const Grid& sites,
                          double ceiling = kDefaultAmplitudeCeiling);

} // namespace xxz
