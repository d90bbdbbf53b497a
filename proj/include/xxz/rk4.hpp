#pragma once

#include "xxz/grid.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace xxz {

inline constexpr double kDefaultAmplitudeCeiling = 1e6;

// Classical fourth-order Runge-Kutta for an autonomous system y' = f(y).
// `rhs(y, out)` writes f(y) into `out`; scratch vectors are reused between
// steps so a long march allocates nothing.
template <typename Real>
class Rk4 {
  public:
    explicit Rk4(Eigen::Index n) : k1_(n), k2_(n), k3_(n), k4_(n), tmp_(n) {}

    template <typename Rhs>
    void step(CVector<Real>& y, Real h, Rhs&& rhs)
    {
        const Real half = h / 2;
        rhs(y, k1_);
        tmp_.noalias() = y + half * k1_;
        rhs(tmp_, k2_);
        tmp_.noalias() = y + half * k2_;
        rhs(tmp_, k3_);
        tmp_.noalias() = y + h * k3_;
        rhs(tmp_, k4_);
        y += (h / 6) * (k1_ + Real(2) * k2_ + Real(2) * k3_ + k4_);
    }

  private:
    CVector<Real> k1_, k2_, k3_, k4_, tmp_;
};

// Index of the first non-finite sample or the first sample with modulus above
// `ceiling`; -1 when all samples are acceptable.
template <typename Real>
Eigen::Index first_runaway(const CVector<Real>& y, Real ceiling)
{
    using std::isfinite;
    const Real c2 = ceiling * ceiling;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        const Real a2 = std::norm(y[i]);
        if (!isfinite(y[i].real()) || !isfinite(y[i].imag()) || a2 > c2)
            return i;
    }
    return -1;
}

void throw_runaway(const Grid& g, Eigen::Index index, double time);

// Marches `y` from `t` through every time in `targets` (sorted, >= t) with
// steps of at most `dt`. The step that would overshoot a target is shortened
// to land on it exactly, so every snapshot lies on the RK4 trajectory.
template <typename Real, typename Rhs, typename Emit>
void march(CVector<Real>& y, Real& t, Real dt, const std::vector<Real>& targets, const Grid& g, Real ceiling,
           Rhs&& rhs, Emit&& emit)
{
    Rk4<Real> rk(y.size());
    for (const Real target : targets) {
        while (t < target) {
            const Real remaining = target - t;
            const bool last = remaining <= dt * (1 + Real(1e-9));
            rk.step(y, last ? remaining : dt, rhs);
            t = last ? target : t + dt;
            if (const auto bad = first_runaway(y, ceiling); bad >= 0)
                throw_runaway(g, bad, static_cast<double>(t));
        }
        emit(t, y);
    }
}

// Sorted, de-duplicated snapshot times; throws unless all lie in [0, t_end].
std::vector<double> normalize_snapshot_times(std::vector<double> times, double t_end);

} // namespace xxz
