#include "xxz/lattice.hpp"

#include <fmt/format.h>

namespace xxz {

Trajectory evolve_lattice(const LatticeState<double>& initial, const LatticeModel<double>& m, double dt, double t_end,
                          std::vector<double> snapshot_times, const Grid& sites, double ceiling)
{
    detail::validate_state(initial);
    if (sites.size() != static_cast<std::size_t>(initial.amplitudes.size()) || sites.bc() != initial.boundary)
        throw GridMismatchError("site labels do not match the lattice state");
    if (dt <= 0)
        dt = lattice_default_dt(initial, m);
    const double bound = lattice_default_dt(initial, m, 1.0);
    if (dt > bound)
        throw StepSizeError(dt, bound);

    const auto targets = normalize_snapshot_times(std::move(snapshot_times), t_end);
    Trajectory traj;
    traj.grid = sites;
    traj.equation = m.variant == LatticeVariant::Full ? Equation::LatticeFull : Equation::LatticeSimplified;
    traj.dt = dt;

    CVectorD y = initial.amplitudes;
    double t = initial.time;
    if (!targets.empty() && targets.front() < t)
        throw ParameterError(fmt::format("snapshot time {} precedes the initial time {}", targets.front(), t));
    march<double>(y, t, dt, targets, sites, ceiling,
                  [&](const CVectorD& a, CVectorD& out) { lattice_rhs_into(a, initial.boundary, m, out); },
                  [&](double time, const CVectorD& a) { traj.push(time, a); });
    return traj;
}

} // namespace xxz
