#include "xxz/continuum.hpp"

#include <fmt/format.h>

namespace xxz {

Equation equation_of(ContinuumModel m)
{
    switch (m) {
    case ContinuumModel::Nls:
        return Equation::Nls;
    case ContinuumModel::Extended:
        return Equation::ExtendedNls;
    case ContinuumModel::ExtendedPhi:
        return Equation::ExtendedNlsVariant;
    case ContinuumModel::Envelope:
        return Equation::NlsEnvelope;
    }
    return Equation::Nls;
}

Field laplacian(const Field& f)
{
    CVectorD out;
    laplacian_into(f.values, f.grid, out);
    return Field(f.grid, std::move(out), f.time);
}

namespace {

Field apply_rhs(const Field& f, const Coefficients<double>& k, const ModelParams<double>& p, ContinuumModel model)
{
    require_finite(f.values, f.grid, f.time);
    CVectorD out;
    continuum_rhs_into(f.values, f.grid, k, p, model, out);
    return Field(f.grid, std::move(out), f.time);
}

} // namespace

Field rhs_nls(const Field& f, const Coefficients<double>& k, const ModelParams<double>& p)
{
    return apply_rhs(f, k, p, ContinuumModel::Nls);
}

Field rhs_full_continuum(const Field& f, const Coefficients<double>& k, const ModelParams<double>& p,
                         bool phi_weighted_c2)
{
    return apply_rhs(f, k, p, phi_weighted_c2 ? ContinuumModel::ExtendedPhi : ContinuumModel::Extended);
}

Field rhs_envelope(const Field& f, const Coefficients<double>& k, const ModelParams<double>& p)
{
    return apply_rhs(f, k, p, ContinuumModel::Envelope);
}

double stability_dt(const Grid& g, const Coefficients<double>& k, const ModelParams<double>& p, const Field& f,
                    double safety, ContinuumModel model)
{
    if (!(safety > 0) || safety > 1)
        throw ParameterError(fmt::format("stability safety factor {} outside (0, 1]", safety));
    const double m = f.values.size() ? f.values.cwiseAbs().maxCoeff() : 0.0;
    const double dx2 = g.dx() * g.dx();
    if (model == ContinuumModel::Envelope)
        return safety / (4.0 / dx2 + 2 * std::abs(k.c1) * m * m / p.hbar);
    const double rate = 4 * k.c0 * p.S / dx2 + std::abs(k.V) + 2 * std::abs(k.c1) * m * m +
                        2 * std::abs(k.c2) * std::sqrt(2 * p.S) * (1 + m) + 4 * std::abs(k.c3) * p.S;
    return safety * p.hbar / rate;
}

Trajectory evolve(const Field& initial, const Coefficients<double>& k, const ModelParams<double>& p,
                  ContinuumModel model, double dt, double t_end, std::vector<double> snapshot_times,
                  const EvolveOptions& opts)
{
    require_finite(initial.values, initial.grid, initial.time);
    if (initial.grid.size() < 16)
        throw ParameterError(fmt::format("continuum grid needs at least 16 points, got {}", initial.grid.size()));
    const double bound = stability_dt(initial.grid, k, p, initial, 1.0, model);
    if (dt <= 0)
        dt = stability_dt(initial.grid, k, p, initial, kContinuumDefaultSafety, model);
    if (dt > bound)
        throw StepSizeError(dt, bound);

    const auto targets = normalize_snapshot_times(std::move(snapshot_times), t_end);
    if (targets.front() < initial.time)
        throw ParameterError(fmt::format("snapshot time {} precedes the initial time {}", targets.front(), initial.time));

    Trajectory traj;
    traj.grid = initial.grid;
    traj.equation = equation_of(model);
    traj.dt = dt;

    CVectorD y = initial.values;
    double t = initial.time;
    march<double>(y, t, dt, targets, initial.grid, opts.ceiling,
                  [&](const CVectorD& f, CVectorD& out) { continuum_rhs_into(f, initial.grid, k, p, model, out); },
                  [&](double time, const CVectorD& f) { traj.push(time, f); });
    return traj;
}

} // namespace xxz
