#include "xxz/grid.hpp"

#include <fmt/format.h>

#include <cmath>

namespace xxz {

std::string_view to_string(Boundary b)
{
    return b == Boundary::Periodic ? "periodic" : "fixed";
}

Boundary parse_boundary(std::string_view s)
{
    if (s == "periodic")
        return Boundary::Periodic;
    if (s == "fixed" || s == "fixed_ends" || s == "fixed-ends")
        return Boundary::FixedEnds;
    throw ParameterError(fmt::format("unknown boundary '{}' (expected periodic|fixed)", s));
}

Grid::Grid(std::size_t n_points, double x_min, double x_max, Boundary bc)
    : n_(n_points), x_min_(x_min), x_max_(x_max), bc_(bc)
{
    if (n_points < 3)
        throw ParameterError(fmt::format("grid needs at least 3 points, got {}", n_points));
    if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_max > x_min))
        throw ParameterError("grid requires finite x_min < x_max");
    dx_ = bc == Boundary::Periodic ? (x_max - x_min) / static_cast<double>(n_points)
                                   : (x_max - x_min) / static_cast<double>(n_points - 1);
}

Grid Grid::sites(std::size_t n_sites, double x_min, Boundary bc)
{
    const double span = bc == Boundary::Periodic ? static_cast<double>(n_sites) : static_cast<double>(n_sites - 1);
    return Grid(n_sites, x_min, x_min + span, bc);
}

Eigen::VectorXd Grid::coordinates() const
{
    Eigen::VectorXd x(static_cast<Eigen::Index>(n_));
    for (std::size_t i = 0; i < n_; ++i)
        x[static_cast<Eigen::Index>(i)] = this->x(i);
    return x;
}

Grid Grid::scaled(double factor) const
{
    if (!(factor > 0) || !std::isfinite(factor))
        throw ParameterError("grid scale factor must be finite and > 0");
    return Grid(n_, x_min_ * factor, x_max_ * factor, bc_);
}

Field::Field(Grid g, CVectorD v, double t) : grid(std::move(g)), values(std::move(v)), time(t)
{
    if (static_cast<std::size_t>(values.size()) != grid.size())
        throw GridMismatchError(fmt::format("field has {} samples but grid has {}", values.size(), grid.size()));
}

void require_same_grid(const Grid& a, const Grid& b)
{
    if (!(a == b))
        throw GridMismatchError(fmt::format("grid mismatch: ({} pts, [{}, {}], {}) vs ({} pts, [{}, {}], {})",
                                            a.size(), a.x_min(), a.x_max(), to_string(a.bc()), b.size(), b.x_min(),
                                            b.x_max(), to_string(b.bc())));
}

void require_finite(const CVectorD& v, const Grid& g, double time)
{
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i].real()) || !std::isfinite(v[i].imag())) {
            const auto idx = static_cast<std::size_t>(i);
            throw NumericBlowupError(fmt::format("non-finite amplitude at index {} (x = {}) at t = {}", idx, g.x(idx), time),
                                     idx, time, g.x(idx));
        }
    }
}

std::string_view to_string(Equation e)
{
    switch (e) {
    case Equation::Analytic:
        return "analytic";
    case Equation::Nls:
        return "nls-constant-potential";
    case Equation::NlsEnvelope:
        return "nls-envelope";
    case Equation::ExtendedNls:
        return "extended-nls";
    case Equation::ExtendedNlsVariant:
        return "extended-nls-phi-c2-variant";
    case Equation::LatticeSimplified:
        return "lattice-simplified";
    case Equation::LatticeFull:
        return "lattice-full";
    }
    return "unknown";
}

Equation parse_equation(std::string_view s)
{
    for (auto e : {Equation::Analytic, Equation::Nls, Equation::NlsEnvelope, Equation::ExtendedNls,
                   Equation::ExtendedNlsVariant, Equation::LatticeSimplified, Equation::LatticeFull})
        if (to_string(e) == s)
            return e;
    throw SchemaError(fmt::format("unknown equation tag '{}'", s));
}

Field Trajectory::field(std::size_t i) const
{
    return Field(grid, snapshots.at(i).values, snapshots.at(i).time);
}

void Trajectory::push(double t, CVectorD values)
{
    if (!snapshots.empty() && !(t > snapshots.back().time))
        throw ParameterError(fmt::format("snapshot time {} does not follow {}", t, snapshots.back().time));
    if (static_cast<std::size_t>(values.size()) != grid.size())
        throw GridMismatchError("snapshot sample count does not match trajectory grid");
    snapshots.push_back(Snapshot{t, std::move(values)});
}

} // namespace xxz
