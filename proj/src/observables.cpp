#include "xxz/observables.hpp"

#include "xxz/errors.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>

namespace xxz {

double l2_deviation(const Field& a, const Field& b)
{
    require_same_grid(a.grid, b.grid);
    const Eigen::ArrayXd d = a.values.cwiseAbs().array() - b.values.cwiseAbs().array();
    return std::sqrt(d.square().sum() * a.grid.dx());
}

double linf_modulus_deviation(const Field& a, const Field& b)
{
    require_same_grid(a.grid, b.grid);
    return (a.values.cwiseAbs() - b.values.cwiseAbs()).cwiseAbs().maxCoeff();
}

double linf_modulus_deviation(const Field& a, const Field& b, double center, double half_width)
{
    require_same_grid(a.grid, b.grid);
    double worst = 0;
    for (std::size_t i = 0; i < a.grid.size(); ++i) {
        if (std::abs(a.grid.x(i) - center) > half_width)
            continue;
        const auto k = static_cast<Eigen::Index>(i);
        worst = std::max(worst, std::abs(std::abs(a.values[k]) - std::abs(b.values[k])));
    }
    return worst;
}

double l2_norm(const Field& f)
{
    return std::sqrt(f.values.squaredNorm() * f.grid.dx());
}

TrackPoint locate_extremum(const Field& f, Extremum kind)
{
    const Eigen::VectorXd m = f.values.cwiseAbs();
    const Eigen::Index n = m.size();
    const bool periodic = f.grid.bc() == Boundary::Periodic;
    if (m.maxCoeff() - m.minCoeff() <= 1e-12)
        throw DegenerateProfileError(fmt::format("profile is flat at t = {}; no extremum to track", f.time));

    const Eigen::Index lo = periodic ? 0 : 1;
    const Eigen::Index hi = periodic ? n : n - 1;
    Eigen::Index best = lo;
    for (Eigen::Index i = lo + 1; i < hi; ++i) {
        const bool better = kind == Extremum::Peak ? m[i] > m[best] : m[i] < m[best];
        if (better)
            best = i;
    }

    double offset = 0;
    double value = m[best];
    const bool has_left = periodic || best > 0;
    const bool has_right = periodic || best + 1 < n;
    if (has_left && has_right) {
        const double fm = m[best == 0 ? n - 1 : best - 1];
        const double fp = m[best + 1 == n ? 0 : best + 1];
        const double curv = fm - 2 * value + fp;
        if (curv != 0) {
            offset = 0.5 * (fm - fp) / curv;
            if (std::abs(offset) <= 1) {
                value -= 0.25 * (fm - fp) * offset;
            } else {
                offset = 0;
            }
        }
    }
    double x = f.grid.x(static_cast<std::size_t>(best)) + offset * f.grid.dx();
    if (periodic) {
        const double L = f.grid.length();
        x = f.grid.x_min() + std::fmod(std::fmod(x - f.grid.x_min(), L) + L, L);
    }
    return TrackPoint{f.time, x, std::max(value, 0.0)};
}

Field window(const Field& f, double center, double half_width)
{
    if (!std::isfinite(half_width))
        return f;
    const Grid& g = f.grid;
    const auto n = static_cast<long long>(g.size());
    const double dx = g.dx();
    const bool periodic = g.bc() == Boundary::Periodic;
    long long first = static_cast<long long>(std::ceil((center - half_width - g.x_min()) / dx - 1e-9));
    long long last = static_cast<long long>(std::floor((center + half_width - g.x_min()) / dx + 1e-9));
    if (periodic) {
        if (last - first + 1 > n)
            last = first + n - 1;
    } else {
        first = std::max(first, 0LL);
        last = std::min(last, n - 1);
    }
    const long long m = last - first + 1;
    if (m < 3)
        throw DegenerateProfileError(
            fmt::format("window of half-width {} around x = {} holds fewer than 3 samples", half_width, center));
    CVectorD v(m);
    for (long long j = 0; j < m; ++j)
        v[j] = f.values[((first + j) % n + n) % n];
    const double x0 = g.x_min() + static_cast<double>(first) * dx;
    return Field(Grid(static_cast<std::size_t>(m), x0, x0 + static_cast<double>(m - 1) * dx, Boundary::FixedEnds),
                 std::move(v), f.time);
}

namespace {

double wrap_into(const Grid& g, double x)
{
    if (g.bc() != Boundary::Periodic)
        return x;
    const double L = g.length();
    return g.x_min() + std::fmod(std::fmod(x - g.x_min(), L) + L, L);
}

} // namespace

TrackPoint locate_extremum(const Field& f, Extremum kind, double center, double half_width)
{
    if (!std::isfinite(half_width))
        return locate_extremum(f, kind);
    TrackPoint p = locate_extremum(window(f, center, half_width), kind);
    p.position = wrap_into(f.grid, p.position);
    return p;
}

std::vector<TrackPoint> track_peak(const Trajectory& traj, Extremum kind, double search_half_width)
{
    if (traj.empty())
        throw InsufficientPointsError("cannot track an empty trajectory");
    std::vector<TrackPoint> out;
    out.reserve(traj.size());
    out.push_back(locate_extremum(traj.field(0), kind));
    for (std::size_t i = 1; i < traj.size(); ++i)
        out.push_back(locate_extremum(traj.field(i), kind, out.back().position, search_half_width));
    return out;
}

double estimate_velocity(const std::vector<TrackPoint>& track)
{
    if (track.size() < 3)
        throw InsufficientPointsError(fmt::format("velocity fit needs >= 3 track points, got {}", track.size()));
    double tm = 0, xm = 0;
    for (const auto& p : track) {
        tm += p.t;
        xm += p.position;
    }
    tm /= static_cast<double>(track.size());
    xm /= static_cast<double>(track.size());
    double sxy = 0, sxx = 0;
    for (const auto& p : track) {
        sxy += (p.t - tm) * (p.position - xm);
        sxx += (p.t - tm) * (p.t - tm);
    }
    if (sxx == 0)
        throw InsufficientPointsError("velocity fit needs distinct track times");
    return sxy / sxx;
}

std::vector<TrackPoint> unwrap_track(std::vector<TrackPoint> track, double period)
{
    double shift = 0;
    for (std::size_t i = 1; i < track.size(); ++i) {
        const double raw = track[i].position + shift;
        const double jump = raw - track[i - 1].position;
        if (jump > period / 2)
            shift -= period;
        else if (jump < -period / 2)
            shift += period;
        track[i].position += shift;
    }
    return track;
}

namespace {

Eigen::VectorXd excitation_density(const Field& f, Extremum kind, double background)
{
    const Eigen::VectorXd a2 = f.values.cwiseAbs2();
    if (kind == Extremum::Peak)
        return a2;
    const double bg = background > 0 ? background : std::sqrt(a2.maxCoeff());
    return (Eigen::VectorXd::Constant(a2.size(), bg * bg) - a2).cwiseMax(0.0);
}

} // namespace

double fwhm(const Field& f, Extremum kind, double background)
{
    const Eigen::VectorXd y = excitation_density(f, kind, background);
    const Eigen::Index n = y.size();
    const bool periodic = f.grid.bc() == Boundary::Periodic;
    Eigen::Index top = 0;
    y.maxCoeff(&top);
    const double half = y[top] / 2;
    if (!(half > 0))
        throw DegenerateProfileError("no peak or dip to measure a width on");

    // Distance in samples from `top` to the half-level crossing in direction `dir`.
    auto crossing = [&](int dir) {
        for (Eigen::Index s = 1; s < n; ++s) {
            Eigen::Index i = top + dir * s;
            Eigen::Index prev = top + dir * (s - 1);
            if (periodic) {
                i = ((i % n) + n) % n;
                prev = ((prev % n) + n) % n;
            } else if (i < 0 || i >= n) {
                return static_cast<double>(s - 1);
            }
            if (y[i] <= half) {
                const double frac = (y[prev] - half) / (y[prev] - y[i]);
                return static_cast<double>(s - 1) + frac;
            }
        }
        return static_cast<double>(n);
    };
    return (crossing(-1) + crossing(+1)) * f.grid.dx();
}

double center_of_mass(const Field& f, Extremum kind, double background)
{
    const Eigen::VectorXd w = excitation_density(f, kind, background);
    const double total = w.sum();
    if (!(total > 0))
        throw DegenerateProfileError("zero excitation density; center of mass undefined");
    return w.dot(f.grid.coordinates()) / total;
}

namespace {

double shape_score(const Field& last, const ProfileFn& reference, double center, double half_width)
{
    const Field near = window(last, center, half_width);
    const double L = near.grid.length();
    const bool periodic = near.grid.bc() == Boundary::Periodic;
    return profile_deviation(near, [&](double x) {
        double off = x - center;
        if (periodic)
            off -= L * std::round(off / L);
        return reference(off);
    });
}

} // namespace

double shape_retention(const Trajectory& traj, const ProfileFn& reference, Extremum kind, double half_width,
                       double search_half_width)
{
    const auto track = track_peak(traj, kind, search_half_width);
    return shape_score(traj.field(traj.size() - 1), reference, track.back().position, half_width);
}

double profile_deviation(const Field& f, const ProfileFn& reference_of_x, const std::function<bool(double x)>& include)
{
    double num = 0, den = 0;
    for (std::size_t i = 0; i < f.grid.size(); ++i) {
        if (include && !include(f.grid.x(i)))
            continue;
        const double r = reference_of_x(f.grid.x(i));
        const double d = std::abs(f.values[static_cast<Eigen::Index>(i)]) - r;
        num += d * d;
        den += r * r;
    }
    if (!(den > 0))
        throw DegenerateProfileError("reference profile has zero norm");
    return std::sqrt(num / den);
}

std::size_t count_local_extrema(const Field& f, double center, double exclusion, double min_prominence,
                                double max_distance)
{
    const Eigen::VectorXd m = f.values.cwiseAbs();
    const Eigen::Index n = m.size();
    std::size_t count = 0;

    // Zig-zag scan of one contiguous run [b, e): an extremum is confirmed once
    // the profile retreats from it by more than min_prominence.
    auto scan = [&](Eigen::Index b, Eigen::Index e) {
        if (e - b < 3)
            return;
        int dir = 0;
        double extreme = m[b];
        double anchor = m[b];
        for (Eigen::Index i = b + 1; i < e; ++i) {
            const double v = m[i];
            if (dir == 0) {
                if (v - anchor > min_prominence) {
                    dir = 1;
                    extreme = v;
                } else if (anchor - v > min_prominence) {
                    dir = -1;
                    extreme = v;
                }
                continue;
            }
            if (dir > 0) {
                if (v > extreme) {
                    extreme = v;
                } else if (extreme - v > min_prominence) {
                    ++count;
                    dir = -1;
                    extreme = v;
                }
            } else {
                if (v < extreme) {
                    extreme = v;
                } else if (v - extreme > min_prominence) {
                    ++count;
                    dir = 1;
                    extreme = v;
                }
            }
        }
    };

    Eigen::Index start = -1;
    for (Eigen::Index i = 1; i + 1 < n; ++i) {
        const double dist = std::abs(f.grid.x(static_cast<std::size_t>(i)) - center);
        const bool inside = dist > exclusion && dist <= max_distance;
        if (inside && start < 0)
            start = i;
        if (!inside && start >= 0) {
            scan(start, i);
            start = -1;
        }
    }
    if (start >= 0)
        scan(start, n - 1);
    return count;
}

SolitonDiagnostics diagnose(const Trajectory& traj, Extremum kind, const ProfileFn& reference, double background,
                            double half_width, double search_half_width)
{
    SolitonDiagnostics d;
    auto track = track_peak(traj, kind, search_half_width);
    const Field last = traj.field(traj.size() - 1);
    const double center = track.back().position;
    const Field near = window(last, center, half_width);
    d.peak_position = center;
    d.peak_amplitude = track.back().amplitude;
    d.fwhm = fwhm(near, kind, background);
    d.center_of_mass = wrap_into(last.grid, center_of_mass(near, kind, background));
    if (traj.size() >= 3) {
        if (traj.grid.bc() == Boundary::Periodic)
            track = unwrap_track(std::move(track), traj.grid.length());
        d.velocity_estimate = estimate_velocity(track);
    } else {
        d.velocity_estimate = std::numeric_limits<double>::quiet_NaN();
    }
    d.shape_retention_error = shape_score(last, reference, center, kUnbounded);
    return d;
}

} // namespace xxz
