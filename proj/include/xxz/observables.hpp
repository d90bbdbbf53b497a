#pragma once

// Diagnostics on fields and trajectories. Everything compares moduli, so a
// global phase (or the fast carrier) never shows up in a score.

#include "xxz/grid.hpp"

#include <functional>
#include <limits>
#include <vector>

namespace xxz {

enum class Extremum { Peak, Dip };

struct TrackPoint {
    double t;
    double position;
    double amplitude;
};

struct SolitonDiagnostics {
    double peak_position = 0;
    double peak_amplitude = 0;
    double fwhm = 0;
    double center_of_mass = 0;
    double velocity_estimate = 0;
    double shape_retention_error = 0;
};

// sqrt(sum (|a_i| - |b_i|)^2 dx)
double l2_deviation(const Field& a, const Field& b);

// max_i | |a_i| - |b_i| |
double linf_modulus_deviation(const Field& a, const Field& b);

// Same as above restricted to samples with |x - center| <= half_width.
double linf_modulus_deviation(const Field& a, const Field& b, double center, double half_width);

// sqrt(sum |f_i|^2 dx)
double l2_norm(const Field& f);

// Position and modulus of the extremum of |phi|, refined by a three-point
// parabola; ties go to the smaller x. FixedEnds edges are never selected.
TrackPoint locate_extremum(const Field& f, Extremum kind);

// Same, searching only samples within `half_width` of `center`.
TrackPoint locate_extremum(const Field& f, Extremum kind, double center, double half_width);

// Samples within `half_width` of `center` (minimum image on periodic grids) as
// a standalone FixedEnds field with unwrapped coordinates. An infinite
// half-width returns `f` unchanged.
Field window(const Field& f, double center, double half_width);

constexpr double kUnbounded = std::numeric_limits<double>::infinity();

// Follows one extremum through the snapshots: the first is searched globally,
// each later one within `search_half_width` of the previous position.
std::vector<TrackPoint> track_peak(const Trajectory& traj, Extremum kind, double search_half_width = kUnbounded);

// Least-squares slope of position against time.
double estimate_velocity(const std::vector<TrackPoint>& track);

// Removes jumps larger than half the period (for tracks on periodic grids).
std::vector<TrackPoint> unwrap_track(std::vector<TrackPoint> track, double period);

// Full width at half maximum: of |phi|^2 for peaks, of (background^2 - |phi|^2)
// for dips, using linear interpolation between samples.
double fwhm(const Field& f, Extremum kind, double background = 0);

// First moment of |phi|^2 (peaks) or of max(background^2 - |phi|^2, 0) (dips).
double center_of_mass(const Field& f, Extremum kind, double background = 0);

// Reference modulus as a function of the offset from the soliton center.
using ProfileFn = std::function<double(double offset)>;

// Normalized L2 deviation of the final |phi| from `reference` re-centered on
// the tracked extremum, over samples within `half_width` of that center.
// Offsets on periodic grids use the minimum image.
double shape_retention(const Trajectory& traj, const ProfileFn& reference, Extremum kind,
                       double half_width = kUnbounded, double search_half_width = kUnbounded);

// Same score without re-centering (the reference is a function of x); samples
// where `include` returns false are skipped.
double profile_deviation(const Field& f, const ProfileFn& reference_of_x,
                         const std::function<bool(double x)>& include = {});

// Count of strict local extrema of |phi| farther than `exclusion` but no
// farther than `max_distance` from `center`, ignoring wiggles smaller than
// `min_prominence`. Edge samples are excluded.
std::size_t count_local_extrema(const Field& f, double center, double exclusion, double min_prominence,
                                double max_distance = kUnbounded);

// Width and center of mass are taken within `half_width` of the final tracked
// center; the shape score always covers the whole field. `search_half_width`
// is passed to track_peak.
SolitonDiagnostics diagnose(const Trajectory& traj, Extremum kind, const ProfileFn& reference, double background = 0,
                            double half_width = kUnbounded, double search_half_width = kUnbounded);

} // namespace xxz
