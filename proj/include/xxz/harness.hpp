#pragma once

// Named, reproducible experiments: figure presets, single runs, sweeps over
// the field angle or lambda = B / J, and the checks attached to each preset.

#include "xxz/analytic.hpp"
#include "xxz/grid.hpp"
#include "xxz/model.hpp"
#include "xxz/observables.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace xxz {

enum class ModelChoice { Analytic, Nls, Full, FullVariant, LatticeSimplified, LatticeFull };

std::string_view to_string(ModelChoice m);
ModelChoice parse_model(std::string_view s);
Equation equation_of(ModelChoice m);
bool is_lattice(ModelChoice m);

// Initial condition, chosen from the regime: sech for c1 > 0, tanh for c1 < 0,
// a plane wave in the linear regime.
enum class InitialKind { Bright, Dark, PlaneWave };

std::string_view to_string(InitialKind k);

struct ExperimentConfig {
    std::string preset = "custom";
    ModelParams<double> params;
    SolitonParams<double> soliton;
    ModelChoice model = ModelChoice::Nls;
    std::optional<Boundary> bc;
    std::optional<std::size_t> n_points;
    std::optional<double> x_min;
    std::optional<double> x_max;
    std::optional<double> dt; // unset: default stability step
    double t_end = 3;
    std::vector<double> snapshots; // empty: 11 equally spaced times
    std::vector<double> lambdas;   // fig4 only: one run pair per B = lambda J

    bool operator==(const ExperimentConfig&) const = default;
};

inline constexpr std::string_view kPresetNames[] = {"fig1a", "fig1b", "fig2a", "fig2b", "fig3a", "fig3b", "fig4"};

ExperimentConfig resolve_preset(std::string_view name);

// Default padding around the soliton path, in widths. Dark runs need more room:
// held edges launch transients that reach ~12 widths inward by t = 3.
inline constexpr double kBrightPadWidths = 10.0;
inline constexpr double kDarkPadWidths = 30.0;
inline constexpr std::size_t kDefaultPoints = 2048;
// Dark grids are refined to at least this many samples per width.
inline constexpr double kDarkSamplesPerWidth = 90.0;
inline constexpr double kPlaneWaveDomain = 200.0;
// Shape scores and oscillation counts look this many widths either side of the
// tracked center, away from anything the domain edges launch.
inline constexpr double kShapeWindowWidths = 10.0;
// Wiggles of |phi| smaller than this fraction of A are not counted as spatial
// oscillation; the grid-scale ripple from held edges stays below ~1e-2 A.
inline constexpr double kOscillationProminence = 0.02;
// Tracking radius between snapshots, in widths, on top of the expected travel.
inline constexpr double kTrackSearchWidths = 3.0;

// Everything a run needs, with every default made explicit.
struct RunSetup {
    ExperimentConfig config; // all optionals filled
    InitialKind initial;
    Regime regime;
    Coefficients<double> coeffs;
    Grid grid;
    Field initial_field;
    double wavenumber = 0; // plane waves only (snapped to a grid mode)
    std::vector<std::string> warnings;
};

RunSetup prepare(const ExperimentConfig& config);

struct RunRecord {
    std::string label;
    RunSetup setup;
    Trajectory trajectory;
    std::optional<SolitonDiagnostics> diagnostics; // absent for plane waves
    double norm_drift = 0;                         // |N(t_end) / N(0) - 1|
    std::optional<double> energy_drift;            // lattice runs
    std::optional<double> linf_vs_analytic;        // NLS and analytic runs
    std::optional<double> linf_vs_analytic_near;   // same within 5 widths of the center
    std::optional<double> shape_retention_near;    // shape score within kShapeWindowWidths
    std::optional<std::size_t> extrema_beyond_dip; // dark runs
};

// Executes `config` once (fig4 is not a single run).
RunRecord run_single(const ExperimentConfig& config, std::string label = "run");

struct Assertion {
    std::string name;
    bool passed;
    double value;
    double limit;
    std::string detail;
};

struct RunReport {
    ExperimentConfig config;
    std::vector<RunRecord> runs;
    std::vector<Assertion> assertions;
    std::vector<std::pair<std::string, double>> metrics;
    std::vector<std::string> warnings;

    bool passed() const;
};

RunReport run_experiment(const ExperimentConfig& config);

// l2_deviation between the full model and its simplified counterpart at t_end,
// over the initial L2 norm. `config.model` picks the pair: continuum (Full or
// FullVariant vs Nls) or lattice (LatticeFull vs LatticeSimplified).
double deviation_from_simplified(const ExperimentConfig& config);

enum class SweepAxis { Theta, Lambda };

std::string_view to_string(SweepAxis a);
SweepAxis parse_sweep_axis(std::string_view s);

struct SweepRow {
    double value;
    RegimeKind regime;
    bool admissible;
    double shape_retention; // NaN when not applicable or failed
    double norm_drift;
    double velocity;
    double deviation; // vs simplified model; NaN unless the model is a full one
    std::string error;

    bool operator==(const SweepRow&) const = default;
};

struct SweepTable {
    SweepAxis axis;
    ExperimentConfig base;
    std::vector<SweepRow> rows; // ordered by value
};

// One independent run per value (theta in radians, or lambda with B = lambda J).
SweepTable sweep(const ExperimentConfig& base, SweepAxis axis, std::vector<double> values);

} // namespace xxz
