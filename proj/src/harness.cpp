#include "xxz/harness.hpp"

#include "xxz/continuum.hpp"
#include "xxz/lattice.hpp"
#include "xxz/rk4.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace xxz {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

ContinuumModel continuum_model(ModelChoice m)
{
    switch (m) {
    case ModelChoice::Full:
        return ContinuumModel::Extended;
    case ModelChoice::FullVariant:
        return ContinuumModel::ExtendedPhi;
    default:
        return ContinuumModel::Nls;
    }
}

struct Shape {
    double v = 0;
    double gamma = 0;
    double width = 0; // 0 for plane waves
};

Shape shape_of(const RunSetup& s)
{
    const auto& p = s.config.params;
    const auto& k = s.coeffs;
    if (s.initial == InitialKind::PlaneWave) {
        Shape sh;
        sh.v = s.config.soliton.v1 * std::sqrt(k.c0 * p.S / p.hbar);
        sh.gamma = p.hbar * sh.v / (2 * k.c0 * p.S);
        return sh;
    }
    const auto kind = s.initial == InitialKind::Bright ? SolitonKind::Bright : SolitonKind::Dark;
    const auto kin = soliton_kinematics(k, p, s.config.soliton, kind);
    return {kin.v, kin.gamma, kin.width};
}

std::complex<double> closed_form(const RunSetup& s, double x, double t)
{
    const auto& p = s.config.params;
    switch (s.initial) {
    case InitialKind::Bright:
        return bright_soliton(s.coeffs, p, s.config.soliton, x, t);
    case InitialKind::Dark:
        return dark_soliton(s.coeffs, p, s.config.soliton, x, t);
    case InitialKind::PlaneWave:
        return plane_wave(s.coeffs, p, s.wavenumber, s.config.soliton.A, x, t).value;
    }
    return {};
}

// Transients launched by held edges travel roughly four widths per unit time,
// so longer dark runs get proportionally more padding.
double dark_pad_widths(double t_end)
{
    return kDarkPadWidths + 5.0 * std::max(0.0, t_end - 3.0);
}

double norm_sq(const CVectorD& v, double dx)
{
    return v.squaredNorm() * dx;
}

std::string format_number(double v)
{
    return fmt::format("{:.17g}", v);
}

} // namespace

std::string_view to_string(ModelChoice m)
{
    switch (m) {
    case ModelChoice::Analytic:
        return "analytic";
    case ModelChoice::Nls:
        return "nls";
    case ModelChoice::Full:
        return "full";
    case ModelChoice::FullVariant:
        return "full-variant";
    case ModelChoice::LatticeSimplified:
        return "lattice-simplified";
    case ModelChoice::LatticeFull:
        return "lattice-full";
    }
    return "unknown";
}

ModelChoice parse_model(std::string_view s)
{
    for (auto m : {ModelChoice::Analytic, ModelChoice::Nls, ModelChoice::Full, ModelChoice::FullVariant,
                   ModelChoice::LatticeSimplified, ModelChoice::LatticeFull})
        if (to_string(m) == s)
            return m;
    throw ParameterError(fmt::format(
        "unknown model '{}' (expected analytic, nls, full, full-variant, lattice-simplified or lattice-full)", s));
}

Equation equation_of(ModelChoice m)
{
    switch (m) {
    case ModelChoice::Analytic:
        return Equation::Analytic;
    case ModelChoice::Nls:
        return Equation::Nls;
    case ModelChoice::Full:
        return Equation::ExtendedNls;
    case ModelChoice::FullVariant:
        return Equation::ExtendedNlsVariant;
    case ModelChoice::LatticeSimplified:
        return Equation::LatticeSimplified;
    case ModelChoice::LatticeFull:
        return Equation::LatticeFull;
    }
    return Equation::Nls;
}

bool is_lattice(ModelChoice m)
{
    return m == ModelChoice::LatticeSimplified || m == ModelChoice::LatticeFull;
}

std::string_view to_string(InitialKind k)
{
    switch (k) {
    case InitialKind::Bright:
        return "bright";
    case InitialKind::Dark:
        return "dark";
    case InitialKind::PlaneWave:
        return "plane-wave";
    }
    return "unknown";
}

ExperimentConfig resolve_preset(std::string_view name)
{
    ExperimentConfig c;
    c.preset = std::string(name);
    c.params = ModelParams<double>{1.0, 0.1, 0.1, 100.0, 10.0, 1.0};
    c.soliton = SolitonParams<double>{1.0, 5.0, 0.0};
    c.t_end = 3.0;
    if (name == "fig1a") {
        c.model = ModelChoice::Analytic;
    } else if (name == "fig1b") {
        c.params.theta = 1.5;
        c.model = ModelChoice::Analytic;
    } else if (name == "fig2a" || name == "fig2b") {
        c.params.theta = name == "fig2a" ? 0.1 : 0.9;
        c.model = ModelChoice::Full;
        c.bc = Boundary::Periodic;
    } else if (name == "fig3a" || name == "fig3b") {
        c.params.theta = name == "fig3a" ? 1.0 : 1.5;
        c.model = ModelChoice::Full;
        c.bc = Boundary::FixedEnds;
    } else if (name == "fig4") {
        c.model = ModelChoice::Full;
        c.bc = Boundary::Periodic;
        c.lambdas = {1.0, 10.0, 100.0, 1000.0, 5000.0};
    } else {
        std::string names;
        for (auto n : kPresetNames)
            names += fmt::format("{}{}", names.empty() ? "" : ", ", n);
        throw UnknownPresetError(fmt::format("unknown preset '{}' (valid: {})", name, names));
    }
    return c;
}

RunSetup prepare(const ExperimentConfig& config)
{
    RunSetup s;
    s.config = config;
    auto& c = s.config;
    if (!std::isfinite(c.t_end) || !(c.t_end > 0))
        throw ParameterError("t_end must be finite and > 0");
    validate(c.soliton);
    s.coeffs = compute_coefficients(c.params);
    s.regime = classify_regime(c.params);
    if (!s.regime.admissible)
        s.warnings.push_back(fmt::format("lambda = B/J = {} lies outside the admissible window [{}, {}]",
                                         format_number(s.regime.lambda), kLambdaMin, kLambdaMax));
    s.initial = s.regime.kind == RegimeKind::Bright ? InitialKind::Bright
                : s.regime.kind == RegimeKind::Dark ? InitialKind::Dark
                                                    : InitialKind::PlaneWave;
    const Shape sh = shape_of(s);

    if (!c.bc)
        c.bc = s.initial == InitialKind::Dark ? Boundary::FixedEnds : Boundary::Periodic;

    const double x0 = c.soliton.x0;
    const double travel = sh.v * c.t_end;
    double lo = 0, hi = 0, pad = 0;
    if (s.initial == InitialKind::PlaneWave) {
        lo = x0;
        hi = x0 + kPlaneWaveDomain;
    } else {
        pad = (s.initial == InitialKind::Dark ? dark_pad_widths(c.t_end) : kBrightPadWidths) * sh.width;
        lo = x0 + std::min(0.0, travel) - pad;
        hi = x0 + std::max(0.0, travel) + pad;
    }
    if (!c.x_min)
        c.x_min = lo;

    if (is_lattice(c.model)) {
        std::size_t sites = 0;
        if (c.n_points) {
            sites = *c.n_points;
        } else {
            const double L = c.x_max.value_or(hi) - *c.x_min;
            sites = static_cast<std::size_t>(std::floor(L)) + (*c.bc == Boundary::FixedEnds ? 1 : 0);
        }
        if (sites < 3)
            throw ParameterError("lattice runs need at least 3 sites");
        s.grid = Grid::sites(sites, *c.x_min, *c.bc);
        c.n_points = sites;
        c.x_max = s.grid.x_max();
    } else {
        if (!c.x_max)
            c.x_max = hi;
        if (!c.n_points) {
            std::size_t n = kDefaultPoints;
            if (s.initial == InitialKind::Dark) {
                const double target = (*c.x_max - *c.x_min) / (sh.width / kDarkSamplesPerWidth);
                n = std::max(n, static_cast<std::size_t>(std::ceil(target)) + 1);
            }
            c.n_points = n;
        }
        if (*c.n_points < 16)
            throw ParameterError(fmt::format("n_points = {} is below the minimum of 16", *c.n_points));
        s.grid = Grid(*c.n_points, *c.x_min, *c.x_max, *c.bc);
    }

    if (s.initial == InitialKind::PlaneWave) {
        s.wavenumber = sh.gamma;
        if (*c.bc == Boundary::Periodic) {
            const double L = s.grid.length();
            s.wavenumber = 2 * std::numbers::pi * std::round(sh.gamma * L / (2 * std::numbers::pi)) / L;
        }
    }
    s.initial_field = sample(s.grid, 0.0, [&](double x, double t) { return closed_form(s, x, t); });

    if (c.snapshots.empty()) {
        for (int i = 0; i <= 10; ++i)
            c.snapshots.push_back(c.t_end * i / 10.0);
    }
    c.snapshots = normalize_snapshot_times(c.snapshots, c.t_end);

    if (!c.dt) {
        if (c.model == ModelChoice::Analytic) {
            c.dt = 0.0;
        } else if (is_lattice(c.model)) {
            const LatticeModel<double> lm(
                c.model == ModelChoice::LatticeFull ? LatticeVariant::Full : LatticeVariant::Simplified, c.params);
            c.dt = lattice_default_dt(LatticeState<double>{s.initial_field.values, 0.0, *c.bc}, lm);
        } else {
            c.dt = stability_dt(s.grid, s.coeffs, c.params, s.initial_field, kContinuumDefaultSafety,
                                continuum_model(c.model));
        }
    }
    if (c.model != ModelChoice::Analytic && !(*c.dt > 0))
        throw ParameterError("dt must be > 0");
    return s;
}

RunRecord run_single(const ExperimentConfig& config, std::string label)
{
    if (!config.lambdas.empty())
        throw ParameterError("a lambda list describes an experiment, not a single run");
    RunRecord r;
    r.label = std::move(label);
    r.setup = prepare(config);
    const RunSetup& s = r.setup;
    const auto& c = s.config;
    const auto& p = c.params;

    if (c.model == ModelChoice::Analytic) {
        r.trajectory.grid = s.grid;
        r.trajectory.equation = Equation::Analytic;
        r.trajectory.dt = 0;
        for (double t : c.snapshots)
            r.trajectory.push(t, sample(s.grid, t, [&](double x, double tt) { return closed_form(s, x, tt); }).values);
    } else if (is_lattice(c.model)) {
        const auto variant = c.model == ModelChoice::LatticeFull ? LatticeVariant::Full : LatticeVariant::Simplified;
        const LatticeModel<double> lm(variant, p);
        const LatticeState<double> init{s.initial_field.values, 0.0, *c.bc};
        r.trajectory = evolve_lattice(init, lm, *c.dt, c.t_end, c.snapshots, s.grid);
        const LatticeState<double> last{r.trajectory.back().values, c.t_end, *c.bc};
        const double e0 = energy(init, lm);
        r.energy_drift = std::abs(energy(last, lm) - e0) / std::abs(e0);
    } else {
        r.trajectory =
            evolve(s.initial_field, s.coeffs, p, continuum_model(c.model), *c.dt, c.t_end, c.snapshots);
    }

    const double dx = s.grid.dx();
    r.norm_drift = std::abs(norm_sq(r.trajectory.back().values, dx) / norm_sq(s.initial_field.values, dx) - 1);

    const Shape sh = shape_of(s);
    const Field last = r.trajectory.field(r.trajectory.size() - 1);
    if (c.model == ModelChoice::Analytic || c.model == ModelChoice::Nls) {
        const Field exact = sample(s.grid, last.time, [&](double x, double t) { return closed_form(s, x, t); });
        r.linf_vs_analytic = linf_modulus_deviation(last, exact);
        if (s.initial != InitialKind::PlaneWave)
            r.linf_vs_analytic_near =
                linf_modulus_deviation(last, exact, c.soliton.x0 + sh.v * last.time, 5 * sh.width);
    }

    if (s.initial != InitialKind::PlaneWave) {
        const double A = c.soliton.A;
        const double w = sh.width;
        const Extremum kind = s.initial == InitialKind::Bright ? Extremum::Peak : Extremum::Dip;
        const ProfileFn reference = s.initial == InitialKind::Bright
                                        ? ProfileFn([A, w](double u) { return A / std::cosh(u / w); })
                                        : ProfileFn([A, w](double u) { return A * std::abs(std::tanh(u / w)); });
        // Follow the soliton by continuity so transients elsewhere never
        // capture the tracker: search a few widths plus the largest hop
        // between snapshots.
        double gap = r.trajectory.snapshots.front().time;
        for (std::size_t i = 1; i < r.trajectory.size(); ++i)
            gap = std::max(gap, r.trajectory.snapshots[i].time - r.trajectory.snapshots[i - 1].time);
        const double search = kTrackSearchWidths * w + std::abs(sh.v) * gap;
        r.diagnostics = diagnose(r.trajectory, kind, reference, s.initial == InitialKind::Dark ? A : 0.0,
                                 kShapeWindowWidths * w, search);
        r.shape_retention_near =
            shape_retention(r.trajectory, reference, kind, kShapeWindowWidths * w, search);
        if (s.initial == InitialKind::Dark)
            r.extrema_beyond_dip = count_local_extrema(last, r.diagnostics->peak_position, w,
                                                       kOscillationProminence * A, kShapeWindowWidths * w);
    }
    return r;
}

bool RunReport::passed() const
{
    return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.passed; });
}

namespace {

ExperimentConfig simplified(const ExperimentConfig& config)
{
    ExperimentConfig simple = config;
    if (config.model == ModelChoice::Full || config.model == ModelChoice::FullVariant)
        simple.model = ModelChoice::Nls;
    else if (config.model == ModelChoice::LatticeFull)
        simple.model = ModelChoice::LatticeSimplified;
    else
        throw ParameterError(fmt::format("model '{}' has no simplified counterpart", to_string(config.model)));
    return simple;
}

double deviation_between(const RunRecord& full, const RunRecord& base)
{
    return l2_deviation(full.trajectory.field(full.trajectory.size() - 1),
                        base.trajectory.field(base.trajectory.size() - 1)) /
           l2_norm(full.setup.initial_field);
}

} // namespace

double deviation_from_simplified(const ExperimentConfig& config)
{
    return deviation_between(run_single(config, "full"), run_single(simplified(config), "simplified"));
}

namespace {

Assertion check_below(std::string name, double value, double limit, std::string detail = {})
{
    return Assertion{std::move(name), value < limit, value, limit, std::move(detail)};
}

void fig4_experiment(const ExperimentConfig& config, RunReport& report)
{
    std::vector<std::pair<double, double>> d;
    for (double lambda : config.lambdas) {
        ExperimentConfig c = config;
        c.lambdas.clear();
        c.params.B = lambda * c.params.J;
        const ExperimentConfig simple = simplified(c);
        RunRecord full = run_single(c, fmt::format("lambda-{}-{}", lambda, to_string(c.model)));
        RunRecord base = run_single(simple, fmt::format("lambda-{}-{}", lambda, to_string(simple.model)));
        const double dev = deviation_between(full, base);
        d.emplace_back(lambda, dev);
        report.metrics.emplace_back(fmt::format("D(lambda={})", lambda), dev);
        if (full.diagnostics) {
            const double shift = full.diagnostics->peak_position - (c.soliton.x0);
            report.metrics.emplace_back(fmt::format("peak_displacement(lambda={})", lambda), shift);
        }
        for (const auto& w : full.setup.warnings)
            report.warnings.push_back(w);
        report.runs.push_back(std::move(full));
        report.runs.push_back(std::move(base));
    }
    auto D = [&](double lambda) -> std::optional<double> {
        for (auto [l, v] : d)
            if (l == lambda)
                return v;
        return std::nullopt;
    };
    if (auto d100 = D(100))
        report.assertions.push_back(check_below("D(100) < 0.05", *d100, 0.05));
    if (auto d1 = D(1), d10 = D(10), d100 = D(100); d1 && d10 && d100) {
        report.assertions.push_back(check_below("D(100) < D(10)", *d100, *d10));
        report.assertions.push_back(check_below("D(10) < D(1)", *d10, *d1));
    }
    if (auto d1 = D(1), d1000 = D(1000); d1 && d1000)
        report.assertions.push_back(check_below("D(1000) < D(1)", *d1000, *d1));
}

void single_experiment(const ExperimentConfig& config, RunReport& report)
{
    RunRecord r = run_single(config, config.preset);
    const RunSetup& s = r.setup;
    const auto& c = s.config;
    report.warnings = s.warnings;
    const double dx = s.grid.dx();
    const double A = c.soliton.A;
    const Shape sh = shape_of(s);

    if (r.diagnostics) {
        report.metrics.emplace_back("peak_position", r.diagnostics->peak_position);
        report.metrics.emplace_back("peak_amplitude", r.diagnostics->peak_amplitude);
        report.metrics.emplace_back("fwhm", r.diagnostics->fwhm);
        report.metrics.emplace_back("shape_retention", r.diagnostics->shape_retention_error);
        report.metrics.emplace_back("velocity_estimate", r.diagnostics->velocity_estimate);
    }
    report.metrics.emplace_back("norm_drift", r.norm_drift);
    if (r.energy_drift)
        report.metrics.emplace_back("energy_drift", *r.energy_drift);
    if (r.linf_vs_analytic)
        report.metrics.emplace_back("linf_vs_analytic", *r.linf_vs_analytic);
    if (r.linf_vs_analytic_near)
        report.metrics.emplace_back("linf_vs_analytic_near", *r.linf_vs_analytic_near);
    if (r.shape_retention_near)
        report.metrics.emplace_back("shape_retention_near", *r.shape_retention_near);
    if (r.extrema_beyond_dip)
        report.metrics.emplace_back("extrema_beyond_dip", static_cast<double>(*r.extrema_beyond_dip));

    const double expected_center = c.soliton.x0 + sh.v * c.t_end;
    if (c.preset == "fig1a") {
        report.assertions.push_back(check_below("peak position within dx of x0 + v t",
                                                std::abs(r.diagnostics->peak_position - expected_center), dx,
                                                fmt::format("expected {}", format_number(expected_center))));
        report.assertions.push_back(
            check_below("peak amplitude within 1e-3 of A", std::abs(r.diagnostics->peak_amplitude - A), 1e-3));
    } else if (c.preset == "fig1b") {
        report.assertions.push_back(check_below("dip position within dx of x0 + v' t",
                                                std::abs(r.diagnostics->peak_position - expected_center), dx,
                                                fmt::format("expected {}", format_number(expected_center))));
        report.assertions.push_back(check_below("dip depth below 2e-2 A", r.diagnostics->peak_amplitude, 2e-2 * A));
    } else if (c.preset == "fig2a") {
        report.assertions.push_back(
            check_below("shape retention < 0.05", r.diagnostics->shape_retention_error, 0.05));
    }
    if (s.initial == InitialKind::PlaneWave &&
        (c.model == ModelChoice::Nls || c.model == ModelChoice::Analytic)) {
        double worst = 0;
        for (const auto& snap : r.trajectory.snapshots) {
            const Eigen::VectorXd m = snap.values.cwiseAbs();
            worst = std::max(worst, m.maxCoeff() - m.minCoeff());
        }
        report.assertions.push_back(check_below("uniform modulus (max - min < 1e-10 A)", worst, 1e-10 * A));
    }
    report.runs.push_back(std::move(r));
}

} // namespace

RunReport run_experiment(const ExperimentConfig& config)
{
    RunReport report;
    report.config = config;
    if (!config.lambdas.empty())
        fig4_experiment(config, report);
    else
        single_experiment(config, report);
    return report;
}

std::string_view to_string(SweepAxis a)
{
    return a == SweepAxis::Theta ? "theta" : "lambda";
}

SweepAxis parse_sweep_axis(std::string_view s)
{
    if (s == "theta")
        return SweepAxis::Theta;
    if (s == "lambda")
        return SweepAxis::Lambda;
    throw ParameterError(fmt::format("unknown sweep axis '{}' (expected theta or lambda)", s));
}

SweepTable sweep(const ExperimentConfig& base, SweepAxis axis, std::vector<double> values)
{
    if (values.size() < 2)
        throw ParameterError(fmt::format("a sweep needs at least 2 values, got {}", values.size()));
    for (double v : values)
        if (!std::isfinite(v))
            throw ParameterError("sweep values must be finite");
    std::sort(values.begin(), values.end());

    SweepTable table;
    table.axis = axis;
    table.base = base;
    table.base.lambdas.clear();
    const bool full = base.model == ModelChoice::Full || base.model == ModelChoice::FullVariant ||
                      base.model == ModelChoice::LatticeFull;
    for (double v : values) {
        ExperimentConfig c = table.base;
        if (axis == SweepAxis::Theta)
            c.params.theta = v;
        else
            c.params.B = v * c.params.J;
        SweepRow row{v, RegimeKind::Linear, false, kNaN, kNaN, kNaN, kNaN, {}};
        try {
            const Regime reg = classify_regime(c.params);
            row.regime = reg.kind;
            row.admissible = reg.admissible;
            const RunRecord r = run_single(c, "row");
            row.norm_drift = r.norm_drift;
            if (r.diagnostics) {
                row.shape_retention = r.diagnostics->shape_retention_error;
                row.velocity = r.diagnostics->velocity_estimate;
            }
            if (full)
                row.deviation = deviation_between(r, run_single(simplified(c), "simplified"));
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

} // namespace xxz
