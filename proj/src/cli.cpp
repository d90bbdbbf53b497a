#include "xxz/cli.hpp"

#include "xxz/io.hpp"
#include "xxz/observables.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

namespace xxz {

namespace {

std::string num(double v)
{
    return fmt::format("{:.17g}", v);
}

// Config-file path plus one `--key` flag per config key; flags override the
// file's entries.
struct ConfigFlags {
    std::string file;
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;

    void attach(CLI::App* app)
    {
        app->add_option("--config", file, "config file (key = value lines)")->check(CLI::ExistingFile);
        for (auto key : kConfigKeys) {
            const std::string k(key);
            options[k] = app->add_option("--" + k, values[k], fmt::format("config key '{}'", k));
        }
    }

    ExperimentConfig resolve() const
    {
        ConfigEntries entries;
        if (!file.empty())
            entries = parse_config_entries(read_text_file());
        for (const auto& [key, opt] : options)
            if (opt->count() > 0)
                entries.insert_or_assign(key, ConfigEntry{values.at(key), 0});
        return resolve_config(entries);
    }

  private:
    std::string read_text_file() const
    {
        std::ifstream in(file, std::ios::binary);
        if (!in)
            throw IoError(fmt::format("cannot open '{}' for reading", file));
        return std::string(std::istreambuf_iterator<char>(in), {});
    }
};

struct OutputFlags {
    std::string dir;
    bool heatmap = false;

    void attach(CLI::App* app)
    {
        app->add_option("--out", dir, "output directory for trajectories and the report");
        app->add_flag("--heatmap", heatmap, "also write |phi(x,t)| as a PGM image per run");
    }
};

void print_config(std::ostream& out, const ExperimentConfig& c)
{
    std::istringstream lines(config_text(c));
    for (std::string line; std::getline(lines, line);)
        fmt::print(out, "# {}\n", line);
}

void print_warnings(std::ostream& err, const std::vector<std::string>& warnings)
{
    for (const auto& w : warnings)
        fmt::print(err, "warning: {}\n", w);
}

void print_run(std::ostream& out, const RunRecord& r)
{
    fmt::print(out, "run {}: model {}, equation {}, initial {}, regime {}\n", r.label, to_string(r.setup.config.model),
               to_string(r.trajectory.equation), to_string(r.setup.initial), to_string(r.setup.regime.kind));
    fmt::print(out, "grid: {} points on [{}, {}], dx = {}, bc {}; dt = {}\n", r.setup.grid.size(),
               num(r.setup.grid.x_min()), num(r.setup.grid.x_max()), num(r.setup.grid.dx()),
               to_string(r.setup.grid.bc()), num(r.trajectory.dt));
    if (r.diagnostics) {
        const auto& d = *r.diagnostics;
        fmt::print(out, "peak_position = {}\n", num(d.peak_position));
        fmt::print(out, "peak_amplitude = {}\n", num(d.peak_amplitude));
        fmt::print(out, "fwhm = {}\n", num(d.fwhm));
        fmt::print(out, "center_of_mass = {}\n", num(d.center_of_mass));
        fmt::print(out, "velocity_estimate = {}\n", num(d.velocity_estimate));
        fmt::print(out, "shape_retention = {}\n", num(d.shape_retention_error));
    }
    fmt::print(out, "norm_drift = {}\n", num(r.norm_drift));
    if (r.energy_drift)
        fmt::print(out, "energy_drift = {}\n", num(*r.energy_drift));
    if (r.extrema_beyond_dip)
        fmt::print(out, "extrema_beyond_dip = {}\n", *r.extrema_beyond_dip);
}

RunReport single_run_report(const ExperimentConfig& c, RunRecord r)
{
    RunReport report;
    report.config = c;
    report.warnings = r.setup.warnings;
    report.runs.push_back(std::move(r));
    return report;
}

void save(const OutputFlags& o, const RunReport& report, std::ostream& out)
{
    if (o.dir.empty())
        return;
    DirectoryLock lock(o.dir);
    write_report(report, o.dir, o.heatmap);
    fmt::print(out, "wrote {}\n", (std::filesystem::path(o.dir) / "report.json").string());
}

int run_coeffs(double J, double delta, double theta, double B, double S, double hbar, bool as_json,
               std::ostream& out)
{
    const ModelParams<double> p{J, delta, theta, B, S, hbar};
    const auto k = compute_coefficients(p);
    const auto reg = classify_regime(p);
    if (as_json) {
        auto j = to_json(k);
        j["lambda"] = reg.lambda;
        j["regime"] = std::string(to_string(reg.kind));
        j["admissible"] = reg.admissible;
        fmt::print(out, "{}\n", j.dump(2));
        return kExitOk;
    }
    fmt::print(out, "c0 = {}\nc1 = {}\nc2 = {}\nc3 = {}\nV = {}\nchi = {}\ntheta_magic = {}\n", num(k.c0), num(k.c1),
               num(k.c2), num(k.c3), num(k.V), num(k.chi), num(k.theta_magic));
    fmt::print(out, "lambda = {}\nregime = {}\nadmissible = {}\n", num(reg.lambda), to_string(reg.kind),
               reg.admissible ? "yes" : "no");
    return kExitOk;
}

int run_simulate(const ConfigFlags& f, const OutputFlags& o, std::ostream& out, std::ostream& err)
{
    const ExperimentConfig c = f.resolve();
    RunRecord r = run_single(c, c.preset == "custom" ? "run" : c.preset);
    print_config(out, r.setup.config);
    print_warnings(err, r.setup.warnings);
    print_run(out, r);
    save(o, single_run_report(c, std::move(r)), out);
    return kExitOk;
}

int run_compare(const ConfigFlags& f, const OutputFlags& o, std::ostream& out, std::ostream& err)
{
    const ExperimentConfig c = f.resolve();
    RunRecord numeric = run_single(c, "numeric");
    ExperimentConfig ac = numeric.setup.config;
    ac.model = ModelChoice::Analytic;
    ac.dt.reset();
    RunRecord exact = run_single(ac, "analytic");
    print_config(out, numeric.setup.config);
    print_warnings(err, numeric.setup.warnings);

    RunReport report = single_run_report(c, std::move(numeric));
    const RunRecord& num_run = report.runs.front();
    fmt::print(out, "{:>24} {:>24} {:>24}\n", "t", "linf_modulus", "l2_relative");
    double worst = 0;
    for (std::size_t i = 0; i < num_run.trajectory.size(); ++i) {
        const Field a = num_run.trajectory.field(i);
        const Field b = exact.trajectory.field(i);
        const double linf = linf_modulus_deviation(a, b);
        const double l2 = l2_deviation(a, b) / l2_norm(b);
        worst = std::max(worst, linf);
        fmt::print(out, "{:>24} {:>24} {:>24}\n", num(a.time), num(linf), num(l2));
    }
    const Field last_a = num_run.trajectory.field(num_run.trajectory.size() - 1);
    const Field last_b = exact.trajectory.field(exact.trajectory.size() - 1);
    report.metrics.emplace_back("linf_modulus_final", linf_modulus_deviation(last_a, last_b));
    report.metrics.emplace_back("l2_relative_final", l2_deviation(last_a, last_b) / l2_norm(last_b));
    report.metrics.emplace_back("linf_modulus_max", worst);
    fmt::print(out, "linf_modulus_max = {}\n", num(worst));
    report.runs.push_back(std::move(exact));
    save(o, report, out);
    return kExitOk;
}

int run_sweep(const ConfigFlags& f, const std::string& axis, const std::vector<double>& values,
              const OutputFlags& o, std::ostream& out, std::ostream&)
{
    const ExperimentConfig c = f.resolve();
    const SweepTable table = sweep(c, parse_sweep_axis(axis), values);
    print_config(out, table.base);
    fmt::print(out, "{}", sweep_text(table));
    if (!o.dir.empty()) {
        DirectoryLock lock(o.dir);
        write_sweep(table, o.dir);
        fmt::print(out, "wrote {}\n", (std::filesystem::path(o.dir) / "sweep.json").string());
    }
    return kExitOk;
}

int run_experiment_cmd(const ConfigFlags& f, const OutputFlags& o, std::ostream& out, std::ostream& err)
{
    const ExperimentConfig c = f.resolve();
    const RunReport report = run_experiment(c);
    print_config(out, c);
    print_warnings(err, report.warnings);
    for (const auto& r : report.runs)
        fmt::print(out, "run {}: model {}, equation {}, {} points, dt = {}\n", r.label,
                   to_string(r.setup.config.model), to_string(r.trajectory.equation), r.setup.grid.size(),
                   num(r.trajectory.dt));
    for (const auto& [k, v] : report.metrics)
        fmt::print(out, "{} = {}\n", k, num(v));
    for (const auto& a : report.assertions)
        fmt::print(out, "{} {} (value {}, limit {}){}\n", a.passed ? "PASS" : "FAIL", a.name, num(a.value),
                   num(a.limit), a.detail.empty() ? "" : "; " + a.detail);
    save(o, report, out);
    return report.passed() ? kExitOk : kExitAssertion;
}

} // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"XXZ chain in an oblique field: coefficients, soliton runs and experiments", "xxz_cli"};
    app.require_subcommand(1);

    auto* coeffs = app.add_subcommand("coeffs", "print coefficients and regime for a parameter set");
    double J = 0, delta = 0, theta = 0, B = 0, S = 0, hbar = 1;
    bool as_json = false;
    coeffs->add_option("--J", J, "exchange coupling")->required();
    coeffs->add_option("--delta", delta, "anisotropy offset")->required();
    coeffs->add_option("--theta", theta, "field angle (radians)")->required();
    coeffs->add_option("--B", B, "field magnitude")->required();
    coeffs->add_option("--S", S, "site spin")->required();
    coeffs->add_option("--hbar", hbar, "reduced Planck constant")->capture_default_str();
    coeffs->add_flag("--json", as_json, "print JSON instead of key = value lines");

    ConfigFlags sim_cfg, cmp_cfg, sweep_cfg, exp_cfg;
    OutputFlags sim_out, cmp_out, sweep_out, exp_out;
    auto* simulate = app.add_subcommand("simulate", "run one model from a config");
    sim_cfg.attach(simulate);
    sim_out.attach(simulate);
    auto* compare = app.add_subcommand("compare", "run a model and report its deviation from the closed form");
    cmp_cfg.attach(compare);
    cmp_out.attach(compare);
    auto* sweep_cmd = app.add_subcommand("sweep", "repeat a run over theta or lambda values");
    sweep_cfg.attach(sweep_cmd);
    sweep_out.attach(sweep_cmd);
    std::string axis;
    std::vector<double> values;
    sweep_cmd->add_option("--axis", axis, "theta or lambda")->required();
    sweep_cmd->add_option("--values", values, "comma-separated values")->required()->delimiter(',');
    auto* experiment = app.add_subcommand("experiment", "run a preset (or custom) experiment with its checks");
    exp_cfg.attach(experiment);
    exp_out.attach(experiment);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInvalid;
    }

    try {
        if (*coeffs)
            return run_coeffs(J, delta, theta, B, S, hbar, as_json, out);
        if (*simulate)
            return run_simulate(sim_cfg, sim_out, out, err);
        if (*compare)
            return run_compare(cmp_cfg, cmp_out, out, err);
        if (*sweep_cmd)
            return run_sweep(sweep_cfg, axis, values, sweep_out, out, err);
        return run_experiment_cmd(exp_cfg, exp_out, out, err);
    } catch (const StepSizeError& e) {
        fmt::print(err, "error: step size: {}\n", e.what());
        return kExitInvalid;
    } catch (const ParameterError& e) {
        fmt::print(err, "error: {}\n", e.what());
        return kExitInvalid;
    } catch (const NumericBlowupError& e) {
        fmt::print(err, "error: numeric blowup: {}\n", e.what());
        return kExitBlowup;
    } catch (const DegenerateProfileError& e) {
        fmt::print(err, "error: numeric blowup: {}\n", e.what());
        return kExitBlowup;
    } catch (const std::exception& e) {
        fmt::print(err, "error: {}\n", e.what());
        return kExitInvalid;
    }
}

int cli_main(int argc, const char* const* argv)
{
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i)
        args.emplace_back(argv[i]);
    return cli_main(args, std::cout, std::cerr);
}

} // namespace xxz
