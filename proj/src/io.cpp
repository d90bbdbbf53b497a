#include "xxz/io.hpp"

#include <fmt/format.h>

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace xxz {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string num(double v)
{
    return fmt::format("{:.17g}", v);
}

bool parse_double(std::string_view s, double& out)
{
    s = trim(s);
    if (!s.empty() && s.front() == '+')
        s.remove_prefix(1);
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && end == s.data() + s.size();
}

bool is_known_key(std::string_view key)
{
    return std::find(std::begin(kConfigKeys), std::end(kConfigKeys), key) != std::end(kConfigKeys);
}

// Typed access to config entries; every failure names its key and line.
class EntryReader {
  public:
    explicit EntryReader(const ConfigEntries& e) : entries_(e) {}

    const ConfigEntry* find(std::string_view key) const
    {
        const auto it = entries_.find(key);
        return it == entries_.end() ? nullptr : &it->second;
    }

    [[noreturn]] void fail(std::string_view key, const std::string& what) const
    {
        const auto* e = find(key);
        throw ConfigError(fmt::format("{}: {}", key, what), e ? e->line : 0, std::string(key));
    }

    double number(std::string_view key) const
    {
        const auto& raw = find(key)->value;
        double v = 0;
        if (!parse_double(raw, v) || !std::isfinite(v))
            fail(key, fmt::format("expected a finite number, got '{}'", raw));
        return v;
    }

    double positive(std::string_view key) const
    {
        const double v = number(key);
        if (!(v > 0))
            fail(key, fmt::format("must be > 0, got {}", num(v)));
        return v;
    }

    std::size_t count(std::string_view key) const
    {
        const auto raw = trim(find(key)->value);
        std::size_t v = 0;
        const auto [end, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
        if (ec != std::errc() || end != raw.data() + raw.size())
            fail(key, fmt::format("expected a non-negative integer, got '{}'", raw));
        return v;
    }

    std::vector<double> list(std::string_view key) const
    {
        std::vector<double> out;
        std::string_view rest = find(key)->value;
        while (true) {
            const auto comma = rest.find(',');
            const auto item = trim(rest.substr(0, comma));
            double v = 0;
            if (!parse_double(item, v) || !std::isfinite(v))
                fail(key, fmt::format("expected a comma-separated list of finite numbers, got '{}'", item));
            out.push_back(v);
            if (comma == std::string_view::npos)
                break;
            rest.remove_prefix(comma + 1);
        }
        return out;
    }

    template <typename Fn>
    auto named(std::string_view key, Fn&& parse) const
    {
        try {
            return parse(trim(find(key)->value));
        } catch (const ParameterError& e) {
            fail(key, e.what());
        }
    }

  private:
    const ConfigEntries& entries_;
};

json grid_json(const Grid& g)
{
    return json{{"n_points", g.size()},
                {"x_min", g.x_min()},
                {"x_max", g.x_max()},
                {"dx", g.dx()},
                {"bc", std::string(to_string(g.bc()))}};
}

std::string_view scheme_of(Equation e)
{
    switch (e) {
    case Equation::Analytic:
        return "closed-form";
    case Equation::LatticeSimplified:
    case Equation::LatticeFull:
        return "rk4-lattice";
    default:
        return "rk4-method-of-lines-central-2nd-order";
    }
}

// Non-finite values (e.g. an undefined velocity) are stored as null.
json number(double v)
{
    return std::isfinite(v) ? json(v) : json(nullptr);
}

json optional_number(const std::optional<double>& v)
{
    return v ? number(*v) : json(nullptr);
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
    out << text;
    out.close();
    if (!out)
        throw IoError(fmt::format("failed writing '{}'", path.string()));
}

std::string read_text(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError(fmt::format("cannot open '{}' for reading", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json base_metadata(const Trajectory& traj)
{
    json meta;
    meta["format"] = {{"columns", {"t", "x", "re", "im", "abs2"}}, {"significant_digits", 17}};
    meta["equation"] = std::string(to_string(traj.equation));
    meta["scheme"] = {{"method", std::string(scheme_of(traj.equation))}, {"dt", traj.dt}};
    meta["grid"] = grid_json(traj.grid);
    json times = json::array();
    for (const auto& s : traj.snapshots)
        times.push_back(s.time);
    meta["snapshot_times"] = times;
    return meta;
}

void write_csv(const Trajectory& traj, const fs::path& path)
{
    fmt::memory_buffer buf;
    fmt::format_to(std::back_inserter(buf), "t,x,re,im,abs2\n");
    for (const auto& s : traj.snapshots) {
        for (std::size_t i = 0; i < traj.grid.size(); ++i) {
            const auto z = s.values[static_cast<Eigen::Index>(i)];
            fmt::format_to(std::back_inserter(buf), "{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", s.time,
                           traj.grid.x(i), z.real(), z.imag(), std::norm(z));
        }
    }
    write_text(path, fmt::to_string(buf));
}

std::string file_stem_for(std::string label)
{
    for (char& ch : label)
        if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_' || ch == '.'))
            ch = '_';
    return label.empty() ? "run" : label;
}

json run_json(const RunRecord& r)
{
    const auto& s = r.setup;
    json j;
    j["label"] = r.label;
    j["trajectory"] = file_stem_for(r.label) + ".csv";
    j["model"] = std::string(to_string(s.config.model));
    j["equation"] = std::string(to_string(r.trajectory.equation));
    j["initial"] = std::string(to_string(s.initial));
    j["regime"] = {{"kind", std::string(to_string(s.regime.kind))},
                   {"lambda", s.regime.lambda},
                   {"admissible", s.regime.admissible}};
    j["config"] = to_json(s.config);
    j["coefficients"] = to_json(s.coeffs);
    j["grid"] = grid_json(s.grid);
    if (s.initial == InitialKind::PlaneWave)
        j["wavenumber"] = s.wavenumber;
    j["diagnostics"] = r.diagnostics ? to_json(*r.diagnostics) : json(nullptr);
    j["norm_drift"] = r.norm_drift;
    j["energy_drift"] = optional_number(r.energy_drift);
    j["linf_vs_analytic"] = optional_number(r.linf_vs_analytic);
    j["linf_vs_analytic_near"] = optional_number(r.linf_vs_analytic_near);
    j["shape_retention_near"] = optional_number(r.shape_retention_near);
    j["extrema_beyond_dip"] = r.extrema_beyond_dip ? json(*r.extrema_beyond_dip) : json(nullptr);
    j["warnings"] = s.warnings;
    return j;
}

} // namespace

ConfigEntries parse_config_entries(std::string_view text)
{
    ConfigEntries entries;
    std::istringstream lines{std::string(text)};
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(lines, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(fmt::format("expected 'key = value', got '{}'", line), line_no);
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (key.empty())
            throw ConfigError("missing key before '='", line_no);
        if (!is_known_key(key))
            throw ConfigError(fmt::format("unknown key '{}'", key), line_no, key);
        if (value.empty())
            throw ConfigError(fmt::format("{}: missing value", key), line_no, key);
        if (const auto it = entries.find(key); it != entries.end())
            throw ConfigError(fmt::format("duplicate key '{}' (first set on line {})", key, it->second.line), line_no,
                              key);
        entries.emplace(key, ConfigEntry{value, line_no});
    }
    return entries;
}

ExperimentConfig resolve_config(const ConfigEntries& entries)
{
    for (const auto& [key, e] : entries)
        if (!is_known_key(key))
            throw ConfigError(fmt::format("unknown key '{}'", key), e.line, key);
    const EntryReader in(entries);

    std::string preset = "custom";
    if (const auto* p = in.find("preset"))
        preset = std::string(trim(p->value));

    ExperimentConfig c;
    const bool custom = preset == "custom";
    if (custom) {
        c.preset = preset;
    } else {
        c = resolve_preset(preset);
    }

    // Physics keys: assigned for custom configs, checked against a preset.
    auto physics = [&](std::string_view key, double& slot, double value) {
        if (custom)
            slot = value;
        else if (value != slot)
            in.fail(key, fmt::format("{} conflicts with preset {} ({})", num(value), preset, num(slot)));
    };
    auto& p = c.params;
    auto& s = c.soliton;
    if (in.find("J"))
        physics("J", p.J, in.positive("J"));
    if (in.find("delta"))
        physics("delta", p.delta, in.number("delta"));
    if (in.find("theta"))
        physics("theta", p.theta, in.number("theta"));
    if (in.find("B"))
        physics("B", p.B, in.positive("B"));
    if (in.find("S")) {
        const double S = in.number("S");
        if (!(S >= 0.5))
            in.fail("S", fmt::format("must be >= 1/2, got {}", num(S)));
        physics("S", p.S, S);
    }
    if (in.find("hbar"))
        physics("hbar", p.hbar, in.positive("hbar"));
    if (in.find("A"))
        physics("A", s.A, in.positive("A"));
    if (in.find("v1"))
        physics("v1", s.v1, in.number("v1"));
    if (in.find("x0"))
        physics("x0", s.x0, in.number("x0"));

    // Completeness is checked after the values themselves, so a bad value is
    // reported before a missing neighbour.
    if (custom) {
        for (auto key : kPhysicsKeys)
            if (!in.find(key))
                throw ConfigError(fmt::format("custom config is missing required key '{}'", key), 0,
                                  std::string(key));
        if (!in.find("model"))
            throw ConfigError("custom config is missing required key 'model'", 0, "model");
    }

    // Numerics and model choice may be overridden on presets.
    if (in.find("model"))
        c.model = in.named("model", [](std::string_view v) { return parse_model(v); });
    if (in.find("bc"))
        c.bc = in.named("bc", [](std::string_view v) { return parse_boundary(v); });
    if (in.find("n_points")) {
        const std::size_t n = in.count("n_points");
        if (n < 3)
            in.fail("n_points", fmt::format("must be >= 3, got {}", n));
        c.n_points = n;
    }
    if (in.find("x_min"))
        c.x_min = in.number("x_min");
    if (in.find("x_max"))
        c.x_max = in.number("x_max");
    if (c.x_min && c.x_max && !(*c.x_max > *c.x_min))
        in.fail("x_max", fmt::format("must exceed x_min ({})", num(*c.x_min)));
    if (in.find("dt"))
        c.dt = in.positive("dt");
    if (in.find("t_end"))
        c.t_end = in.positive("t_end");
    if (in.find("snapshots")) {
        c.snapshots = in.list("snapshots");
        for (double t : c.snapshots)
            if (t < 0 || t > c.t_end)
                in.fail("snapshots", fmt::format("time {} lies outside [0, t_end = {}]", num(t), num(c.t_end)));
    }
    return c;
}

ExperimentConfig parse_config(std::string_view text)
{
    return resolve_config(parse_config_entries(text));
}

ExperimentConfig read_config(const fs::path& path)
{
    return parse_config(read_text(path));
}

std::string config_text(const ExperimentConfig& c)
{
    std::string out;
    auto put = [&](std::string_view key, const std::string& value) { out += fmt::format("{} = {}\n", key, value); };
    put("preset", c.preset);
    put("J", num(c.params.J));
    put("delta", num(c.params.delta));
    put("theta", num(c.params.theta));
    put("B", num(c.params.B));
    put("S", num(c.params.S));
    put("hbar", num(c.params.hbar));
    put("A", num(c.soliton.A));
    put("v1", num(c.soliton.v1));
    put("x0", num(c.soliton.x0));
    put("model", std::string(to_string(c.model)));
    if (c.bc)
        put("bc", std::string(to_string(*c.bc)));
    if (c.n_points)
        put("n_points", std::to_string(*c.n_points));
    if (c.x_min)
        put("x_min", num(*c.x_min));
    if (c.x_max)
        put("x_max", num(*c.x_max));
    if (c.dt)
        put("dt", num(*c.dt));
    put("t_end", num(c.t_end));
    if (!c.snapshots.empty()) {
        std::string list;
        for (double t : c.snapshots)
            list += (list.empty() ? "" : ", ") + num(t);
        put("snapshots", list);
    }
    return out;
}

json to_json(const ExperimentConfig& c)
{
    json j;
    j["preset"] = c.preset;
    j["params"] = {{"J", c.params.J},         {"delta", c.params.delta}, {"theta", c.params.theta},
                   {"B", c.params.B},         {"S", c.params.S},         {"hbar", c.params.hbar}};
    j["soliton"] = {{"A", c.soliton.A}, {"v1", c.soliton.v1}, {"x0", c.soliton.x0}};
    j["model"] = std::string(to_string(c.model));
    j["equation"] = std::string(to_string(equation_of(c.model)));
    j["bc"] = c.bc ? json(std::string(to_string(*c.bc))) : json(nullptr);
    j["n_points"] = c.n_points ? json(*c.n_points) : json(nullptr);
    j["x_min"] = optional_number(c.x_min);
    j["x_max"] = optional_number(c.x_max);
    j["dt"] = optional_number(c.dt);
    j["t_end"] = c.t_end;
    j["snapshots"] = c.snapshots;
    if (!c.lambdas.empty())
        j["lambdas"] = c.lambdas;
    return j;
}

json to_json(const Coefficients<double>& k)
{
    return json{{"c0", k.c0}, {"c1", k.c1}, {"c2", k.c2},  {"c3", k.c3},
                {"V", k.V},   {"chi", k.chi}, {"theta_magic", k.theta_magic}};
}

json to_json(const SolitonDiagnostics& d)
{
    return json{{"peak_position", number(d.peak_position)},
                {"peak_amplitude", number(d.peak_amplitude)},
                {"fwhm", number(d.fwhm)},
                {"center_of_mass", number(d.center_of_mass)},
                {"velocity_estimate", number(d.velocity_estimate)},
                {"shape_retention_error", number(d.shape_retention_error)}};
}

json to_json(const RunReport& r)
{
    json j;
    j["passed"] = r.passed();
    j["config"] = to_json(r.config);
    json assertions = json::array();
    for (const auto& a : r.assertions)
        assertions.push_back(
            {{"name", a.name}, {"passed", a.passed}, {"value", number(a.value)}, {"limit", number(a.limit)}, {"detail", a.detail}});
    j["assertions"] = assertions;
    json metrics = json::object();
    for (const auto& [k, v] : r.metrics)
        metrics[k] = number(v);
    j["metrics"] = metrics;
    j["warnings"] = r.warnings;
    json runs = json::array();
    for (const auto& run : r.runs)
        runs.push_back(run_json(run));
    j["runs"] = runs;
    return j;
}

json to_json(const SweepTable& t)
{
    json j;
    j["axis"] = std::string(to_string(t.axis));
    j["base"] = to_json(t.base);
    json rows = json::array();
    for (const auto& r : t.rows)
        rows.push_back({{"value", r.value},
                        {"regime", std::string(to_string(r.regime))},
                        {"admissible", r.admissible},
                        {"shape_retention", number(r.shape_retention)},
                        {"norm_drift", number(r.norm_drift)},
                        {"velocity", number(r.velocity)},
                        {"deviation", number(r.deviation)},
                        {"error", r.error.empty() ? json(nullptr) : json(r.error)}});
    j["rows"] = rows;
    return j;
}

fs::path metadata_path(const fs::path& csv)
{
    fs::path p = csv;
    p.replace_extension(".meta.json");
    return p;
}

void write_trajectory(const Trajectory& traj, const RunSetup& setup, const fs::path& path)
{
    write_csv(traj, path);
    json meta = base_metadata(traj);
    meta["config"] = to_json(setup.config);
    meta["config_text"] = config_text(setup.config);
    meta["coefficients"] = to_json(setup.coeffs);
    meta["regime"] = {{"kind", std::string(to_string(setup.regime.kind))},
                      {"lambda", setup.regime.lambda},
                      {"admissible", setup.regime.admissible}};
    meta["initial"] = std::string(to_string(setup.initial));
    write_text(metadata_path(path), meta.dump(2) + "\n");
}

void write_trajectory(const Trajectory& traj, const fs::path& path)
{
    write_csv(traj, path);
    write_text(metadata_path(path), base_metadata(traj).dump(2) + "\n");
}

json read_metadata(const fs::path& csv)
{
    const fs::path mp = metadata_path(csv);
    try {
        return json::parse(read_text(mp));
    } catch (const json::parse_error& e) {
        throw SchemaError(fmt::format("'{}' is not valid JSON: {}", mp.string(), e.what()));
    }
}

Trajectory read_trajectory(const fs::path& path)
{
    const json meta = read_metadata(path);
    Trajectory traj;
    try {
        const auto& g = meta.at("grid");
        traj.grid = Grid(g.at("n_points").get<std::size_t>(), g.at("x_min").get<double>(),
                         g.at("x_max").get<double>(), parse_boundary(g.at("bc").get<std::string>()));
        traj.equation = parse_equation(meta.at("equation").get<std::string>());
        traj.dt = meta.at("scheme").at("dt").get<double>();
    } catch (const json::exception& e) {
        throw SchemaError(fmt::format("'{}': {}", metadata_path(path).string(), e.what()));
    } catch (const ParameterError& e) {
        throw SchemaError(fmt::format("'{}': {}", metadata_path(path).string(), e.what()));
    }

    const std::string text = read_text(path);
    std::string_view rest = text;
    auto next_line = [&]() {
        const auto nl = rest.find('\n');
        std::string_view line = rest.substr(0, nl);
        rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        return line;
    };
    if (next_line() != "t,x,re,im,abs2")
        throw SchemaError(fmt::format("'{}': header must be exactly 't,x,re,im,abs2'", path.string()));

    const std::size_t n = traj.grid.size();
    const double x_tol = 1e-12 * std::max(1.0, std::max(std::abs(traj.grid.x_min()), std::abs(traj.grid.x_max())));
    std::size_t row = 1;
    CVectorD values(static_cast<Eigen::Index>(n));
    std::size_t i = 0;
    double t_current = 0;
    while (!rest.empty()) {
        const std::string_view line = next_line();
        ++row;
        if (line.empty())
            continue;
        double cols[5];
        std::string_view fields = line;
        for (int k = 0; k < 5; ++k) {
            const auto comma = fields.find(',');
            if ((k < 4) == (comma == std::string_view::npos) || !parse_double(fields.substr(0, comma), cols[k]))
                throw SchemaError(fmt::format("'{}' line {}: expected 5 numeric columns", path.string(), row));
            fields = comma == std::string_view::npos ? std::string_view{} : fields.substr(comma + 1);
        }
        if (i == 0)
            t_current = cols[0];
        else if (cols[0] != t_current)
            throw SchemaError(fmt::format("'{}' line {}: snapshot at t = {} ends after {} of {} samples",
                                          path.string(), row, num(t_current), i, n));
        if (std::abs(cols[1] - traj.grid.x(i)) > x_tol)
            throw SchemaError(fmt::format("'{}' line {}: x = {} does not match grid point {} ({})", path.string(),
                                          row, num(cols[1]), i, num(traj.grid.x(i))));
        values[static_cast<Eigen::Index>(i)] = {cols[2], cols[3]};
        if (++i == n) {
            try {
                traj.push(t_current, values);
            } catch (const ParameterError& e) {
                throw SchemaError(fmt::format("'{}' line {}: {}", path.string(), row, e.what()));
            }
            i = 0;
        }
    }
    if (i != 0)
        throw SchemaError(fmt::format("'{}': truncated snapshot ({} of {} samples)", path.string(), i, n));
    if (traj.empty())
        throw SchemaError(fmt::format("'{}': no snapshots", path.string()));
    return traj;
}

void write_heatmap(const Trajectory& traj, const fs::path& path, std::size_t max_columns)
{
    if (traj.empty())
        throw ParameterError("cannot draw a heatmap of an empty trajectory");
    if (max_columns == 0)
        throw ParameterError("heatmap needs at least one column");
    const std::size_t n = traj.grid.size();
    const std::size_t cols = std::min(n, max_columns);
    const std::size_t rows = traj.size();
    double top = 0;
    for (const auto& s : traj.snapshots)
        top = std::max(top, s.values.cwiseAbs().maxCoeff());
    std::string pixels(rows * cols, '\0');
    for (std::size_t r = 0; r < rows; ++r) {
        const Eigen::VectorXd m = traj.snapshots[r].values.cwiseAbs();
        for (std::size_t c = 0; c < cols; ++c) {
            const std::size_t lo = c * n / cols, hi = (c + 1) * n / cols;
            const double v = m.segment(static_cast<Eigen::Index>(lo), static_cast<Eigen::Index>(hi - lo)).maxCoeff();
            pixels[r * cols + c] = static_cast<char>(top > 0 ? std::lround(255.0 * v / top) : 0);
        }
    }
    write_text(path, fmt::format("P5\n# |phi(x,t)|, one row per snapshot, max {}\n{} {}\n255\n", num(top), cols,
                                 rows) +
                         pixels);
}

void write_report(const RunReport& report, const fs::path& dir, bool heatmaps)
{
    fs::create_directories(dir);
    for (const auto& run : report.runs) {
        const std::string stem = file_stem_for(run.label);
        write_trajectory(run.trajectory, run.setup, dir / (stem + ".csv"));
        if (heatmaps)
            write_heatmap(run.trajectory, dir / (stem + ".pgm"));
    }
    write_text(dir / "report.json", to_json(report).dump(2) + "\n");
}

void write_sweep(const SweepTable& table, const fs::path& dir)
{
    fs::create_directories(dir);
    write_text(dir / "sweep.json", to_json(table).dump(2) + "\n");
}

std::string sweep_text(const SweepTable& table)
{
    auto cell = [](double v) { return std::isnan(v) ? std::string("nan") : fmt::format("{:.6e}", v); };
    std::string out = fmt::format("{:>14} {:>7} {:>10} {:>14} {:>14} {:>14} {:>14}  {}\n", to_string(table.axis),
                                  "regime", "admissible", "shape", "norm_drift", "velocity", "deviation", "error");
    for (const auto& r : table.rows)
        out += fmt::format("{:>14.8g} {:>7} {:>10} {:>14} {:>14} {:>14} {:>14}  {}\n", r.value, to_string(r.regime),
                           r.admissible ? "yes" : "no", cell(r.shape_retention), cell(r.norm_drift),
                           cell(r.velocity), cell(r.deviation), r.error);
    return out;
}

DirectoryLock::DirectoryLock(const fs::path& dir) : lock_(dir / kFileName)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw IoError(fmt::format("cannot create output directory '{}': {}", dir.string(), ec.message()));
    const int fd = ::open(lock_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0) {
        if (errno == EEXIST)
            throw IoError(fmt::format("output directory '{}' is in use by another run (remove '{}' if stale)",
                                      dir.string(), lock_.string()));
        throw IoError(fmt::format("cannot create lock file '{}'", lock_.string()));
    }
    const std::string pid = std::to_string(::getpid()) + "\n";
    [[maybe_unused]] const auto written = ::write(fd, pid.data(), pid.size());
    ::close(fd);
}

DirectoryLock::~DirectoryLock()
{
    std::error_code ec;
    fs::remove(lock_, ec);
}

} // namespace xxz
