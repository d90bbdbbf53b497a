#pragma once

// Config files, trajectory files and report directories.
//
// Config text is one `key = value` pair per line; `#` starts a comment.
// Trajectories are CSV (`t,x,re,im,abs2`, 17 significant digits) with a JSON
// sidecar `<stem>.meta.json` naming the equation, grid, scheme and the full
// resolved configuration.

#include "xxz/harness.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace xxz {

inline constexpr std::string_view kConfigKeys[] = {"preset", "J",      "delta",   "theta", "B",     "S",
                                                   "hbar",   "A",      "v1",      "x0",    "model", "bc",
                                                   "n_points", "x_min", "x_max", "dt",   "t_end", "snapshots"};

// Keys that pin down the physics; a custom config must set all of them (and
// `model`), a preset may only repeat its own values. Model, grid, step and
// times may be overridden on a preset.
inline constexpr std::string_view kPhysicsKeys[] = {"J", "delta", "theta", "B", "S", "hbar", "A", "v1", "x0"};

struct ConfigEntry {
    std::string value;
    std::size_t line = 0; // 0 for entries that did not come from a file
};

using ConfigEntries = std::map<std::string, ConfigEntry, std::less<>>;

// Splits config text into entries; rejects malformed lines, unknown keys and
// duplicates with the offending line number.
ConfigEntries parse_config_entries(std::string_view text);

// Builds a config from entries: resolves the preset, then applies and
// validates every remaining key.
ExperimentConfig resolve_config(const ConfigEntries& entries);

ExperimentConfig parse_config(std::string_view text);
ExperimentConfig read_config(const std::filesystem::path& path);

// Every set key in a fixed order; parse_config(config_text(c)) == c.
std::string config_text(const ExperimentConfig& c);

nlohmann::ordered_json to_json(const ExperimentConfig& c);
nlohmann::ordered_json to_json(const Coefficients<double>& k);
nlohmann::ordered_json to_json(const SolitonDiagnostics& d);
nlohmann::ordered_json to_json(const RunReport& r);
nlohmann::ordered_json to_json(const SweepTable& t);

// Writes `path` (CSV) and its sidecar. `setup` supplies the resolved
// configuration and coefficients recorded in the sidecar.
void write_trajectory(const Trajectory& traj, const RunSetup& setup, const std::filesystem::path& path);

// Sidecar only carries the grid, equation and step.
void write_trajectory(const Trajectory& traj, const std::filesystem::path& path);

std::filesystem::path metadata_path(const std::filesystem::path& csv);

Trajectory read_trajectory(const std::filesystem::path& path);
nlohmann::ordered_json read_metadata(const std::filesystem::path& csv);

// Grayscale |phi(x, t)| as a binary PGM: one row per snapshot, at most
// `max_columns` columns (samples are max-pooled), scaled to the global maximum.
void write_heatmap(const Trajectory& traj, const std::filesystem::path& path, std::size_t max_columns = 1024);

// report.json plus one trajectory (and optionally a heatmap) per run.
void write_report(const RunReport& report, const std::filesystem::path& dir, bool heatmaps = false);

void write_sweep(const SweepTable& table, const std::filesystem::path& dir);

// Fixed-width text table of a sweep, one row per value.
std::string sweep_text(const SweepTable& table);

// Exclusive ownership of an output directory for the lifetime of the object;
// created with the directory, refused while another owner holds it.
class DirectoryLock {
  public:
    explicit DirectoryLock(const std::filesystem::path& dir);
    ~DirectoryLock();
    DirectoryLock(const DirectoryLock&) = delete;
    DirectoryLock& operator=(const DirectoryLock&) = delete;

    static constexpr std::string_view kFileName = ".xxz.lock";

  private:
    std::filesystem::path lock_;
};

} // namespace xxz
