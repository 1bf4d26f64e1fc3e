#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "bounce/diagnostics.hpp"
#include "bounce/record.hpp"
#include "bounce/scenario.hpp"

namespace bounce {

inline constexpr int summary_schema_version = 1;

/// Shortest decimal that round-trips; empty for NaN.
[[nodiscard]] std::string format_number(double x);

/// Columns: event_index, kind, time, body, v_pre, v_post, plate_velocity, z.
/// Ball-ball and triple events take one row per body under one event_index.
void write_events_csv(std::ostream &out, const TrajectoryRecord &record);

[[nodiscard]] std::string summary_json(const ScenarioConfig &config, const RunResult &result);

void write_portrait_csv(std::ostream &out, const std::vector<PortraitRow> &rows);

struct GridAxis {
    std::string name; ///< t0, v0 or a config key such as plate.amplitude
    double lo = 0.0;
    double hi = 0.0;
    long count = 0;

    [[nodiscard]] double value(long i) const;
};

/// "name=lo:hi:count,name=lo:hi:count"; an empty spec is an empty grid.
[[nodiscard]] std::vector<GridAxis> parse_grid(std::string_view spec);

/// Envelope window used for verdicts: the configured one, else n/16 (at least 8).
[[nodiscard]] int auto_window(const ScenarioConfig &config, std::size_t n);

/// Exit codes: 0 normal, 1 runtime failure, 2 config error, 3 singular outcome.
int cmd_simulate(const std::filesystem::path &config, const std::filesystem::path &out_dir, int threads,
                 std::ostream &log);
int cmd_sweep(const std::filesystem::path &config, std::string_view grid, const std::filesystem::path &out_dir,
              int threads, std::ostream &log);
int cmd_portrait(const std::filesystem::path &config, PortraitCoords coords, const std::filesystem::path &out_dir,
                 std::ostream &log);

} // namespace bounce
