#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bounce/bouncing.hpp"
#include "bounce/collision.hpp"
#include "bounce/diagnostics.hpp"
#include "bounce/fermi_ulam.hpp"
#include "bounce/forcing.hpp"
#include "bounce/record.hpp"

namespace bounce {

enum class Model { fermi_ulam, fermi_ulam_singular, one_ball, two_ball, restricted_case1, restricted_case2 };

std::string_view to_string(Model model) noexcept;

/// One `key = value` line of a config file, keyed as "section.key".
struct ConfigEntry {
    std::string key;
    std::string value;
    int line = 0;
};

/// Ordered entries; later duplicates override earlier ones.
class ConfigText {
public:
    /// Throws ConfigInvalid with a line diagnostic on malformed input.
    static ConfigText parse(std::string_view text);
    static ConfigText load(const std::filesystem::path &path);

    void set(const std::string &key, const std::string &value);
    [[nodiscard]] const ConfigEntry *find(std::string_view key) const;
    [[nodiscard]] const std::vector<ConfigEntry> &entries() const noexcept { return entries_; }

private:
    std::vector<ConfigEntry> entries_;
};

struct ScenarioConfig {
    std::string id = "scenario";
    Model model = Model::one_ball;
    double g = 0.0;
    std::optional<ForcingProfile> plate;  ///< bouncing models
    std::optional<PlatePair> plates;      ///< Fermi-Ulam models
    std::vector<PhasePoint> initial;      ///< launch states (Fermi-Ulam, one ball)
    std::array<BallState, 2> balls{};     ///< two-ball models: P1, P2
    double t_start = 0.0;
    std::optional<ResonantVariant> resonant;
    int m2 = 3;
    RunStop stop;
    RootSolveSettings tolerances;
    std::uint64_t seed = 0;
    std::optional<double> l;
    int envelope_window = 0;              ///< 0 picks one sixteenth of the run, at least 8
    std::vector<std::pair<std::string, std::string>> echo;
};

/// Validates completeness per model; ConfigInvalid names the offending field.
[[nodiscard]] ScenarioConfig build_config(const ConfigText &text);
[[nodiscard]] ScenarioConfig load_config(const std::filesystem::path &path);

struct RunResult {
    std::vector<TrajectoryRecord> records; ///< one per launch state
    std::optional<ResonantRun> resonance;
    std::optional<SingularRun> singular;   ///< record moved into records
    std::optional<double> threshold_time;
};

/// Runs every launch state of the scenario with the selected engine.
[[nodiscard]] RunResult run_scenario(const ScenarioConfig &config, int threads = 1);

} // namespace bounce
