#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "bounce/forcing.hpp"
#include "bounce/record.hpp"

namespace bounce {

enum class Verdict { bounded_evidence, growth_evidence, inconclusive };

std::string_view to_string(Verdict verdict) noexcept;

struct EnvelopeReport {
    int window_size = 0;
    std::vector<double> window_sup;
    std::vector<double> window_inf;
    double global_sup = 0.0;
    double first_half_sup = 0.0;
    double second_half_sup = 0.0;
    double trend_slope = 0.0;   ///< speed gained per event (least squares over all events)
    double slope_lower = 0.0;   ///< 1st percentile of the bootstrapped window-sup slope
    Verdict verdict = Verdict::inconclusive;
};

struct EnvelopeOptions {
    std::uint64_t seed = 20240601;
    int resamples = 2000;
    double bounded_ratio = 1.05;
};

/// Speeds are the section speeds when present, else all post-collision speeds.
/// bounded_evidence when the second-half sup is at most 1.05 x the first-half
/// sup; otherwise growth_evidence when the window-sup trend is positive in 99%
/// of bootstrap resamples of the windows; otherwise inconclusive.
[[nodiscard]] EnvelopeReport envelope(const TrajectoryRecord &record, int window, const EnvelopeOptions &options = {});
[[nodiscard]] EnvelopeReport envelope(const std::vector<double> &speeds, int window,
                                      const EnvelopeOptions &options = {});

/// tau(s) = sum_j coefficients[j] * s^(j + 2).
struct StepPolynomial {
    std::vector<double> coefficients;

    static StepPolynomial square() { return {{1.0}}; }
    static StepPolynomial cubic_mix() { return {{1.0, 1.0}}; }

    [[nodiscard]] double operator()(double s) const;
};

struct RecurrenceResult {
    std::vector<double> sequence;     ///< s_0 .. s_n
    std::vector<double> partial_sums; ///< sum_{j <= k} (-s_j)
    double log_slope = 0.0;           ///< a in partial_sums ~ a ln k + b over the tail
    double power_exponent = 0.0;      ///< beta in partial_sums ~ k^beta over the tail
    bool diverged = false;
};

struct RecurrenceOptions {
    double delta = 1.0;  ///< admissible domain (-delta, 0)
    double bound = 10.0; ///< divergence bound B
};

/// s_{k+1} = s_k + tau(s_k); LeftDomain if an iterate leaves (-delta, 0).
[[nodiscard]] RecurrenceResult iterate_recurrence(const StepPolynomial &tau, double s0, long n,
                                          const RecurrenceOptions &options = {});

enum class PortraitCoords { tv, ty };

struct PortraitRow {
    int trajectory_id = 0;
    long event_index = 0;
    double phase = 0.0; ///< t mod T
    double value = 0.0; ///< v, or y = 2 l / v
};

/// Section points of every record; MixedScenario unless all records share one
/// scenario id. With ty coordinates and plates given, l is validated against them.
[[nodiscard]] std::vector<PortraitRow> phase_portrait(const std::vector<TrajectoryRecord> &records,
                                                      PortraitCoords coords, double l = 1.0,
                                                      const PlatePair *plates = nullptr);

} // namespace bounce
