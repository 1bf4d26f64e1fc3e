#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <vector>

#include "bounce/collision.hpp"
#include "bounce/forcing.hpp"
#include "bounce/record.hpp"

namespace bounce {

struct OneBallStep {
    PhasePoint next;
    double v_land = 0.0; ///< velocity just before the landing
    double plate_velocity = 0.0;
};

/// Launch from the plate at (t, v) to the next plate impact.
[[nodiscard]] OneBallStep one_ball_map(PhasePoint p, const ForcingProfile &plate, double g,
                                       const RootSolveSettings &settings = {});

/// Free iteration of one_ball_map; n_events counts landings.
[[nodiscard]] TrajectoryRecord one_ball_simulate(PhasePoint start, const ForcingProfile &plate, double g,
                                                 const RunStop &stop, const RootSolveSettings &settings = {});

enum class ResonantVariant { gamma1, gamma2 };

struct ResonantSpec {
    ResonantVariant variant = ResonantVariant::gamma2;
    int m2_int = 3;
    double t0 = 0.0;
};

/// Finds t0 with f'(t0) = 0 (gamma1) or f'(t0) = T g / 2 (gamma2).
[[nodiscard]] ResonantSpec make_resonant_spec(ResonantVariant variant, int m2_int, const ForcingProfile &plate,
                                              double g);

/// Launch velocity T g m2 / 2.
[[nodiscard]] double resonant_speed(const ResonantSpec &spec, const ForcingProfile &plate, double g);

/// Exact state after n hops: gamma1 keeps (t0 + n T m2, v0); gamma2 has
/// v_n = v0 + n T g at t0 + T (n m2 + n (n - 1)).
[[nodiscard]] PhasePoint resonant_state(const ResonantSpec &spec, const ForcingProfile &plate, double g, int n);

struct ResonantRun {
    TrajectoryRecord record;             ///< section = exact states, events = simulated landings
    std::vector<double> hop_deviation;   ///< simulated hop vs exact image, max of |dt|, |dv|
    double max_deviation = 0.0;
    int free_run_agreement = 0;          ///< hops the uncorrected iteration stays within tolerance
};

/// Checks the resonance pattern hop by hop: every hop is simulated from the
/// exact state and must land on the next exact state within `tolerance`.
/// Free iteration of these orbits is linearly unstable, hence the per-hop check;
/// the length of agreement of an uncorrected run is reported alongside.
[[nodiscard]] ResonantRun build_resonant(const ResonantSpec &spec, const ForcingProfile &plate, double g, int n_hops,
                                         const RootSolveSettings &settings = {}, double tolerance = 1e-8,
                                         int threads = 1);

struct BallState {
    double mass = 1.0;
    double z = 0.0;
    double v = 0.0;
    Body label = Body::P1;
};

struct TwoBallOptions {
    double zero_mass_cutoff_speed = 1e4; ///< case-2 runaway cutoff for the zero-mass ball
    long max_events = 10'000'000;
};

/// Event-driven simulation of two balls above a plate starting at t_start.
/// Only the lower ball can reach the plate. A triple collision with a massive
/// lower ball ends the run (outcome triple_collision); with a zero-mass lower
/// ball the massive ball is carried through and the zero-mass ball is dropped
/// (outcome zero_mass_singularity).
[[nodiscard]] TrajectoryRecord two_ball_simulate(std::array<BallState, 2> balls, double t_start,
                                                 const ForcingProfile &plate, double g, const RunStop &stop,
                                                 const RootSolveSettings &settings = {},
                                                 const TwoBallOptions &options = {});

struct EquivalenceReport {
    double max_time_deviation = 0.0;
    double max_velocity_deviation = 0.0;
    int checked_launches = 0;
    int checked_exchanges = 0;
    bool exchanges_exact = true;

    [[nodiscard]] double max_deviation() const { return std::max(max_time_deviation, max_velocity_deviation); }
};

/// Equal masses: every plate launch in the record must land again where a lone
/// ball launched the same way lands, and every ball-ball event must swap the
/// two velocities exactly.
[[nodiscard]] EquivalenceReport equal_mass_equivalence_check(const TrajectoryRecord &record,
                                                             const ForcingProfile &plate, double g,
                                                             const RootSolveSettings &settings = {});

/// Equal-mass two-ball record assembled from two one-ball section series by
/// relabelling at every crossing of their flights (P2 is always the lower ball).
[[nodiscard]] TrajectoryRecord superpose_equal_mass(const std::vector<PhasePoint> &a,
                                                    const std::vector<PhasePoint> &b, const ForcingProfile &plate,
                                                    double g);

/// Upper plate traced by a periodic one-ball orbit, touching the lower plate at
/// each of its landings.
[[nodiscard]] PlatePair restricted_case2_as_fermi_ulam(const TrajectoryRecord &p2_orbit, const ForcingProfile &plate,
                                                       double g);

} // namespace bounce
