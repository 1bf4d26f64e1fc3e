#pragma once

#include <optional>

#include "bounce/forcing.hpp"

namespace bounce {

/// Free parabolic flight z(tau) = z + v (tau - t) - g (tau - t)^2 / 2.
struct FlightState {
    double t = 0.0;
    double z = 0.0;
    double v = 0.0; ///< upward positive
    double g = 0.0; ///< downward acceleration, >= 0

    [[nodiscard]] double position(double tau) const noexcept
    {
        const double d = tau - t;
        return z + v * d - 0.5 * g * d * d;
    }
    [[nodiscard]] double velocity(double tau) const noexcept { return v - g * (tau - t); }
};

struct RootSolveSettings {
    double t_tol = 1e-11;              ///< absolute tolerance on event times
    long max_bracket_steps = 1'000'000;
    double grazing_slope_floor = 1e-8; ///< |G'| below this at a root is a graze
    double horizon = 1e6;              ///< NoImpact if nothing is hit within this time
};

void validate(const RootSolveSettings &settings);

enum class Approach { from_above, from_below };
enum class PlateSide { lower, upper };

struct PlateHit {
    double t = 0.0;
    double plate_velocity = 0.0;
};

/// First transversal crossing of the flight with the plate in (flight.t, t_limit],
/// or nothing if the gap keeps its sign up to t_limit.
///
/// The gap G = sigma (z - f) is marched with steps certified by the bound
/// |G''| <= g + sup|f''|: from a point with G > 0 the quadratic lower bound
/// G + G' s - M s^2 / 2 stays positive up to its first root, so no crossing can
/// be skipped. The march converges onto the first root from the safe side; the
/// final bracket is bisected to t_tol / 64.
[[nodiscard]] std::optional<PlateHit> find_plate_hit(const FlightState &flight, const ForcingProfile &plate,
                                                     Approach approach, const RootSolveSettings &settings,
                                                     double t_limit);

/// As find_plate_hit with the configured horizon; throws NoImpact on escape and
/// GrazingImpact on a tangential root.
[[nodiscard]] PlateHit next_plate_hit(const FlightState &flight, const ForcingProfile &plate, Approach approach,
                                      const RootSolveSettings &settings = {});

struct SidedHit {
    PlateSide side = PlateSide::lower;
    PlateHit hit;
};

/// True next impact of a flight between two plates, whichever plate it is.
[[nodiscard]] SidedHit next_hit_between(const FlightState &flight, const PlatePair &plates,
                                        const RootSolveSettings &settings = {});

/// Elastic reflection off an infinitely heavy wall moving with plate_velocity.
[[nodiscard]] constexpr double reflect_off_plate(double v_in, double plate_velocity) noexcept
{
    return -v_in + 2.0 * plate_velocity;
}

struct VelocityPair {
    double first = 0.0;
    double second = 0.0;
};

/// One-dimensional elastic collision with alpha = (m1 - m2) / (m1 + m2):
///   v1+ = alpha v1- + (1 - alpha) v2-
///   v2+ = (1 + alpha) v1- - alpha v2-
/// A zero-mass partner gives alpha = -1 and leaves the massive ball untouched.
[[nodiscard]] VelocityPair ball_ball_collide(double m1, double v1_minus, double m2, double v2_minus);

} // namespace bounce
