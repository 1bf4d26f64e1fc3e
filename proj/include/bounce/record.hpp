#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bounce {

/// Collision-section coordinates: impact time and outgoing velocity.
struct PhasePoint {
    double t = 0.0;
    double v = 0.0;
};

enum class Body { ball, P1, P2 };

enum class EventKind { plate_hit, upper_plate_hit, ball_ball, triple };

std::string_view to_string(Body body) noexcept;
std::string_view to_string(EventKind kind) noexcept;

struct Impact {
    Body body = Body::ball;
    double v_pre = 0.0;
    double v_post = 0.0;
    double z = 0.0;
};

struct CollisionEvent {
    EventKind kind = EventKind::plate_hit;
    double time = 0.0;
    Impact first;
    std::optional<Impact> second; ///< ball_ball and triple events
    double plate_velocity = 0.0;  ///< plate events only
};

/// Run limits; a run stops at the first criterion met.
struct RunStop {
    std::optional<long> n_events;
    std::optional<double> horizon_time;
    std::optional<double> v_threshold; ///< stop once a post-collision speed exceeds this
};

enum class Outcome { normal, triple_collision, zero_mass_singularity };

std::string_view to_string(Outcome outcome) noexcept;

/// Ordered event log of one run plus its section series (post-collision states
/// at the lower/only plate).
struct TrajectoryRecord {
    std::string scenario_id;
    double period = 1.0;
    std::vector<CollisionEvent> events;
    std::vector<PhasePoint> section;
    Outcome outcome = Outcome::normal;
    std::string outcome_detail;

    [[nodiscard]] std::vector<double> section_speeds() const;
    /// Time between consecutive section points.
    [[nodiscard]] std::vector<double> flight_times() const;
    /// Events in which `body` took part.
    [[nodiscard]] std::vector<CollisionEvent> events_of(Body body) const;
};

} // namespace bounce
