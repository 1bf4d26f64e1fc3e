#include "bounce/record.hpp"

#include <cmath>

namespace bounce {

std::string_view to_string(Body body) noexcept
{
    switch (body) {
    case Body::ball: return "ball";
    case Body::P1: return "P1";
    case Body::P2: return "P2";
    }
    return "?";
}

std::string_view to_string(EventKind kind) noexcept
{
    switch (kind) {
    case EventKind::plate_hit: return "plate_hit";
    case EventKind::upper_plate_hit: return "upper_plate_hit";
    case EventKind::ball_ball: return "ball_ball";
    case EventKind::triple: return "triple";
    }
    return "?";
}

std::string_view to_string(Outcome outcome) noexcept
{
    switch (outcome) {
    case Outcome::normal: return "normal";
    case Outcome::triple_collision: return "triple_collision";
    case Outcome::zero_mass_singularity: return "zero_mass_singularity";
    }
    return "?";
}

std::vector<double> TrajectoryRecord::section_speeds() const
{
    std::vector<double> out;
    out.reserve(section.size());
    for (const auto &p : section) {
        out.push_back(std::abs(p.v));
    }
    return out;
}

std::vector<double> TrajectoryRecord::flight_times() const
{
    std::vector<double> out;
    for (std::size_t i = 1; i < section.size(); ++i) {
        out.push_back(section[i].t - section[i - 1].t);
    }
    return out;
}

std::vector<CollisionEvent> TrajectoryRecord::events_of(Body body) const
{
    std::vector<CollisionEvent> out;
    for (const auto &e : events) {
        if (e.first.body == body || (e.second && e.second->body == body)) {
            out.push_back(e);
        }
    }
    return out;
}

} // namespace bounce
