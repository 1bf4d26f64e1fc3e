#include "bounce/oracle.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "bounce/error.hpp"

namespace bounce {

namespace {

struct Particle {
    double mass;
    FlightState flight;
    Body label;
    bool alive = true;
};

enum class GapKind { lower_plate, upper_plate, pair };

struct Crossing {
    GapKind kind;
    double t;
};

} // namespace

TrajectoryRecord oracle_run(const ScenarioConfig &sc, double horizon, const OracleSettings &settings)
{
    const bool fermi = sc.plates.has_value();
    const ForcingProfile &floor_plate = fermi ? sc.plates->lower : *sc.plate;
    const ForcingProfile *ceiling = fermi ? &sc.plates->upper : nullptr;
    const double T = floor_plate.periodic() ? floor_plate.period() : 1.0;
    const double h = settings.h > 0.0 ? settings.h : 1e-6 * T;
    const double t_tol = sc.tolerances.t_tol;
    if (h < t_tol) {
        raise(ErrorKind::InvalidArgument, "oracle step must not be finer than t_tol");
    }
    const double g = sc.g;

    std::vector<Particle> bodies;
    double now = 0.0;
    if (sc.model == Model::two_ball || sc.model == Model::restricted_case1 || sc.model == Model::restricted_case2) {
        now = sc.t_start;
        const int lo = (sc.balls[0].z < sc.balls[1].z ||
                        (sc.balls[0].z == sc.balls[1].z && sc.balls[0].v <= sc.balls[1].v))
                           ? 0
                           : 1;
        for (int i : {lo, 1 - lo}) {
            const BallState &b = sc.balls[static_cast<std::size_t>(i)];
            bodies.push_back({b.mass, {now, b.z, b.v, g}, b.label});
        }
    } else {
        PhasePoint start;
        if (sc.resonant) {
            const ResonantSpec spec = make_resonant_spec(*sc.resonant, sc.m2, floor_plate, g);
            start = {spec.t0, resonant_speed(spec, floor_plate, g)};
        } else {
            start = sc.initial.front();
        }
        now = start.t;
        bodies.push_back({1.0, {start.t, floor_plate.value(start.t), start.v, g}, Body::ball});
    }

    TrajectoryRecord rec;
    rec.scenario_id = sc.id;
    rec.period = floor_plate.period();
    rec.section.push_back({now, bodies.front().flight.v});
    std::size_t lower = 0;

    auto gap = [&](GapKind kind, double t) {
        const Particle &L = bodies[lower];
        switch (kind) {
        case GapKind::lower_plate:
            return L.flight.position(t) - floor_plate.value(t);
        case GapKind::upper_plate:
            return ceiling->value(t) - L.flight.position(t);
        case GapKind::pair:
            return bodies[1 - lower].flight.position(t) - L.flight.position(t);
        }
        return 0.0;
    };
    auto active = [&]() {
        std::vector<GapKind> kinds;
        if (!bodies[lower].alive) {
            return kinds;
        }
        kinds.push_back(GapKind::lower_plate);
        if (ceiling != nullptr) {
            kinds.push_back(GapKind::upper_plate);
        }
        if (bodies.size() == 2 && bodies[1 - lower].alive) {
            kinds.push_back(GapKind::pair);
        }
        return kinds;
    };
    auto count_ok = [&](long n) {
        if (sc.stop.n_events && ceiling == nullptr && n >= *sc.stop.n_events) {
            return false;
        }
        return true;
    };

    long n_events = 0;
    double a = now;
    while (a < horizon && count_ok(n_events)) {
        if (n_events >= settings.max_events) {
            raise(ErrorKind::EventStorm, "oracle event budget exhausted");
        }
        const double b = std::min(a + h, horizon);
        std::vector<Crossing> hits;
        for (GapKind kind : active()) {
            if (gap(kind, b) > 0.0) {
                continue;
            }
            double lo = a;
            double hi = b;
            for (int it = 0; it < settings.refine_iters; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi) {
                    break;
                }
                (gap(kind, mid) > 0.0 ? lo : hi) = mid;
            }
            hits.push_back({kind, 0.5 * (lo + hi)});
        }
        if (hits.empty()) {
            a = b;
            continue;
        }
        std::size_t first = 0;
        for (std::size_t i = 1; i < hits.size(); ++i) {
            if (hits[i].t < hits[first].t) {
                first = i;
            }
        }
        const double t = hits[first].t;
        Particle &L = bodies[lower];
        CollisionEvent ev;
        ev.time = t;

        bool triple = false;
        for (std::size_t i = 0; i < hits.size(); ++i) {
            if (i != first && std::abs(hits[i].t - t) <= 10.0 * t_tol &&
                (hits[i].kind == GapKind::pair || hits[first].kind == GapKind::pair)) {
                triple = true;
            }
        }
        if (triple) {
            Particle &U = bodies[1 - lower];
            ev.kind = EventKind::triple;
            ev.plate_velocity = floor_plate.velocity(t);
            ev.first = {L.label, L.flight.velocity(t), std::numeric_limits<double>::quiet_NaN(), L.flight.position(t)};
            ev.second =
                Impact{U.label, U.flight.velocity(t), std::numeric_limits<double>::quiet_NaN(), U.flight.position(t)};
            rec.events.push_back(ev);
            ++n_events;
            if (L.mass > 0.0) {
                rec.outcome = Outcome::triple_collision;
                break;
            }
            L.alive = false;
            lower = 1 - lower;
            rec.outcome = Outcome::zero_mass_singularity;
            a = t;
            continue;
        }

        switch (hits[first].kind) {
        case GapKind::lower_plate: {
            const double pv = floor_plate.velocity(t);
            const double v_pre = L.flight.velocity(t);
            const double v_post = reflect_off_plate(v_pre, pv);
            const double z = floor_plate.value(t);
            ev.kind = EventKind::plate_hit;
            ev.plate_velocity = pv;
            ev.first = {L.label, v_pre, v_post, z};
            L.flight = {t, z, v_post, g};
            rec.section.push_back({t, v_post});
            break;
        }
        case GapKind::upper_plate: {
            const double pv = ceiling->velocity(t);
            const double v_pre = L.flight.velocity(t);
            const double v_post = reflect_off_plate(v_pre, pv);
            const double z = ceiling->value(t);
            ev.kind = EventKind::upper_plate_hit;
            ev.plate_velocity = pv;
            ev.first = {L.label, v_pre, v_post, z};
            L.flight = {t, z, v_post, g};
            break;
        }
        case GapKind::pair: {
            Particle &U = bodies[1 - lower];
            const double z = L.flight.position(t);
            const double vl = L.flight.velocity(t);
            const double vu = U.flight.velocity(t);
            const VelocityPair post = ball_ball_collide(L.mass, vl, U.mass, vu);
            ev.kind = EventKind::ball_ball;
            ev.first = {L.label, vl, post.first, z};
            ev.second = Impact{U.label, vu, post.second, z};
            L.flight = {t, z, post.first, g};
            U.flight = {t, z, post.second, g};
            break;
        }
        }
        rec.events.push_back(ev);
        ++n_events;
        a = t;
    }
    return rec;
}

} // namespace bounce
