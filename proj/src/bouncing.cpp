#include "bounce/bouncing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bounce/error.hpp"
#include "bounce/parallel.hpp"

namespace bounce {

namespace {

constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

} // namespace

OneBallStep one_ball_map(PhasePoint p, const ForcingProfile &plate, double g, const RootSolveSettings &settings)
{
    if (!(p.v > 0.0)) {
        raise(ErrorKind::InvalidArgument, "one_ball_map needs an outgoing velocity v > 0");
    }
    if (g == 0.0 && plate.periodic() && p.v > max_plate_velocity(plate)) {
        raise(ErrorKind::NonReturn, "ball outruns the plate and never returns (g = 0)");
    }
    const FlightState flight{p.t, plate.value(p.t), p.v, g};
    PlateHit hit;
    try {
        hit = next_plate_hit(flight, plate, Approach::from_above, settings);
    } catch (const Error &e) {
        if (e.kind() == ErrorKind::NoImpact) {
            raise(ErrorKind::NonReturn, e.what());
        }
        throw;
    }
    OneBallStep out;
    out.v_land = flight.velocity(hit.t);
    out.plate_velocity = hit.plate_velocity;
    out.next = {hit.t, reflect_off_plate(out.v_land, hit.plate_velocity)};
    return out;
}

TrajectoryRecord one_ball_simulate(PhasePoint start, const ForcingProfile &plate, double g, const RunStop &stop,
                                   const RootSolveSettings &settings)
{
    if (!stop.n_events && !stop.horizon_time && !stop.v_threshold) {
        raise(ErrorKind::InvalidArgument, "run needs a stop criterion");
    }
    TrajectoryRecord rec;
    rec.period = plate.period();
    rec.section.push_back(start);
    PhasePoint p = start;
    for (long n = 0;; ++n) {
        if (stop.n_events && n >= *stop.n_events) {
            break;
        }
        const OneBallStep step = one_ball_map(p, plate, g, settings);
        if (stop.horizon_time && step.next.t > *stop.horizon_time) {
            break;
        }
        CollisionEvent ev;
        ev.kind = EventKind::plate_hit;
        ev.time = step.next.t;
        ev.first = {Body::ball, step.v_land, step.next.v, plate.value(step.next.t)};
        ev.plate_velocity = step.plate_velocity;
        rec.events.push_back(ev);
        rec.section.push_back(step.next);
        p = step.next;
        if (stop.v_threshold && std::abs(p.v) > *stop.v_threshold) {
            break;
        }
    }
    return rec;
}

ResonantSpec make_resonant_spec(ResonantVariant variant, int m2_int, const ForcingProfile &plate, double g)
{
    if (m2_int < 1 || !(g > 0.0) || !plate.periodic()) {
        raise(ErrorKind::InvalidArgument, "resonant orbits need m2 >= 1, g > 0 and a periodic plate");
    }
    ResonantSpec spec{variant, m2_int, 0.0};
    if (variant == ResonantVariant::gamma1) {
        auto t0 = first_velocity_crossing(plate, 0.0);
        if (!t0) {
            raise(ErrorKind::InvalidArgument, "plate velocity never vanishes");
        }
        spec.t0 = *t0;
    } else {
        auto witness = class_c_test(plate, g, 1);
        if (!witness) {
            raise(ErrorKind::InvalidArgument, "plate is not in the resonant class with K = 1");
        }
        spec.t0 = witness->t0;
    }
    return spec;
}

double resonant_speed(const ResonantSpec &spec, const ForcingProfile &plate, double g)
{
    return plate.period() * g * spec.m2_int / 2.0;
}

PhasePoint resonant_state(const ResonantSpec &spec, const ForcingProfile &plate, double g, int n)
{
    const double T = plate.period();
    const double v0 = resonant_speed(spec, plate, g);
    const double nn = n;
    if (spec.variant == ResonantVariant::gamma1) {
        return {spec.t0 + nn * T * spec.m2_int, v0};
    }
    return {spec.t0 + T * (nn * spec.m2_int + nn * (nn - 1.0)), v0 + nn * T * g};
}

ResonantRun build_resonant(const ResonantSpec &spec, const ForcingProfile &plate, double g, int n_hops,
                           const RootSolveSettings &settings, double tolerance, int threads)
{
    const double target = spec.variant == ResonantVariant::gamma1 ? 0.0 : plate.period() * g / 2.0;
    if (!(std::abs(plate.velocity(spec.t0) - target) <= 1e-10)) {
        raise(ErrorKind::InvalidArgument, "resonant launch time does not solve its velocity condition");
    }
    if (n_hops < 0) {
        raise(ErrorKind::InvalidArgument, "n_hops must be non-negative");
    }
    // Hops are independent once started from exact states.
    struct Hop {
        OneBallStep step;
        std::string error;
    };
    std::vector<Hop> hops(static_cast<std::size_t>(n_hops));
    parallel_for(hops.size(), threads, [&](std::size_t n) {
        try {
            hops[n].step = one_ball_map(resonant_state(spec, plate, g, static_cast<int>(n)), plate, g, settings);
        } catch (const Error &e) {
            hops[n].error = e.what();
        }
    });

    ResonantRun run;
    run.record.period = plate.period();
    run.record.section.push_back(resonant_state(spec, plate, g, 0));
    for (int n = 0; n < n_hops; ++n) {
        const Hop &hop = hops[static_cast<std::size_t>(n)];
        if (!hop.error.empty()) {
            raise(ErrorKind::ResonanceBroken, "hop " + std::to_string(n) + ": " + hop.error);
        }
        const OneBallStep &step = hop.step;
        const PhasePoint to = resonant_state(spec, plate, g, n + 1);
        const double dev = std::max(std::abs(step.next.t - to.t), std::abs(step.next.v - to.v));
        if (!(dev <= tolerance)) {
            std::ostringstream os;
            os.precision(17);
            os << "hop " << n << " lands at (" << step.next.t << ", " << step.next.v << "), expected (" << to.t
               << ", " << to.v << ")";
            raise(ErrorKind::ResonanceBroken, os.str());
        }
        run.hop_deviation.push_back(dev);
        run.max_deviation = std::max(run.max_deviation, dev);
        CollisionEvent ev;
        ev.kind = EventKind::plate_hit;
        ev.time = step.next.t;
        ev.first = {Body::ball, step.v_land, step.next.v, plate.value(step.next.t)};
        ev.plate_velocity = step.plate_velocity;
        run.record.events.push_back(ev);
        run.record.section.push_back(to);
    }

    PhasePoint p = run.record.section.front();
    for (int n = 0; n < n_hops; ++n) {
        try {
            p = one_ball_map(p, plate, g, settings).next;
        } catch (const Error &) {
            break;
        }
        const PhasePoint exact = resonant_state(spec, plate, g, n + 1);
        if (!(std::max(std::abs(p.t - exact.t), std::abs(p.v - exact.v)) <= tolerance)) {
            break;
        }
        ++run.free_run_agreement;
    }
    return run;
}

namespace {

struct Ball {
    double mass;
    FlightState flight;
    Body label;
    bool alive = true;
    bool cached = false;
    std::optional<PlateHit> plate_hit;
};

double speed_of(const Impact &impact)
{
    return std::abs(impact.v_post);
}

} // namespace

TrajectoryRecord two_ball_simulate(std::array<BallState, 2> balls, double t_start, const ForcingProfile &plate,
                                   double g, const RunStop &stop, const RootSolveSettings &settings,
                                   const TwoBallOptions &options)
{
    validate(settings);
    if (!(g > 0.0)) {
        raise(ErrorKind::InvalidArgument, "bouncing models need g > 0");
    }
    for (const BallState &b : balls) {
        if (!(b.mass >= 0.0) || !std::isfinite(b.z) || !std::isfinite(b.v)) {
            raise(ErrorKind::InvalidArgument, "ball states need mass >= 0 and finite position and velocity");
        }
    }
    if (balls[0].mass == 0.0 && balls[1].mass == 0.0) {
        raise(ErrorKind::InvalidArgument, "at most one ball may have zero mass");
    }
    int lo = (balls[0].z < balls[1].z || (balls[0].z == balls[1].z && balls[0].v <= balls[1].v)) ? 0 : 1;
    int hi = 1 - lo;
    if (plate.value(t_start) > balls[lo].z) {
        raise(ErrorKind::InvalidArgument, "lower ball starts below the plate");
    }

    std::array<Ball, 2> state{
        Ball{balls[0].mass, {t_start, balls[0].z, balls[0].v, g}, balls[0].label, true, false, std::nullopt},
        Ball{balls[1].mass, {t_start, balls[1].z, balls[1].v, g}, balls[1].label, true, false, std::nullopt},
    };

    TrajectoryRecord rec;
    rec.period = plate.period();
    double now = t_start;
    long count = 0;
    const double window = 10.0 * settings.t_tol;
    double last_plate = -std::numeric_limits<double>::infinity();
    double last_pair = -std::numeric_limits<double>::infinity();

    auto plate_time = [&](Ball &b) -> std::optional<PlateHit> {
        if (!b.cached) {
            b.plate_hit = find_plate_hit(b.flight, plate, Approach::from_above, settings, b.flight.t + settings.horizon);
            b.cached = true;
        }
        return b.plate_hit;
    };
    auto reanchor = [&](Ball &b, double t, double z, double v) {
        b.flight = {t, z, v, g};
        b.cached = false;
    };
    auto drop_lower = [&](const std::string &detail) {
        state[lo].alive = false;
        std::swap(lo, hi);
        rec.outcome = Outcome::zero_mass_singularity;
        rec.outcome_detail = detail;
    };

    for (;;) {
        if (stop.n_events && count >= *stop.n_events) {
            break;
        }
        if (count >= options.max_events) {
            raise(ErrorKind::EventStorm, "event budget exhausted");
        }
        Ball &L = state[lo];
        Ball &U = state[hi];
        const bool pair = L.alive && U.alive;

        std::optional<PlateHit> hit;
        if (L.alive) {
            try {
                hit = plate_time(L);
            } catch (const Error &) {
                // A ball pushed onto the plate by its partner: the impacts coincide.
                if (now - last_pair > window) {
                    throw;
                }
                hit = PlateHit{now, plate.velocity(now)};
            }
        }
        std::optional<double> t_meet;
        if (pair) {
            const double gap = U.flight.position(now) - L.flight.position(now);
            const double closing = L.flight.velocity(now) - U.flight.velocity(now);
            if (closing > 0.0) {
                t_meet = now + std::max(gap, 0.0) / closing;
            }
        }
        if (!hit && !t_meet) {
            rec.outcome_detail = "no further collisions";
            break;
        }
        const double tp = hit ? hit->t : std::numeric_limits<double>::infinity();
        const double tb = t_meet ? *t_meet : std::numeric_limits<double>::infinity();
        const double t = std::min(tp, tb);
        if (stop.horizon_time && t > *stop.horizon_time) {
            break;
        }

        CollisionEvent ev;
        ev.time = t;
        // Either impact may already have been processed in the previous step.
        const bool simultaneous = (hit && t_meet && std::abs(tp - tb) <= window) ||
                                  (tb <= tp && tb - last_plate <= window) || (tp <= tb && tp - last_pair <= window);
        if (simultaneous) {
            ev.kind = EventKind::triple;
            ev.plate_velocity = plate.velocity(t);
            ev.first = {L.label, L.flight.velocity(t), nan_value, L.flight.position(t)};
            ev.second = Impact{U.label, U.flight.velocity(t), nan_value, U.flight.position(t)};
            rec.events.push_back(ev);
            ++count;
            std::ostringstream os;
            os << "triple collision at t = " << t;
            if (L.mass > 0.0) {
                rec.outcome = Outcome::triple_collision;
                rec.outcome_detail = os.str();
                break;
            }
            // The massive ball is unaffected by its zero-mass partner; only the
            // latter's continuation is undefined.
            drop_lower(os.str() + "; zero-mass ball removed, massive ball continues");
            now = t;
            continue;
        }
        if (tp <= tb) {
            const double v_pre = L.flight.velocity(t);
            const double v_post = reflect_off_plate(v_pre, hit->plate_velocity);
            const double z = plate.value(t);
            ev.kind = EventKind::plate_hit;
            ev.plate_velocity = hit->plate_velocity;
            ev.first = {L.label, v_pre, v_post, z};
            reanchor(L, t, z, v_post);
            rec.section.push_back({t, v_post});
            last_plate = t;
        } else {
            const double z = L.flight.position(t);
            const double vl = L.flight.velocity(t);
            const double vu = U.flight.velocity(t);
            const VelocityPair post = ball_ball_collide(L.mass, vl, U.mass, vu);
            ev.kind = EventKind::ball_ball;
            ev.first = {L.label, vl, post.first, z};
            ev.second = Impact{U.label, vu, post.second, z};
            // A ball struck by a zero-mass partner keeps its flight untouched.
            if (!(U.mass == 0.0 && post.first == vl)) {
                reanchor(L, t, z, post.first);
            }
            if (!(L.mass == 0.0 && post.second == vu)) {
                reanchor(U, t, z, post.second);
            }
            last_pair = t;
        }
        rec.events.push_back(ev);
        ++count;
        now = t;

        for (int side : {lo, hi}) {
            Ball &b = state[side];
            if (b.alive && b.mass == 0.0 && state[1 - side].alive &&
                std::abs(b.flight.velocity(now)) > options.zero_mass_cutoff_speed) {
                std::ostringstream os;
                os << "zero-mass ball exceeded speed " << options.zero_mass_cutoff_speed << " at t = " << now;
                if (side == lo) {
                    drop_lower(os.str());
                } else {
                    b.alive = false;
                    rec.outcome = Outcome::zero_mass_singularity;
                    rec.outcome_detail = os.str();
                }
                break;
            }
        }
        if (stop.v_threshold) {
            const bool over = speed_of(ev.first) > *stop.v_threshold ||
                              (ev.second && speed_of(*ev.second) > *stop.v_threshold);
            if (over) {
                break;
            }
        }
    }
    return rec;
}

EquivalenceReport equal_mass_equivalence_check(const TrajectoryRecord &record, const ForcingProfile &plate, double g,
                                               const RootSolveSettings &settings)
{
    EquivalenceReport report;
    std::vector<const CollisionEvent *> landings;
    for (const CollisionEvent &e : record.events) {
        if (e.kind == EventKind::plate_hit) {
            landings.push_back(&e);
        }
        if (e.kind == EventKind::ball_ball && e.second) {
            ++report.checked_exchanges;
            if (e.first.v_post != e.second->v_pre || e.second->v_post != e.first.v_pre) {
                report.exchanges_exact = false;
            }
        }
    }
    if (record.events.empty()) {
        return report;
    }
    const double last = record.events.back().time;
    for (std::size_t i = 0; i < landings.size(); ++i) {
        const CollisionEvent &e = *landings[i];
        OneBallStep lone;
        try {
            lone = one_ball_map({e.time, e.first.v_post}, plate, g, settings);
        } catch (const Error &) {
            continue;
        }
        if (lone.next.t > last + 1e-9) {
            continue;
        }
        const CollisionEvent *best = nullptr;
        for (std::size_t j = i + 1; j < landings.size(); ++j) {
            if (best == nullptr || std::abs(landings[j]->time - lone.next.t) < std::abs(best->time - lone.next.t)) {
                best = landings[j];
            }
            if (landings[j]->time > lone.next.t) {
                break;
            }
        }
        if (best == nullptr) {
            continue;
        }
        report.max_time_deviation = std::max(report.max_time_deviation, std::abs(best->time - lone.next.t));
        report.max_velocity_deviation =
            std::max(report.max_velocity_deviation, std::abs(best->first.v_post - lone.next.v));
        ++report.checked_launches;
    }
    return report;
}

TrajectoryRecord superpose_equal_mass(const std::vector<PhasePoint> &a, const std::vector<PhasePoint> &b,
                                      const ForcingProfile &plate, double g)
{
    if (a.size() < 2 || b.size() < 2) {
        raise(ErrorKind::InvalidArgument, "superposition needs at least two launches per orbit");
    }
    const double begin = std::max(a.front().t, b.front().t);
    const double end = std::min(a.back().t, b.back().t);
    TrajectoryRecord rec;
    rec.period = plate.period();

    auto arc = [&](const std::vector<PhasePoint> &s, std::size_t i) {
        return FlightState{s[i].t, plate.value(s[i].t), s[i].v, g};
    };
    for (const auto *orbit : {&a, &b}) {
        for (std::size_t i = 1; i < orbit->size(); ++i) {
            const PhasePoint &p = (*orbit)[i];
            if (p.t <= begin || p.t > end) {
                continue;
            }
            CollisionEvent ev;
            ev.kind = EventKind::plate_hit;
            ev.time = p.t;
            ev.plate_velocity = plate.velocity(p.t);
            ev.first = {Body::P2, arc(*orbit, i - 1).velocity(p.t), p.v, plate.value(p.t)};
            rec.events.push_back(ev);
        }
    }
    // Flights share the acceleration, so each pair of arcs crosses at most once.
    std::size_t j0 = 0;
    for (std::size_t i = 0; i + 1 < a.size(); ++i) {
        const double a0 = a[i].t;
        const double a1 = a[i + 1].t;
        while (j0 + 1 < b.size() && b[j0 + 1].t <= a0) {
            ++j0;
        }
        for (std::size_t j = j0; j + 1 < b.size() && b[j].t < a1; ++j) {
            const double lo = std::max({a0, b[j].t, begin});
            const double hi = std::min({a1, b[j + 1].t, end});
            if (!(lo < hi)) {
                continue;
            }
            const FlightState fa = arc(a, i);
            const FlightState fb = arc(b, j);
            const double d0 = fa.position(lo) - fb.position(lo);
            const double rate = fa.velocity(lo) - fb.velocity(lo);
            if (rate == 0.0) {
                continue;
            }
            const double tc = lo - d0 / rate;
            if (!(tc > lo + 1e-12 && tc < hi - 1e-12)) {
                continue;
            }
            const bool a_below = rate > 0.0;
            const FlightState &below = a_below ? fa : fb;
            const FlightState &above = a_below ? fb : fa;
            CollisionEvent ev;
            ev.kind = EventKind::ball_ball;
            ev.time = tc;
            const double z = below.position(tc);
            ev.first = {Body::P2, below.velocity(tc), above.velocity(tc), z};
            ev.second = Impact{Body::P1, above.velocity(tc), below.velocity(tc), z};
            rec.events.push_back(ev);
        }
    }
    std::sort(rec.events.begin(), rec.events.end(),
              [](const CollisionEvent &x, const CollisionEvent &y) { return x.time < y.time; });
    for (const CollisionEvent &e : rec.events) {
        if (e.kind == EventKind::plate_hit) {
            rec.section.push_back({e.time, e.first.v_post});
        }
    }
    return rec;
}

PlatePair restricted_case2_as_fermi_ulam(const TrajectoryRecord &p2_orbit, const ForcingProfile &plate, double g)
{
    const auto &s = p2_orbit.section;
    if (!plate.periodic()) {
        raise(ErrorKind::InvalidArgument, "case-2 reduction needs a periodic plate");
    }
    const double T = plate.period();
    constexpr double tol = 1e-9;
    std::size_t cycle = 0;
    double span = 0.0;
    for (std::size_t p = 1; p < s.size() && cycle == 0; ++p) {
        const double dt = s[p].t - s[0].t;
        const double multiples = dt / T;
        if (std::abs(s[p].v - s[0].v) > tol || std::abs(multiples - std::round(multiples)) * T > tol) {
            continue;
        }
        bool repeats = true;
        for (std::size_t i = 0; i + p < s.size(); ++i) {
            const double dz = plate.value(s[i + p].t) - plate.value(s[i].t);
            if (std::abs(s[i + p].v - s[i].v) > tol || std::abs(s[i + p].t - s[i].t - dt) > tol ||
                std::abs(dz) > tol) {
                repeats = false;
                break;
            }
        }
        if (repeats) {
            cycle = p;
            span = std::round(multiples) * T;
        }
    }
    if (cycle == 0) {
        raise(ErrorKind::NotPeriodic, "orbit does not repeat within 1e-9 at a multiple of the plate period");
    }
    std::vector<ForcingProfile::ParabolicArc> arcs;
    double shortest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cycle; ++i) {
        arcs.push_back({s[i].t, plate.value(s[i].t), s[i].v});
        shortest = std::min(shortest, s[i + 1].t - s[i].t);
    }
    PlatePair pair{plate, ForcingProfile::piecewise_parabolic(span, g, std::move(arcs)), std::nullopt};

    const double t_star = s[1].t;
    const double lower_slope = plate.velocity(t_star);
    const double upper_slope = pair.upper.eval_left(t_star, 1);
    const int order = std::abs(lower_slope - upper_slope) > 1e-9 * (1.0 + std::abs(upper_slope)) ? 1 : 2;
    pair.tangency = Tangency{t_star, order, 0.5 * shortest};
    verify_plates(pair);
    return pair;
}

} // namespace bounce
