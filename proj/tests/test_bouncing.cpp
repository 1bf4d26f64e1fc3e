#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bounce/bouncing.hpp"
#include "bounce/error.hpp"

using namespace bounce;
using std::numbers::pi;

namespace {

const ForcingProfile &plate()
{
    static const ForcingProfile f = ForcingProfile::sinusoid(1.0, 0.5);
    return f;
}

} // namespace

TEST_CASE("one_ball_map")
{
    OneBallStep s = one_ball_map({0.0, 1.0}, ForcingProfile::constant(0.0), 2.0);
    CHECK(s.next.t == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.next.v == doctest::Approx(1.0).epsilon(1e-12));
    // Plate rising at unit speed at the landing t' = 1: v' = -v_land + 2.
    s = one_ball_map({0.0, 1.0}, ForcingProfile::sinusoid(2.0, 1.0 / pi, pi), 2.0);
    CHECK(s.next.t == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(s.plate_velocity == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(s.next.v == doctest::Approx(3.0).epsilon(1e-9));
    // Fixed-step oracle values, frozen.
    s = one_ball_map({0.1, 1.0}, ForcingProfile::sinusoid(1.0, 0.01), 2.0);
    CHECK(std::abs(s.next.t - 1.1000000000000001) < 1e-9);
    CHECK(std::abs(s.next.v - 1.101664073846305) < 1e-9);
}

TEST_CASE("resonant specs")
{
    const ResonantSpec g2 = make_resonant_spec(ResonantVariant::gamma2, 3, plate(), 2.0);
    CHECK(g2.t0 == doctest::Approx(std::acos(1 / pi) / (2 * pi)).epsilon(1e-10));
    CHECK(resonant_speed(g2, plate(), 2.0) == 3.0);
    const ResonantSpec g1 = make_resonant_spec(ResonantVariant::gamma1, 3, plate(), 2.0);
    CHECK(g1.t0 == doctest::Approx(0.25).epsilon(1e-10));
    CHECK_THROWS_AS((void)make_resonant_spec(ResonantVariant::gamma2, 3, ForcingProfile::sinusoid(1.0, 0.1), 2.0),
                    Error);
    CHECK(resonant_state(g2, plate(), 2.0, 2).v == 7.0);
    CHECK(resonant_state(g2, plate(), 2.0, 2).t == doctest::Approx(g2.t0 + 8.0));
}

TEST_CASE("gamma2 accelerates by T g per hop")
{
    const ResonantSpec spec = make_resonant_spec(ResonantVariant::gamma2, 3, plate(), 2.0);
    const ResonantRun run = build_resonant(spec, plate(), 2.0, 3);
    REQUIRE(run.record.events.size() == 3);
    const double hops[] = {3.0, 5.0, 7.0};
    const double speeds[] = {5.0, 7.0, 9.0};
    double launch = spec.t0;
    for (int n = 0; n < 3; ++n) {
        const auto &e = run.record.events[static_cast<std::size_t>(n)];
        CHECK(e.time - launch == doctest::Approx(hops[n]).epsilon(1e-10));
        CHECK(e.first.v_post == doctest::Approx(speeds[n]).epsilon(1e-10));
        launch = e.time;
    }
    // Landing at -3 on a plate moving at 1 leaves at 5.
    CHECK(run.record.events[0].first.v_pre == doctest::Approx(-3.0).epsilon(1e-10));
    CHECK(run.record.events[0].plate_velocity == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(run.max_deviation < 1e-8);
}

TEST_CASE("gamma1 is periodic")
{
    const ResonantSpec spec = make_resonant_spec(ResonantVariant::gamma1, 3, plate(), 2.0);
    const ResonantRun run = build_resonant(spec, plate(), 2.0, 50);
    for (const auto &e : run.record.events) {
        CHECK(e.first.v_post == doctest::Approx(3.0).epsilon(1e-10));
    }
    CHECK(run.record.flight_times().front() == doctest::Approx(3.0).epsilon(1e-10));
}

TEST_CASE("ball-ball impact time uses the relative flight")
{
    RunStop stop;
    stop.n_events = 1;
    const auto rec = two_ball_simulate({BallState{1.0, 1.0, 3.0, Body::P2}, BallState{1.0, 2.0, 1.0, Body::P1}}, 0.0,
                                       ForcingProfile::constant(0.0), 7.0, stop);
    REQUIRE(rec.events.size() == 1);
    CHECK(rec.events[0].kind == EventKind::ball_ball);
    CHECK(rec.events[0].time == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(rec.events[0].first.v_post == doctest::Approx(1.0 - 3.5));
    CHECK(rec.events[0].second->v_post == doctest::Approx(3.0 - 3.5));
}

TEST_CASE("a zero-mass ball above leaves the massive ball untouched")
{
    const ResonantSpec spec = make_resonant_spec(ResonantVariant::gamma2, 3, plate(), 2.0);
    const double v0 = resonant_speed(spec, plate(), 2.0);
    RunStop stop;
    stop.horizon_time = spec.t0 + 8.5;
    const auto alone = one_ball_simulate({spec.t0, v0}, plate(), 2.0, stop);
    const auto pair = two_ball_simulate(
        {BallState{1.0, plate().value(spec.t0), v0, Body::P2}, BallState{0.0, 2.0, 0.0, Body::P1}}, spec.t0, plate(),
        2.0, stop);
    const auto mine = pair.events_of(Body::P2);
    std::vector<CollisionEvent> plate_hits;
    for (const auto &e : mine) {
        if (e.kind == EventKind::plate_hit) {
            plate_hits.push_back(e);
        }
    }
    REQUIRE(plate_hits.size() == alone.events.size());
    for (std::size_t i = 0; i < plate_hits.size(); ++i) {
        CHECK(plate_hits[i].time == alone.events[i].time);
        CHECK(plate_hits[i].first.v_post == alone.events[i].first.v_post);
    }
    CHECK(pair.events.size() > plate_hits.size());
}

TEST_CASE("two-ball invariants")
{
    const ForcingProfile f = ForcingProfile::sinusoid(1.0, 0.05, 0.4);
    RunStop stop;
    stop.n_events = 300;
    const auto rec =
        two_ball_simulate({BallState{1.0, 0.3, 1.0, Body::P2}, BallState{2.0, 1.0, -0.5, Body::P1}}, 0.1, f, 2.0, stop);
    REQUIRE(rec.outcome == Outcome::normal);
    REQUIRE(rec.events.size() == 300);
    const RootSolveSettings s;
    for (std::size_t i = 1; i < rec.events.size(); ++i) {
        CHECK(rec.events[i].time - rec.events[i - 1].time > s.t_tol);
    }
    for (const auto &e : rec.events) {
        if (e.kind == EventKind::ball_ball) {
            const double m1 = e.first.body == Body::P2 ? 1.0 : 2.0;
            const double m2 = 3.0 - m1;
            const Impact &a = e.first;
            const Impact &b = *e.second;
            CHECK(std::abs(m1 * a.v_pre + m2 * b.v_pre - m1 * a.v_post - m2 * b.v_post) <= 1e-12 * 10);
        }
    }
}

TEST_CASE("equal masses behave like two independent balls")
{
    const ResonantSpec spec = make_resonant_spec(ResonantVariant::gamma2, 3, plate(), 2.0);
    const ResonantRun a = build_resonant(spec, plate(), 2.0, 8);
    ResonantSpec later = spec;
    later.t0 += 1.0;
    const ResonantRun b = build_resonant(later, plate(), 2.0, 8);
    const auto rec = superpose_equal_mass(a.record.section, b.record.section, plate(), 2.0);
    const auto report = equal_mass_equivalence_check(rec, plate(), 2.0);
    CHECK(report.checked_launches > 0);
    CHECK(report.checked_exchanges > 0);
    CHECK(report.exchanges_exact);
    CHECK(report.max_deviation() < 1e-8);
}

TEST_CASE("equal-mass simulation exchanges velocities")
{
    const ForcingProfile f = ForcingProfile::sinusoid(1.0, 0.05);
    RunStop stop;
    stop.n_events = 60;
    const auto rec =
        two_ball_simulate({BallState{1.0, 0.2, 2.0, Body::P2}, BallState{1.0, 1.5, -1.0, Body::P1}}, 0.0, f, 2.0, stop);
    const auto report = equal_mass_equivalence_check(rec, f, 2.0);
    CHECK(report.checked_exchanges > 0);
    CHECK(report.exchanges_exact);
    CHECK(report.max_deviation() < 1e-8);
}

TEST_CASE("a zero-mass ball below a periodic ball is a two-plate system")
{
    const ResonantSpec spec = make_resonant_spec(ResonantVariant::gamma1, 3, plate(), 2.0);
    const ResonantRun orbit = build_resonant(spec, plate(), 2.0, 3);
    const PlatePair pair = restricted_case2_as_fermi_ulam(orbit.record, plate(), 2.0);
    REQUIRE(pair.tangency.has_value());
    CHECK(pair.upper.period() == doctest::Approx(3.0));
    const double ts = orbit.record.section[1].t;
    CHECK(std::abs(pair.upper.value(ts) - pair.lower.value(ts)) < 1e-9);
    for (double t = spec.t0 + 0.05; t < spec.t0 + 2.95; t += 0.1) {
        CHECK(pair.upper.value(t) > pair.lower.value(t));
    }
    TrajectoryRecord broken = orbit.record;
    broken.section.back().v += 0.1;
    CHECK_THROWS_AS((void)restricted_case2_as_fermi_ulam(broken, plate(), 2.0), Error);
}

TEST_CASE("triple collisions end the run")
{
    // Both balls land together with the lower one touching the plate.
    RunStop stop;
    stop.n_events = 10;
    const auto rec = two_ball_simulate({BallState{1.0, 0.5, 0.0, Body::P2}, BallState{1.0, 0.5 + 1e-14, 0.0, Body::P1}},
                                       0.0, ForcingProfile::constant(0.0), 2.0, stop);
    CHECK(rec.outcome == Outcome::triple_collision);
    CHECK(rec.events.back().kind == EventKind::triple);
}

TEST_CASE("balls stay ordered above the plate between events")
{
    const ForcingProfile f = ForcingProfile::sinusoid(1.0, 0.05, 0.4);
    RunStop stop;
    stop.n_events = 200;
    const double t0 = 0.1;
    const auto rec =
        two_ball_simulate({BallState{1.0, 0.3, 1.0, Body::P2}, BallState{2.0, 1.0, -0.5, Body::P1}}, t0, f, 2.0, stop);
    FlightState lower{t0, 0.3, 1.0, 2.0};
    FlightState upper{t0, 1.0, -0.5, 2.0};
    Body lower_label = Body::P2;
    double prev = t0;
    for (const auto &e : rec.events) {
        for (int k = 1; k <= 100; ++k) {
            const double t = prev + (e.time - prev) * k / 101.0;
            REQUIRE(lower.position(t) >= f.value(t) - 1e-10);
            REQUIRE(upper.position(t) >= lower.position(t) - 1e-10);
        }
        if (e.kind == EventKind::plate_hit) {
            lower = {e.time, e.first.z, e.first.v_post, 2.0};
        } else {
            const Impact &lo = e.first.body == lower_label ? e.first : *e.second;
            const Impact &hi = e.first.body == lower_label ? *e.second : e.first;
            lower = {e.time, lo.z, lo.v_post, 2.0};
            upper = {e.time, hi.z, hi.v_post, 2.0};
        }
        prev = e.time;
    }
}

TEST_CASE("an accelerating and a periodic ball of equal mass")
{
    const ResonantRun fast = build_resonant(make_resonant_spec(ResonantVariant::gamma2, 3, plate(), 2.0), plate(), 2.0, 12);
    ResonantSpec slow_spec = make_resonant_spec(ResonantVariant::gamma1, 3, plate(), 2.0);
    slow_spec.t0 += 1.0;
    const double end = fast.record.section.back().t;
    const int slow_hops = static_cast<int>((end - slow_spec.t0) / 3.0);
    const ResonantRun slow = build_resonant(slow_spec, plate(), 2.0, slow_hops);
    const auto rec = superpose_equal_mass(fast.record.section, slow.record.section, plate(), 2.0);
    const auto report = equal_mass_equivalence_check(rec, plate(), 2.0);
    CHECK(report.exchanges_exact);
    CHECK(report.max_deviation() < 1e-8);

    std::vector<double> speeds;
    for (const auto &e : rec.events) {
        if (e.kind == EventKind::plate_hit) {
            speeds.push_back(e.first.v_post);
        }
    }
    REQUIRE(speeds.size() > 20);
    const std::size_t half = speeds.size() / 2;
    const double early_max = *std::max_element(speeds.begin(), speeds.begin() + static_cast<long>(half));
    const double late_max = *std::max_element(speeds.begin() + static_cast<long>(half), speeds.end());
    const double late_min = *std::min_element(speeds.begin() + static_cast<long>(half), speeds.end());
    CHECK(late_max > early_max + 4.0);
    CHECK(late_min == doctest::Approx(3.0).epsilon(1e-8));
}

TEST_CASE("a fast massive ball throws its zero-mass partner upwards")
{
    const ResonantSpec spec = make_resonant_spec(ResonantVariant::gamma2, 3, plate(), 2.0);
    const double v0 = resonant_speed(spec, plate(), 2.0);
    RunStop stop;
    stop.n_events = 400;
    const auto rec = two_ball_simulate(
        {BallState{1.0, plate().value(spec.t0), v0, Body::P2}, BallState{0.0, 1.0, 0.0, Body::P1}}, spec.t0, plate(),
        2.0, stop);
    double prior_p1 = 0.0;
    int checked = 0;
    for (const auto &e : rec.events) {
        if (e.kind != EventKind::ball_ball) {
            continue;
        }
        const Impact &p1 = e.first.body == Body::P1 ? e.first : *e.second;
        const Impact &p2 = e.first.body == Body::P1 ? *e.second : e.first;
        prior_p1 = std::max(prior_p1, std::abs(p1.v_pre));
        CHECK(std::abs(p1.v_post) >= std::abs(p2.v_pre) - prior_p1);
        prior_p1 = std::max(prior_p1, std::abs(p1.v_post));
        ++checked;
    }
    CHECK(checked > 10);
}
