#include <doctest.h>

#include <cmath>
#include <random>

#include "bounce/acceptance.hpp"
#include "bounce/bouncing.hpp"
#include "bounce/fermi_ulam.hpp"
#include "bounce/oracle.hpp"

using namespace bounce;

TEST_CASE("oracle closed forms")
{
    ScenarioConfig f;
    f.id = "static";
    f.model = Model::fermi_ulam;
    f.g = 2.0;
    f.plates = PlatePair{ForcingProfile::constant(0.0), ForcingProfile::constant(1.0), std::nullopt};
    f.initial = {{0.0, 3.0}};
    const TrajectoryRecord r = oracle_run(f, 0.5);
    REQUIRE_FALSE(r.events.empty());
    CHECK(r.events[0].kind == EventKind::upper_plate_hit);
    CHECK(std::abs(r.events[0].time - (3 - std::sqrt(5.0)) / 2) < 1e-9);

    ScenarioConfig b;
    b.id = "hop";
    b.model = Model::one_ball;
    b.g = 2.0;
    b.plate = ForcingProfile::constant(0.0);
    b.initial = {{0.0, 1.0}};
    b.stop.n_events = 1;
    const TrajectoryRecord h = oracle_run(b, 5.0);
    REQUIRE(h.events.size() == 1);
    CHECK(std::abs(h.events[0].time - 1.0) < 1e-9);
}

TEST_CASE("oracle step must stay above the time tolerance")
{
    ScenarioConfig b;
    b.model = Model::one_ball;
    b.g = 2.0;
    b.plate = ForcingProfile::constant(0.0);
    b.initial = {{0.0, 1.0}};
    OracleSettings s;
    s.h = 1e-13;
    CHECK_THROWS((void)oracle_run(b, 1.0, s));
}

TEST_CASE("oracle and event-driven engines agree on random scenarios")
{
    AcceptanceOptions o;
    const CriterionResult r = run_criterion(9, o);
    INFO(r.detail);
    CHECK(r.status == CriterionStatus::pass);
}

TEST_CASE("halving the oracle step leaves event times unchanged")
{
    ScenarioConfig c;
    c.id = "wavy";
    c.model = Model::fermi_ulam;
    c.g = 2.0;
    c.plates = PlatePair{ForcingProfile::constant(0.0), ForcingProfile::sinusoid(1.0, 0.1, 0.0, 1.0), std::nullopt};
    c.initial = {{0.0, 3.0}};
    OracleSettings coarse;
    coarse.h = 2e-6;
    OracleSettings fine;
    fine.h = 1e-6;
    const auto a = oracle_run(c, 2.0, coarse);
    const auto b = oracle_run(c, 2.0, fine);
    REQUIRE(a.events.size() == b.events.size());
    for (std::size_t i = 0; i < a.events.size(); ++i) {
        CHECK(a.events[i].kind == b.events[i].kind);
        CHECK(std::abs(a.events[i].time - b.events[i].time) < c.tolerances.t_tol);
    }
}

TEST_CASE("oracle reproduces forced one-ball and two-plate maps")
{
    ScenarioConfig b;
    b.id = "forced";
    b.model = Model::one_ball;
    b.g = 2.0;
    b.plate = ForcingProfile::sinusoid(1.0, 0.01);
    b.initial = {{0.1, 1.0}};
    b.stop.n_events = 1;
    const auto o = oracle_run(b, 5.0);
    const auto e = one_ball_map({0.1, 1.0}, *b.plate, 2.0);
    CHECK(std::abs(o.section[1].t - e.next.t) < 5e-11);
    CHECK(std::abs(o.section[1].v - e.next.v) < 1e-9);
}
