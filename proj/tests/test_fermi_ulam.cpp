#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "bounce/error.hpp"
#include "bounce/fermi_ulam.hpp"

using namespace bounce;
using std::numbers::pi;

namespace {

PlatePair static_plates()
{
    return {ForcingProfile::constant(0.0), ForcingProfile::constant(1.0), std::nullopt};
}

PlatePair wavy_plates(double amplitude)
{
    return {ForcingProfile::constant(0.0), ForcingProfile::sinusoid(1.0, amplitude, 0.0, 1.0), std::nullopt};
}

PlatePair smooth_plates()
{
    return {ForcingProfile::sinusoid(1.0, 0.1), ForcingProfile::sinusoid(1.0, 0.1, 1.0, 1.0), std::nullopt};
}

} // namespace

TEST_CASE("map_A with static plates")
{
    const double r5 = std::sqrt(5.0);
    MapAStep s = map_A({0.0, 3.0}, static_plates(), 2.0);
    CHECK(s.mid.t == doctest::Approx((3 - r5) / 2).epsilon(1e-12));
    CHECK(s.mid.v == doctest::Approx(-r5).epsilon(1e-12));
    CHECK(s.next.t == doctest::Approx(3 - r5).epsilon(1e-12));
    CHECK(s.next.v == doctest::Approx(3.0).epsilon(1e-12));

    s = map_A({0.0, 2.0}, static_plates(), 0.0);
    CHECK(s.next.t == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.next.v == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(s.mid.t == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(s.mid.v == doctest::Approx(-2.0).epsilon(1e-12));
}

TEST_CASE("map_A on a forced upper plate matches the oracle")
{
    // Fixed-step oracle values, frozen.
    const MapAStep s = map_A({0.0, 3.0}, wavy_plates(0.1), 2.0);
    CHECK(std::abs(s.mid.t - 0.40693121448165737) < 1e-9);
    CHECK(std::abs(s.mid.v - -3.2339717413156075) < 1e-9);
    CHECK(std::abs(s.next.t - 0.70562901709364256) < 1e-9);
    CHECK(std::abs(s.next.v - 3.8313673465395777) < 1e-9);
    for (double r : map_A_residuals({0.0, 3.0}, s, wavy_plates(0.1), 2.0)) {
        CHECK(r < 1e-9);
    }
}

TEST_CASE("map_A rejects slow launches")
{
    try {
        (void)map_A({0.0, 1.0}, static_plates(), 2.0);
        FAIL("expected BelowValidityThreshold");
    } catch (const Error &e) {
        CHECK(e.kind() == ErrorKind::BelowValidityThreshold);
    }
}

TEST_CASE("map_A residuals and factored form on random states")
{
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const PlatePair plates = smooth_plates();
    const RootSolveSettings s;
    for (int i = 0; i < 1000; ++i) {
        const PhasePoint p{u(rng), 4.0 + 20.0 * u(rng)};
        const MapAStep a = map_A(p, plates, 2.0, s);
        for (double r : map_A_residuals(p, a, plates, 2.0)) {
            REQUIRE(r < 1e-9);
        }
        const FactoredStep f = map_A_factored(p, plates, 2.0, s);
        REQUIRE(std::abs(f.after_top.t - a.mid.t) <= 10 * s.t_tol);
        REQUIRE(std::abs(f.after_bottom.t - a.next.t) <= 10 * s.t_tol);
        REQUIRE(std::abs(f.after_bottom.v - a.next.v) <= 10 * s.t_tol * (1 + std::abs(a.next.v)));
    }
}

TEST_CASE("map_A_factored stages with static plates")
{
    const double r5 = std::sqrt(5.0);
    const FactoredStep f = map_A_factored({0.0, 3.0}, static_plates(), 2.0);
    CHECK(f.after_rise.v == doctest::Approx(r5).epsilon(1e-12));
    CHECK(f.after_top.v == doctest::Approx(-r5).epsilon(1e-12));
    CHECK(f.after_bottom.t == doctest::Approx(3 - r5).epsilon(1e-12));
    CHECK(f.after_bottom.v == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("transform_U")
{
    CHECK(transform_U({0.0, 4.0}, 2.0).y == 1.0);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> e(0.0, 6.0);
    for (int i = 0; i < 10000; ++i) {
        const double v = std::pow(10.0, e(rng));
        const PhasePoint back = inverse_U(transform_U({0.5, v}, 3.0));
        REQUIRE(std::abs(back.v - v) <= 1e-15 * v * 2);
    }
    CHECK_NOTHROW(ScaleTransform(static_plates(), 2.0));
    try {
        ScaleTransform bad(static_plates(), 0.5);
        FAIL("expected InvalidScale");
    } catch (const Error &err) {
        CHECK(err.kind() == ErrorKind::InvalidScale);
    }
}

TEST_CASE("map_A_prime with static plates")
{
    MapAPrimeStep s = map_A_prime({0.0, 0.002, 2.0}, static_plates(), 0.0);
    CHECK(s.next.t == doctest::Approx(0.001).epsilon(1e-10));
    CHECK(s.psi == doctest::Approx(-0.001).epsilon(1e-8));
    CHECK(s.phi == 0.0);
    s = map_A_prime({0.0, 0.001, 1.0}, static_plates(), 0.0);
    CHECK(std::abs(s.psi) < 1e-13);
    CHECK_THROWS_AS((void)map_A_prime({0.0, 0.5, 2.0}, static_plates(), 0.0, {}, 0.1), Error);
}

TEST_CASE("map_A_prime is conjugate to map_A")
{
    const PlatePair plates = smooth_plates();
    for (double v : {5.0, 13.0, 40.0}) {
        const PhasePoint p{0.3, v};
        const MapAStep a = map_A(p, plates, 2.0);
        const PhasePoint b = inverse_U(map_A_prime(transform_U(p, 2.0), plates, 2.0).next);
        CHECK(b.t == a.next.t);
        CHECK(b.v == doctest::Approx(a.next.v).epsilon(1e-15));
    }
}

TEST_CASE("estimate_constants")
{
    ConstantsEstimate c = estimate_constants(static_plates(), 0.0, 2.0, 0.01, 32);
    CHECK(c.c1_hat == 0.0);
    CHECK(c.c0_hat == doctest::Approx(0.5).epsilon(1e-6));
    // Regression baseline for a weakly forced upper plate.
    c = estimate_constants(wavy_plates(0.01), 2.0, 2.0, 0.01, 32);
    CHECK(c.c0_below_one);
    CHECK(c.c0_hat == doctest::Approx(0.505).epsilon(1e-3));
}

TEST_CASE("Poincare-Cartan integral closed forms")
{
    LoopCurve loop;
    for (int i = 0; i < 256; ++i) {
        loop.samples.push_back({i / 256.0, 7.0});
    }
    CHECK(poincare_cartan_integral(loop, static_plates(), 2.0) == doctest::Approx(24.5).epsilon(1e-12));
    const PlatePair forced{ForcingProfile::sinusoid(1.0, 0.1), ForcingProfile::constant(1.0), std::nullopt};
    CHECK(poincare_cartan_integral(loop, forced, 2.0) == doctest::Approx(24.5).epsilon(1e-10));
    LoopCurve small = loop;
    small.samples.resize(128);
    CHECK_THROWS_AS((void)poincare_cartan_integral(small, static_plates(), 2.0), Error);
}

TEST_CASE("Poincare-Cartan integral is invariant under the map")
{
    LoopCurve loop;
    for (int i = 0; i < 1024; ++i) {
        const double t = i / 1024.0;
        loop.samples.push_back({t, 100.0 + 3.0 * std::cos(2 * pi * t) + std::sin(4 * pi * t + 0.3)});
    }
    const double a = poincare_cartan_integral(loop, smooth_plates(), 1.0);
    const double b = poincare_cartan_image_integral(loop, smooth_plates(), 1.0);
    CHECK(std::abs(a - b) / std::abs(a) < 1e-6);
}

TEST_CASE("singular_run, first-order contact")
{
    const PlatePair plates{ForcingProfile::constant(0.0), ForcingProfile::polynomial({0.0, -1.0}, -10.0, 10.0),
                           Tangency{0.0, 1, 2.0}};
    SingularStop stop;
    stop.n_events = 5000;
    const SingularRun run = singular_run(plates, 0.0, {-1.0, 10.0}, stop);
    const auto &s = run.record.section;
    REQUIRE(s.size() == 5001);
    for (std::size_t n = 0; n < s.size(); ++n) {
        REQUIRE(std::abs(s[n].v - (10.0 + 2.0 * n)) <= 1e-8);
    }
    // Round trips sum to the distance to the contact: t_n = -5 / (n + 5).
    CHECK(std::abs(s.back().t - -5.0 / 5005.0) <= 1e-8);
    CHECK(run.predicted_jump == doctest::Approx(2.0));
    CHECK(run.increments_positive);
    CHECK(run.monotone);
    CHECK(run.fitted_slope == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("singular_run stops on a speed threshold before the contact")
{
    const PlatePair plates{ForcingProfile::constant(0.0), ForcingProfile::polynomial({0.0, -1.0}, -10.0, 10.0),
                           Tangency{0.0, 1, 2.0}};
    SingularStop stop;
    stop.v_exceeds = 100.0;
    const SingularRun run = singular_run(plates, 0.0, {-1.0, 10.0}, stop);
    CHECK(run.stopped_by_criterion);
    CHECK(run.record.section.back().v > 100.0);
    CHECK(run.record.section.back().t < 0.0);
}

TEST_CASE("singular_run, second-order contact")
{
    const PlatePair plates{ForcingProfile::constant(0.0), ForcingProfile::polynomial({0.0, 0.0, 1.0}, -10.0, 10.0),
                           Tangency{0.0, 2, 2.0}};
    SingularStop stop;
    stop.n_events = 201;
    const SingularRun run = singular_run(plates, 0.0, {-0.5, 20.0}, stop);
    CHECK(run.fit_events == 200);
    CHECK(std::abs(run.fitted_slope - 1.0) < 0.1);
    CHECK(run.monotone);
    CHECK(run.increments_positive);
}

TEST_CASE("singular_run requires a start just before the contact")
{
    const PlatePair plates{ForcingProfile::constant(0.0), ForcingProfile::polynomial({0.0, -1.0}, -10.0, 10.0),
                           Tangency{0.0, 1, 2.0}};
    SingularStop stop;
    stop.n_events = 10;
    CHECK_THROWS_AS((void)singular_run(plates, 0.0, {-3.0, 10.0}, stop), Error);
    CHECK_THROWS_AS((void)singular_run(static_plates(), 0.0, {-0.5, 10.0}, stop), Error);
}
