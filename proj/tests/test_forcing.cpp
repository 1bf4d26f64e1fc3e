#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "bounce/error.hpp"
#include "bounce/forcing.hpp"

using namespace bounce;
using std::numbers::pi;

TEST_CASE("eval on catalog profiles")
{
    CHECK(ForcingProfile::constant(0.0).eval(0.3, 1) == 0.0);
    CHECK(ForcingProfile::sinusoid(1.0, 0.5).eval(0.0, 1) == doctest::Approx(pi).epsilon(1e-14));
    CHECK(ForcingProfile::polynomial({0.0, 0.0, 1.0}, -10.0, 10.0).eval(-0.25, 0) == doctest::Approx(0.0625));
}

TEST_CASE("polynomial profiles reject times outside their window")
{
    const auto f = ForcingProfile::polynomial({0.0, -1.0}, -1.0, 1.0);
    CHECK_THROWS_AS((void)f.value(2.0), Error);
    try {
        (void)f.value(2.0);
    } catch (const Error &e) {
        CHECK(e.kind() == ErrorKind::OutOfWindow);
    }
}

TEST_CASE("periodicity holds to 1e-12")
{
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    const ForcingProfile profiles[] = {
        ForcingProfile::sinusoid(1.3, 0.7, 0.4, 0.2),
        ForcingProfile::harmonics(2.0, {{1, 0.3, 0.1}, {3, 0.05, 1.0}}, 0.5),
    };
    for (const auto &f : profiles) {
        for (int i = 0; i < 128; ++i) {
            const double t = u(rng);
            CHECK(std::abs(f.value(t + f.period()) - f.value(t)) <= 1e-12 * (1.0 + std::abs(f.value(t))));
        }
    }
}

TEST_CASE("derivatives match central differences")
{
    const double h = 1e-5;
    const ForcingProfile profiles[] = {
        ForcingProfile::sinusoid(1.0, 0.5, 0.3),
        ForcingProfile::harmonics(1.0, {{1, 0.3, 0.1}, {2, 0.1, 0.7}, {5, 0.02, 2.0}}),
    };
    for (const auto &f : profiles) {
        for (double t = 0.0; t < 1.0; t += 0.0371) {
            const double d1 = (f.eval(t + h) - f.eval(t - h)) / (2 * h);
            const double d2 = (f.eval(t + h, 1) - f.eval(t - h, 1)) / (2 * h);
            CHECK(std::abs(d1 - f.eval(t, 1)) <= 1e-6);
            CHECK(std::abs(d2 - f.eval(t, 2)) <= 1e-6);
        }
    }
}

TEST_CASE("class_c_test")
{
    const auto w = class_c_test(ForcingProfile::sinusoid(1.0, 0.5), 2.0, 3);
    REQUIRE(w.has_value());
    CHECK(w->K == 1);
    CHECK(w->t0 == doctest::Approx(std::acos(1.0 / pi) / (2 * pi)).epsilon(1e-10));
    CHECK(std::abs(ForcingProfile::sinusoid(1.0, 0.5).velocity(w->t0) - 1.0) <= 1e-10);
    CHECK_FALSE(class_c_test(ForcingProfile::sinusoid(1.0, 0.1), 2.0, 5).has_value());
    CHECK_FALSE(class_c_test(ForcingProfile::constant(0.0), 2.0, 5).has_value());
}

TEST_CASE("class_c_test witnesses satisfy the velocity equation")
{
    const auto f = ForcingProfile::harmonics(2.0, {{1, 0.8, 0.2}, {2, 0.3, 1.1}});
    for (double g : {0.5, 1.0, 1.5}) {
        const auto w = class_c_test(f, g, 4);
        REQUIRE(w.has_value());
        CHECK(std::abs(f.velocity(w->t0) - w->K * f.period() * g / 2) <= 1e-10);
    }
}

TEST_CASE("critical_scale")
{
    CHECK(critical_scale(ForcingProfile::sinusoid(1.0, 0.5), 2.0) == doctest::Approx(std::sqrt(1 / pi)).epsilon(1e-9));
    CHECK(critical_scale(ForcingProfile::sinusoid(1.0, 1.0), 2.0) ==
          doctest::Approx(std::sqrt(1 / (2 * pi))).epsilon(1e-9));
    const auto f = ForcingProfile::sinusoid(1.0, 0.5);
    CHECK(critical_scale(f, 4.0) == doctest::Approx(std::sqrt(2.0) * critical_scale(f, 2.0)).epsilon(1e-9));
}

TEST_CASE("critical_scale separates class C from its complement")
{
    const auto f = ForcingProfile::harmonics(1.0, {{1, 0.4, 0.0}, {2, 0.2, 0.5}});
    const double g = 2.0;
    const double c0 = critical_scale(f, g);
    const auto above = class_c_test(f.rescaled(1.01 * c0), g, 1);
    const auto below = class_c_test(f.rescaled(0.99 * c0), g, 1);
    CHECK(above.has_value());
    CHECK_FALSE(below.has_value());
}

TEST_CASE("verify_plates rejects touching plates without declared tangency")
{
    PlatePair p{ForcingProfile::constant(0.0), ForcingProfile::sinusoid(1.0, 1.0, 0.0, 1.0), std::nullopt};
    CHECK_THROWS_AS(verify_plates(p), Error);
    PlatePair ok{ForcingProfile::constant(0.0), ForcingProfile::sinusoid(1.0, 0.1, 0.0, 1.0), std::nullopt};
    CHECK_NOTHROW(verify_plates(ok));
}

TEST_CASE("declared tangency must match the plates")
{
    PlatePair k1{ForcingProfile::constant(0.0), ForcingProfile::polynomial({0.0, -1.0}, -10.0, 10.0),
                 Tangency{0.0, 1, 2.0}};
    CHECK_NOTHROW(verify_plates(k1));
    PlatePair wrong{ForcingProfile::constant(0.0), ForcingProfile::polynomial({0.0, -1.0}, -10.0, 10.0),
                    Tangency{0.0, 2, 2.0}};
    CHECK_THROWS_AS(verify_plates(wrong), Error);
}
