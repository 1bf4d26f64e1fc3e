#include "bounce/collision.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "bounce/error.hpp"

namespace bounce {

void validate(const RootSolveSettings &settings)
{
    if (!(settings.t_tol > 0.0) || settings.max_bracket_steps < 1 || !(settings.grazing_slope_floor > 0.0) ||
        !(settings.horizon > 0.0)) {
        raise(ErrorKind::InvalidArgument, "root-solve settings must be positive");
    }
}

namespace {

struct Gap {
    const FlightState &flight;
    const ForcingProfile &plate;
    double sigma;

    [[nodiscard]] double value(double tau) const { return sigma * (flight.position(tau) - plate.value(tau)); }
    [[nodiscard]] double slope(double tau) const { return sigma * (flight.velocity(tau) - plate.velocity(tau)); }
};

// Largest s with h + dh s - m s^2 / 2 > 0 on [0, s), for h >= 0.
double certified_step(double h, double dh, double m)
{
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (m <= 0.0) {
        return dh >= 0.0 ? inf : h / -dh;
    }
    const double disc = std::sqrt(dh * dh + 2.0 * m * h);
    return dh >= 0.0 ? (dh + disc) / m : 2.0 * h / (disc - dh);
}

PlateHit finish(const Gap &gap, double lo, double hi, double m, const RootSolveSettings &settings)
{
    // Invariant: gap(lo) > 0 >= gap(hi).
    const double target = settings.t_tol / 64.0;
    for (int it = 0; it < 200 && hi - lo > target; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        if (gap.value(mid) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double root = 0.5 * (lo + hi);
    const double slope = gap.slope(root);
    // Near a double root the gap rounds to zero while |G'| < sqrt(2 M eps |z|).
    const double scale = 1.0 + std::abs(gap.plate.value(root));
    const double resolution = std::sqrt(2.0 * m * std::numeric_limits<double>::epsilon() * scale);
    if (std::abs(slope) < std::max(settings.grazing_slope_floor, 4.0 * resolution)) {
        std::ostringstream os;
        os << "tangential impact at t = " << root << " (|G'| = " << std::abs(slope) << ")";
        raise(ErrorKind::GrazingImpact, os.str());
    }
    return PlateHit{root, gap.plate.velocity(root)};
}

} // namespace

std::optional<PlateHit> find_plate_hit(const FlightState &flight, const ForcingProfile &plate, Approach approach,
                                       const RootSolveSettings &settings, double t_limit)
{
    const Gap gap{flight, plate, approach == Approach::from_above ? 1.0 : -1.0};
    const double m = (flight.g + plate.second_derivative_bound()) * (1.0 + 1e-9);
    const double half_tol = 0.5 * settings.t_tol;

    double a = flight.t;
    double h = std::max(gap.value(a), 0.0);
    double dh = gap.slope(a);
    if (h == 0.0 && dh <= 0.0) {
        if (std::abs(dh) < settings.grazing_slope_floor) {
            raise(ErrorKind::GrazingImpact, "flight starts tangent to the plate");
        }
        raise(ErrorKind::InvalidArgument, "flight starts on the wrong side of the plate");
    }

    for (long step = 0; step < settings.max_bracket_steps; ++step) {
        double s = certified_step(h, dh, m);
        bool at_breakpoint = false;
        if (auto bp = plate.next_breakpoint(a); bp && *bp - a <= s) {
            s = *bp - a;
            at_breakpoint = true;
        }
        if (!at_breakpoint && s < half_tol) {
            const double b = a + settings.t_tol;
            if (b > t_limit) {
                return std::nullopt;
            }
            if (gap.value(b) <= 0.0) {
                return finish(gap, a, b, m, settings);
            }
            if (std::abs(dh) < settings.grazing_slope_floor) {
                std::ostringstream os;
                os << "near-tangential approach at t = " << a;
                raise(ErrorKind::GrazingImpact, os.str());
            }
        }
        const double next = a + s;
        if (next > t_limit) {
            return std::nullopt;
        }
        if (next == a) {
            // Step below floating-point resolution at a: the root sits within one ulp.
            const double b = std::nextafter(a, std::numeric_limits<double>::infinity());
            if (gap.value(b) <= 0.0) {
                return finish(gap, a, b, m, settings);
            }
            a = b;
        } else {
            a = next;
        }
        const double ha = gap.value(a);
        if (ha <= 0.0) {
            // Only reachable by rounding at the root (or a kink landing on it); the
            // certified bound keeps the left end of the last step positive.
            const double lo = s > settings.t_tol ? a - settings.t_tol : a - s;
            return finish(gap, lo, a, m, settings);
        }
        h = ha;
        dh = gap.slope(a);
    }
    std::ostringstream os;
    os << "step budget exhausted at t = " << a;
    raise(std::abs(dh) < 1e3 * settings.grazing_slope_floor ? ErrorKind::GrazingImpact : ErrorKind::NoImpact,
          os.str());
}

PlateHit next_plate_hit(const FlightState &flight, const ForcingProfile &plate, Approach approach,
                        const RootSolveSettings &settings)
{
    auto hit = find_plate_hit(flight, plate, approach, settings, flight.t + settings.horizon);
    if (!hit) {
        std::ostringstream os;
        os << "no impact within horizon " << settings.horizon << " after t = " << flight.t;
        raise(ErrorKind::NoImpact, os.str());
    }
    return *hit;
}

SidedHit next_hit_between(const FlightState &flight, const PlatePair &plates, const RootSolveSettings &settings)
{
    const double limit = flight.t + settings.horizon;
    // Solve for the plate the ball is heading towards first; the other plate then
    // only needs a certificate of no contact before that time.
    const bool rising = flight.v > 0.0;
    const auto &first = rising ? plates.upper : plates.lower;
    const auto &second = rising ? plates.lower : plates.upper;
    const Approach first_app = rising ? Approach::from_below : Approach::from_above;
    const Approach second_app = rising ? Approach::from_above : Approach::from_below;
    const PlateSide first_side = rising ? PlateSide::upper : PlateSide::lower;
    const PlateSide second_side = rising ? PlateSide::lower : PlateSide::upper;

    auto a = find_plate_hit(flight, first, first_app, settings, limit);
    auto b = find_plate_hit(flight, second, second_app, settings, a ? a->t : limit);
    if (b && (!a || b->t < a->t)) {
        return SidedHit{second_side, *b};
    }
    if (a) {
        return SidedHit{first_side, *a};
    }
    raise(ErrorKind::NoImpact, "no impact with either plate within the horizon");
}

VelocityPair ball_ball_collide(double m1, double v1_minus, double m2, double v2_minus)
{
    if (!(m1 >= 0.0) || !(m2 >= 0.0) || !(m1 + m2 > 0.0)) {
        raise(ErrorKind::InvalidArgument, "masses must be non-negative with a positive sum");
    }
    const double alpha = (m1 - m2) / (m1 + m2);
    return {alpha * v1_minus + (1.0 - alpha) * v2_minus, (1.0 + alpha) * v1_minus - alpha * v2_minus};
}

} // namespace bounce
