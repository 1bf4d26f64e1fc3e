#include "bounce/fermi_ulam.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bounce/error.hpp"

namespace bounce {

MapAStep map_A(PhasePoint p, const PlatePair &plates, double g, const RootSolveSettings &settings)
{
    if (!(p.v > 0.0) || !std::isfinite(p.t)) {
        raise(ErrorKind::BelowValidityThreshold, "map_A needs a finite state with v > 0");
    }
    const FlightState rise{p.t, plates.lower.value(p.t), p.v, g};
    const SidedHit top = next_hit_between(rise, plates, settings);
    if (top.side != PlateSide::upper) {
        std::ostringstream os;
        os << "ball launched at t = " << p.t << " with v = " << p.v << " falls back before reaching the upper plate";
        raise(ErrorKind::BelowValidityThreshold, os.str());
    }
    MapAStep out;
    out.upper_plate_velocity = top.hit.plate_velocity;
    out.v_top_pre = rise.velocity(top.hit.t);
    out.mid = {top.hit.t, reflect_off_plate(out.v_top_pre, top.hit.plate_velocity)};
    if (!(out.mid.v < 0.0)) {
        raise(ErrorKind::BelowValidityThreshold, "upper plate outruns the ball (v~ >= 0)");
    }

    const FlightState fall{out.mid.t, plates.upper.value(out.mid.t), out.mid.v, g};
    const SidedHit bottom = next_hit_between(fall, plates, settings);
    if (bottom.side != PlateSide::lower) {
        raise(ErrorKind::BelowValidityThreshold, "ball hits the upper plate twice in a row");
    }
    out.lower_plate_velocity = bottom.hit.plate_velocity;
    out.v_bottom_pre = fall.velocity(bottom.hit.t);
    out.next = {bottom.hit.t, reflect_off_plate(out.v_bottom_pre, bottom.hit.plate_velocity)};
    if (!(out.next.v > 0.0)) {
        raise(ErrorKind::BelowValidityThreshold, "lower plate recedes faster than the ball (v' <= 0)");
    }
    return out;
}

TrajectoryRecord fermi_ulam_simulate(const PlatePair &plates, double g, PhasePoint start, const RunStop &stop,
                                     const RootSolveSettings &settings, bool keep_events)
{
    if (!stop.n_events && !stop.horizon_time && !stop.v_threshold) {
        raise(ErrorKind::InvalidArgument, "run needs a stop criterion");
    }
    TrajectoryRecord rec;
    rec.period = plates.lower.period();
    rec.section.push_back(start);
    PhasePoint p = start;
    for (long n = 0; !(stop.n_events && n >= *stop.n_events); ++n) {
        const MapAStep step = map_A(p, plates, g, settings);
        if (stop.horizon_time && step.mid.t > *stop.horizon_time) {
            break;
        }
        if (keep_events) {
            CollisionEvent top;
            top.kind = EventKind::upper_plate_hit;
            top.time = step.mid.t;
            top.first = {Body::ball, step.v_top_pre, step.mid.v, plates.upper.value(step.mid.t)};
            top.plate_velocity = step.upper_plate_velocity;
            rec.events.push_back(top);
        }
        if (stop.horizon_time && step.next.t > *stop.horizon_time) {
            break;
        }
        if (keep_events) {
            CollisionEvent bottom;
            bottom.kind = EventKind::plate_hit;
            bottom.time = step.next.t;
            bottom.first = {Body::ball, step.v_bottom_pre, step.next.v, plates.lower.value(step.next.t)};
            bottom.plate_velocity = step.lower_plate_velocity;
            rec.events.push_back(bottom);
        }
        rec.section.push_back(step.next);
        p = step.next;
        if (stop.v_threshold && (p.v > *stop.v_threshold || -step.mid.v > *stop.v_threshold)) {
            break;
        }
    }
    return rec;
}

std::array<double, 4> map_A_residuals(PhasePoint p, const MapAStep &step, const PlatePair &plates, double g)
{
    const double d1 = step.mid.t - p.t;
    const double d2 = step.next.t - step.mid.t;
    const double f1 = plates.lower.value(p.t);
    const double f2 = plates.upper.value(step.mid.t);
    return {
        std::abs(f2 - f1 - p.v * d1 + 0.5 * g * d1 * d1),
        std::abs(step.mid.v - (-p.v + g * d1 + 2.0 * plates.upper.velocity(step.mid.t))),
        std::abs(f2 + step.mid.v * d2 - 0.5 * g * d2 * d2 - plates.lower.value(step.next.t)),
        std::abs(step.next.v - (-step.mid.v + g * d2 + 2.0 * plates.lower.velocity(step.next.t))),
    };
}

namespace {

// Smallest positive root of b d - a d^2 / 2 = D(d), with D depending weakly on d
// through the plates, by iterating d = 2 D / (b + sqrt(b^2 - 2 a D)).
template <class Drop>
double flight_time(double b, double a, Drop &&drop, const RootSolveSettings &settings)
{
    auto image = [&](double d) {
        const double c = drop(d);
        const double disc = b * b - 2.0 * a * c;
        if (disc < 0.0) {
            raise(ErrorKind::BelowValidityThreshold, "flight cannot reach the opposite plate");
        }
        const double denom = b + std::sqrt(disc);
        if (!(denom > 0.0)) {
            raise(ErrorKind::BelowValidityThreshold, "flight moves away from the opposite plate");
        }
        return 2.0 * c / denom;
    };
    double d = 0.0;
    for (int it = 0; it < 400; ++it) {
        const double next = image(d);
        if (std::abs(next - d) <= settings.t_tol / 64.0) {
            return next;
        }
        d = next;
    }
    // Slow contraction: finish with secant steps on the fixed-point residual.
    double d0 = d;
    double r0 = image(d0) - d0;
    double d1 = d0 + r0;
    for (int it = 0; it < 100; ++it) {
        const double r1 = image(d1) - d1;
        if (std::abs(r1) <= settings.t_tol / 64.0 || r1 == r0) {
            return d1;
        }
        const double d2 = d1 - r1 * (d1 - d0) / (r1 - r0);
        d0 = d1;
        r0 = r1;
        d1 = d2;
    }
    raise(ErrorKind::BelowValidityThreshold, "flight-time iteration did not converge");
}

} // namespace

FactoredStep map_A_factored(PhasePoint p, const PlatePair &plates, double g, const RootSolveSettings &settings)
{
    if (!(p.v > 0.0)) {
        raise(ErrorKind::BelowValidityThreshold, "map_A needs v > 0");
    }
    FactoredStep out;
    const double f1 = plates.lower.value(p.t);

    // A1: rise from the lower plate to the upper plate.
    const double d1 = flight_time(
        p.v, g, [&](double d) { return plates.upper.value(p.t + d) - f1; }, settings);
    out.after_rise = {p.t + d1, p.v - g * d1};
    if (find_plate_hit({p.t, f1, p.v, g}, plates.lower, Approach::from_above, settings, p.t + d1)) {
        raise(ErrorKind::BelowValidityThreshold, "ball falls back before reaching the upper plate");
    }
    // A2: reflection at the top.
    out.after_top = {out.after_rise.t, reflect_off_plate(out.after_rise.v, plates.upper.velocity(out.after_rise.t))};
    if (!(out.after_top.v < 0.0)) {
        raise(ErrorKind::BelowValidityThreshold, "upper plate outruns the ball (v~ >= 0)");
    }
    // A3: fall to the lower plate.
    const double f2 = plates.upper.value(out.after_top.t);
    const double d2 = flight_time(
        -out.after_top.v, -g, [&](double d) { return f2 - plates.lower.value(out.after_top.t + d); }, settings);
    out.after_fall = {out.after_top.t + d2, out.after_top.v - g * d2};
    // A4: reflection at the bottom.
    out.after_bottom = {out.after_fall.t,
                        reflect_off_plate(out.after_fall.v, plates.lower.velocity(out.after_fall.t))};
    if (!(out.after_bottom.v > 0.0)) {
        raise(ErrorKind::BelowValidityThreshold, "lower plate recedes faster than the ball (v' <= 0)");
    }
    return out;
}

TransformedPoint transform_U(PhasePoint p, double l)
{
    if (!(p.v > 0.0)) {
        raise(ErrorKind::InvalidArgument, "transform_U needs v > 0");
    }
    return {p.t, 2.0 * l / p.v, l};
}

PhasePoint inverse_U(TransformedPoint q)
{
    if (!(q.y > 0.0)) {
        raise(ErrorKind::InvalidArgument, "inverse_U needs y > 0");
    }
    return {q.t, 2.0 * q.l / q.y};
}

namespace {

void check_scale(const PlatePair &plates, double l)
{
    const double sup = sup_plate_separation(plates);
    if (!(l >= sup * (1.0 - 1e-12))) {
        std::ostringstream os;
        os << "length scale l = " << l << " is below the plate separation " << sup;
        raise(ErrorKind::InvalidScale, os.str());
    }
}

} // namespace

ScaleTransform::ScaleTransform(const PlatePair &plates, double l) : l_(l)
{
    check_scale(plates, l);
}

TransformedPoint ScaleTransform::forward(PhasePoint p) const
{
    return transform_U(p, l_);
}

PhasePoint ScaleTransform::inverse(TransformedPoint q) const
{
    q.l = l_;
    return inverse_U(q);
}

MapAPrimeStep map_A_prime(TransformedPoint q, const PlatePair &plates, double g, const RootSolveSettings &settings,
                          double region_radius)
{
    if (!(std::abs(q.y) < region_radius)) {
        raise(ErrorKind::RegionTooLarge, "|y| outside the configured region");
    }
    const PhasePoint p = inverse_U(q);
    const MapAStep step = map_A(p, plates, g, settings);
    MapAPrimeStep out;
    out.next = transform_U(step.next, q.l);
    out.psi = step.next.t - q.t - q.y;
    out.phi = 2.0 * q.l * (p.v - step.next.v) / (p.v * step.next.v);
    return out;
}

ConstantsEstimate estimate_constants(const PlatePair &plates, double g, double l, double r, int samples,
                                     const RootSolveSettings &settings)
{
    if (!(r > 0.0) || samples < 2) {
        raise(ErrorKind::InvalidArgument, "estimate_constants needs r > 0 and at least 2 samples");
    }
    check_scale(plates, l);
    const auto [lo, hi] = plate_sample_domain(plates);
    ConstantsEstimate out;
    try {
        for (int i = 0; i < samples; ++i) {
            const double t = lo + (hi - lo) * i / samples;
            for (int j = 1; j <= samples; ++j) {
                const double y = r * j / samples;
                const double h = 1e-3 * y;
                auto psi = [&](double yy) {
                    return map_A_prime({t, yy, l}, plates, g, settings, 2.0 * r).psi;
                };
                const MapAPrimeStep s = map_A_prime({t, y, l}, plates, g, settings, 2.0 * r);
                const double dpsi = (psi(y + h) - psi(y - h)) / (2.0 * h);
                out.c1_hat = std::max(out.c1_hat, std::abs(s.phi) / (y * y));
                out.c0_hat = std::max({out.c0_hat, std::abs(s.psi) / y, std::abs(dpsi)});
            }
        }
    } catch (const Error &e) {
        raise(ErrorKind::RegionTooLarge, std::string("sample outside the map's validity region: ") + e.what());
    }
    out.c0_below_one = out.c0_hat < 1.0;
    return out;
}

namespace {

double pc_integrand(double t, double v, const PlatePair &plates, double g)
{
    return 0.5 * v * v + g * plates.lower.value(t) - v * plates.lower.velocity(t);
}

// Periodic composite Simpson with n samples spaced h, using every stride-th value.
double periodic_simpson(const std::vector<double> &values, double h, std::size_t stride)
{
    const std::size_t n = values.size() / stride;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sum += (i % 2 == 0 ? 2.0 : 4.0) * values[i * stride];
    }
    return sum * h * static_cast<double>(stride) / 3.0;
}

// Sixth-order central difference of a periodic sequence.
std::vector<double> periodic_derivative(const std::vector<double> &u, double h)
{
    const std::size_t n = u.size();
    auto at = [&](std::size_t i, int k) { return u[(i + n + static_cast<std::size_t>(k + 3) - 3) % n]; };
    std::vector<double> du(n);
    for (std::size_t i = 0; i < n; ++i) {
        du[i] = (-at(i, -3) + 9.0 * at(i, -2) - 45.0 * at(i, -1) + 45.0 * at(i, 1) - 9.0 * at(i, 2) + at(i, 3)) /
                (60.0 * h);
    }
    return du;
}

double checked(double fine, double coarse, const char *what)
{
    if (!(std::abs(fine - coarse) < 1e-8 * std::abs(fine))) {
        std::ostringstream os;
        os << what << ": quadrature not converged (" << fine << " vs " << coarse << " at half the samples)";
        raise(ErrorKind::CurveInvalid, os.str());
    }
    return fine;
}

double check_curve(const LoopCurve &curve)
{
    const std::size_t n = curve.samples.size();
    if (n < 256 || n % 4 != 0) {
        raise(ErrorKind::CurveInvalid, "loop needs at least 256 samples, a multiple of 4");
    }
    if (!(curve.period > 0.0)) {
        raise(ErrorKind::CurveInvalid, "loop period must be positive");
    }
    const double h = curve.period / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const PhasePoint &p = curve.samples[i];
        const double expected = curve.samples.front().t + h * static_cast<double>(i);
        if (!(p.v > 0.0) || !(std::abs(p.t - expected) <= 1e-9 * curve.period)) {
            raise(ErrorKind::CurveInvalid, "loop samples must be uniform in t with v > 0");
        }
    }
    return h;
}

} // namespace

double poincare_cartan_integral(const LoopCurve &curve, const PlatePair &plates, double g)
{
    const double h = check_curve(curve);
    std::vector<double> f;
    f.reserve(curve.samples.size());
    for (const PhasePoint &p : curve.samples) {
        f.push_back(pc_integrand(p.t, p.v, plates, g));
    }
    return checked(periodic_simpson(f, h, 1), periodic_simpson(f, h, 2), "loop integral");
}

double poincare_cartan_image_integral(const LoopCurve &curve, const PlatePair &plates, double g,
                                      const RootSolveSettings &settings)
{
    const double h = check_curve(curve);
    const std::size_t n = curve.samples.size();
    std::vector<PhasePoint> image(n);
    std::vector<double> shift(n);
    for (std::size_t i = 0; i < n; ++i) {
        try {
            image[i] = map_A(curve.samples[i], plates, g, settings).next;
        } catch (const Error &e) {
            raise(ErrorKind::CurveInvalid, std::string("loop leaves the map's domain: ") + e.what());
        }
        shift[i] = image[i].t - curve.samples[i].t;
    }
    auto integral = [&](std::size_t stride) {
        std::vector<double> u;
        for (std::size_t i = 0; i < n; i += stride) {
            u.push_back(shift[i]);
        }
        const std::vector<double> du = periodic_derivative(u, h * static_cast<double>(stride));
        std::vector<double> f(n);
        for (std::size_t k = 0; k < u.size(); ++k) {
            const double speed = 1.0 + du[k];
            if (!(speed > 0.0)) {
                raise(ErrorKind::CurveInvalid, "image loop is not a graph over t");
            }
            const PhasePoint &q = image[k * stride];
            f[k * stride] = pc_integrand(q.t, q.v, plates, g) * speed;
        }
        return periodic_simpson(f, h, stride);
    };
    return checked(integral(1), integral(2), "image loop integral");
}

SingularRun singular_run(const PlatePair &plates, double g, PhasePoint start, const SingularStop &stop,
                         const RootSolveSettings &settings, const SingularOptions &options)
{
    if (!plates.tangency) {
        raise(ErrorKind::InvalidArgument, "singular_run needs a declared plate contact");
    }
    const Tangency &tg = *plates.tangency;
    if (!(start.t < tg.t_star && start.t > tg.t_star - tg.epsilon)) {
        raise(ErrorKind::InvalidArgument, "start time must lie in (t* - epsilon, t*)");
    }
    const double fk1 = plates.lower.eval_left(tg.t_star, tg.order);
    const double fk2 = plates.upper.eval_left(tg.t_star, tg.order);

    SingularRun run;
    run.predicted_jump = 2.0 * (fk1 - fk2);
    run.stated_inequality_holds = fk1 < fk2;
    run.record.period = plates.lower.period();
    run.record.section.push_back(start);
    run.min_effective_speed = start.v;

    PhasePoint p = start;
    long n = 0;
    for (;;) {
        if ((stop.n_events && n >= *stop.n_events) || (stop.time_reached && p.t >= *stop.time_reached) ||
            (stop.v_exceeds && p.v > *stop.v_exceeds)) {
            run.stopped_by_criterion = true;
            break;
        }
        if (n >= options.max_events) {
            raise(ErrorKind::EventStorm, "singular run exceeded its event budget");
        }
        MapAStep step;
        try {
            step = map_A(p, plates, g, settings);
        } catch (const Error &e) {
            if (e.kind() != ErrorKind::BelowValidityThreshold) {
                throw;
            }
            std::ostringstream os;
            os << "after " << n << " round trips: " << e.what();
            raise(ErrorKind::AlternationBroken, os.str());
        }
        if (!(step.next.t < tg.t_star)) {
            run.record.outcome_detail = "time resolution exhausted at the contact time";
            break;
        }
        run.min_effective_speed = std::min({run.min_effective_speed, p.v - 0.5 * g * (step.mid.t - p.t),
                                            -step.mid.v + 0.5 * g * (step.next.t - step.mid.t)});
        if (options.keep_events) {
            CollisionEvent top;
            top.kind = EventKind::upper_plate_hit;
            top.time = step.mid.t;
            top.first = {Body::ball, step.v_top_pre, step.mid.v, plates.upper.value(step.mid.t)};
            top.plate_velocity = step.upper_plate_velocity;
            CollisionEvent bottom;
            bottom.kind = EventKind::plate_hit;
            bottom.time = step.next.t;
            bottom.first = {Body::ball, step.v_bottom_pre, step.next.v, plates.lower.value(step.next.t)};
            bottom.plate_velocity = step.lower_plate_velocity;
            run.record.events.push_back(top);
            run.record.events.push_back(bottom);
        }
        run.monotone = run.monotone && step.next.v >= p.v;
        run.record.section.push_back(step.next);
        p = step.next;
        ++n;
    }

    // Growth-law fit over the first fit_window increments resolved in time.
    const auto &sec = run.record.section;
    double sxy = 0.0;
    double sxx = 0.0;
    bool positive = true;
    for (std::size_t i = 0; i + 1 < sec.size() && run.fit_events < options.fit_window; ++i) {
        const double dt = sec[i].t - tg.t_star;
        if (!(std::abs(dt) > 100.0 * settings.t_tol)) {
            continue;
        }
        const double x = run.predicted_jump * std::pow(dt, tg.order - 1);
        const double dv = sec[i + 1].v - sec[i].v;
        sxy += x * dv;
        sxx += x * x;
        positive = positive && dv > 0.0;
        ++run.fit_events;
    }
    run.fitted_slope = sxx > 0.0 ? sxy / sxx : 0.0;
    run.increments_positive = run.fit_events > 0 && positive;
    return run;
}

} // namespace bounce
