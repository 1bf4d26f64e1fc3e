#include "bounce/forcing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "bounce/error.hpp"

namespace bounce {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr int crossing_grid = 4096;

// d^n/ds^n of sin(w s + phase), scaled by amplitude.
double sine_derivative(double amplitude, double w, double arg, int n)
{
    const double scale = amplitude * std::pow(w, n);
    switch (n % 4) {
    case 0: return scale * std::sin(arg);
    case 1: return scale * std::cos(arg);
    case 2: return -scale * std::sin(arg);
    default: return -scale * std::cos(arg);
    }
}

double falling_factorial(int i, int n)
{
    double r = 1.0;
    for (int j = 0; j < n; ++j) {
        r *= static_cast<double>(i - j);
    }
    return r;
}

} // namespace

ForcingProfile::ForcingProfile(Shape shape, int max_order) : shape_(std::move(shape)), max_order_(max_order) {}

ForcingProfile ForcingProfile::constant(double value, double period)
{
    if (!(period > 0.0)) {
        raise(ErrorKind::InvalidArgument, "constant profile needs period > 0");
    }
    return ForcingProfile(Constant{value, period}, default_max_order);
}

ForcingProfile ForcingProfile::sinusoid(double period, double amplitude, double phase, double offset)
{
    if (!(period > 0.0)) {
        raise(ErrorKind::InvalidArgument, "sinusoid needs period > 0");
    }
    return ForcingProfile(Sinusoid{period, amplitude, phase, offset}, default_max_order);
}

ForcingProfile ForcingProfile::harmonics(double period, std::vector<Harmonic> terms, double offset)
{
    if (!(period > 0.0)) {
        raise(ErrorKind::InvalidArgument, "harmonic profile needs period > 0");
    }
    for (const auto &h : terms) {
        if (h.multiple < 0) {
            raise(ErrorKind::InvalidArgument, "harmonic multiples must be non-negative integers");
        }
    }
    return ForcingProfile(Harmonics{period, std::move(terms), offset}, default_max_order);
}

ForcingProfile ForcingProfile::polynomial(std::vector<double> coefficients, double window_lo, double window_hi)
{
    if (coefficients.empty()) {
        coefficients.push_back(0.0);
    }
    if (!(window_lo < window_hi)) {
        raise(ErrorKind::InvalidArgument, "polynomial window must satisfy lo < hi");
    }
    const int order = std::max<int>(default_max_order, static_cast<int>(coefficients.size()) + 1);
    return ForcingProfile(Polynomial{std::move(coefficients), window_lo, window_hi}, order);
}

ForcingProfile ForcingProfile::piecewise_parabolic(double period, double g, std::vector<ParabolicArc> arcs)
{
    if (!(period > 0.0) || arcs.empty()) {
        raise(ErrorKind::InvalidArgument, "piecewise profile needs period > 0 and at least one arc");
    }
    const double origin = arcs.front().start;
    for (std::size_t i = 1; i < arcs.size(); ++i) {
        if (!(arcs[i].start > arcs[i - 1].start) || arcs[i].start >= origin + period) {
            raise(ErrorKind::InvalidArgument, "arcs must be strictly increasing inside one period");
        }
    }
    return ForcingProfile(Piecewise{period, g, std::move(arcs)}, 2);
}

ForcingProfile::Kind ForcingProfile::kind() const noexcept
{
    return static_cast<Kind>(shape_.index());
}

double ForcingProfile::period() const noexcept
{
    const double base = std::visit(
        [](const auto &s) -> double {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, Polynomial>) {
                return std::numeric_limits<double>::infinity();
            } else {
                return s.period;
            }
        },
        shape_);
    return base / scale_;
}

std::pair<double, double> ForcingProfile::window() const noexcept
{
    if (const auto *p = std::get_if<Polynomial>(&shape_)) {
        return {p->lo / scale_, p->hi / scale_};
    }
    constexpr double inf = std::numeric_limits<double>::infinity();
    return {-inf, inf};
}

void ForcingProfile::check_order(int order) const
{
    if (order < 0 || order > max_order_) {
        raise(ErrorKind::OrderUnsupported,
              "derivative order " + std::to_string(order) + " exceeds " + std::to_string(max_order_));
    }
}

double ForcingProfile::eval(double t, int order) const
{
    check_order(order);
    if (scale_ == 1.0) {
        return base_eval(t, order, false);
    }
    return std::pow(scale_, order) * base_eval(scale_ * t, order, false);
}

double ForcingProfile::eval_left(double t, int order) const
{
    check_order(order);
    return std::pow(scale_, order) * base_eval(scale_ * t, order, true);
}

double ForcingProfile::base_eval(double s, int order, bool left) const
{
    return std::visit(
        [&](const auto &shape) -> double {
            using S = std::decay_t<decltype(shape)>;
            if constexpr (std::is_same_v<S, Constant>) {
                return order == 0 ? shape.value : 0.0;
            } else if constexpr (std::is_same_v<S, Sinusoid>) {
                const double w = two_pi / shape.period;
                const double d = sine_derivative(shape.amplitude, w, w * s + shape.phase, order);
                return order == 0 ? shape.offset + d : d;
            } else if constexpr (std::is_same_v<S, Harmonics>) {
                const double w = two_pi / shape.period;
                double acc = order == 0 ? shape.offset : 0.0;
                for (const auto &h : shape.terms) {
                    const double wj = w * h.multiple;
                    acc += sine_derivative(h.amplitude, wj, wj * s + h.phase, order);
                }
                return acc;
            } else if constexpr (std::is_same_v<S, Polynomial>) {
                if (s < shape.lo || s > shape.hi) {
                    std::ostringstream os;
                    os << "t = " << s << " outside [" << shape.lo << ", " << shape.hi << "]";
                    raise(ErrorKind::OutOfWindow, os.str());
                }
                const auto &c = shape.coefficients;
                const int degree = static_cast<int>(c.size()) - 1;
                double acc = 0.0;
                for (int i = degree; i >= order; --i) {
                    acc = acc * s + c[static_cast<std::size_t>(i)] * falling_factorial(i, order);
                }
                return acc;
            } else {
                const double origin = shape.arcs.front().start;
                const double u = s - origin;
                double cycles = std::floor(u / shape.period);
                double local = u - cycles * shape.period;
                if (local >= shape.period) {
                    local -= shape.period;
                    cycles += 1.0;
                }
                auto it = std::upper_bound(shape.arcs.begin(), shape.arcs.end(), origin + local,
                                           [](double x, const ParabolicArc &a) { return x < a.start; });
                // it points past the active arc; at an exact breakpoint the left limit
                // belongs to the previous arc.
                const ParabolicArc *arc = &*(it - 1);
                double tau = origin + local - arc->start;
                if (left && tau == 0.0) {
                    if (arc == &shape.arcs.front()) {
                        arc = &shape.arcs.back();
                        tau = origin + shape.period - arc->start;
                    } else {
                        --arc;
                        tau = origin + local - arc->start;
                    }
                }
                switch (order) {
                case 0: return arc->z + arc->v * tau - 0.5 * shape.g * tau * tau;
                case 1: return arc->v - shape.g * tau;
                case 2: return -shape.g;
                default: return 0.0;
                }
            }
        },
        shape_);
}

double ForcingProfile::second_derivative_bound() const
{
    const double base = std::visit(
        [](const auto &shape) -> double {
            using S = std::decay_t<decltype(shape)>;
            if constexpr (std::is_same_v<S, Constant>) {
                return 0.0;
            } else if constexpr (std::is_same_v<S, Sinusoid>) {
                const double w = two_pi / shape.period;
                return std::abs(shape.amplitude) * w * w;
            } else if constexpr (std::is_same_v<S, Harmonics>) {
                const double w = two_pi / shape.period;
                double acc = 0.0;
                for (const auto &h : shape.terms) {
                    const double wj = w * h.multiple;
                    acc += std::abs(h.amplitude) * wj * wj;
                }
                return acc;
            } else if constexpr (std::is_same_v<S, Polynomial>) {
                const double r = std::max(std::abs(shape.lo), std::abs(shape.hi));
                double acc = 0.0;
                for (std::size_t i = 2; i < shape.coefficients.size(); ++i) {
                    acc += std::abs(shape.coefficients[i]) * falling_factorial(static_cast<int>(i), 2) *
                           std::pow(r, static_cast<double>(i) - 2.0);
                }
                return acc;
            } else {
                return std::abs(shape.g);
            }
        },
        shape_);
    return base * scale_ * scale_;
}

std::optional<double> ForcingProfile::next_breakpoint(double t) const
{
    const auto *pw = std::get_if<Piecewise>(&shape_);
    if (pw == nullptr) {
        return std::nullopt;
    }
    const double s = scale_ * t;
    const double origin = pw->arcs.front().start;
    const double cycles = std::floor((s - origin) / pw->period);
    for (double c = cycles; c <= cycles + 1.0; c += 1.0) {
        for (const auto &arc : pw->arcs) {
            const double b = arc.start + c * pw->period;
            if (b > s) {
                return b / scale_;
            }
        }
    }
    return std::nullopt;
}

ForcingProfile ForcingProfile::rescaled(double c) const
{
    if (!(c > 0.0)) {
        raise(ErrorKind::InvalidArgument, "time scale must be positive");
    }
    ForcingProfile copy = *this;
    copy.scale_ = scale_ * c;
    return copy;
}

std::string ForcingProfile::describe() const
{
    std::ostringstream os;
    std::visit(
        [&](const auto &shape) {
            using S = std::decay_t<decltype(shape)>;
            if constexpr (std::is_same_v<S, Constant>) {
                os << "constant(" << shape.value << ")";
            } else if constexpr (std::is_same_v<S, Sinusoid>) {
                os << "sinusoid(T=" << shape.period << ", A=" << shape.amplitude << ", phase=" << shape.phase
                   << ", offset=" << shape.offset << ")";
            } else if constexpr (std::is_same_v<S, Harmonics>) {
                os << "harmonics(T=" << shape.period << ", terms=" << shape.terms.size() << ")";
            } else if constexpr (std::is_same_v<S, Polynomial>) {
                os << "polynomial(degree=" << shape.coefficients.size() - 1 << ", window=[" << shape.lo << ", "
                   << shape.hi << "])";
            } else {
                os << "piecewise_parabolic(T=" << shape.period << ", arcs=" << shape.arcs.size() << ")";
            }
        },
        shape_);
    if (scale_ != 1.0) {
        os << " scaled by " << scale_;
    }
    return os.str();
}

// ---------------------------------------------------------------------------

std::pair<double, double> plate_sample_domain(const PlatePair &plates)
{
    const auto &a = plates.lower;
    const auto &b = plates.upper;
    if (a.periodic() && b.periodic()) {
        const double ta = a.period();
        const double tb = b.period();
        const double big = std::max(ta, tb);
        const double small = std::min(ta, tb);
        const double ratio = big / small;
        if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio) {
            raise(ErrorKind::InvalidPlates, "plate periods are not commensurate");
        }
        return {0.0, big};
    }
    const auto [alo, ahi] = a.window();
    const auto [blo, bhi] = b.window();
    const double lo = std::max(alo, blo);
    const double hi = std::min(ahi, bhi);
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
        raise(ErrorKind::InvalidPlates, "plate validity windows do not overlap in a bounded interval");
    }
    return {lo, hi};
}

namespace {

template <class F>
void sample_domain(const PlatePair &plates, F &&visit)
{
    const auto [lo, hi] = plate_sample_domain(plates);
    const double cycles = plates.lower.periodic() && plates.upper.periodic()
                              ? (hi - lo) / std::min(plates.lower.period(), plates.upper.period())
                              : 1.0;
    const int n = static_cast<int>(std::min(1.0e6, crossing_grid * std::max(1.0, std::round(cycles))));
    for (int i = 0; i <= n; ++i) {
        visit(lo + (hi - lo) * static_cast<double>(i) / n);
    }
}

} // namespace

void verify_plates(const PlatePair &plates)
{
    if (!plates.tangency) {
        double min_gap = std::numeric_limits<double>::infinity();
        sample_domain(plates, [&](double t) {
            min_gap = std::min(min_gap, plates.upper.value(t) - plates.lower.value(t));
        });
        if (!(min_gap > 0.0)) {
            raise(ErrorKind::InvalidPlates, "plates touch or cross (min gap " + std::to_string(min_gap) + ")");
        }
        return;
    }
    const Tangency &tg = *plates.tangency;
    if (tg.order != 1 && tg.order != 2) {
        raise(ErrorKind::InvalidPlates, "contact order must be 1 or 2");
    }
    if (!(tg.epsilon > 0.0)) {
        raise(ErrorKind::InvalidPlates, "tangency epsilon must be positive");
    }
    for (int j = 0; j <= tg.order; ++j) {
        const double a = plates.lower.eval_left(tg.t_star, j);
        const double b = plates.upper.eval_left(tg.t_star, j);
        const double tol = 1e-9 * (1.0 + std::max(std::abs(a), std::abs(b)));
        const bool equal = std::abs(a - b) <= tol;
        if (j < tg.order && !equal) {
            raise(ErrorKind::InvalidPlates, "derivative " + std::to_string(j) + " differs at t*");
        }
        if (j == tg.order && equal) {
            raise(ErrorKind::InvalidPlates, "derivative " + std::to_string(j) + " must differ at t*");
        }
    }
    constexpr int samples = 1000;
    for (int i = 0; i < samples; ++i) {
        const double t = tg.t_star - tg.epsilon * (1.0 - (i + 0.5) / samples);
        if (!(plates.upper.value(t) - plates.lower.value(t) > 0.0)) {
            raise(ErrorKind::InvalidPlates, "plates not separated left of t*");
        }
    }
}

double sup_plate_separation(const PlatePair &plates)
{
    double lo_min = std::numeric_limits<double>::infinity();
    double lo_max = -lo_min;
    double up_min = lo_min;
    double up_max = -lo_min;
    sample_domain(plates, [&](double t) {
        const double a = plates.lower.value(t);
        const double b = plates.upper.value(t);
        lo_min = std::min(lo_min, a);
        lo_max = std::max(lo_max, a);
        up_min = std::min(up_min, b);
        up_max = std::max(up_max, b);
    });
    return std::max(std::abs(up_max - lo_min), std::abs(up_min - lo_max));
}

std::optional<double> first_velocity_crossing(const ForcingProfile &profile, double target)
{
    if (!profile.periodic()) {
        raise(ErrorKind::InvalidArgument, "velocity crossings are defined for periodic profiles only");
    }
    const double T = profile.period();
    auto h = [&](double t) { return profile.velocity(t) - target; };
    double prev_t = 0.0;
    double prev = h(prev_t);
    if (prev == 0.0) {
        return prev_t;
    }
    for (int i = 1; i <= crossing_grid; ++i) {
        const double t = T * static_cast<double>(i) / crossing_grid;
        const double cur = h(t);
        if (cur == 0.0) {
            return t < T ? std::optional<double>(t) : std::nullopt;
        }
        if ((prev < 0.0) != (cur < 0.0)) {
            double a = prev_t;
            double b = t;
            double fa = prev;
            for (int it = 0; it < 200 && b - a > 1e-13; ++it) {
                const double m = 0.5 * (a + b);
                const double fm = h(m);
                if (fm == 0.0) {
                    return m;
                }
                if ((fa < 0.0) == (fm < 0.0)) {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            const double root = std::abs(h(a)) <= std::abs(h(b)) ? a : b;
            return root < T ? std::optional<double>(root) : std::nullopt;
        }
        prev_t = t;
        prev = cur;
    }
    return std::nullopt;
}

std::optional<ClassCWitness> class_c_test(const ForcingProfile &profile, double g, int k_max)
{
    if (!(g > 0.0) || k_max < 1) {
        raise(ErrorKind::InvalidArgument, "class_c_test needs g > 0 and K_max >= 1");
    }
    const double T = profile.period();
    for (int K = 1; K <= k_max; ++K) {
        if (auto t0 = first_velocity_crossing(profile, K * T * g / 2.0)) {
            return ClassCWitness{*t0, K};
        }
    }
    return std::nullopt;
}

double max_plate_velocity(const ForcingProfile &profile)
{
    if (!profile.periodic()) {
        raise(ErrorKind::InvalidArgument, "max_plate_velocity needs a periodic profile");
    }
    const double T = profile.period();
    const double dt = T / crossing_grid;
    int best = 0;
    double best_v = profile.velocity(0.0);
    for (int i = 1; i < crossing_grid; ++i) {
        const double v = profile.velocity(i * dt);
        if (v > best_v) {
            best_v = v;
            best = i;
        }
    }
    if (profile.max_derivative_order() < 2) {
        return best_v;
    }
    // Refine on f'' = 0 inside the neighbouring cells.
    double a = (best - 1) * dt;
    double b = (best + 1) * dt;
    double fa = profile.eval(a, 2);
    const double fb = profile.eval(b, 2);
    if (fa > 0.0 && fb < 0.0) {
        for (int it = 0; it < 200 && b - a > 1e-15 * (1.0 + std::abs(a)); ++it) {
            const double m = 0.5 * (a + b);
            const double fm = profile.eval(m, 2);
            if (fm > 0.0) {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        best_v = std::max(best_v, profile.velocity(0.5 * (a + b)));
    }
    return best_v;
}

double critical_scale(const ForcingProfile &profile, double g)
{
    if (!(g > 0.0)) {
        raise(ErrorKind::InvalidArgument, "critical_scale needs g > 0");
    }
    const double sup = max_plate_velocity(profile);
    if (!(sup > 0.0)) {
        raise(ErrorKind::DegenerateProfile, "sup f' <= 0");
    }
    return std::sqrt(profile.period() * g / (2.0 * sup));
}

} // namespace bounce
