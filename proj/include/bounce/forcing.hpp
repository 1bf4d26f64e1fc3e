#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace bounce {

/// Time-periodic plate motion z = f(t) drawn from a small analytic catalog,
/// so every derivative is exact.
///
/// All kinds except `polynomial` are periodic; a polynomial profile is a
/// local model valid only inside its window and raises `OutOfWindow`
/// outside it. Profiles are immutable values.
class ForcingProfile {
public:
    enum class Kind { constant, sinusoid, harmonics, polynomial, piecewise_parabolic };

    struct Harmonic {
        int multiple = 1; ///< angular frequency = multiple * 2*pi / T
        double amplitude = 0.0;
        double phase = 0.0;
    };

    /// One free-flight arc z(s) = z + v*(s - start) - g*(s - start)^2 / 2.
    struct ParabolicArc {
        double start = 0.0;
        double z = 0.0;
        double v = 0.0;
    };

    static constexpr int default_max_order = 6;

    static ForcingProfile constant(double value, double period = 1.0);
    /// offset + amplitude * sin(2*pi*t/period + phase)
    static ForcingProfile sinusoid(double period, double amplitude, double phase = 0.0, double offset = 0.0);
    static ForcingProfile harmonics(double period, std::vector<Harmonic> terms, double offset = 0.0);
    /// sum_i coefficients[i] * t^i on [window_lo, window_hi].
    static ForcingProfile polynomial(std::vector<double> coefficients, double window_lo, double window_hi);
    /// Periodic chain of parabolic arcs; the arcs must start inside one period
    /// beginning at arcs.front().start.
    static ForcingProfile piecewise_parabolic(double period, double g, std::vector<ParabolicArc> arcs);

    /// order-th derivative at t (right-continuous at breakpoints).
    [[nodiscard]] double eval(double t, int order = 0) const;
    /// Left limit of the order-th derivative at t.
    [[nodiscard]] double eval_left(double t, int order = 0) const;

    [[nodiscard]] double value(double t) const { return eval(t, 0); }
    [[nodiscard]] double velocity(double t) const { return eval(t, 1); }

    [[nodiscard]] Kind kind() const noexcept;
    [[nodiscard]] bool periodic() const noexcept { return kind() != Kind::polynomial; }
    /// Period T; infinite for polynomial profiles.
    [[nodiscard]] double period() const noexcept;
    [[nodiscard]] std::pair<double, double> window() const noexcept;
    [[nodiscard]] int max_derivative_order() const noexcept { return max_order_; }

    /// Upper bound on |f''| over the whole domain.
    [[nodiscard]] double second_derivative_bound() const;

    /// First point strictly after t where a derivative of f jumps.
    [[nodiscard]] std::optional<double> next_breakpoint(double t) const;

    /// Profile t -> f(c t).
    [[nodiscard]] ForcingProfile rescaled(double c) const;
    [[nodiscard]] double time_scale() const noexcept { return scale_; }

    [[nodiscard]] std::string describe() const;

private:
    struct Constant {
        double value;
        double period;
    };
    struct Sinusoid {
        double period, amplitude, phase, offset;
    };
    struct Harmonics {
        double period;
        std::vector<Harmonic> terms;
        double offset;
    };
    struct Polynomial {
        std::vector<double> coefficients;
        double lo, hi;
    };
    struct Piecewise {
        double period, g;
        std::vector<ParabolicArc> arcs;
    };
    using Shape = std::variant<Constant, Sinusoid, Harmonics, Polynomial, Piecewise>;

    ForcingProfile(Shape shape, int max_order);

    [[nodiscard]] double base_eval(double s, int order, bool left) const;
    void check_order(int order) const;

    Shape shape_;
    int max_order_;
    double scale_ = 1.0;
};

/// Declared contact of the two plates at t_star with contact order k.
struct Tangency {
    double t_star = 0.0;
    int order = 1;          ///< k in {1, 2}
    double epsilon = 0.1;   ///< plates are strictly separated on (t_star - epsilon, t_star)
};

struct PlatePair {
    ForcingProfile lower;
    ForcingProfile upper;
    std::optional<Tangency> tangency;
};

/// Throws InvalidPlates unless the separation / tangency invariants hold.
void verify_plates(const PlatePair &plates);

/// Sampling interval covering one common period of both plates, or the
/// overlap of their validity windows.
[[nodiscard]] std::pair<double, double> plate_sample_domain(const PlatePair &plates);

/// sup over t1, t2 of |f2(t2) - f1(t1)| (sampled).
[[nodiscard]] double sup_plate_separation(const PlatePair &plates);

/// First t in [0, T) with f'(t) = target, by a 4096-sample bracket scan and
/// bisection.
[[nodiscard]] std::optional<double> first_velocity_crossing(const ForcingProfile &profile, double target);

struct ClassCWitness {
    double t0 = 0.0;
    int K = 0;
};

/// Smallest K <= k_max for which f'(t0) = K T g / 2 has a solution.
[[nodiscard]] std::optional<ClassCWitness> class_c_test(const ForcingProfile &profile, double g, int k_max);

/// sup_t f'(t) over one period.
[[nodiscard]] double max_plate_velocity(const ForcingProfile &profile);

/// Threshold c0 such that t -> f(c t) admits the K = 1 resonance exactly when
/// c >= c0: c0 = sqrt(T g / (2 sup f')).
///
/// The time-rescaled profile has period T/c and derivative c f'(ct), so the
/// membership condition c sup f' >= (T/c) g / 2 is monotone increasing in c.
[[nodiscard]] double critical_scale(const ForcingProfile &profile, double g);

} // namespace bounce
