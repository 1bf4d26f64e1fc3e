#pragma once

#include <array>
#include <limits>
#include <optional>
#include <vector>

#include "bounce/collision.hpp"
#include "bounce/forcing.hpp"
#include "bounce/record.hpp"

namespace bounce {

/// One application of the two-plate collision map: lower hit (t, v) to the
/// next lower hit, through exactly one upper hit (t_mid, v_mid).
struct MapAStep {
    PhasePoint next;        ///< (t', v'), v' > 0
    PhasePoint mid;         ///< (t~, v~), v~ < 0
    double v_top_pre = 0.0; ///< velocity arriving at the upper plate
    double v_bottom_pre = 0.0;
    double upper_plate_velocity = 0.0;
    double lower_plate_velocity = 0.0;
};

/// Throws BelowValidityThreshold when the flight returns to the lower plate
/// before touching the upper one (or the post-collision states have the wrong sign).
[[nodiscard]] MapAStep map_A(PhasePoint p, const PlatePair &plates, double g, const RootSolveSettings &settings = {});

/// Iterates map_A from a lower-plate launch; n_events counts round trips. Both
/// plate hits of each round trip are logged when keep_events is set.
[[nodiscard]] TrajectoryRecord fermi_ulam_simulate(const PlatePair &plates, double g, PhasePoint start,
                                                   const RunStop &stop, const RootSolveSettings &settings = {},
                                                   bool keep_events = true);

/// Absolute residuals of the four implicit equations defining a map step.
[[nodiscard]] std::array<double, 4> map_A_residuals(PhasePoint p, const MapAStep &step, const PlatePair &plates,
                                                    double g);

/// Intermediate states of the decomposition into flight up, reflection at the
/// top, fall, reflection at the bottom.
struct FactoredStep {
    PhasePoint after_rise;    ///< (t~, v - g (t~ - t))
    PhasePoint after_top;     ///< (t~, v~)
    PhasePoint after_fall;    ///< (t', v~ - g (t' - t~))
    PhasePoint after_bottom;  ///< (t', v')
};

/// Same map computed stage by stage; flight times come from fixed-point
/// iteration of the closed-form quadratic roots instead of the marching kernel.
[[nodiscard]] FactoredStep map_A_factored(PhasePoint p, const PlatePair &plates, double g,
                                          const RootSolveSettings &settings = {});

/// (t, y) with y = 2 l / v.
struct TransformedPoint {
    double t = 0.0;
    double y = 0.0;
    double l = 1.0;
};

/// Validated radial rescaling; l must exceed sup |f2(t2) - f1(t1)|.
class ScaleTransform {
public:
    ScaleTransform(const PlatePair &plates, double l);

    [[nodiscard]] double l() const noexcept { return l_; }
    [[nodiscard]] TransformedPoint forward(PhasePoint p) const;
    [[nodiscard]] PhasePoint inverse(TransformedPoint q) const;

private:
    double l_;
};

[[nodiscard]] TransformedPoint transform_U(PhasePoint p, double l);
[[nodiscard]] PhasePoint inverse_U(TransformedPoint q);

struct MapAPrimeStep {
    TransformedPoint next;
    double psi = 0.0; ///< t' - t - y
    double phi = 0.0; ///< y' - y
};

/// Conjugated map U A U^-1; throws RegionTooLarge when |y| >= region_radius.
[[nodiscard]] MapAPrimeStep map_A_prime(TransformedPoint q, const PlatePair &plates, double g,
                                        const RootSolveSettings &settings = {},
                                        double region_radius = std::numeric_limits<double>::infinity());

struct ConstantsEstimate {
    double c0_hat = 0.0;
    double c1_hat = 0.0;
    bool c0_below_one = false;
};

/// Sampled estimates of the constants bounding |phi| <= c1 y^2 and
/// |psi| <= c0 |y|, |d psi / dy| <= c0 on the region 0 < y <= r.
[[nodiscard]] ConstantsEstimate estimate_constants(const PlatePair &plates, double g, double l, double r,
                                                   int samples, const RootSolveSettings &settings = {});

/// Closed loop in the (t, v) section sampled uniformly in t over one period.
struct LoopCurve {
    std::vector<PhasePoint> samples;
    double period = 1.0;
};

/// Loop integral of (v^2/2 + g f1(t) - v f1'(t)) dt by periodic composite
/// Simpson; CurveInvalid if halving the samples moves the value by 1e-8 relative
/// or more.
[[nodiscard]] double poincare_cartan_integral(const LoopCurve &curve, const PlatePair &plates, double g);

/// The same integral over the image A(curve), parametrised by the source
/// parameter; dt'/dtheta from sixth-order periodic differences.
[[nodiscard]] double poincare_cartan_image_integral(const LoopCurve &curve, const PlatePair &plates, double g,
                                                    const RootSolveSettings &settings = {});

struct SingularStop {
    std::optional<double> time_reached;
    std::optional<double> v_exceeds;
    std::optional<long> n_events;
};

struct SingularRun {
    TrajectoryRecord record;      ///< section holds the lower-plate hits (t_n, v_n)
    double predicted_jump = 0.0;  ///< 2 (f1^(k)(t*) - f2^(k)(t*))
    double fitted_slope = 0.0;    ///< increments regressed on predicted_jump * (t_n - t*)^(k-1)
    int fit_events = 0;
    bool increments_positive = false;
    bool stated_inequality_holds = false; ///< f1^(k)(t*) < f2^(k)(t*)
    bool monotone = true;                 ///< v_n non-decreasing over the run
    double min_effective_speed = 0.0;     ///< min of v - g dt/2 over all flights
    bool stopped_by_criterion = false;
};

struct SingularOptions {
    bool keep_events = true;
    int fit_window = 200;
    long max_events = 100'000'000;
};

/// Iterates the collision map towards a declared plate contact at t*.
/// Throws AlternationBroken if the ball hits one plate twice in a row.
[[nodiscard]] SingularRun singular_run(const PlatePair &plates, double g, PhasePoint start, const SingularStop &stop,
                                       const RootSolveSettings &settings = {}, const SingularOptions &options = {});

} // namespace bounce
