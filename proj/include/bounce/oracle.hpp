#pragma once

#include "bounce/record.hpp"
#include "bounce/scenario.hpp"

namespace bounce {

struct OracleSettings {
    double h = 0.0;          ///< time step; 0 means 1e-6 T
    int refine_iters = 60;   ///< bisection halvings per detected sign change
    long max_events = 10'000'000;
};

/// Reference run by fixed time steps: every body moves along its exact
/// parabola, every gap (ball-plate, ball-ball) is sampled at the step ends and
/// each sign change is bisected. Shares only the collision laws with the
/// event-driven engines. Resonant one-ball scenarios start from (t0, v0).
[[nodiscard]] TrajectoryRecord oracle_run(const ScenarioConfig &scenario, double horizon,
                                          const OracleSettings &settings = {});

} // namespace bounce
