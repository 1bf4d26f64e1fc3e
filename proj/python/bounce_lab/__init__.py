"""Python access to the bounce_lab simulation core."""

from ._core import (
    BounceError,
    ForcingProfile,
    PlatePair,
    Tangency,
    ball_ball_collide,
    class_c_test,
    critical_scale,
    envelope_verdict,
    recurrence_iterate,
    map_A,
    one_ball_map,
    oracle_available,
    reflect_off_plate,
    resonant_orbit,
    run_criterion,
    simulate_config,
    summary_json,
)

__all__ = [
    "BounceError",
    "ForcingProfile",
    "PlatePair",
    "Tangency",
    "ball_ball_collide",
    "class_c_test",
    "critical_scale",
    "envelope_verdict",
    "recurrence_iterate",
    "map_A",
    "one_ball_map",
    "oracle_available",
    "reflect_off_plate",
    "resonant_orbit",
    "run_criterion",
    "simulate_config",
    "summary_json",
]
