"""Band assignment for multiband ultra-narrowband IoT networks.

Configuration is passed as keyword overrides using the same keys as the
key = value config files, e.g. ``simulate(10, num_bs=8, sinr_threshold=12)``.
"""

from ._core import (
    config_keys,
    default_config,
    oracle,
    simulate,
    solve_p3,
    solve_p4,
    strategies,
    sweep,
    train,
)

__all__ = [
    "config_keys",
    "default_config",
    "oracle",
    "simulate",
    "solve_p3",
    "solve_p4",
    "strategies",
    "sweep",
    "train",
]
