"""Named optimization/power configuration pairs selectable from the CLI."""

from __future__ import annotations

from .optpass import DUPLICATE, OptConfig
from .power import WIRE_SUPERLINEAR, PowerConfig

PRESETS: dict[str, tuple[OptConfig, PowerConfig]] = {
    # both transforms, median threshold, fanout-linear capacitance
    "default": (OptConfig(), PowerConfig()),
    # duplicate only drivers of fanout >= 3 and charge wires superlinearly in fanout
    "wire-superlinear": (
        OptConfig(transforms=frozenset({DUPLICATE}), min_fanout_for_duplication=3),
        WIRE_SUPERLINEAR,
    ),
}
