"""Tolerance policy.

A single default relative tolerance is used everywhere a contract is
checked; it can be overridden per call or globally through the
``HARDYLAB_DEFAULT_TOL`` environment variable.
"""

from __future__ import annotations

import math
import os

from .errors import InvalidParameterError

DEFAULT_TOLERANCE = 1e-6

ENV_VAR = "HARDYLAB_DEFAULT_TOL"


def default_tolerance() -> float:
    """Return the default relative tolerance (env override included)."""
    raw = os.environ.get(ENV_VAR)
    if raw is None:
        return DEFAULT_TOLERANCE
    try:
        value = float(raw)
    except ValueError:
        raise InvalidParameterError(
            f"{ENV_VAR} must be a positive real number, got {raw!r}"
        ) from None
    if not math.isfinite(value) or value <= 0.0:
        raise InvalidParameterError(
            f"{ENV_VAR} must be a positive real number, got {raw!r}"
        )
    return value
