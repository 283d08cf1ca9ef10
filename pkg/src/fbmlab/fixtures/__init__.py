"""Frozen calibrated constants shipped with the package.

The small-horizon transportation constant and the Young-integral estimate
carry universal constants that the theory does not pin down numerically.
We calibrate them once by Monte Carlo against independent oracles (see the
provenance block inside the JSON) and freeze the results here; verifiers
load them by default so fresh-seed runs are honest one-sided checks
against fixed numbers, not against quantities refit on the same data.
"""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources


@lru_cache(maxsize=1)
def calibrated_constants() -> dict:
    """Load fixtures/calibrated_constants.json (cached)."""
    path = resources.files(__package__) / "calibrated_constants.json"
    with path.open("r") as fh:
        return json.load(fh)
