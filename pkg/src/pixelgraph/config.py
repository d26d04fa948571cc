"""Resource caps shared by all modules.

The environment variable ``PIXELGRAPH_CAP`` (an integer) overrides both the
enumeration cap and the width cap.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace

DEFAULT_CAP = 2**20


@dataclass(frozen=True)
class Caps:
    enumeration: int = DEFAULT_CAP  # max items yielded by exhaustive enumeration
    width: int = DEFAULT_CAP  # max 2^m columns / 2^n rows materialized
    max_depth: int = 16  # max cover depth for analytic models
    max_percolation_depth: int = 11
    rejection_budget: int = 10**6


def get_caps() -> Caps:
    caps = Caps()
    raw = os.environ.get("PIXELGRAPH_CAP")
    if raw:
        value = int(raw)
        caps = replace(caps, enumeration=value, width=value)
    return caps
