"""Runtime knobs: thread count and basis-element budgets.

All caps are explicit-by-design: chain levels grow exponentially in the
simplicial degree, so nothing here has a silent unbounded default.
"""

import os

# basis elements allowed in a single chain level
DEFAULT_LEVEL_CAP = 2_000_000
# underlying set size allowed for element-indexed (Tambara) constructions
DEFAULT_ELEMENT_CAP = 10_000
# simplicial degree allowed for the box-presentation Loday path
DEFAULT_DIRECT_DEGREE_CAP = 3

_threads = 1


def set_threads(n: int):
    global _threads
    _threads = max(1, int(n))


def threads() -> int:
    env = os.environ.get("LODAYLAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return _threads


def check_level_cap(size: int, cap: int | None, where: str):
    from .errors import DimensionOverflow

    cap = DEFAULT_LEVEL_CAP if cap is None else cap
    if size > cap:
        raise DimensionOverflow(size, cap, where)
