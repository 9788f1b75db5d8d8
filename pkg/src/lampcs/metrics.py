"""Recovery-quality metrics and recovery diagrams."""
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from .errors import EmptyTrueSupport, InconsistentTrialCounts, ShapeMismatch

__all__ = ["TrialRecord", "DEFAULT_RR_LEVELS", "relative_recovery", "mse",
           "exact_recovery", "recovery_diagram", "SET_EQUAL", "SUPERSET"]

SET_EQUAL = "set_equal"
SUPERSET = "superset"
DEFAULT_RR_LEVELS = (1.0, 0.9, 0.7, 0.5)


@dataclass
class TrialRecord:
    M: int
    trial: int
    algorithm: str
    rr: float
    exact: bool
    mse: float
    seed_searches: int
    runtime_us: int = 0
    # both exact-recovery modes, when known (not part of trials.csv)
    exact_set_equal: bool | None = None
    exact_superset: bool | None = None

    def __post_init__(self):
        if not 0.0 <= self.rr <= 1.0:
            raise ValueError(f"rr must lie in [0, 1], got {self.rr}")


def _as_set(s):
    return {tuple(v) if isinstance(v, (tuple, list)) else int(v) for v in s}


def relative_recovery(true_supp, est_supp):
    """Fraction of the true support present in the estimate."""
    t = _as_set(true_supp)
    if not t:
        raise EmptyTrueSupport("relative recovery needs a nonempty true support")
    return len(t & _as_set(est_supp)) / len(t)


def mse(x, x_hat):
    """Mean over all entries of the squared error."""
    x = np.asarray(x, dtype=float)
    x_hat = np.asarray(x_hat, dtype=float)
    if x.shape != x_hat.shape:
        raise ShapeMismatch(f"shapes differ: {x.shape} vs {x_hat.shape}")
    return float(np.mean((x - x_hat) ** 2))


def exact_recovery(true_supp, est_supp, mode=SET_EQUAL):
    t, e = _as_set(true_supp), _as_set(est_supp)
    if mode == SET_EQUAL:
        return t == e
    if mode == SUPERSET:
        return t <= e
    raise ValueError(f"unknown exact-recovery mode {mode!r}")


def recovery_diagram(records, rr_levels=DEFAULT_RR_LEVELS, floor=0.0):
    """Grid ``F(M, S)``: the highest level reached by at least ``S`` trials.

    For every measurement count ``M`` with ``S_max`` trials, and every
    ``S = 1 .. S_max``, ``F(M, S)`` is the largest ``f`` in ``rr_levels`` such
    that at least ``S`` trials have ``rr >= f``; ``floor`` when none does.
    Returns ``{M: array of length S_max}`` (index ``S - 1``).
    """
    by_M = defaultdict(list)
    algos = set()
    for rec in records:
        by_M[rec.M].append(rec.rr)
        algos.add(rec.algorithm)
    if len(algos) > 1:
        raise ValueError(f"records mix algorithms {sorted(algos)}")
    counts = {len(v) for v in by_M.values()}
    if len(counts) > 1:
        raise InconsistentTrialCounts(f"trial counts differ across M: {sorted(counts)}")
    levels = sorted(set(rr_levels), reverse=True)
    grid = {}
    for M, rrs in sorted(by_M.items()):
        rrs = np.asarray(rrs)
        S = np.arange(1, rrs.size + 1)
        F = np.full(rrs.size, float(floor))
        # walk from the lowest level up so higher levels overwrite
        for f in reversed(levels):
            n_at_least = int(np.count_nonzero(rrs >= f))
            F[S <= n_at_least] = f
        grid[M] = F
    return grid
