"""Group-sparse test signals and synthetic B-scans.

Pulse shapes are sampled at ``length`` points over ``t in [-3 sigma, 3 sigma]``
with ``sigma = length / 6``:

* Gaussian pulse  ``g(t) = exp(-t^2 / (2 sigma^2))``
* Gaussian monocycle  ``m(t) = -t exp(-t^2 / (2 sigma^2))``

and then scaled so the largest sample magnitude equals ``amplitude``.
Samples smaller than ``1e-12 * amplitude`` are set to exactly zero.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import WindowOverflow

__all__ = [
    "PULSE_KINDS",
    "GroupSparseSignal",
    "BScan",
    "pulse_shape",
    "gaussian_pulse",
    "gaussian_monocycle",
    "superpose",
    "apply_delay",
    "synth_bscan",
    "support_of",
    "groups_of",
]

PULSE_KINDS = ("monocycle", "pulse")
SNAP = 1e-12


def support_of(values):
    """Sorted indices of the nonzero entries."""
    return np.flatnonzero(np.asarray(values) != 0)


def groups_of(support):
    """Maximal runs of consecutive indices as ``(start, length)`` pairs."""
    support = np.asarray(support, dtype=int)
    if support.size == 0:
        return []
    breaks = np.flatnonzero(np.diff(support) != 1) + 1
    return [(int(run[0]), len(run)) for run in np.split(support, breaks)]


@dataclass
class GroupSparseSignal:
    values: np.ndarray
    true_support: np.ndarray
    groups: list
    metadata: dict = field(default_factory=dict)

    @classmethod
    def from_values(cls, values, **metadata):
        values = np.asarray(values, dtype=float)
        supp = support_of(values)
        return cls(values, supp, groups_of(supp), dict(metadata))

    @property
    def N(self):
        return self.values.shape[0]

    @property
    def K(self):
        return int(self.true_support.size)


@dataclass
class BScan:
    """``N x P`` space-time image; column ``p`` is the A-scan at antenna ``p``."""
    X: np.ndarray
    true_support_2d: list
    targets: list = field(default_factory=list)

    @property
    def shape(self):
        return self.X.shape


def pulse_shape(length, kind="monocycle"):
    """Unit-peak samples of the requested pulse."""
    if length < 2:
        raise ValueError("pulse length must be at least 2")
    u = np.linspace(-3.0, 3.0, length)  # t / sigma
    if kind == "monocycle":
        w = -u * np.exp(-0.5 * u ** 2)
    elif kind == "pulse":
        w = np.exp(-0.5 * u ** 2)
    else:
        raise ValueError(f"unknown pulse kind {kind!r}; expected one of {PULSE_KINDS}")
    w = w / np.max(np.abs(w))
    w[np.abs(w) < SNAP] = 0.0
    return w


def _place(N, start, length, amplitude, kind):
    if length < 2:
        raise ValueError("pulse length must be at least 2")
    if start < 0 or start + length > N:
        raise WindowOverflow(f"window [{start}, {start + length}) does not fit in [0, {N})")
    values = np.zeros(N)
    values[start:start + length] = amplitude * pulse_shape(length, kind)
    return GroupSparseSignal.from_values(
        values, kind=kind, width=length, delay=start, amplitude=amplitude)


def gaussian_monocycle(N, start, length, amplitude=1.0):
    """First derivative of a Gaussian occupying ``[start, start + length)``."""
    return _place(N, start, length, amplitude, "monocycle")


def gaussian_pulse(N, start, length, amplitude=1.0):
    """Gaussian bell occupying ``[start, start + length)``."""
    return _place(N, start, length, amplitude, "pulse")


def superpose(*signals):
    """Sum of signals of equal length; support and groups are recomputed."""
    values = np.sum([s.values for s in signals], axis=0)
    return GroupSparseSignal.from_values(values, parts=[s.metadata for s in signals])


def apply_delay(s, delay=None, rng=None):
    """Shift ``s`` down by ``delay`` samples (no wrap-around).

    With ``rng`` given, the delay is drawn uniformly from
    ``{0, ..., N - last - 1}`` where ``last`` is the last support index, i.e.
    every delay that keeps the signal inside the vector.
    """
    N = s.N
    if rng is not None:
        last = int(s.true_support[-1]) if s.K else 0
        delay = int(rng.integers(0, N - last))
    delay = int(delay or 0)
    if s.K:
        first, last = int(s.true_support[0]), int(s.true_support[-1])
        if first + delay < 0 or last + delay >= N:
            raise WindowOverflow(f"delay {delay} pushes the support outside [0, {N})")
    values = np.zeros(N)
    if delay >= 0:
        values[delay:] = s.values[:N - delay]
    else:
        values[:delay] = s.values[-delay:]
    meta = dict(s.metadata)
    meta["delay"] = meta.get("delay", 0) + delay
    return GroupSparseSignal.from_values(values, **meta)


def _round_half_up(v):
    return int(np.floor(v + 0.5))


def synth_bscan(N, P, targets):
    """Sum of hyperbolic pulse trains, one per target.

    Each target is ``(apex_row, apex_col, spread, length, amplitude, kind)``;
    column ``p`` gets a pulse starting at
    ``apex_row + round(spread * (p - apex_col)^2)`` (halves round up).
    """
    X = np.zeros((N, P))
    for apex_row, apex_col, spread, length, amplitude, kind in targets:
        w = amplitude * pulse_shape(length, kind)
        for p in range(P):
            start = apex_row + _round_half_up(spread * (p - apex_col) ** 2)
            if start < 0 or start + length > N:
                raise WindowOverflow(
                    f"target at row {apex_row} overflows column {p} (start {start})")
            X[start:start + length, p] += w
    rows, cols = np.nonzero(X)
    support = sorted(zip(rows.tolist(), cols.tolist()))
    return BScan(X, support, list(targets))
