"""LAMP: seeded greedy search grown through guarded neighbor scans, SMV and MMV.

Each outer iteration runs one greedy seed search, exactly as OMP does, and
then grows a cluster around the seed: neighbors are tested one at a time
(up, then down) and admitted while their residue drop exceeds the guard
threshold. In the MMV form the row range found in the seed column is then
extended left and right one column-block at a time.
"""
import math

import numpy as np

from ..linalg import ResidueTracker
from ..sensing import coherence
from ._common import (as_matrix, as_vector, frob_norm, mmv_result, pick_seed,
                      residue_small, smv_result)
from .greedy import _lexmax, _mmv_setup
from .results import (RESIDUE_FLOOR, EpsilonMode, GroupRecord, LampConfig,
                      StopReason)

__all__ = ["lamp_smv", "lamp_mmv", "oracle_delta"]


def oracle_delta(A):
    """Coherence of ``A``, the RIP-constant proxy used by the oracle guard."""
    return coherence(A)


class _Guard:
    """Threshold for the neighbor test, evaluated against the current state."""

    def __init__(self, cfg, A, x_true, y_norm, horizontal=False):
        self.mode = cfg.epsilon_mode
        # drops at rounding level never count, whatever the mode
        self.floor = (RESIDUE_FLOOR * y_norm) ** 2
        self.value = cfg.eps_prime if horizontal else cfg.epsilon
        if self.mode is EpsilonMode.ORACLE:
            if x_true is None:
                raise ValueError("oracle epsilon mode needs the true signal")
            self.x = np.asarray(x_true, dtype=float)
            delta = oracle_delta(A) if cfg.delta is None else cfg.delta
            self.factor = math.inf if delta >= 1 else (delta / (1 - delta)) ** 2

    def __call__(self, tracker, taken_rows=(), col=None):
        return max(self.floor, self._eps(tracker, taken_rows, col))

    def _eps(self, tracker, taken_rows, col):
        if self.mode is EpsilonMode.ABSOLUTE:
            return self.value
        if self.mode is EpsilonMode.RELATIVE:
            return self.value * tracker.residue_norm2
        x = self.x if col is None else self.x[:, col]
        rest = np.delete(x, list(taken_rows)) if len(taken_rows) else x
        energy = float(rest @ rest)
        if math.isinf(self.factor):
            return math.inf
        return self.factor * energy


def _stop_check(cfg, n_support, n_groups, limit_saturate, r_norm, y_norm):
    if cfg.K is not None and n_support >= cfg.K:
        return StopReason.SPARSITY_REACHED
    if limit_saturate:
        return StopReason.SUPPORT_SATURATED
    if residue_small(r_norm, y_norm, cfg.residue_stop):
        return StopReason.RESIDUE_SMALL
    if cfg.max_groups is not None and n_groups >= cfg.max_groups:
        return StopReason.MAX_GROUPS
    return None


def lamp_smv(A, y, cfg, x_true=None):
    """LAMP on a single measurement vector.

    ``x_true`` is only needed for the oracle guard. Returns a
    :class:`RecoveryResult` whose ``groups`` lists one record per seed.
    """
    A = as_matrix(A)
    M, N = A.shape
    y = as_vector(y, M)
    y_norm = float(np.linalg.norm(y))
    guard = _Guard(cfg, A, x_true, y_norm)
    cap = min(M, cfg.K if cfg.K is not None else M)
    tracker = ResidueTracker(A, y)
    taken, order, groups, norms = set(), [], [], [y_norm]

    def admit(j):
        tracker.add(j)
        taken.add(j)
        order.append(j)
        norms.append(float(np.sqrt(tracker.residue_norm2)))

    def scan(seed, step):
        k = 1
        while len(order) < cap:
            j = seed + step * k
            if j < 0 or j >= N or j in taken:
                break
            eps = guard(tracker, order)
            if not tracker.drop(j) > eps:
                break
            admit(j)
            k += 1
        return k

    while True:
        stop = _stop_check(cfg, len(order), len(groups), len(order) >= M,
                           norms[-1], y_norm)
        if stop is not None:
            break
        excluded = set(taken)
        scores = np.abs(A.T @ tracker.residue)
        while True:
            j = pick_seed(scores, excluded)
            if j is None or not tracker.orthogonalized(j)[2]:
                break
            excluded.add(j)
        if j is None:
            stop = StopReason.RESIDUE_SMALL
            break
        admit(j)
        k_up = scan(j, -1)
        k_down = scan(j, +1)
        members = list(range(j - k_up + 1, j + k_down))
        groups.append(GroupRecord(j, k_up, k_down, 1, 1, members))
    return smv_result("lamp", tracker, N, order, groups, len(groups), stop, norms)


def lamp_mmv(A, Y, cfg, X_true=None):
    """LAMP on a multiple measurement matrix ``Y = A X``.

    After the vertical scan in the seed column ``p``, the admitted row range
    is frozen and offered as a block to columns ``p - 1, p - 2, ...`` and then
    ``p + 1, p + 2, ...``; a block is admitted while its squared-Frobenius
    residue drop exceeds the horizontal threshold. Scans stop at the array
    edges and at blocks that overlap the existing support.
    """
    A = as_matrix(A)
    M, N, Y, trackers = _mmv_setup(A, Y)
    P = Y.shape[1]
    if X_true is not None:
        X_true = np.asarray(X_true, dtype=float).reshape(N, P)
    y_norm = float(np.linalg.norm(Y))
    vguard = _Guard(cfg, A, X_true, y_norm)
    hguard = _Guard(cfg, A, X_true, y_norm, horizontal=True)
    cap = cfg.K if cfg.K is not None else M * P
    taken = np.zeros((N, P), dtype=bool)
    order, groups, norms = [], [], [y_norm]

    def rows_taken(p):
        return np.flatnonzero(taken[:, p])

    def admit(j, p):
        taken[j, p] = True
        order.append((j, p))

    def vscan(seed, p, step):
        k = 1
        tr = trackers[p]
        while len(order) < cap:
            j = seed + step * k
            if j < 0 or j >= N or taken[j, p]:
                break
            eps = vguard(tr, rows_taken(p), p)
            if not tr.drop(j) > eps:
                break
            tr.add(j)
            admit(j, p)
            norms.append(frob_norm(trackers))
            k += 1
        return k

    def hscan(rows, p, step):
        k = 1
        while True:
            q = p + step * k
            if q < 0 or q >= P or taken[rows, q].any() or len(order) + len(rows) > cap:
                break
            drop, trial = trackers[q].block_drop(rows)
            if drop is None or not drop > hguard(trackers[q], rows_taken(q), q):
                break
            trackers[q] = trial
            for j in rows:
                admit(int(j), q)
            norms.append(frob_norm(trackers))
            k += 1
        return k

    while True:
        saturated = all(tr.k >= M for tr in trackers)
        stop = _stop_check(cfg, len(order), len(groups), saturated, norms[-1], y_norm)
        if stop is not None:
            break
        R = np.column_stack([tr.residue for tr in trackers])
        C = np.abs(A.T @ R)
        C[taken] = -1.0
        while True:
            pick = _lexmax(C)
            if pick is None or not trackers[pick[1]].orthogonalized(pick[0])[2]:
                break
            C[pick] = -1.0
        if pick is None:
            stop = StopReason.RESIDUE_SMALL
            break
        j, p = pick
        trackers[p].add(j)
        admit(j, p)
        norms.append(frob_norm(trackers))
        k_up = vscan(j, p, -1)
        k_down = vscan(j, p, +1)
        rows = np.arange(j - k_up + 1, j + k_down)
        k_left = hscan(rows, p, -1)
        k_right = hscan(rows, p, +1)
        members = sorted((int(r), c) for c in range(p - k_left + 1, p + k_right)
                         for r in rows)
        groups.append(GroupRecord((j, p), k_up, k_down, k_left, k_right, members))
    return mmv_result("lamp_mmv", trackers, N, order, groups, len(groups), stop, norms)
