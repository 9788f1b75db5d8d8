"""Baseline greedy pursuits: OMP, OLS and block OMP, plus MMV forms.

All selection rules break ties toward the lowest index (for MMV, the lowest
``(col, row)`` pair). Candidates whose column already lies in the span of the
selected columns are skipped rather than raising, so the least-squares fits
stay well posed.
"""
import math

import numpy as np

from ..linalg import ResidueTracker
from ._common import (as_matrix, as_vector, frob_norm, mmv_result, pick_seed,
                      residue_small, smv_result)
from .results import StopReason

__all__ = ["omp", "ols", "bomp", "omp_mmv", "bomp_mmv", "block_partition"]


def _select(tracker, scores, taken):
    """Argmax of ``scores`` skipping taken and rank-deficient columns."""
    excluded = set(taken)
    while True:
        j = pick_seed(scores, excluded)
        if j is None:
            return None
        if not tracker.orthogonalized(j)[2]:
            return j
        excluded.add(j)


def _greedy(name, A, y, K, residue_stop, score_fn):
    M, N = A.shape
    y = as_vector(y, M)
    tracker = ResidueTracker(A, y)
    y_norm = float(np.linalg.norm(y))
    order, norms = [], [y_norm]
    while True:
        if len(order) >= K:
            stop = StopReason.SPARSITY_REACHED
            break
        if len(order) >= M:
            stop = StopReason.SUPPORT_SATURATED
            break
        if residue_small(norms[-1], y_norm, residue_stop):
            stop = StopReason.RESIDUE_SMALL
            break
        j = _select(tracker, score_fn(tracker), order)
        if j is None:
            stop = StopReason.RESIDUE_SMALL
            break
        tracker.add(j)
        order.append(j)
        norms.append(float(np.sqrt(tracker.residue_norm2)))
    return smv_result(name, tracker, N, order, [], len(order), stop, norms)


def omp(A, y, K, residue_stop=None):
    """Orthogonal matching pursuit: pick ``argmax_j |<A_j, r>|`` each step.

    Stops after ``K`` selections, or once ``||r|| <= residue_stop * ||y||``.
    """
    A = as_matrix(A)
    return _greedy("omp", A, y, K, residue_stop,
                   lambda tr: np.abs(A.T @ tr.residue))


def ols(A, y, K, residue_stop=None):
    """Orthogonal least squares: pick the column whose inclusion leaves the
    smallest residue.

    Equivalent to maximizing the residue drop ``<r, a_j>^2 / ||a_j||^2`` where
    ``a_j`` is column ``j`` orthogonalized against the current support; the
    squared norms ``||a_j||^2`` are downdated as the support grows.
    """
    A = as_matrix(A, normalized=False)
    norms2 = np.sum(A * A, axis=0)
    floor = (1e-10) ** 2 * norms2
    state = {"k": 0, "norms2": norms2.copy()}

    def score(tr):
        while state["k"] < tr.k:
            q = tr.Q[:, state["k"]]
            state["norms2"] -= (q @ A) ** 2
            state["k"] += 1
        n2 = state["norms2"]
        num = (A.T @ tr.residue) ** 2
        out = np.zeros_like(num)
        ok = n2 > floor
        out[ok] = num[ok] / n2[ok]
        return out

    return _greedy("ols", A, y, K, residue_stop, score)


def block_partition(N, d):
    """Consecutive blocks of size ``d``; the last one is shorter when ``d``
    does not divide ``N``."""
    if d < 1:
        raise ValueError("block size must be >= 1")
    return [np.arange(s, min(s + d, N)) for s in range(0, N, d)]


def _block_score(C, blocks, norm):
    if norm == "l1":
        return np.array([np.abs(C[b]).sum(axis=0) for b in blocks])
    if norm == "l2":
        return np.array([np.sqrt((C[b] ** 2).sum(axis=0)) for b in blocks])
    raise ValueError(f"unknown block norm {norm!r}; expected 'l1' or 'l2'")


def bomp(A, y, d, stop_blocks=None, K=None, norm="l1", residue_stop=None):
    """Block OMP over fixed blocks of size ``d``.

    The block score is the l1 norm of ``A_b^T r`` by default (``norm="l2"``
    selectable). Stops after ``stop_blocks`` blocks, defaulting to
    ``ceil(K / d)``.
    """
    A = as_matrix(A)
    M, N = A.shape
    y = as_vector(y, M)
    if stop_blocks is None:
        if K is None:
            raise ValueError("bomp needs stop_blocks or K")
        stop_blocks = math.ceil(K / d)
    blocks = block_partition(N, d)
    tracker = ResidueTracker(A, y)
    y_norm = float(np.linalg.norm(y))
    chosen, order, groups, norms = set(), [], [], [y_norm]
    while True:
        if len(chosen) >= stop_blocks:
            stop = StopReason.MAX_GROUPS
            break
        if residue_small(norms[-1], y_norm, residue_stop):
            stop = StopReason.RESIDUE_SMALL
            break
        scores = _block_score(A.T @ tracker.residue, blocks, norm)
        l = pick_seed(scores, chosen)
        if l is None:
            stop = StopReason.RESIDUE_SMALL
            break
        if len(order) + blocks[l].size > M:
            stop = StopReason.SUPPORT_SATURATED
            break
        chosen.add(l)
        for j in blocks[l]:
            tracker.add(int(j))
            order.append(int(j))
        norms.append(float(np.sqrt(tracker.residue_norm2)))
    res = smv_result("bomp", tracker, N, order, groups, len(chosen), stop, norms)
    res.iterations = len(chosen)
    return res


def _mmv_setup(A, Y):
    M, N = A.shape
    Y = np.asarray(Y, dtype=float)
    if Y.ndim == 1:
        Y = Y[:, None]
    as_vector(Y[:, 0], M)
    return M, N, Y, [ResidueTracker(A, Y[:, p]) for p in range(Y.shape[1])]


def _lexmax(S):
    """Position of the max of an ``(n, P)`` score array, lowest (col, row) first."""
    flat = S.T.ravel()
    k = int(np.argmax(flat))
    if flat[k] <= 0.0:
        return None
    return k % S.shape[0], k // S.shape[0]


def omp_mmv(A, Y, K, residue_stop=None):
    """Entry-wise OMP on an MMV problem.

    Each step picks the ``(row, col)`` pair maximizing ``|<A_j, R_p>|`` over
    the whole residue matrix. This is exactly OMP on the concatenated SMV
    model with a block-diagonal sensing matrix.
    """
    A = as_matrix(A)
    M, N, Y, trackers = _mmv_setup(A, Y)
    y_norm = float(np.linalg.norm(Y))
    order, norms = [], [y_norm]
    taken = np.zeros((N, Y.shape[1]), dtype=bool)
    while True:
        if len(order) >= K:
            stop = StopReason.SPARSITY_REACHED
            break
        if residue_small(norms[-1], y_norm, residue_stop):
            stop = StopReason.RESIDUE_SMALL
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
        taken[j, p] = True
        order.append((j, p))
        norms.append(frob_norm(trackers))
    return mmv_result("omp_mmv", trackers, N, order, [], len(order), stop, norms)


def bomp_mmv(A, Y, d, stop_blocks=None, K=None, norm="l1", residue_stop=None):
    """Column-wise block OMP: candidates are (row block, column) pairs."""
    A = as_matrix(A)
    M, N, Y, trackers = _mmv_setup(A, Y)
    if stop_blocks is None:
        if K is None:
            raise ValueError("bomp_mmv needs stop_blocks or K")
        stop_blocks = math.ceil(K / d)
    blocks = block_partition(N, d)
    y_norm = float(np.linalg.norm(Y))
    order, norms, n_blocks = [], [y_norm], 0
    taken = np.zeros((len(blocks), Y.shape[1]), dtype=bool)
    while True:
        if n_blocks >= stop_blocks:
            stop = StopReason.MAX_GROUPS
            break
        if residue_small(norms[-1], y_norm, residue_stop):
            stop = StopReason.RESIDUE_SMALL
            break
        R = np.column_stack([tr.residue for tr in trackers])
        S = _block_score(A.T @ R, blocks, norm)
        S[taken] = -1.0
        pick = _lexmax(S)
        if pick is None:
            stop = StopReason.RESIDUE_SMALL
            break
        l, p = pick
        if trackers[p].k + blocks[l].size > M:
            stop = StopReason.SUPPORT_SATURATED
            break
        taken[l, p] = True
        n_blocks += 1
        for j in blocks[l]:
            trackers[p].add(int(j))
            order.append((int(j), p))
        norms.append(frob_norm(trackers))
    res = mmv_result("bomp_mmv", trackers, N, order, [], n_blocks, stop, norms)
    res.iterations = n_blocks
    return res
