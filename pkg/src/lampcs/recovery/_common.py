import numpy as np

from ..errors import NotNormalized, ShapeMismatch
from ..sensing import SensingMatrix
from .results import RESIDUE_FLOOR, RecoveryResult

NORM_TOL = 1e-8


def as_matrix(A, normalized=True):
    """Plain float array from a SensingMatrix or array-like."""
    if isinstance(A, SensingMatrix):
        if normalized and not A.normalized:
            raise NotNormalized("sensing matrix must be column-normalized")
        return A.matrix
    X = np.asarray(A, dtype=float)
    if X.ndim != 2:
        raise ShapeMismatch("A must be a matrix")
    if normalized and not np.allclose(np.linalg.norm(X, axis=0), 1.0, rtol=0, atol=NORM_TOL):
        raise NotNormalized("columns of A must have unit norm")
    return X


def as_vector(y, M):
    y = np.asarray(y, dtype=float)
    if y.shape != (M,):
        raise ShapeMismatch(f"y must have shape ({M},), got {y.shape}")
    return y


def residue_small(r_norm, y_norm, residue_stop):
    limit = max(RESIDUE_FLOOR, residue_stop or 0.0) * y_norm
    return r_norm <= limit


def pick_seed(scores, excluded):
    """Lowest index attaining the maximum of ``scores`` outside ``excluded``.

    Returns None when every admissible score is zero.
    """
    scores = scores.copy()
    if excluded:
        scores[list(excluded)] = -1.0
    j = int(np.argmax(scores))
    if scores[j] <= 0.0:
        return None
    return j


def smv_result(name, tracker, N, order, groups, seeds, stop, norms):
    support = sorted(order)
    if support:
        c = tracker.coefficients()
        pos = {j: i for i, j in enumerate(tracker.support)}
        coef = np.array([c[pos[j]] for j in support])
    else:
        coef = np.zeros(0)
    return RecoveryResult(name, (N,), support, coef, list(order), groups,
                          len(order), seeds, stop, norms)


def mmv_result(name, trackers, N, order, groups, seeds, stop, norms):
    coef_of = {}
    for p, tr in enumerate(trackers):
        if tr.support:
            for j, c in zip(tr.support, tr.coefficients()):
                coef_of[(j, p)] = c
    support = sorted(order)
    coef = np.array([coef_of[s] for s in support]) if support else np.zeros(0)
    return RecoveryResult(name, (N, len(trackers)), support, coef, list(order),
                          groups, len(order), seeds, stop, norms)


def frob_norm(trackers):
    return float(np.sqrt(sum(tr.residue_norm2 for tr in trackers)))
