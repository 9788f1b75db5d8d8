"""Dense least squares and orthogonal-complement residues.

Everything here works on real float64 arrays. A support ``T`` is any
sequence of column indices; ``P_T^perp`` is the projector onto the orthogonal
complement of ``span(A[:, T])``.
"""
import numpy as np
import scipy.linalg

from .errors import IndexOutOfRange, RankDeficient, ShapeMismatch

__all__ = [
    "RANK_TOL",
    "least_squares",
    "project_residue",
    "residue_drop",
    "ResidueTracker",
]

# a column is rank deficient when its orthogonalized norm falls below
# RANK_TOL times its original norm
RANK_TOL = 1e-10


def _check_indices(T, n_cols):
    T = np.asarray(T, dtype=np.intp).reshape(-1)
    if T.size and (T.min() < 0 or T.max() >= n_cols):
        raise IndexOutOfRange(f"support indices must lie in [0, {n_cols})")
    return T


def _qr_checked(A_sub):
    """Economic QR of ``A_sub`` that refuses numerically dependent columns."""
    M, k = A_sub.shape
    if k > M:
        raise RankDeficient(f"{k} columns cannot be independent in R^{M}")
    Q, R = scipy.linalg.qr(A_sub, mode="economic")
    col_norms = np.linalg.norm(A_sub, axis=0)
    diag = np.abs(np.diag(R))
    bad = diag < RANK_TOL * np.where(col_norms > 0, col_norms, 1.0)
    if np.any(bad | (col_norms == 0)):
        raise RankDeficient(
            f"numerical rank below {k} (column {int(np.argmax(bad))})")
    return Q, R


def least_squares(A_sub, y):
    """Coefficients ``c`` minimizing ``||y - A_sub c||_2``.

    Solved through a Householder QR rather than the normal equations.
    Raises :class:`RankDeficient` when the columns are not independent.
    """
    A_sub = np.atleast_2d(np.asarray(A_sub, dtype=float))
    y = np.asarray(y, dtype=float)
    if A_sub.shape[0] != y.shape[0]:
        raise ShapeMismatch(f"A_sub has {A_sub.shape[0]} rows, y has {y.shape[0]}")
    if A_sub.shape[1] == 0:
        return np.zeros((0,) + y.shape[1:])
    Q, R = _qr_checked(A_sub)
    return scipy.linalg.solve_triangular(R, Q.T @ y)


def project_residue(A, T, y):
    """Return ``P_T^perp y``; ``y`` itself (a copy) when ``T`` is empty."""
    A = np.asarray(A, dtype=float)
    y = np.asarray(y, dtype=float)
    T = _check_indices(T, A.shape[1])
    if T.size == 0:
        return y.copy()
    Q, _ = _qr_checked(A[:, T])
    return y - Q @ (Q.T @ y)


def residue_drop(A, T, j, r):
    """Decrease of the squared residue norm when column ``j`` joins ``T``.

    Uses the inner-product form ``<r, b_j>^2`` with ``b_j`` the normalized
    column ``j`` of ``P_T^perp A``. ``r`` must already equal ``P_T^perp y``.
    A column lying in ``span(A[:, T])`` gives 0.
    """
    A = np.asarray(A, dtype=float)
    T = _check_indices(T, A.shape[1])
    if not 0 <= j < A.shape[1]:
        raise IndexOutOfRange(f"column {j} outside [0, {A.shape[1]})")
    a = A[:, j]
    if T.size:
        Q, _ = _qr_checked(A[:, T])
        a = a - Q @ (Q.T @ a)
    na = np.linalg.norm(a)
    if na < RANK_TOL * np.linalg.norm(A[:, j]) or na == 0.0:
        return 0.0
    return float(np.dot(r, a / na) ** 2)


class ResidueTracker:
    """Incrementally grown support with an orthonormal basis of its span.

    Each :meth:`add` orthogonalizes the new column against the current basis
    (classical Gram-Schmidt applied twice) so that residues and residue drops
    cost O(M k) instead of a fresh factorization. The results agree with
    :func:`project_residue` / :func:`residue_drop` to rounding error.
    """

    def __init__(self, A, y):
        self.A = np.asarray(A, dtype=float)
        self.y = np.asarray(y, dtype=float)
        M, N = self.A.shape
        if self.y.shape != (M,):
            raise ShapeMismatch(f"y must have shape ({M},), got {self.y.shape}")
        self._Q = np.empty((M, M))
        self.k = 0
        self.support = []
        self.residue = self.y.copy()
        self._col_norms = np.linalg.norm(self.A, axis=0)

    @property
    def Q(self):
        return self._Q[:, :self.k]

    @property
    def residue_norm2(self):
        return float(self.residue @ self.residue)

    def copy(self):
        other = ResidueTracker.__new__(ResidueTracker)
        other.A, other.y = self.A, self.y
        other._Q = self._Q.copy()
        other.k = self.k
        other.support = list(self.support)
        other.residue = self.residue.copy()
        other._col_norms = self._col_norms
        return other

    def _orthogonalize(self, v):
        Q = self.Q
        for _ in range(2):
            v = v - Q @ (Q.T @ v)
        return v

    def orthogonalized(self, j):
        """Column ``j`` of ``P_T^perp A`` and whether it is rank deficient."""
        a = self._orthogonalize(self.A[:, j])
        na = np.linalg.norm(a)
        degenerate = self.k >= self.A.shape[0] or na < RANK_TOL * self._col_norms[j]
        return a, na, degenerate

    def drop(self, j):
        """Residue drop for adding column ``j`` (0 for a degenerate column)."""
        a, na, degenerate = self.orthogonalized(j)
        if degenerate or na == 0.0:
            return 0.0
        return float(np.dot(self.residue, a) ** 2 / na ** 2)

    def add(self, j):
        a, na, degenerate = self.orthogonalized(j)
        if degenerate or na == 0.0:
            raise RankDeficient(f"column {j} lies in the span of the support")
        self._Q[:, self.k] = a / na
        self.k += 1
        self.support.append(int(j))
        # recompute from y so accumulated rounding does not drift
        Q = self.Q
        self.residue = self.y - Q @ (Q.T @ self.y)

    def block_drop(self, cols):
        """Residue drop for adding all of ``cols`` at once, with the grown tracker.

        Returns ``(None, None)`` when the block would make the support rank
        deficient.
        """
        trial = self.copy()
        try:
            for j in cols:
                trial.add(j)
        except RankDeficient:
            return None, None
        return self.residue_norm2 - trial.residue_norm2, trial

    def coefficients(self):
        """Least-squares coefficients on the current support (support order)."""
        if not self.support:
            return np.zeros(0)
        return least_squares(self.A[:, self.support], self.y)
