"""Support post-processing: residues, merging, least squares and filtering."""
import numpy as np

from ..errors import BadBand
from ..linalg import least_squares, project_residue
from ._common import as_matrix

__all__ = ["findresidue", "merge_supports", "merge_rows", "reconstruct_coeffs",
           "bandlimit_filter", "energy_band"]


def _rows_by_col(T, P):
    cols = [[] for _ in range(P)]
    for r, c in T:
        cols[c].append(int(r))
    return cols


def findresidue(A, y, r, new_indices, T):
    """Residue after adding ``new_indices`` to the support ``T``.

    SMV: ``P_S^perp y`` with ``S = T + new_indices``. MMV (``y`` a matrix,
    indices as ``(row, col)`` pairs): only the columns touched by
    ``new_indices`` are re-projected, the rest of ``r`` is returned as is.
    """
    A = as_matrix(A, normalized=False)
    y = np.asarray(y, dtype=float)
    T, new_indices = list(T), list(new_indices)
    if set(T) & set(new_indices):
        raise ValueError("new indices already belong to the support")
    if y.ndim == 1:
        return project_residue(A, T + new_indices, y)
    P = y.shape[1]
    R = np.array(r, dtype=float, copy=True)
    rows = _rows_by_col(T + new_indices, P)
    for p in sorted({c for _, c in new_indices}):
        R[:, p] = project_residue(A, rows[p], y[:, p])
    return R


def merge_rows(rows, gap, limit=None):
    """Fill holes of at most ``gap`` indices between consecutive entries.

    With ``limit`` set, holes are bridged smallest first and only while the
    total count stays within ``limit``.
    """
    rows = sorted(set(int(r) for r in rows))
    holes = [(b - a - 1, a, b) for a, b in zip(rows, rows[1:]) if 0 < b - a - 1 <= gap]
    out = set(rows)
    for size, a, b in sorted(holes):
        if limit is not None and len(out) + size > limit:
            break
        out.update(range(a + 1, b))
    return sorted(out)


def merge_supports(groups, gap, support=None, limit=None):
    """Union of group members with short vertical gaps bridged.

    Works per column for MMV groups (members given as ``(row, col)``).
    ``support`` adds extra elements to the union (e.g. a full result support).
    ``limit`` caps the size of each merged column (use ``M`` to keep the
    least-squares fit well posed).
    """
    members = [m for g in groups for m in g.members]
    if support is not None:
        members += list(support)
    if not members:
        return []
    if isinstance(members[0], tuple):
        P = max(c for _, c in members) + 1
        out = []
        for c, rows in enumerate(_rows_by_col(set(members), P)):
            out += [(r, c) for r in merge_rows(rows, gap, limit)]
        return sorted(out)
    return merge_rows(members, gap, limit)


def reconstruct_coeffs(A, T, y):
    """Least-squares estimate on ``T``, zero elsewhere (vector or matrix)."""
    A = as_matrix(A, normalized=False)
    y = np.asarray(y, dtype=float)
    N = A.shape[1]
    T = list(T)
    if y.ndim == 1:
        x = np.zeros(N)
        if T:
            idx = sorted(T)
            x[idx] = least_squares(A[:, idx], y)
        return x
    X = np.zeros((N, y.shape[1]))
    for p, rows in enumerate(_rows_by_col(T, y.shape[1])):
        if rows:
            rows = sorted(rows)
            X[rows, p] = least_squares(A[:, rows], y[:, p])
    return X


def bandlimit_filter(x_hat, keep_band):
    """Zero every DFT bin outside ``[low, high]`` (and its mirror image).

    ``x_hat`` may be a vector or a matrix, filtered along axis 0; the result
    is real.
    """
    x_hat = np.asarray(x_hat, dtype=float)
    N = x_hat.shape[0]
    low, high = keep_band
    if not (0 <= low <= high <= N // 2):
        raise BadBand(f"band {keep_band} outside [0, {N // 2}]")
    F = np.fft.rfft(x_hat, axis=0)
    F[:low] = 0.0
    F[high + 1:] = 0.0
    return np.fft.irfft(F, n=N, axis=0)


def energy_band(pulse, N=None, fraction=0.999):
    """Smallest bin range ``[low, high]`` holding ``fraction`` of the energy.

    Bins are added in decreasing-energy order until ``fraction`` is reached;
    the band spans the lowest to highest bin taken.
    """
    pulse = np.asarray(pulse, dtype=float)
    N = N or pulse.shape[0]
    power = np.abs(np.fft.rfft(pulse, n=N)) ** 2
    # interior bins carry twice the energy of DC / Nyquist in the full spectrum
    weight = np.full(power.shape, 2.0)
    weight[0] = 1.0
    if N % 2 == 0:
        weight[-1] = 1.0
    energy = power * weight
    total = energy.sum()
    if total == 0:
        return 0, 0
    idx = np.argsort(-energy, kind="stable")
    k = int(np.searchsorted(np.cumsum(energy[idx]), fraction * total)) + 1
    kept = idx[:k]
    return int(kept.min()), int(kept.max())
