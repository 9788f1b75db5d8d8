import itertools

import numpy as np
import pytest

from lampcs.sensing import gen_sensing, normalize_columns, trial_stream


def best_subset(A, y, kmax, rtol=1e-9):
    """Smallest support explaining ``y`` exactly, by exhaustive search."""
    y_norm = np.linalg.norm(y)
    if y_norm == 0:
        return set()
    N = A.shape[1]
    for k in range(1, kmax + 1):
        for S in itertools.combinations(range(N), k):
            As = A[:, S]
            r = y - As @ np.linalg.lstsq(As, y, rcond=None)[0]
            if np.linalg.norm(r) <= rtol * y_norm:
                return set(S)
    return None


def merge_intervals(sets_of_rows, gap):
    """Reference interval merge: sort runs, glue runs whose hole is <= gap."""
    rows = sorted({r for s in sets_of_rows for r in s})
    if not rows:
        return []
    out = [rows[0]]
    for r in rows[1:]:
        if r - out[-1] - 1 <= gap:
            out.extend(range(out[-1] + 1, r + 1))
        else:
            out.append(r)
    return out


@pytest.fixture
def make_problem():
    def make(M, N, seed, *keys):
        rng = trial_stream(seed, M, *keys)
        A = normalize_columns(gen_sensing(M, N, "gaussian", rng)).matrix
        return rng, A
    return make
