"""Random sensing matrices, column normalization and coherence.

Randomness comes from numpy's PCG64 bit generator. Gaussian entries use
``Generator.standard_normal`` (numpy's ziggurat transform), Bernoulli entries
are ``2 * integers(0, 2) - 1``. Monte-Carlo sweeps derive one independent
stream per trial with :func:`trial_stream`, keyed on ``(seed, *keys)``.
"""
from dataclasses import dataclass, replace

import numpy as np

from .errors import NotNormalized, ZeroColumn

__all__ = [
    "ENSEMBLES",
    "SensingMatrix",
    "trial_stream",
    "gen_sensing",
    "normalize_columns",
    "coherence",
    "coherence_bruteforce",
]

ENSEMBLES = ("gaussian", "bernoulli")


def trial_stream(seed, *keys):
    """Independent generator for the sub-stream ``(seed, *keys)``.

    Keys are non-negative integers (e.g. the sweep point ``M`` and the trial
    index); the same key tuple always reproduces the same stream.
    """
    entropy = [int(seed)] + [int(k) for k in keys]
    if any(e < 0 for e in entropy):
        raise ValueError("seed and stream keys must be non-negative")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


@dataclass(frozen=True)
class SensingMatrix:
    matrix: np.ndarray
    ensemble: str
    normalized: bool = False
    seed: int | None = None

    @property
    def shape(self):
        return self.matrix.shape

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)


def gen_sensing(M, N, ensemble="gaussian", seed=0):
    """Draw an ``M x N`` matrix with i.i.d. N(0, 1) or +-1 entries.

    ``seed`` may be an integer or an existing ``numpy.random.Generator``
    (used for per-trial streams). The result is not normalized.
    """
    if M < 1 or N < 1:
        raise ValueError(f"matrix dimensions must be positive, got {M}x{N}")
    ensemble = ensemble.lower()
    if ensemble not in ENSEMBLES:
        raise ValueError(f"unknown ensemble {ensemble!r}; expected one of {ENSEMBLES}")
    if isinstance(seed, np.random.Generator):
        rng, seed_val = seed, None
    else:
        rng, seed_val = trial_stream(seed), int(seed)
    if ensemble == "gaussian":
        X = rng.standard_normal((M, N))
    else:
        X = 2.0 * rng.integers(0, 2, size=(M, N)) - 1.0
    return SensingMatrix(X, ensemble, False, seed_val)


def normalize_columns(A):
    """Scale every column to unit l2 norm."""
    X = np.asarray(A.matrix if isinstance(A, SensingMatrix) else A, dtype=float)
    norms = np.linalg.norm(X, axis=0)
    if np.any(norms == 0):
        raise ZeroColumn(f"column {int(np.argmin(norms))} is identically zero")
    Xn = X / norms
    if isinstance(A, SensingMatrix):
        return replace(A, matrix=Xn, normalized=True)
    return SensingMatrix(Xn, "custom", True, None)


def _matrix_normalized(A):
    if isinstance(A, SensingMatrix):
        if not A.normalized:
            raise NotNormalized("call normalize_columns first")
        return A.matrix
    X = np.asarray(A, dtype=float)
    if not np.allclose(np.linalg.norm(X, axis=0), 1.0, rtol=0, atol=1e-12):
        raise NotNormalized("columns must have unit norm")
    return X


def coherence(A):
    """Largest ``|<A_i, A_j>|`` over distinct normalized columns."""
    X = _matrix_normalized(A)
    if X.shape[1] < 2:
        return 0.0
    G = np.abs(X.T @ X)
    np.fill_diagonal(G, 0.0)
    # re-evaluate near-maximal pairs with per-pair dot products so the value
    # matches the brute-force scan bit for bit, not just to rounding error
    ii, jj = np.nonzero(np.triu(G >= G.max() - 1e-12, k=1))
    best = max(abs(float(np.dot(X[:, i], X[:, j]))) for i, j in zip(ii, jj))
    return min(best, 1.0)


def coherence_bruteforce(A):
    """O(N^2) reference scan used to check :func:`coherence`."""
    X = _matrix_normalized(A)
    best = 0.0
    N = X.shape[1]
    for i in range(N):
        for j in range(i + 1, N):
            best = max(best, abs(float(np.dot(X[:, i], X[:, j]))))
    return min(best, 1.0)
