"""Result and configuration records shared by the recovery algorithms."""
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ..errors import ConfigInvalid, FormatError
from ..formats import format_support, parse_support

__all__ = ["StopReason", "EpsilonMode", "LampConfig", "GroupRecord",
           "RecoveryResult", "format_result", "parse_result"]

# ||r|| <= RESIDUE_FLOOR * ||y|| counts as an exactly explained measurement
RESIDUE_FLOOR = 1e-10


class StopReason(str, Enum):
    SPARSITY_REACHED = "SparsityReached"
    RESIDUE_SMALL = "ResidueSmall"
    MAX_GROUPS = "MaxGroups"
    SUPPORT_SATURATED = "SupportSaturated"

    def __str__(self):
        return self.value


class EpsilonMode(str, Enum):
    ABSOLUTE = "absolute"
    RELATIVE = "relative"
    ORACLE = "oracle"

    def __str__(self):
        return self.value


@dataclass
class LampConfig:
    """Stopping rules and neighbor-guard thresholds for LAMP.

    ``epsilon`` means, per ``epsilon_mode``:

    * ``absolute``: the guard admits a neighbor when its residue drop exceeds
      ``epsilon`` (same units as ``||y||^2``).
    * ``relative``: admit when the drop exceeds ``epsilon * ||r||^2`` of the
      current residue (of the affected column, for MMV).
    * ``oracle``: ignore ``epsilon``; admit when the drop exceeds
      ``(delta / (1 - delta))^2 * ||x|_{T^c}||^2`` using the true signal.
      ``delta`` defaults to the coherence of ``A``.

    ``epsilon_prime`` is the horizontal (block) threshold for MMV, in the
    same mode; it defaults to ``epsilon``.
    """
    K: int | None = None
    epsilon_mode: EpsilonMode = EpsilonMode.RELATIVE
    epsilon: float = 0.01
    epsilon_prime: float | None = None
    max_groups: int | None = None
    merge_gap: int = 0
    residue_stop: float | None = None
    delta: float | None = None

    def __post_init__(self):
        self.epsilon_mode = EpsilonMode(self.epsilon_mode)
        if self.K is None and self.max_groups is None and self.residue_stop is None:
            raise ConfigInvalid("LampConfig needs K, max_groups or residue_stop")
        if self.K is not None and self.K < 0:
            raise ConfigInvalid("K must be non-negative")
        if self.max_groups is not None and self.max_groups < 0:
            raise ConfigInvalid("max_groups must be non-negative")
        if not self.epsilon >= 0:
            raise ConfigInvalid("epsilon must be >= 0")
        if self.epsilon_prime is not None and not self.epsilon_prime >= 0:
            raise ConfigInvalid("epsilon_prime must be >= 0")
        if self.merge_gap < 0:
            raise ConfigInvalid("merge_gap must be >= 0")
        if self.residue_stop is not None and self.residue_stop < 0:
            raise ConfigInvalid("residue_stop must be >= 0")
        if self.delta is not None and not 0 <= self.delta:
            raise ConfigInvalid("delta must be >= 0")

    @property
    def eps_prime(self):
        return self.epsilon if self.epsilon_prime is None else self.epsilon_prime


@dataclass
class GroupRecord:
    """One cluster found by LAMP from a single greedy seed."""
    seed: object
    k_up: int = 1
    k_down: int = 1
    k_left: int = 1
    k_right: int = 1
    members: list = field(default_factory=list)

    @property
    def height(self):
        return self.k_up + self.k_down - 1

    @property
    def width(self):
        return self.k_left + self.k_right - 1


@dataclass
class RecoveryResult:
    """Support, least-squares coefficients and bookkeeping of one run.

    ``support`` is sorted; ``coefficients`` is aligned with it. ``order`` keeps
    the indices (or ``(row, col)`` pairs) in the order they entered.
    """
    algorithm: str
    shape: tuple
    support: list
    coefficients: np.ndarray
    order: list
    groups: list
    iterations: int
    seed_searches: int
    stop_reason: StopReason
    residue_norms: list = field(default_factory=list)

    @property
    def is_mmv(self):
        return len(self.shape) == 2

    @property
    def admitted(self):
        """Support elements that entered through a neighbor scan, not a seed."""
        seeds = {g.seed for g in self.groups}
        return [i for i in self.order if i not in seeds] if self.groups else []

    def estimate(self):
        """Dense reconstruction (zeros off the support)."""
        x = np.zeros(self.shape)
        for idx, c in zip(self.support, self.coefficients):
            x[idx] = c
        return x


def format_result(res):
    """Text report: header counters, SUPP/SUPP2D block, coefficient list."""
    lines = [
        f"RESULT {res.algorithm}",
        "shape " + " ".join(str(s) for s in res.shape),
        f"stop_reason {res.stop_reason}",
        f"iterations {res.iterations}",
        f"seed_searches {res.seed_searches}",
        f"groups {len(res.groups)}",
    ]
    text = "\n".join(lines) + "\n" + format_support(res.support)
    coef = [f"COEF {len(res.coefficients)}"] + ["%.17g" % c for c in res.coefficients]
    return text + "\n".join(coef) + "\n"


def parse_result(text):
    """Inverse of :func:`format_result` (groups and order are not restored)."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    try:
        head = dict(ln.split(" ", 1) for ln in lines[:6])
        supp_at = next(i for i, ln in enumerate(lines) if ln.startswith("SUPP"))
        n_supp = int(lines[supp_at].split()[1])
        support = parse_support("\n".join(lines[supp_at:supp_at + 1 + n_supp]))
        coef_at = supp_at + 1 + n_supp
        n_coef = int(lines[coef_at].split()[1])
        coef = np.array([float(v) for v in lines[coef_at + 1:coef_at + 1 + n_coef]])
        return RecoveryResult(
            algorithm=head["RESULT"],
            shape=tuple(int(s) for s in head["shape"].split()),
            support=support, coefficients=coef, order=list(support), groups=[],
            iterations=int(head["iterations"]),
            seed_searches=int(head["seed_searches"]),
            stop_reason=StopReason(head["stop_reason"]),
        )
    except (KeyError, ValueError, IndexError, StopIteration) as exc:
        raise FormatError(f"malformed result report: {exc}") from None

