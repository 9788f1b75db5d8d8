"""Seeded Monte-Carlo sweeps and the synthetic B-scan demo.

Configuration files are flat ``key = value`` lines plus repeated
``algorithm { ... }`` blocks::

    kind = exact-recovery-sweep
    N = 400
    K = 50
    M = 100, 150, 200
    trials = 100
    seed = 1
    signal = monocycle
    signal_start = 175
    signal_length = 50

    algorithm {
      name = omp
    }
    algorithm {
      name = lamp
      epsilon = 0.02
    }

``#`` starts a comment. Trial ``t`` at sweep point ``M`` draws everything
(matrix, delay, noise) from the sub-stream ``(seed, M, t)``.
"""
import csv
import io
import math
import os
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigInvalid, EmptyTrueSupport, FormatError
from .formats import write_dmat
from .metrics import (DEFAULT_RR_LEVELS, SET_EQUAL, SUPERSET, TrialRecord,
                      exact_recovery, mse, recovery_diagram, relative_recovery)
from .recovery import (LampConfig, bandlimit_filter, bomp, bomp_mmv,
                       energy_band, lamp_mmv, lamp_smv, merge_supports, ols,
                       omp, omp_mmv, reconstruct_coeffs)
from .sensing import ENSEMBLES, gen_sensing, normalize_columns, trial_stream
from .signals import (PULSE_KINDS, apply_delay, gaussian_monocycle,
                      gaussian_pulse, pulse_shape, synth_bscan)

__all__ = [
    "KINDS", "SMV_ALGORITHMS", "MMV_ALGORITHMS", "SEED_ENV",
    "AlgorithmSpec", "ExperimentConfig", "parse_config", "load_config",
    "make_trial", "run_algorithm", "run_trials", "run_experiment",
    "run_bscan_demo", "bscan_scene", "bscan_pipeline", "write_trials_csv", "read_trials_csv",
    "write_diagram_csv", "summarize",
]

KINDS = ("exact-recovery-sweep", "rr-vs-bomp", "mse-sweep", "bscan-demo", "diagram")
SMV_ALGORITHMS = ("omp", "ols", "bomp", "lamp")
MMV_ALGORITHMS = ("omp_mmv", "bomp_mmv", "lamp_mmv")
SEED_ENV = "LAMP_CS_SEED"
TRIALS_HEADER = ("M", "trial", "algorithm", "rr", "exact", "mse",
                 "seed_searches", "runtime_us")

_LAMP_KEYS = ("epsilon_mode", "epsilon", "epsilon_prime", "max_groups",
              "merge_gap", "residue_stop", "delta", "K")
_ALGO_KEYS = {
    "omp": ("K", "residue_stop"),
    "ols": ("K", "residue_stop"),
    "bomp": ("d", "stop_blocks", "K", "norm", "residue_stop"),
    "lamp": _LAMP_KEYS,
    "omp_mmv": ("K", "residue_stop"),
    "bomp_mmv": ("d", "stop_blocks", "K", "norm", "residue_stop"),
    "lamp_mmv": _LAMP_KEYS,
}
_INT_PARAMS = {"K", "d", "stop_blocks", "max_groups", "merge_gap"}
_FLOAT_PARAMS = {"epsilon", "epsilon_prime", "residue_stop", "delta"}


@dataclass
class AlgorithmSpec:
    name: str
    label: str
    params: dict = field(default_factory=dict)

    @property
    def exact_mode(self):
        """SetEqual for OMP/OLS, Superset for the group methods."""
        return SET_EQUAL if self.name in ("omp", "ols", "omp_mmv") else SUPERSET


@dataclass
class ExperimentConfig:
    kind: str
    N: int
    M_list: list
    K: int | None = None
    P: int = 1
    trials: int = 1
    algorithms: list = field(default_factory=list)
    seed: int = 0
    ensemble: str = "gaussian"
    signal: str = "monocycle"
    signal_start: int = 0
    signal_length: int | None = None
    amplitude: float = 1.0
    delay: str = "none"
    noise: float | None = None
    rr_levels: tuple = DEFAULT_RR_LEVELS
    diagram_algorithm: str | None = None
    targets: object = "default"
    output: str = "results"

    def validate(self):
        if self.kind not in KINDS:
            raise ConfigInvalid(f"unknown kind {self.kind!r}; expected one of {KINDS}")
        if self.N < 1 or not self.M_list:
            raise ConfigInvalid("N and at least one M are required")
        if any(M < 1 or M > self.N for M in self.M_list):
            raise ConfigInvalid(f"every M must lie in [1, N={self.N}]")
        if self.trials < 1:
            raise ConfigInvalid("trials must be >= 1")
        if self.P < 1:
            raise ConfigInvalid("P must be >= 1")
        if self.ensemble not in ENSEMBLES:
            raise ConfigInvalid(f"unknown ensemble {self.ensemble!r}")
        if self.noise is not None and self.noise < 0:
            raise ConfigInvalid("noise must be >= 0")
        if self.kind == "bscan-demo":
            return
        if self.signal not in PULSE_KINDS:
            raise ConfigInvalid(f"unknown signal {self.signal!r}; expected one of {PULSE_KINDS}")
        if self.delay not in ("none", "uniform"):
            raise ConfigInvalid("delay must be 'none' or 'uniform'")
        if self.signal_length is None:
            self.signal_length = self.K
        if self.signal_length is None or self.signal_length < 2:
            raise ConfigInvalid("signal_length (or K) must be >= 2")
        if self.signal_start < 0 or self.signal_start + self.signal_length > self.N:
            raise ConfigInvalid("signal window does not fit in N")
        if self.K is None:
            self.K = self.signal_length
        if not self.algorithms:
            raise ConfigInvalid("no algorithm blocks given")
        for spec in self.algorithms:
            if spec.name not in SMV_ALGORITHMS:
                raise ConfigInvalid(f"algorithm {spec.name!r} is not a single-vector method")
        labels = [a.label for a in self.algorithms]
        if len(set(labels)) != len(labels):
            raise ConfigInvalid(f"algorithm labels must be unique, got {labels}")
        if self.diagram_algorithm is not None and self.diagram_algorithm not in labels:
            raise ConfigInvalid(f"diagram_algorithm {self.diagram_algorithm!r} is not configured")
        if not self.rr_levels:
            raise ConfigInvalid("rr_levels must not be empty")


def _split_list(v):
    return [s for s in (p.strip() for p in v.split(",")) if s]


def _convert(key, value, cast):
    try:
        return cast(value)
    except ValueError:
        raise ConfigInvalid(f"bad value for {key}: {value!r}") from None


def _algorithm(items, lineno):
    name = items.pop("name", None)
    if name is None:
        raise ConfigInvalid(f"algorithm block ending at line {lineno} has no name")
    if name not in _ALGO_KEYS:
        raise ConfigInvalid(f"unknown algorithm {name!r}")
    label = items.pop("label", None)
    params = {}
    for key, value in items.items():
        if key not in _ALGO_KEYS[name]:
            raise ConfigInvalid(f"parameter {key!r} does not apply to {name}")
        if value.lower() in ("inf", "+inf"):
            params[key] = math.inf
        elif key in _INT_PARAMS:
            params[key] = _convert(key, value, int)
        elif key in _FLOAT_PARAMS:
            params[key] = _convert(key, value, float)
        else:
            params[key] = value
    if name in ("bomp", "bomp_mmv") and "d" not in params:
        raise ConfigInvalid(f"{name} needs a block size d")
    if label is None:
        label = f"{name}_d{params['d']}" if "d" in params else name
    return AlgorithmSpec(name, label, params)


_TOP_INT = {"N", "K", "P", "trials", "seed", "signal_start", "signal_length"}
_TOP_FLOAT = {"amplitude", "noise"}
_TOP_STR = {"kind", "ensemble", "signal", "delay", "diagram_algorithm", "output"}


def parse_config(text, seed_override=None):
    """Build an :class:`ExperimentConfig` from config text.

    ``seed_override`` replaces the ``seed`` key (used for ``LAMP_CS_SEED``).
    """
    top, algos, block, targets = {}, [], None, []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("algorithm") and line.endswith("{"):
            if block is not None:
                raise ConfigInvalid(f"line {lineno}: nested algorithm block")
            block = {}
            continue
        if line == "}":
            if block is None:
                raise ConfigInvalid(f"line {lineno}: unmatched '}}'")
            algos.append(_algorithm(block, lineno))
            block = None
            continue
        if "=" not in line:
            raise ConfigInvalid(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if block is not None:
            block[key] = value
        elif key == "target":
            targets.append(value)
        else:
            if key in top:
                raise ConfigInvalid(f"line {lineno}: duplicate key {key!r}")
            top[key] = value
    if block is not None:
        raise ConfigInvalid("unterminated algorithm block")

    kw = {"algorithms": algos}
    for key, value in top.items():
        if key in _TOP_INT:
            kw[key] = _convert(key, value, int)
        elif key in _TOP_FLOAT:
            kw[key] = _convert(key, value, float)
        elif key in _TOP_STR:
            kw[key] = value
        elif key == "M":
            kw["M_list"] = [_convert(key, v, int) for v in _split_list(value)]
        elif key == "rr_levels":
            kw["rr_levels"] = tuple(_convert(key, v, float) for v in _split_list(value))
        elif key == "targets":
            if value not in ("default", "none"):
                raise ConfigInvalid("targets must be 'default' or 'none'")
            kw["targets"] = value
        else:
            raise ConfigInvalid(f"unknown key {key!r}")
    if targets:
        kw["targets"] = [_parse_target(t) for t in targets]
    if seed_override is not None:
        kw["seed"] = int(seed_override)
    for req in ("kind", "N"):
        if req not in kw:
            raise ConfigInvalid(f"missing required key {req!r}")
    if "M_list" not in kw:
        raise ConfigInvalid("missing required key 'M'")
    cfg = ExperimentConfig(**kw)
    cfg.validate()
    return cfg


def _parse_target(value):
    parts = _split_list(value)
    if len(parts) != 6:
        raise ConfigInvalid("target = apex_row, apex_col, spread, length, amplitude, kind")
    row, col, spread, length, amp, kind = parts
    if kind not in PULSE_KINDS:
        raise ConfigInvalid(f"unknown pulse kind {kind!r}")
    return (_convert("target", row, int), _convert("target", col, int),
            _convert("target", spread, float), _convert("target", length, int),
            _convert("target", amp, float), kind)


def load_config(path, env=None):
    """Read a config file; ``LAMP_CS_SEED`` in ``env`` overrides the seed."""
    env = os.environ if env is None else env
    override = env.get(SEED_ENV)
    if override is not None:
        override = _convert(SEED_ENV, override, int)
    return parse_config(Path(path).read_text(), seed_override=override)


# ---------------------------------------------------------------- trials

def make_trial(cfg, M, t):
    """``(A, signal, y)`` for trial ``t`` at sweep point ``M``."""
    rng = trial_stream(cfg.seed, M, t)
    A = normalize_columns(gen_sensing(M, cfg.N, cfg.ensemble, rng))
    make = gaussian_monocycle if cfg.signal == "monocycle" else gaussian_pulse
    s = make(cfg.N, cfg.signal_start, cfg.signal_length, cfg.amplitude)
    if cfg.delay == "uniform":
        s = apply_delay(s, rng=rng)
    y = A.matrix @ s.values
    if cfg.noise:
        y = y + cfg.noise * rng.standard_normal(M)
    return A, s, y


def _lamp_config(params, K):
    p = dict(params)
    p.setdefault("K", K)
    if p["K"] is not None and math.isinf(p["K"]):
        p["K"] = None
    return LampConfig(**p)


def run_algorithm(spec, A, y, K, x_true=None):
    """Run one configured algorithm; returns ``(result, support, estimate)``.

    For LAMP with ``merge_gap > 0`` the groups are merged and the estimate is
    refit by least squares on the merged support.
    """
    p = dict(spec.params)
    name = spec.name
    if name in ("omp", "ols", "omp_mmv"):
        fn = {"omp": omp, "ols": ols, "omp_mmv": omp_mmv}[name]
        res = fn(A, y, p.get("K", K), residue_stop=p.get("residue_stop"))
    elif name in ("bomp", "bomp_mmv"):
        fn = bomp if name == "bomp" else bomp_mmv
        res = fn(A, y, p["d"], stop_blocks=p.get("stop_blocks"), K=p.get("K", K),
                 norm=p.get("norm", "l1"), residue_stop=p.get("residue_stop"))
    else:
        cfg = _lamp_config(p, K)
        fn = lamp_smv if name == "lamp" else lamp_mmv
        res = fn(A, y, cfg, x_true)
        if cfg.merge_gap > 0:
            M = np.asarray(A).shape[0]
            merged = merge_supports(res.groups, cfg.merge_gap, res.support, limit=M)
            return res, merged, reconstruct_coeffs(A, merged, y)
    return res, res.support, res.estimate()


def run_trials(cfg):
    """All :class:`TrialRecord` rows of a sweep, in canonical order."""
    records = []
    for M in cfg.M_list:
        for t in range(cfg.trials):
            A, s, y = make_trial(cfg, M, t)
            for spec in cfg.algorithms:
                t0 = time.perf_counter_ns()
                res, support, x_hat = run_algorithm(spec, A, y, cfg.K, s.values)
                runtime = (time.perf_counter_ns() - t0) // 1000
                records.append(TrialRecord(
                    M=M, trial=t, algorithm=spec.label,
                    rr=relative_recovery(s.true_support, support),
                    exact=exact_recovery(s.true_support, support, spec.exact_mode),
                    mse=mse(s.values, x_hat),
                    seed_searches=res.seed_searches, runtime_us=int(runtime),
                    exact_set_equal=exact_recovery(s.true_support, support, SET_EQUAL),
                    exact_superset=exact_recovery(s.true_support, support, SUPERSET)))
    records.sort(key=lambda r: (r.M, r.trial, r.algorithm))
    return records


# ---------------------------------------------------------------- output

def write_trials_csv(path, records):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRIALS_HEADER)
        for r in records:
            w.writerow([r.M, r.trial, r.algorithm, repr(float(r.rr)), int(r.exact),
                        repr(float(r.mse)), r.seed_searches, r.runtime_us])


def read_trials_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if rows and tuple(rows[0].keys()) != TRIALS_HEADER:
        raise FormatError(f"unexpected trials.csv header {tuple(rows[0].keys())}")
    return [TrialRecord(M=int(r["M"]), trial=int(r["trial"]), algorithm=r["algorithm"],
                        rr=float(r["rr"]), exact=r["exact"] == "1", mse=float(r["mse"]),
                        seed_searches=int(r["seed_searches"]),
                        runtime_us=int(r["runtime_us"])) for r in rows]


def write_diagram_csv(path, grid, floor=0.0):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("M", "S", "level_percent"))
        for M, F in sorted(grid.items()):
            for S, f in enumerate(F, 1):
                w.writerow([M, S, "%g" % (100.0 * f)])


def summarize(records, kind=None):
    """Plain-text table of per-(algorithm, M) averages."""
    groups = {}
    for r in records:
        groups.setdefault((r.algorithm, r.M), []).append(r)
    out = io.StringIO()
    if kind:
        out.write(f"kind {kind}\n")
    out.write("algorithm M trials exact_fraction set_equal superset "
              "mean_rr mean_mse mean_seed_searches\n")

    def frac(rs, attr):
        vals = [getattr(r, attr) for r in rs]
        return "-" if None in vals else "%.4f" % np.mean(vals)

    for (algo, M), rs in sorted(groups.items()):
        out.write("%s %d %d %s %s %s %.4f %.6g %.2f\n" % (
            algo, M, len(rs), frac(rs, "exact"), frac(rs, "exact_set_equal"),
            frac(rs, "exact_superset"), np.mean([r.rr for r in rs]),
            np.mean([r.mse for r in rs]), np.mean([r.seed_searches for r in rs])))
    return out.getvalue()


def _diagram_label(cfg):
    if cfg.diagram_algorithm is not None:
        return cfg.diagram_algorithm
    lamps = [a.label for a in cfg.algorithms if a.name == "lamp"]
    return (lamps or [cfg.algorithms[0].label])[0]


def run_experiment(cfg, out_dir=None):
    """Run a sweep (or the B-scan demo) and write its artifacts.

    Writes ``trials.csv``, ``diagram.csv`` (for one algorithm, LAMP by
    default) and ``summary.txt`` into ``out_dir``; returns that path.
    """
    if cfg.kind == "bscan-demo":
        return run_bscan_demo(cfg, out_dir)
    out = Path(out_dir or cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    records = run_trials(cfg)
    write_trials_csv(out / "trials.csv", records)
    label = _diagram_label(cfg)
    grid = recovery_diagram([r for r in records if r.algorithm == label], cfg.rr_levels)
    write_diagram_csv(out / "diagram.csv", grid)
    text = summarize(records, cfg.kind) + f"diagram_algorithm {label}\n"
    (out / "summary.txt").write_text(text)
    return out


# ---------------------------------------------------------------- B-scan

# measurement noise of the demo when the config sets none; without noise the
# refit is exact and filtering can only add bias
BSCAN_NOISE = 0.01
# parameters of the LAMP-MMV run in the demo
BSCAN_LAMP = dict(residue_stop=1e-3, epsilon=0.02, epsilon_prime=0.3)
BSCAN_MERGE_GAP = 2


def bscan_scene(N, P, rng, targets="default", length=6, spread=0.04):
    """Synthetic two-target scene; ``targets`` may also be ``"none"`` or a list.

    The default draws one shallow target (apex row in [20, 60), amplitude 1)
    and one deep target (apex row in [100, 140), amplitude 0.8), apex
    columns in [3, 15).
    """
    if targets == "none":
        return synth_bscan(N, P, [])
    if targets == "default":
        r1, r2 = int(rng.integers(20, 60)), int(rng.integers(100, 140))
        c1, c2 = int(rng.integers(3, 15)), int(rng.integers(3, 15))
        targets = [(r1, c1, spread, length, 1.0, "monocycle"),
                   (r2, c2, spread, length, 0.8, "monocycle")]
    return synth_bscan(N, P, targets)


def bscan_pipeline(A, Y, scene, lamp=None, gap=BSCAN_MERGE_GAP):
    """LAMP-MMV, merging, refit and band-limit filtering of one scene.

    Returns a dict with the three estimates, the supports and per-stage
    metrics; RR is None when the scene has no target.
    """
    A = np.asarray(A)
    M, N = A.shape
    res = lamp_mmv(A, Y, LampConfig(**(lamp or BSCAN_LAMP)))
    pre = res.estimate()
    merged = merge_supports(res.groups, gap, res.support, limit=M)
    post = reconstruct_coeffs(A, merged, Y)
    if scene.targets:
        _, _, _, length, _, kind = scene.targets[0]
        band = energy_band(pulse_shape(length, kind), N=N)
        filt = bandlimit_filter(post, band)
    else:
        band, filt = None, post.copy()
    X = scene.X
    out = {"result": res, "merged": merged, "band": band,
           "pre_merge": pre, "post_merge": post, "post_filter": filt}
    for stage, supp, est in (("pre_merge", res.support, pre),
                             ("post_merge", merged, post),
                             ("post_filter", merged, filt)):
        try:
            rr = relative_recovery(scene.true_support_2d, supp)
        except EmptyTrueSupport:
            rr = None
        out[stage + "_rr"] = rr
        out[stage + "_mse"] = mse(X, est)
    return out


def run_bscan_demo(cfg, out_dir=None):
    """Reconstruct one synthetic B-scan and write the five DMAT artifacts.

    Uses ``cfg.N`` rows, ``cfg.P`` antenna positions and the first entry of
    ``cfg.M_list`` measurements; the scene and matrix come from the
    sub-stream ``(seed, M, 0)``.
    """
    out = Path(out_dir or cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    N, P, M = cfg.N, cfg.P, cfg.M_list[0]
    rng = trial_stream(cfg.seed, M, 0)
    A = normalize_columns(gen_sensing(M, N, cfg.ensemble, rng)).matrix
    scene = bscan_scene(N, P, rng, cfg.targets)
    Y = A @ scene.X
    noise = BSCAN_NOISE if cfg.noise is None else cfg.noise
    if noise > 0:
        Y = Y + noise * rng.standard_normal(Y.shape)
    r = bscan_pipeline(A, Y, scene)
    write_dmat(out / "X.dmat", scene.X)
    write_dmat(out / "Y.dmat", Y)
    write_dmat(out / "xhat_pre_merge.dmat", r["pre_merge"])
    write_dmat(out / "xhat_post_merge.dmat", r["post_merge"])
    write_dmat(out / "xhat_post_filter.dmat", r["post_filter"])
    lines = ["kind bscan-demo", f"shape {N} {P}", f"M {M}",
             f"targets {len(scene.targets)}", f"noise {noise:g}",
             f"true_support {len(scene.true_support_2d)}",
             f"seed_searches {r['result'].seed_searches}",
             "band " + ("none" if r["band"] is None else "%d %d" % r["band"])]
    for stage in ("pre_merge", "post_merge", "post_filter"):
        rr = r[stage + "_rr"]
        lines.append("%s rr %s mse %.6g" % (
            stage, "undefined" if rr is None else "%.4f" % rr, r[stage + "_mse"]))
    (out / "metrics.txt").write_text("\n".join(lines) + "\n")
    return out
