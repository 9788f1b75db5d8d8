"""Command-line front end (``lampcs <command> ...``).

Exit codes: 0 success, 2 configuration or usage error, 3 numerical failure
(rank deficiency), 4 I/O or file-format error.
"""
import argparse
import os
import sys
from pathlib import Path

from . import experiments as ex
from .errors import FormatError, LampError, RankDeficient
from .formats import format_dmat, read_dmat, write_support
from .metrics import recovery_diagram
from .recovery import format_result
from .sensing import ENSEMBLES, gen_sensing, normalize_columns, trial_stream
from .signals import PULSE_KINDS, apply_delay, gaussian_monocycle, gaussian_pulse

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4


def _seed(args):
    """Explicit ``--seed`` first, then ``LAMP_CS_SEED``, then 0."""
    if args.seed is not None:
        return args.seed
    env = os.environ.get(ex.SEED_ENV)
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise ex.ConfigInvalid(f"{ex.SEED_ENV} must be an integer, got {env!r}") from None


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def cmd_gen_matrix(args):
    A = gen_sensing(args.rows, args.cols, args.ensemble, _seed(args))
    if args.normalize:
        A = normalize_columns(A)
    _emit(format_dmat(A.matrix), args.out)


def cmd_gen_signal(args):
    make = gaussian_monocycle if args.kind == "monocycle" else gaussian_pulse
    s = make(args.length, args.start, args.width, args.amplitude)
    if args.delay == "uniform":
        s = apply_delay(s, rng=trial_stream(_seed(args)))
    elif args.delay is not None:
        s = apply_delay(s, int(args.delay))
    _emit(format_dmat(s.values), args.out)
    if args.support:
        write_support(args.support, s.true_support.tolist())


def cmd_sense(args):
    A, X = read_dmat(args.matrix), read_dmat(args.signal)
    if A.shape[1] != X.shape[0]:
        raise ex.ConfigInvalid(f"A is {A.shape[0]}x{A.shape[1]} but X has {X.shape[0]} rows")
    _emit(format_dmat(A @ X), args.out)


def cmd_recover(args):
    A, Y = read_dmat(args.matrix), read_dmat(args.measurements)
    if args.normalize:
        A = normalize_columns(A).matrix
    mmv = args.algorithm.endswith("_mmv")
    if not mmv and Y.shape[1] != 1:
        raise ex.ConfigInvalid(f"{args.algorithm} takes one measurement column, got {Y.shape[1]}")
    y = Y if mmv else Y[:, 0]
    truth = None
    if args.truth:
        truth = read_dmat(args.truth)
        truth = truth if mmv else truth[:, 0]
    params = {k: v for k, v in {
        "K": args.K, "d": args.d, "stop_blocks": args.stop_blocks, "norm": args.norm,
        "residue_stop": args.residue_stop, "epsilon_mode": args.epsilon_mode,
        "epsilon": args.epsilon, "epsilon_prime": args.epsilon_prime,
        "max_groups": args.max_groups, "merge_gap": args.merge_gap, "delta": args.delta,
    }.items() if v is not None and k in ex._ALGO_KEYS[args.algorithm]}
    if args.algorithm.startswith("bomp") and "d" not in params:
        raise ex.ConfigInvalid("bomp needs --d")
    if not args.algorithm.startswith("lamp") and args.K is None and "stop_blocks" not in params:
        raise ex.ConfigInvalid(f"{args.algorithm} needs --K")
    spec = ex.AlgorithmSpec(args.algorithm, args.algorithm, params)
    res, _, _ = ex.run_algorithm(spec, A, y, args.K, truth)
    _emit(format_result(res), args.out)


def cmd_experiment(args):
    cfg = ex.load_config(args.config)
    out = ex.run_experiment(cfg, args.out)
    print(f"wrote {out}")


def cmd_bscan(args):
    if args.config:
        cfg = ex.load_config(args.config)
        if cfg.kind != "bscan-demo":
            raise ex.ConfigInvalid("bscan needs a config with kind = bscan-demo")
    else:
        cfg = ex.ExperimentConfig(kind="bscan-demo", N=args.rows, P=args.positions,
                                  M_list=[args.measurements], seed=_seed(args),
                                  noise=args.noise)
        cfg.validate()
    out = ex.run_bscan_demo(cfg, args.out)
    sys.stdout.write((Path(out) / "metrics.txt").read_text())


def cmd_report(args):
    records = ex.read_trials_csv(args.trials)
    _emit(ex.summarize(records), args.out)
    if args.diagram:
        labels = sorted({r.algorithm for r in records})
        label = args.algorithm or (labels[0] if len(labels) == 1 else None)
        if label not in labels:
            raise ex.ConfigInvalid(f"choose --algorithm from {labels}")
        grid = recovery_diagram([r for r in records if r.algorithm == label])
        ex.write_diagram_csv(args.diagram, grid)


def build_parser():
    p = argparse.ArgumentParser(prog="lampcs", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-matrix", help="random sensing matrix as DMAT")
    g.add_argument("--rows", type=int, required=True)
    g.add_argument("--cols", type=int, required=True)
    g.add_argument("--ensemble", choices=ENSEMBLES, default="gaussian")
    g.add_argument("--seed", type=int)
    g.add_argument("--normalize", action="store_true", help="unit-norm columns")
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen_matrix)

    g = sub.add_parser("gen-signal", help="pulse signal as a one-column DMAT")
    g.add_argument("--length", type=int, required=True, help="signal length N")
    g.add_argument("--kind", choices=PULSE_KINDS, default="monocycle")
    g.add_argument("--start", type=int, default=0)
    g.add_argument("--width", type=int, default=50, help="pulse window length")
    g.add_argument("--amplitude", type=float, default=1.0)
    g.add_argument("--delay", help="integer shift or 'uniform'")
    g.add_argument("--seed", type=int)
    g.add_argument("--support", help="also write the SUPP file here")
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen_signal)

    g = sub.add_parser("sense", help="Y = A X")
    g.add_argument("--matrix", required=True)
    g.add_argument("--signal", required=True)
    g.add_argument("--out")
    g.set_defaults(func=cmd_sense)

    g = sub.add_parser("recover", help="one recovery, printed as a result report")
    g.add_argument("--matrix", required=True)
    g.add_argument("--measurements", required=True)
    g.add_argument("--algorithm", required=True, choices=sorted(ex._ALGO_KEYS))
    g.add_argument("--normalize", action="store_true",
                   help="normalize the matrix columns first")
    g.add_argument("--truth", help="true signal DMAT (oracle epsilon mode)")
    g.add_argument("--K", type=int)
    g.add_argument("--d", type=int)
    g.add_argument("--stop-blocks", type=int)
    g.add_argument("--norm", choices=("l1", "l2"))
    g.add_argument("--residue-stop", type=float)
    g.add_argument("--epsilon-mode", choices=("absolute", "relative", "oracle"))
    g.add_argument("--epsilon", type=float)
    g.add_argument("--epsilon-prime", type=float)
    g.add_argument("--max-groups", type=int)
    g.add_argument("--merge-gap", type=int)
    g.add_argument("--delta", type=float)
    g.add_argument("--out")
    g.set_defaults(func=cmd_recover)

    g = sub.add_parser("experiment", help="run a configured sweep")
    g.add_argument("config")
    g.add_argument("--out", help="output directory (overrides the config)")
    g.set_defaults(func=cmd_experiment)

    g = sub.add_parser("bscan", help="synthetic B-scan reconstruction demo")
    g.add_argument("--config")
    g.add_argument("--rows", type=int, default=200)
    g.add_argument("--positions", type=int, default=18)
    g.add_argument("--measurements", type=int, default=40)
    g.add_argument("--noise", type=float)
    g.add_argument("--seed", type=int)
    g.add_argument("--out", default="bscan_out")
    g.set_defaults(func=cmd_bscan)

    g = sub.add_parser("report", help="summaries recomputed from trials.csv")
    g.add_argument("trials")
    g.add_argument("--out")
    g.add_argument("--diagram", help="also write diagram.csv here")
    g.add_argument("--algorithm", help="algorithm label for the diagram")
    g.set_defaults(func=cmd_report)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except RankDeficient as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (OSError, FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (LampError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
