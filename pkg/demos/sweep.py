"""Small exact-recovery sweep written to a scratch directory.

Shows the experiment harness end to end: a config string, trials.csv,
diagram.csv and the text summary. The shipped configs under ``configs/``
run the full-size versions.
"""
import sys
import tempfile
from pathlib import Path

from lampcs.experiments import parse_config, run_experiment

CONFIG = """
kind = exact-recovery-sweep
N = 200
K = 20
M = 50, 70, 90
trials = 20
seed = 3
signal = monocycle
signal_start = 90
algorithm {
  name = omp
}
algorithm {
  name = lamp
  epsilon = 0.02
}
algorithm {
  name = bomp
  d = 10
}
"""

out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp())
out = run_experiment(parse_config(CONFIG), out_dir)
print(f"results in {out}\n")
print((out / "summary.txt").read_text())
