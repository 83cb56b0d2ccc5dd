"""
Running a multi-seed experiment
===============================

The same pipeline as ``padgan run``: several variants, several seeds, one
directory of CSV, JSON and SVG outputs plus an aggregate table.
"""

from pathlib import Path

from padgan.evaluation import read_table
from padgan.experiment import load_config, run_experiment

out = Path(__file__).parent / "results_demo"

# a small config; the INI file in this directory has the same content
config = load_config(Path(__file__).parent / "quick.ini", out=str(out))
status = run_experiment(config)
print("exit status:", status)

for model, row in read_table(out / "table1.csv").items():
    cells = "  ".join("N/A" if c is None else f"{c[0]:.3f}" for c in row.values())
    print(f"{model:7s} {cells}")

print(sorted(p.name for p in out.iterdir()))
