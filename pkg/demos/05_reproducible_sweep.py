"""A seeded sweep written to JSON and CSV.

The same config and seed give byte-identical reports whatever the thread
count, because every trial draws from its own seed stream.
"""
import tempfile
from pathlib import Path

from krylovgap.harness import ExperimentConfig, run_sweep

out = Path(tempfile.mkdtemp())
cfg = ExperimentConfig(spectrum="3,2*3,1", m=20, n=16, h=2, q_grid=[0, 1, 2, 4],
                       t_grid=[0, 1, 2], trials=5, seed=7,
                       json_path=str(out / "sweep.json"), csv_path=str(out / "sweep.csv"))
report = run_sweep(cfg, threads=2)
print("summary:", report["summary"])
print("files:", cfg.json_path, cfg.csv_path)
print("first CSV rows:")
print("\n".join((out / "sweep.csv").read_text().splitlines()[:4]))

again = run_sweep(cfg, threads=1)
print("serial rerun identical:", again["_json"] == report["_json"] and again["_csv"] == report["_csv"])
