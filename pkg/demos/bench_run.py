"""Run a small benchmark suite through the command line and summarise it.

Writes a config file, runs ``oknn bench`` twice, checks that the CSVs agree
once timing columns are masked, then prints mean nodes generated per
algorithm.  Finishes with the h_v versus h_f trend table.

    python3 demos/bench_run.py
"""

import csv
import io
import tempfile
from collections import defaultdict
from pathlib import Path

from oknn import cli
from oknn.bench import format_trend, mask_timing_columns, trend_report

with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    cfg = tmp / "suite.cfg"
    cfg.write_text("map = synthetic\nobstacles = 30\nk = 1\ndensity = 0.02\nquery_count = 25\nseed = 7\n")
    for name in ("a.csv", "b.csv"):
        cli.main(["bench", "--config", str(cfg), "-o", str(tmp / name)])
    a = (tmp / "a.csv").read_text()
    b = (tmp / "b.csv").read_text()

print("\nrepeat run identical (timing masked):", mask_timing_columns(a) == mask_timing_columns(b))

gen = defaultdict(list)
for row in csv.DictReader(io.StringIO(a)):
    if row["rank"] == "1":
        gen[row["algo"]].append(int(row["generated"]))
print("\nmean nodes generated per query:")
for algo, xs in gen.items():
    print(f"  {algo:<4} {sum(xs) / len(xs):8.1f}")

print()
print(format_trend(trend_report()))
