#!/usr/bin/env python3
"""Plot fitness-over-generations curves from one or more history.csv files.

Each trial becomes a panel with its best/mean curves and a horizontal
baseline line read from the experiment's summary.json (when present next to
the trial directories). Needs matplotlib (`pip install passevo[plot]`).
"""

import argparse
import csv
import json
import sys
from pathlib import Path


def load_history(path: Path):
    generations, best, mean = [], [], []
    with path.open() as fh:
        for row in csv.DictReader(fh):
            generations.append(int(row["generation"]))
            best.append(float(row["best_fitness"]))
            mean.append(float(row["mean_fitness"]))
    return generations, best, mean


def baseline_for(path: Path):
    summary = path.parent.parent / "summary.json"
    if not summary.is_file():
        return None
    doc = json.loads(summary.read_text())
    name = path.parent.name
    for trial in doc.get("trials", []):
        if f"trial_{trial.get('trial_index')}" == name and trial.get("status") == "ok":
            return trial.get("baseline_fitness")
    return None


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("histories", nargs="+", help="history.csv files to plot")
    parser.add_argument("--output", default="history.png")
    args = parser.parse_args()

    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib is required: pip install matplotlib", file=sys.stderr)
        return 1

    paths = [Path(p) for p in args.histories]
    fig, axes = plt.subplots(1, len(paths), figsize=(5 * len(paths), 4), squeeze=False)
    for ax, path in zip(axes[0], paths):
        generations, best, mean = load_history(path)
        ax.plot(generations, best, label="best fitness")
        ax.plot(generations, mean, label="mean fitness", alpha=0.6)
        baseline = baseline_for(path)
        if baseline is not None:
            ax.axhline(baseline, color="gray", linestyle="--", label="baseline")
        ax.set_xlabel("generation")
        ax.set_ylabel("fitness (s)")
        ax.set_title(path.parent.name)
        ax.legend()
    fig.tight_layout()
    fig.savefig(args.output, dpi=120)
    print(f"wrote {args.output}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
