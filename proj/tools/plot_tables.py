#!/usr/bin/env python3
"""Render the long-format CSV tables emitted by the specfic CLI.

Usage:
    plot_tables.py TABLE.csv [--metric rmse] [--out plot.png]

Expects the fixed headers (focus, candidate, metric, value) and draws one
line per candidate across the foci for the chosen metric.
"""

import argparse
import csv
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("table")
    parser.add_argument("--metric", default="rmse")
    parser.add_argument("--out", default="plot.png")
    args = parser.parse_args()

    foci: list[str] = []
    series: dict[str, dict[str, float]] = defaultdict(dict)
    with open(args.table, newline="") as handle:
        for row in csv.DictReader(handle):
            if row["metric"] != args.metric or not row["value"]:
                continue
            focus = row["focus"]
            if focus not in foci:
                foci.append(focus)
            series[row["candidate"] or args.metric][focus] = float(row["value"])

    if not series:
        raise SystemExit(f"no rows with metric '{args.metric}' in {args.table}")

    fig, ax = plt.subplots(figsize=(8, 4.5))
    xs = range(len(foci))
    for label, values in sorted(series.items()):
        ax.plot(xs, [values.get(f) for f in foci], marker="o", label=label)
    ax.set_xticks(list(xs))
    ax.set_xticklabels(foci, rotation=30, ha="right")
    ax.set_ylabel(args.metric)
    ax.legend()
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
