"""Plot coverage ratio per round from one or more report.csv files.

Needs matplotlib, which the package itself does not depend on.

    python3 plot_report.py results/hcontext/report.csv results/random/report.csv -o coverage.png
"""

import argparse
import csv

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("reports", nargs="+")
    ap.add_argument("-o", "--output", default="coverage.png")
    args = ap.parse_args()

    fig, ax = plt.subplots(figsize=(6, 4))
    for path in args.reports:
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        label = f"{rows[0]['algorithm']}/{rows[0]['bootstrap']} n={rows[0]['n']}" if rows else path
        ax.plot([int(r["round"]) for r in rows], [float(r["coverage_ratio"]) for r in rows], marker=".", label=label)
    ax.set_xlabel("round")
    ax.set_ylabel("coverage ratio")
    ax.set_ylim(0, 1.02)
    ax.legend()
    fig.tight_layout()
    fig.savefig(args.output, dpi=120)


if __name__ == "__main__":
    main()
