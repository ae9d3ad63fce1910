"""Plot an oatqfi CSV sweep.

    oatqfi dynamics --n 2000 > dyn.csv
    python plot_sweep.py dyn.csv --scaled
    oatqfi gamma-scan --n 100 > gam.csv
    python plot_sweep.py gam.csv
"""

import argparse
import csv
import math
from collections import defaultdict

import matplotlib.pyplot as plt


def read_rows(path):
    with open(path, newline="") as fh:
        lines = [line for line in fh if not line.startswith("#")]
    return list(csv.DictReader(lines))


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("csv")
    parser.add_argument("--scaled", action="store_true", help="plot against tau * sqrt(N)")
    parser.add_argument("--n", type=int, help="particle number, needed for --scaled")
    parser.add_argument("--out", default="sweep.png")
    args = parser.parse_args()

    groups = defaultdict(list)
    for row in read_rows(args.csv):
        groups[(float(row["gamma"]), row["engine"])].append(row)

    fig, (ax_xi, ax_chi) = plt.subplots(1, 2, figsize=(10, 4))
    for (gamma, engine), rows in sorted(groups.items()):
        tau = [float(r["tau"]) for r in rows]
        if args.scaled:
            if args.n is None:
                parser.error("--scaled needs --n")
            tau = [t * math.sqrt(args.n) for t in tau]
        label = f"gamma={gamma:g} ({engine})"
        ax_xi.plot(tau, [float(r["xi_k2"]) for r in rows], label=label)
        ax_chi.plot(tau, [float(r["chi2"]) for r in rows], label=label)

    xlabel = "kappa t sqrt(N)" if args.scaled else "kappa t"
    for ax, name in ((ax_xi, "xi_K^2"), (ax_chi, "chi^2")):
        ax.set_yscale("log")
        ax.set_xlabel(xlabel)
        ax.set_ylabel(name)
        ax.legend()
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)


if __name__ == "__main__":
    main()
