"""Draw the degenerate curves written by ``eulerstab atlas``.

Usage: ``python docs/plot_atlas.py atlas_out [figure.png]``.  Needs the
``plot`` extra (matplotlib).
"""
import csv
import sys
from collections import defaultdict
from pathlib import Path

import matplotlib.pyplot as plt


def main(out_dir, figure=None):
    out_dir = Path(out_dir)
    curves = defaultdict(lambda: ([], []))
    with open(out_dir / "curves.csv", newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            beta, e = curves[row["label"]]
            beta.append(float(row["beta"]))
            e.append(float(row["e"]))

    fig, ax = plt.subplots(figsize=(7, 4.5))
    for label, (beta, e) in sorted(curves.items()):
        style = "-" if label.startswith("Gamma") else ("--" if label.endswith("-") else ":")
        color = "C0" if label.startswith("Gamma") else "C3"
        ax.plot(beta, e, style, color=color, lw=1.2)
        ax.annotate(label, (beta[0], e[0]), xytext=(2, 4), textcoords="offset points", fontsize=7)
    ax.set_xlabel(r"$\beta$")
    ax.set_ylabel(r"$e$")
    ax.set_ylim(0, 1)
    fig.tight_layout()
    if figure:
        fig.savefig(figure, dpi=150)
    else:
        plt.show()


if __name__ == "__main__":
    main(*sys.argv[1:3])
