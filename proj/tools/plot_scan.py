#!/usr/bin/env python3
"""Read the CSV files of an fmps scan and plot them.

    plot_scan.py OUTDIR [OUTDIR ...] [--png scan.png] [--labels a b]
    plot_scan.py OUTDIR --dump          # parsed values as JSON on stdout
"""

import argparse
import csv
import json
import math
import os
import sys


def read_csv(path):
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    if not rows:
        raise SystemExit(f"{path}: empty file")
    head, body = rows[0], rows[1:]
    cols = {name: [] for name in head}
    for lineno, row in enumerate(body, start=2):
        if len(row) != len(head):
            raise SystemExit(f"{path}:{lineno}: expected {len(head)} fields, got {len(row)}")
        for name, value in zip(head, row):
            cols[name].append(float(value))
    return cols


def load(outdir):
    data = {}
    for name in ("cross_sections", "polarization"):
        path = os.path.join(outdir, name + ".csv")
        if os.path.exists(path):
            data[name] = read_csv(path)
    if not data:
        raise SystemExit(f"{outdir}: no cross_sections.csv or polarization.csv")
    return data


def peak(omega, values):
    best = max((v, w) for w, v in zip(omega, values) if not math.isnan(v))
    return best[1]


def plot(runs, labels, png):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, axes = plt.subplots(1, 2, figsize=(10, 4))
    for data, label in zip(runs, labels):
        cs = data.get("cross_sections")
        if cs:
            axes[0].plot(cs["omega"], cs["c_scat"], marker=".", label=label)
        pol = data.get("polarization")
        if pol:
            # a_{1,0} carries the z dipole; the +-1 pair the transverse ones.
            for m, key in (("-1", "a1m1"), ("0", "a10"), ("+1", "a1p1")):
                axes[1].plot(pol["omega"], pol[key + "_re"], label=f"{label} Re a1,{m}")
                axes[1].plot(pol["omega"], pol[key + "_im"], "--", label=f"{label} Im a1,{m}")
    axes[0].set_xlabel("omega")
    axes[0].set_ylabel("C_scat")
    axes[0].legend()
    axes[1].set_xlabel("omega")
    axes[1].set_ylabel("degree-1 outgoing coefficient")
    axes[1].legend(fontsize="x-small")
    fig.tight_layout()
    fig.savefig(png, dpi=120)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("outdirs", nargs="+")
    ap.add_argument("--labels", nargs="*")
    ap.add_argument("--png")
    ap.add_argument("--dump", action="store_true")
    args = ap.parse_args(argv)

    runs = [load(d) for d in args.outdirs]
    labels = args.labels or [os.path.basename(os.path.normpath(d)) for d in args.outdirs]
    if len(labels) != len(runs):
        ap.error("one label per directory")

    if args.dump:
        # json writes floats with repr, which round-trips doubles; NaN becomes null.
        def clean(v):
            return None if isinstance(v, float) and math.isnan(v) else v

        out = [{k: {c: [clean(x) for x in col] for c, col in v.items()} for k, v in r.items()} for r in runs]
        json.dump(out if len(out) > 1 else out[0], sys.stdout)
        return

    for data, label in zip(runs, labels):
        cs = data.get("cross_sections")
        if cs:
            print(f"{label}: C_scat peak at omega {peak(cs['omega'], cs['c_scat']):.6g}")
    if args.png:
        plot(runs, labels, args.png)


if __name__ == "__main__":
    main()
