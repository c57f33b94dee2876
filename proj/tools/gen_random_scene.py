#!/usr/bin/env python3
"""Write a scene file with randomly placed, non-overlapping sites.

Defaults give 200 dielectric spheres in the box [0,100] x [0,100] x [0,20]
at wavelength 2 pi (omega = 1).
"""

import argparse
import math
import random
import sys


def place(count, box, radius, eta, rng, max_tries=200000):
    centers = []
    tries = 0
    while len(centers) < count:
        tries += 1
        if tries > max_tries:
            sys.exit(f"could only place {len(centers)} of {count} sites; enlarge the box")
        c = [rng.uniform(radius, b - radius) if b > 2 * radius else b / 2 for b in box]
        if all(math.dist(c, o) > eta * 2 * radius * (1 + 1e-9) for o in centers):
            centers.append(c)
    return centers


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("-o", "--out", default="-", help="output path, '-' for stdout")
    ap.add_argument("-n", "--count", type=int, default=200)
    ap.add_argument("--box", type=float, nargs=3, default=[100.0, 100.0, 20.0])
    ap.add_argument("--radius", type=float, default=1.0)
    ap.add_argument("--eta", type=float, default=1.05)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--kind", choices=["pec", "dielectric", "inclusion"], default="dielectric")
    ap.add_argument("--eps", type=float, nargs=2, default=[2.25, 0.0], metavar=("RE", "IM"))
    ap.add_argument("--mesh", help="inclusion mesh file (with --kind inclusion)")
    ap.add_argument("--table", help="material table CSV for the inclusion (with --kind inclusion)")
    ap.add_argument("--wavelength", type=float, default=2 * math.pi)
    ap.add_argument("-p", type=int, default=3)
    args = ap.parse_args(argv)

    if args.kind == "inclusion" and not args.mesh:
        ap.error("--kind inclusion needs --mesh")

    rng = random.Random(args.seed)
    centers = place(args.count, args.box, args.radius, args.eta, rng)

    lines = [
        "# generated by gen_random_scene.py "
        + " ".join(f"{k}={v}" for k, v in sorted(vars(args).items()) if k != "out"),
        "units: um",
        "exterior: vacuum",
        "materials:",
    ]
    if args.kind == "inclusion" and args.table:
        lines.append(f"  particle: {{table: {args.table}}}")
    else:
        lines.append(f"  particle: {{eps: [{args.eps[0]!r}, {args.eps[1]!r}]}}")
    lines += [
        "incident:",
        "  direction: [0, 0, 1]",
        "  polarization: [1, 0, 0]",
        "frequency:",
        f"  wavelength: {args.wavelength!r} um",
        f"p: {args.p}",
        f"eta: {args.eta!r}",
    ]
    if args.kind == "inclusion":
        lines += [
            "inclusions:",
            f"  pair: {{mesh: {args.mesh}, center: [0, 0, 0], radius: {args.radius!r}, material: particle}}",
        ]
    lines.append("sites:")
    for c in centers:
        xyz = ", ".join(repr(v) for v in c)
        if args.kind == "pec":
            lines.append(f"  - {{center: [{xyz}], radius: {args.radius!r}, model: pec}}")
        elif args.kind == "dielectric":
            lines.append(f"  - {{center: [{xyz}], radius: {args.radius!r}, material: particle}}")
        else:
            lines.append(f"  - {{center: [{xyz}], inclusion: pair}}")
    lines += ["outputs:", "  cross_sections: true", "  polarization: true"]
    text = "\n".join(lines) + "\n"

    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as f:
            f.write(text)


if __name__ == "__main__":
    main()
