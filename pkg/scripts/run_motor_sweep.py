#!/usr/bin/env python3
"""Sweep network sizes on the 3d motor-efficiency surrogate.

The surrogate mixes a fast exponential decay along the first two axes, a
bilinear interaction, and a localised bump, on a 19 x 15 x 5 mesh
normalised to unit spacing. The default reduced grid finishes in
minutes; --full runs the headline grid (depths 6,7,8 x widths
80,120,240,360, 9000 epochs, batch 35) with the documented learning-rate
exception for width 360 and the 8x240 cell. Per-seed rows land in
summary.csv under the output directory.
"""

import argparse
import sys
from statistics import median

from lelulab.experiments import parse_sweep, run_sweep

REDUCED = dict(epochs=900, patience=25, cooldown=5, depths=[2, 3], widths=[20, 40])
FULL = dict(epochs=9000, patience=250, cooldown=50, depths=[6, 7, 8], widths=[80, 120, 240, 360])


def parse_activations(text):
    specs = []
    for item in text.split(","):
        kind, _, param = item.strip().partition(":")
        spec = {"kind": kind}
        if param:
            spec["param"] = float(param)
        specs.append(spec)
    return specs


def parse_ints(text):
    return [int(v) for v in text.split(",")]


def build_sweep(args):
    proto = FULL if args.full else REDUCED
    depths = args.depths or proto["depths"]
    widths = args.widths or proto["widths"]
    template = {
        "dataset": {"kind": "motor", "points": [19, 15, 5]},
        "network": {
            "input_dim": 3,
            "depth": depths[0],
            "width": widths[0],
            "activation": {"kind": "lelu", "param": 0.4},
        },
        "training": {
            "epochs": proto["epochs"],
            "batch_size": 35,
            "loss": "mae",
            "lr": {
                "initial": 1e-3,
                "min": 1e-5,
                "factor": 0.5,
                "patience": proto["patience"],
                "cooldown": proto["cooldown"],
            },
            "seed": 0,
        },
        "seeds": parse_ints(args.seeds),
        "output_dir": args.out,
    }
    config = {
        "template": template,
        "depths": depths,
        "widths": widths,
        "activations": parse_activations(args.activations),
    }
    if args.full:
        # wide and deep cells need the gentler start to stay stable
        config["overrides"] = [
            {"width": 360, "lr_initial": 5e-4},
            {"depth": 8, "width": 240, "lr_initial": 5e-4},
        ]
    return parse_sweep(config)


def print_table(rows):
    cells = {}
    for row in rows:
        key = (row["activation"], row["param"], row["depth"], row["width"])
        cells.setdefault(key, []).append(row)
    print(
        f"{'activation':16s} {'size':>8s} {'size idx':>10s} "
        f"{'median mae':>12s} {'median diff':>12s} {'ok':>5s}"
    )
    for key in sorted(cells, key=lambda k: (float(cells[k][0]['size_index']), k[0], k[1])):
        rows_ok = [r for r in cells[key] if r["status"] == "ok"]
        label = key[0] if float(key[1]) == 0.0 else f"{key[0]}({key[1]})"
        size = f"{key[2]}x{key[3]}"
        idx = float(cells[key][0]["size_index"])
        if rows_ok:
            mae = median(float(r["train_mae"]) for r in rows_ok)
            diff = median(float(r["diffusion_mse"]) for r in rows_ok)
            print(
                f"{label:16s} {size:>8s} {idx:10.3e} {mae:12.3e} {diff:12.3e} "
                f"{len(rows_ok):3d}/{len(cells[key])}"
            )
        else:
            print(f"{label:16s} {size:>8s} {idx:10.3e} {'-':>12s} {'-':>12s}   0/{len(cells[key])}")


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--full", action="store_true", help="run the headline grid and schedule")
    parser.add_argument("--seeds", default="0", help="comma-separated seeds")
    parser.add_argument(
        "--activations",
        default="lelu:0.4,elu",
        help="comma-separated kinds, parametric ones as kind:param "
        "(the wide comparison adds lelu:0.2, silu, softplus, leaky_relu:0.2)",
    )
    parser.add_argument("--depths", type=parse_ints, default=None, help="override depth grid")
    parser.add_argument("--widths", type=parse_ints, default=None, help="override width grid")
    parser.add_argument("--jobs", type=int, default=1, help="parallel workers")
    parser.add_argument("--out", default="runs/motor_sweep", help="output directory")
    args = parser.parse_args(argv)

    sweep = build_sweep(args)
    rows = run_sweep(sweep, jobs=args.jobs)
    print_table(rows)
    print(f"\nper-seed rows: {args.out}/summary.csv")
    return 0


if __name__ == "__main__":
    sys.exit(main())
