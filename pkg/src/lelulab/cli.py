"""Command line entry points.

Exit codes: 0 success, 1 config error, 2 training divergence (single-run
mode), 3 I/O error.
"""

from __future__ import annotations

import argparse
import sys

from .datasets import (
    DatasetKind,
    DatasetSpec,
    build_dataset,
    load_csv,
    power_transform,
    save_csv,
)
from .diffusion import diffusion_mse, write_report_csv
from .experiments import (
    ConfigError,
    load_experiment_config,
    load_sweep_config,
    run_experiment,
    run_sweep,
    single_neuron_study,
    write_flex_csv,
    write_neuron_csv,
)
from .network import load_checkpoint, predict_batch


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the contract wants 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _parse_points(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(p) for p in text.split(","))
    except ValueError:
        raise ConfigError(f"bad --points value {text!r}") from None


def cmd_generate(args) -> int:
    try:
        kind = DatasetKind(args.dataset)
    except ValueError:
        raise ConfigError(f"unknown dataset kind {args.dataset!r}") from None
    spec = DatasetSpec(kind=kind, points=_parse_points(args.points), shift=args.shift)
    ds = build_dataset(spec)
    save_csv(ds, args.out)
    print(f"wrote {ds.ys.size} nodes to {args.out}")
    return 0


def cmd_train(args) -> int:
    config = load_experiment_config(args.config)
    reports = run_experiment(config, jobs=args.jobs)
    for r in reports:
        if r.status == "ok":
            print(
                f"seed {r.seed}: mae={r.train_mae:.6e} diffusion_mse={r.diffusion_mse:.6e} "
                f"flagged={r.flagged_nodes} final_lr={r.final_lr:g}"
            )
        else:
            print(f"seed {r.seed}: {r.status} ({r.error})")
    if all(r.status == "diverged" for r in reports):
        return 2
    return 0


def cmd_sweep(args) -> int:
    sweep = load_sweep_config(args.config)
    rows = run_sweep(sweep, jobs=args.jobs)
    ok = sum(1 for r in rows if r["status"] == "ok")
    print(f"{ok}/{len(rows)} runs ok; summary at {sweep.template.output_dir}/summary.csv")
    return 0


def cmd_diffusion(args) -> int:
    net = load_checkpoint(args.checkpoint)
    ds = load_csv(args.dataset)
    if args.power_exponent != 1.0:
        ds = power_transform(ds, args.power_exponent)
    report = diffusion_mse(ds.grid, lambda pts: predict_batch(net, pts))
    write_report_csv(report, args.out)
    print(f"diffusion_mse={report.mse:.6e} flagged_nodes={report.flagged_nodes}")
    return 0


def cmd_flex_table(args) -> int:
    write_flex_csv(args.out)
    print(f"wrote {args.out}")
    return 0


def cmd_neuron_study(args) -> int:
    ds = load_csv(args.dataset)
    if ds.input_dim != 1:
        raise ConfigError("the neuron study needs a 1d dataset")
    records = single_neuron_study(ds.xs[:, 0], ds.ys)
    write_neuron_csv(records, args.out)
    for r in records:
        label = r.activation.kind.value
        if r.activation.param:
            label += f"({r.activation.param:g})"
        print(
            f"{label}: middle_error={r.middle_error:.3e} grad_norm={r.grad_norm:.3e} "
            f"cond={r.condition_number:.3e} vanishing={r.vanishing}"
        )
    return 0


def cmd_plot(args) -> int:
    from .plots import plot_run

    written = plot_run(args.run, args.out, args.slice or [])
    for path in written:
        print(f"wrote {path}")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="lelulab")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="emit a raw dataset CSV")
    p.add_argument("--dataset", required=True, help="tanh | exp | motor")
    p.add_argument("--points", required=True, help="n or n1,n2,n3")
    p.add_argument("--shift", type=float, default=0.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("train", help="run a config's replicates")
    p.add_argument("--config", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("sweep", help="run a depth x width x activation grid")
    p.add_argument("--config", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("diffusion", help="sensors for a checkpoint on a dataset")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", required=True)
    p.add_argument(
        "--power-exponent",
        type=float,
        default=1.0,
        help="apply y^p to the CSV targets first (match the training transform)",
    )
    p.set_defaults(func=cmd_diffusion)

    p = sub.add_parser("flex-table", help="flexibility scores per activation")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_flex_table)

    p = sub.add_parser("neuron-study", help="single-neuron interpolation study")
    p.add_argument("--dataset", required=True, help="a 3-point 1d dataset CSV")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_neuron_study)

    p = sub.add_parser("plot", help="SVG plots from run or sweep artifacts")
    p.add_argument("--run", required=True)
    p.add_argument("--slice", action="append", help="x2=3,x3=1 (repeatable)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_plot)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
