"""Command-line driver.

Subcommands: gen (synthetic datasets), run (one training run), sweep
(ablations over alpha/gamma/strategy), diagnose (feature histograms),
extract-info (dataset header and counts).

Exit codes: 0 success, 1 configuration error, 2 data/format error,
3 numerical error.

Options may come from a TOML or JSON config file (--config); flags given on
the command line win over file values.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .errors import FormatError, InputError, NumericalError, UsageError
from .pipeline import Strategy
from .runner import (
    RunConfig,
    dataset_info,
    feature_histograms,
    run_experiment,
    sweep,
    write_histogram_csv,
)
from .synth import SynthSpec, generate_stream, generate_validation, driving_imbalance_spec

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DATA = 2
EXIT_NUMERICAL = 3


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on bad flags; remap to the config-error code."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def _load_config_file(path: str) -> dict:
    p = Path(path)
    raw = p.read_bytes()
    if p.suffix.lower() == ".json":
        return json.loads(raw)
    try:
        import tomllib
    except ModuleNotFoundError:
        import tomli as tomllib
    return tomllib.loads(raw.decode())


def _parse_int_list(text: str) -> list[int]:
    """Accept "0,3,5" and ranges "0:6" (half-open), possibly mixed."""
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if ":" in part:
            lo, hi = part.split(":", 1)
            out.extend(range(int(lo), int(hi)))
        elif part:
            out.append(int(part))
    return out


def _parse_float_list(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


_RUN_DEFAULTS = {
    "gamma": 1.0,
    "buffer_size": 8192,
    "buffer_seed": 0,
    "buffer_scale": 1.0,
    "alpha": 1.0,
    "pfg_seed": 0,
    "pfg_cap": None,
    "strategy": "rebase",
    "val_cadence": "task",
    "phase_size": None,
}


def _add_run_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--dataset", help="training feature file")
    parser.add_argument("--val", dest="val_dataset", help="validation feature file")
    parser.add_argument("--out", help="output directory for reports")
    parser.add_argument("--config", help="TOML/JSON config file; flags override it")
    parser.add_argument("--gamma", type=float, help="ridge regularization weight")
    parser.add_argument("--buffer-size", type=int, help="projection width d_buf")
    parser.add_argument("--buffer-seed", type=int, help="projection weight seed")
    parser.add_argument("--buffer-scale", type=float, help="projection weight scale")
    parser.add_argument("--alpha", type=float, help="pseudo-feature noise coefficient")
    parser.add_argument("--pfg-seed", type=int, help="pseudo-feature RNG seed")
    parser.add_argument("--pfg-cap", type=int, help="max pseudo rows per class per phase")
    parser.add_argument("--strategy", choices=["rebase", "carry"])
    parser.add_argument("--val-cadence", choices=["task", "batch"])
    parser.add_argument("--phase-size", type=int, help="sub-chunk tasks into batches of this size")


def _build_run_config(args: argparse.Namespace) -> RunConfig:
    merged = dict(_RUN_DEFAULTS)
    if args.config:
        file_cfg = _load_config_file(args.config)
        unknown = set(file_cfg) - set(_RUN_DEFAULTS) - {"dataset", "val_dataset", "out"}
        if unknown:
            raise InputError(f"unknown config keys: {sorted(unknown)}")
        merged.update(file_cfg)
    for key in list(_RUN_DEFAULTS) + ["dataset", "val_dataset"]:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    if not merged.get("dataset"):
        raise InputError("--dataset is required (flag or config file)")
    if not merged.get("val_dataset"):
        raise InputError("--val is required (flag or config file)")
    for name in ("dataset", "val_dataset"):
        if not Path(merged[name]).exists():
            raise InputError(f"{name} file does not exist: {merged[name]}")
    return RunConfig(
        dataset=str(merged["dataset"]),
        val_dataset=str(merged["val_dataset"]),
        gamma=float(merged["gamma"]),
        buffer_size=int(merged["buffer_size"]),
        buffer_seed=int(merged["buffer_seed"]),
        buffer_scale=float(merged["buffer_scale"]),
        alpha=float(merged["alpha"]),
        pfg_seed=int(merged["pfg_seed"]),
        pfg_cap=None if merged["pfg_cap"] is None else int(merged["pfg_cap"]),
        strategy=Strategy(merged["strategy"]),
        val_cadence=str(merged["val_cadence"]),
        phase_size=None if merged["phase_size"] is None else int(merged["phase_size"]),
    )


def _spec_from_config(cfg: dict) -> SynthSpec:
    """Build a SynthSpec from a config mapping.

    Either explicit class_means/class_stds lists, or preset-style draws
    controlled by separation/std_low/std_high.
    """
    preset_keys = {"separation", "std_low", "std_high"}
    if "class_means" in cfg:
        return SynthSpec(
            num_classes=int(cfg["num_classes"]),
            d_feat=int(cfg["d_feat"]),
            num_tasks=int(cfg["num_tasks"]),
            samples_per_task=int(cfg["samples_per_task"]),
            proportions=tuple(float(p) for p in cfg["proportions"]),
            class_means=np.asarray(cfg["class_means"], dtype=np.float64),
            class_stds=np.asarray(cfg["class_stds"], dtype=np.float64),
            seed=int(cfg["seed"]),
        )
    kwargs = {k: cfg[k] for k in preset_keys if k in cfg}
    return driving_imbalance_spec(
        d_feat=int(cfg.get("d_feat", 16)),
        samples_per_task=int(cfg.get("samples_per_task", 3400)),
        num_tasks=int(cfg.get("num_tasks", 6)),
        seed=int(cfg.get("seed", 7)),
        **kwargs,
    )


def _cmd_gen(args: argparse.Namespace) -> int:
    if args.config:
        spec = _spec_from_config(_load_config_file(args.config))
    else:
        spec = driving_imbalance_spec(
            d_feat=args.d_feat,
            samples_per_task=args.samples_per_task,
            num_tasks=args.tasks,
            seed=args.seed,
            separation=args.separation,
        )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    train_header = generate_stream(spec, out / "train.feat")
    val_header = generate_validation(spec, out / "val.feat", per_class=args.val_per_class)
    echo = {
        "num_classes": spec.num_classes,
        "d_feat": spec.d_feat,
        "num_tasks": spec.num_tasks,
        "samples_per_task": spec.samples_per_task,
        "proportions": list(spec.proportions),
        "seed": spec.seed,
        "train_records": train_header.num_records,
        "val_records": val_header.num_records,
    }
    with open(out / "spec.json", "w") as fh:
        json.dump(echo, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {out / 'train.feat'} ({train_header.num_records} records)")
    print(f"wrote {out / 'val.feat'} ({val_header.num_records} records)")
    return EXIT_OK


def _cmd_run(args: argparse.Namespace) -> int:
    config = _build_run_config(args)
    result = run_experiment(config, out_dir=args.out)
    print(f"run_id={result.run_id}")
    print(f"amca={result.amca:.6f}")
    print(f"iterative_amca={result.iterative_amca:.6f}")
    print(f"pseudo_rows_total={result.pseudo_rows_total}")
    return EXIT_OK


def _cmd_sweep(args: argparse.Namespace) -> int:
    if not args.out:
        raise InputError("--out is required for sweep")
    base = _build_run_config(args)
    alphas = _parse_float_list(args.alphas) if args.alphas else None
    gammas = _parse_float_list(args.gammas) if args.gammas else None
    strategies = (
        [Strategy(s.strip()) for s in args.strategies.split(",") if s.strip()]
        if args.strategies
        else None
    )
    results = sweep(base, args.out, alphas=alphas, gammas=gammas, strategies=strategies)
    for res in results:
        print(
            f"strategy={res.config.strategy.value} gamma={res.config.gamma} "
            f"alpha={res.config.alpha} amca={res.amca:.6f}"
        )
    print(f"wrote {Path(args.out) / 'sweep.csv'}")
    return EXIT_OK


def _cmd_diagnose(args: argparse.Namespace) -> int:
    elements = _parse_int_list(args.elements)
    rows = feature_histograms(args.dataset, args.class_index, elements, bins=args.bins)
    write_histogram_csv(rows, args.out)
    print(f"wrote {args.out} ({len(rows)} rows)")
    return EXIT_OK


def _cmd_extract_info(args: argparse.Namespace) -> int:
    info = dataset_info(args.dataset)
    print(json.dumps(info, indent=2, sort_keys=True))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="streamridge",
        description="Streaming analytic ridge classifier with pseudo-feature class balancing.",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("gen", help="generate a synthetic imbalanced stream")
    gen.add_argument("--out", required=True, help="output directory")
    gen.add_argument("--config", help="TOML/JSON synth spec; overrides preset flags")
    gen.add_argument("--d-feat", type=int, default=16)
    gen.add_argument("--samples-per-task", type=int, default=3400)
    gen.add_argument("--tasks", type=int, default=6)
    gen.add_argument("--seed", type=int, default=7)
    gen.add_argument("--separation", type=float, default=1.0)
    gen.add_argument("--val-per-class", type=int, default=200)
    gen.set_defaults(func=_cmd_gen)

    run = sub.add_parser("run", help="train on a stream and write reports")
    _add_run_options(run)
    run.set_defaults(func=_cmd_run)

    swp = sub.add_parser("sweep", help="ablation sweep over alpha/gamma/strategy")
    _add_run_options(swp)
    swp.add_argument("--alphas", help="comma-separated alpha values")
    swp.add_argument("--gammas", help="comma-separated gamma values")
    swp.add_argument("--strategies", help="comma-separated strategies (rebase,carry)")
    swp.set_defaults(func=_cmd_sweep)

    diag = sub.add_parser("diagnose", help="export feature histograms for one class")
    diag.add_argument("--dataset", required=True)
    diag.add_argument("--class-index", type=int, required=True)
    diag.add_argument("--elements", default="0:6", help='e.g. "0:6" or "0,3,5"')
    diag.add_argument("--bins", type=int, default=30)
    diag.add_argument("--out", required=True, help="output CSV path")
    diag.set_defaults(func=_cmd_diagnose)

    info = sub.add_parser("extract-info", help="print dataset header and counts")
    info.add_argument("--dataset", required=True)
    info.set_defaults(func=_cmd_extract_info)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_CONFIG
    except (InputError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FormatError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
