"""Command line interface.

Subcommands:
  gen         write a synthetic dataset directory from a config file
  propagate   run the configured propagation, dump embeddings + diagnostics
  train       supervised baseline (no curriculum)
  curriculum  full pipeline
  verify      run an oracle suite; exit code 0 only if every check passes
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .config import load_config, render_config
from .diagnostics import layer_sweep, records_to_csv
from .errors import GraphainError
from .experiment import compute_embedding, rows_to_csv, run_experiment
from .io import load_dataset, save_dataset
from .synthetic import gen_gaussian_cluster_graph, with_masks
from .verify import SUITES


def _write_embeddings(h: np.ndarray, path: Path) -> None:
    lines = [",".join(format(v, ".17g") for v in row) for row in h]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _cmd_gen(args) -> int:
    cfg = load_config(args.spec)
    if cfg.synthetic is None:
        print("gen needs synthetic.* keys in the config", file=sys.stderr)
        return 2
    g = gen_gaussian_cluster_graph(cfg.synthetic)
    g = with_masks(g, cfg.train_frac, cfg.val_frac, cfg.synthetic.seed)
    save_dataset(g, args.out)
    print(f"wrote {g.n} nodes / {g.num_edges} edges to {args.out}")
    return 0


def _cmd_propagate(args) -> int:
    cfg = load_config(args.config)
    g = load_dataset(args.graph)
    out = Path(args.out or cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    h, reducer = compute_embedding(cfg, g, seed=cfg.seeds[0])
    _write_embeddings(h, out / "embeddings.csv")
    records = layer_sweep(g, cfg.propagation, variant=cfg.variant, reducer=reducer)
    if not args.trace:
        records = records[-1:]
    records_to_csv(records, out / "diagnostics.csv")
    print(f"wrote embeddings and {len(records)} diagnostic rows to {out}")
    return 0


def _run_pipeline(args, with_curriculum: bool) -> int:
    cfg = load_config(args.config)
    if args.graph is not None:
        cfg = replace(cfg, dataset_path=str(args.graph), synthetic=None)
    if args.out is not None:
        cfg = replace(cfg, output_dir=str(args.out))
    rows = run_experiment(cfg, with_curriculum=with_curriculum)
    sys.stdout.write(rows_to_csv(rows))
    if with_curriculum and args.export_snapshots:
        from .experiment import run_seed

        _, _, _, snapshots = run_seed(cfg, cfg.seeds[0], with_curriculum=True)
        if snapshots is not None:
            from .curriculum import export_snapshots

            export_snapshots(snapshots, Path(cfg.output_dir) / "snapshots")
    return 0


def _cmd_train(args) -> int:
    return _run_pipeline(args, with_curriculum=False)


def _cmd_curriculum(args) -> int:
    return _run_pipeline(args, with_curriculum=True)


def _cmd_verify(args) -> int:
    report = SUITES[args.suite]()
    for line in report.lines():
        print(line)
    return 0 if report.passed else 1


def _cmd_echo(args) -> int:
    sys.stdout.write(render_config(load_config(args.config)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graphain",
        description="Deep graph propagation with soft whitening and a "
        "label-smoothing curriculum.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic dataset directory")
    p.add_argument("--spec", required=True, help="config file with synthetic.* keys")
    p.add_argument("--out", required=True, help="output dataset directory")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("propagate", help="embeddings and per-layer diagnostics")
    p.add_argument("--graph", required=True, help="dataset directory")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--trace", action="store_true", help="one diagnostics row per layer")
    p.set_defaults(func=_cmd_propagate)

    for name, func in (("train", _cmd_train), ("curriculum", _cmd_curriculum)):
        p = sub.add_parser(
            name,
            help="supervised baseline" if name == "train" else "full pipeline",
        )
        p.add_argument("--graph", default=None, help="dataset directory (overrides config)")
        p.add_argument("--config", required=True)
        p.add_argument("--out", default=None)
        p.add_argument("--export-snapshots", action="store_true")
        p.set_defaults(func=func)

    p = sub.add_parser("verify", help="run an oracle suite")
    p.add_argument("--suite", required=True, choices=sorted(SUITES))
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("echo-config", help="print the canonical config echo")
    p.add_argument("--config", required=True)
    p.set_defaults(func=_cmd_echo)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except GraphainError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
