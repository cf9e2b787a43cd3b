"""Command line interface.

Subcommands mirror the experimental protocol: ``predict`` evaluates one
configuration, ``benchmark`` sweeps every ensemble/classifier/
normalization combination, ``grid-search`` walks the (n-internal,
s-samples) grid, ``shots-sweep`` traces accuracy against measurement
shots, and ``balance-study`` compares unbalanced against class-balanced
training.

Results are written as CSV (plus a ``*_aggregates.csv`` sibling) or
JSON. Outputs are byte-reproducible for a fixed ``--seed``; pass
``--timings`` to fill the wall_ms column at the cost of that guarantee.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .classifiers import KINDS, MODES
from .data import bundled_dataset_names, load_dataset
from .ensembles import default_stacking_spec
from .experiment import (
    ENSEMBLES,
    EvalConfig,
    aggregate_results,
    aggregates_path,
    export_results,
    run_experiment,
)
from .preprocessing import NORMALIZATIONS

logger = logging.getLogger(__name__)

DEFAULT_GRID_N = "5,10,30,50"
DEFAULT_GRID_S = "6,8,10,20"
DEFAULT_SHOTS_SWEEP = ",".join(str(2**p) for p in range(10, 19))


def _int_list(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v]


def _common_arguments(parser: argparse.ArgumentParser, multi_dataset: bool):
    if multi_dataset:
        parser.add_argument(
            "--dataset",
            action="append",
            default=None,
            help="dataset CSV path or bundled name; repeatable (default: bundled iris sets)",
        )
    else:
        parser.add_argument(
            "--dataset", required=True, help="dataset CSV path or bundled name"
        )
    parser.add_argument("--mode", choices=MODES, default="statevector")
    parser.add_argument("--shots", type=int, default=8192)
    parser.add_argument("--n-internal", type=int, default=30)
    parser.add_argument("--s-samples", type=int, default=8)
    parser.add_argument("--folds", type=int, default=5)
    parser.add_argument("--runs", type=int, default=10)
    parser.add_argument("--train-fraction", type=float, default=0.8)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--balanced", action="store_true")
    parser.add_argument("--stacking-on-raw", action="store_true",
                        help="stacking internals normalize from raw features")
    parser.add_argument("--out", required=True, help="output file path")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--timings", action="store_true",
                        help="record wall_ms (breaks byte-reproducibility)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qcensemble",
        description="Quantum-classifier ensembles on a statevector simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("predict", help="evaluate one classifier/ensemble on one dataset")
    _common_arguments(p, multi_dataset=False)
    p.add_argument("--classifier", choices=KINDS, default="cosine")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--ensemble", choices=ENSEMBLES, default="none")
    p.add_argument("--normalization", choices=NORMALIZATIONS, default="none")

    p = sub.add_parser("benchmark", help="full ensemble x classifier x normalization sweep")
    _common_arguments(p, multi_dataset=True)

    p = sub.add_parser("grid-search", help="n-internal x s-samples grid for bagging/boosting")
    _common_arguments(p, multi_dataset=True)
    p.add_argument("--classifier", choices=(*KINDS, "all"), default="all")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--ensemble", choices=("bagging", "boosting", "all"), default="all")
    p.add_argument("--normalization", choices=(*NORMALIZATIONS, "all"), default="all")
    p.add_argument("--grid-n", type=_int_list, default=DEFAULT_GRID_N,
                   help=f"comma list of internal-classifier counts (default {DEFAULT_GRID_N})")
    p.add_argument("--grid-s", type=_int_list, default=DEFAULT_GRID_S,
                   help=f"comma list of per-classifier sample counts (default {DEFAULT_GRID_S})")

    p = sub.add_parser("shots-sweep", help="accuracy as a function of measurement shots")
    _common_arguments(p, multi_dataset=False)
    p.add_argument("--classifier", choices=KINDS, default="distance")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--ensemble", choices=(*ENSEMBLES, "all"), default="all")
    p.add_argument("--normalization", choices=NORMALIZATIONS, default="minmax")
    p.add_argument("--shots-list", type=_int_list, default=DEFAULT_SHOTS_SWEEP,
                   help=f"comma list of shot counts (default {DEFAULT_SHOTS_SWEEP})")

    p = sub.add_parser("balance-study", help="unbalanced vs class-balanced training")
    _common_arguments(p, multi_dataset=True)
    p.add_argument("--classifier", choices=KINDS, default="distance")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--ensemble", choices=(*ENSEMBLES, "all"), default="all")
    p.add_argument("--normalization", choices=(*NORMALIZATIONS, "all"), default="all")
    return parser


def _load_datasets(args) -> list:
    names = args.dataset
    if isinstance(names, str):
        names = [names]
    if not names:
        names = [n for n in bundled_dataset_names() if n.startswith("iris")]
    return [load_dataset(n) for n in names]


def _base_kwargs(args, **overrides) -> dict:
    kwargs = dict(
        mode=args.mode,
        shots=args.shots,
        n_internal=args.n_internal,
        s_samples=args.s_samples,
        folds=args.folds,
        balanced=getattr(args, "balanced", False),
    )
    kwargs.update(overrides)
    if kwargs.get("ensemble") == "stacking" and args.stacking_on_raw:
        kwargs["stacking"] = default_stacking_spec(
            kwargs["mode"], kwargs["shots"], on_raw=True
        )
    return kwargs


def _expand(args, attr, all_values) -> list:
    value = getattr(args, attr)
    return list(all_values) if value == "all" else [value]


def _benchmark_configs(args) -> list[EvalConfig]:
    configs = []
    for norm in NORMALIZATIONS:
        for ensemble in ("none", "bagging", "boosting"):
            for kind in KINDS:
                configs.append(EvalConfig(**_base_kwargs(
                    args, ensemble=ensemble, classifier=kind, normalization=norm
                )))
        configs.append(EvalConfig(**_base_kwargs(
            args, ensemble="stacking", normalization=norm
        )))
    return configs


def _grid_configs(args) -> list[EvalConfig]:
    configs = []
    for ensemble in _expand(args, "ensemble", ("bagging", "boosting")):
        for kind in _expand(args, "classifier", KINDS):
            for norm in _expand(args, "normalization", NORMALIZATIONS):
                for n in args.grid_n:
                    for s in args.grid_s:
                        configs.append(EvalConfig(**_base_kwargs(
                            args, ensemble=ensemble, classifier=kind, k=args.k,
                            normalization=norm, n_internal=n, s_samples=s,
                        )))
    return configs


def _shots_sweep_configs(args) -> list[EvalConfig]:
    configs = []
    for ensemble in _expand(args, "ensemble", ENSEMBLES):
        common = dict(ensemble=ensemble, classifier=args.classifier, k=args.k,
                      normalization=args.normalization)
        configs.append(EvalConfig(**_base_kwargs(args, mode="statevector", **common)))
        for shots in args.shots_list:
            configs.append(EvalConfig(**_base_kwargs(
                args, mode="sampled", shots=shots, **common
            )))
    return configs


def _balance_configs(args, balanced: bool) -> list[EvalConfig]:
    configs = []
    for ensemble in _expand(args, "ensemble", ENSEMBLES):
        for norm in _expand(args, "normalization", NORMALIZATIONS):
            configs.append(EvalConfig(**_base_kwargs(
                args, ensemble=ensemble, classifier=args.classifier, k=args.k,
                normalization=norm, balanced=balanced,
            )))
    return configs


def _print_summary(results):
    aggregates = aggregate_results(results)
    print(f"{len(results)} records, {len(aggregates)} configurations")
    for entry in aggregates:
        tag = "/".join(
            str(entry[c]) for c in ("dataset", "ensemble", "classifier", "normalization")
        )
        extra = f" shots={entry['shots']}" if entry["mode"] == "sampled" else ""
        print(
            f"  {tag}{extra}: mean={entry['mean_accuracy']:.4f} "
            f"median={entry['median_accuracy']:.4f} "
            f"ci95=[{entry['ci95_low']:.4f}, {entry['ci95_high']:.4f}]"
        )


def _run_and_export(args, datasets, configs, out_path=None) -> list:
    results = run_experiment(
        datasets,
        configs,
        runs=args.runs,
        train_fraction=args.train_fraction,
        seed=args.seed,
        threads=args.threads,
    )
    if not results:
        raise RuntimeError("every run failed; check the log for details")
    path = export_results(
        results, out_path or args.out, fmt=args.format, timings=args.timings
    )
    print(f"wrote {path}")
    if args.format == "csv":
        print(f"wrote {aggregates_path(path)}")
    _print_summary(results)
    return results


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    datasets = _load_datasets(args)

    if args.command == "predict":
        configs = [EvalConfig(**_base_kwargs(
            args, ensemble=args.ensemble, classifier=args.classifier, k=args.k,
            normalization=args.normalization,
        ))]
        _run_and_export(args, datasets, configs)
    elif args.command == "benchmark":
        _run_and_export(args, datasets, _benchmark_configs(args))
    elif args.command == "grid-search":
        _run_and_export(args, datasets, _grid_configs(args))
    elif args.command == "shots-sweep":
        _run_and_export(args, datasets, _shots_sweep_configs(args))
    else:  # balance-study
        import os.path

        stem, ext = os.path.splitext(str(args.out))
        for balanced in (False, True):
            suffix = "balanced" if balanced else "unbalanced"
            out = f"{stem}_{suffix}{ext or '.csv'}"
            print(f"--- training {suffix} ---")
            _run_and_export(args, datasets, _balance_configs(args, balanced), out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
