"""Command-line entry point.

Subcommands: characterize, evaluate, simplify, prototypes, export-bundle,
serve. Exit codes: 0 success, 1 usage error, 2 data error. The data
directory comes from --data-dir or the TSS_DATA_DIR environment variable.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .characterize import characterize_dataset
from .classifiers import fit_knn, fit_logreg, load_external_predictions
from .data import (DATA_DIR_ENV, Dataset, discover_datasets, load_dataset,
                   resolve_data_dir, stratified_sample)
from .errors import ConfigError, DataError
from .evaluation import (DatasetResult, EvaluationCurve, sweep, write_curve_csv,
                         write_reports)
from .prototypes import class_prototypes, export_prompt_bundle
from .simplifiers import AlgorithmId, ComplexityParam, simplify

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage problems; the contract here is 1
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _add_data_dir(p: _Parser) -> None:
    p.add_argument("--data-dir", default=None,
                   help=f"dataset directory (default: ${DATA_DIR_ENV})")


def _add_dataset(p: _Parser, allow_all: bool) -> None:
    help_ = "dataset name" + (" or 'all'" if allow_all else "")
    p.add_argument("--dataset", required=True, help=help_)
    if allow_all:
        p.add_argument("--max-len", type=int, default=200,
                       help="with 'all': only series shorter than this (default 200)")


def build_parser() -> _Parser:
    p = _Parser(prog="tssimp", description="Time-series simplification toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("characterize",
                       help="stationarity/seasonality/entropy per dataset")
    _add_data_dir(c)
    _add_dataset(c, allow_all=True)
    c.add_argument("--out", default=None, help="output CSV (default: stdout)")

    e = sub.add_parser("evaluate",
                       help="loyalty/complexity sweep and report tables")
    _add_data_dir(e)
    _add_dataset(e, allow_all=True)
    e.add_argument("--algorithm", default="all",
                   choices=["rdp", "vw", "bu", "os", "all"])
    e.add_argument("--classifier", default="logreg",
                   help="logreg | knn | external:<csv path>")
    e.add_argument("--seed", type=int, default=42)
    e.add_argument("--sample-size", type=int, default=100)
    e.add_argument("--source-split", default="test", choices=["test", "train"],
                   help="split the sample pool is drawn from (default test)")
    e.add_argument("--knn-k", type=int, default=5)
    e.add_argument("--knn-metric", default="dtw", choices=["dtw", "euclidean"])
    e.add_argument("--jobs", type=int, default=1)
    e.add_argument("--skip-characteristics", action="store_true",
                   help="leave characterization columns empty in reports")
    e.add_argument("--out", required=True, help="output directory")

    s = sub.add_parser("simplify",
                       help="one simplification as JSON on stdout")
    _add_data_dir(s)
    _add_dataset(s, allow_all=False)
    s.add_argument("--instance", type=int, default=0)
    s.add_argument("--split", default="test", choices=["test", "train"])
    s.add_argument("--algorithm", required=True, choices=["rdp", "vw", "bu", "os"])
    s.add_argument("--alpha-c", type=float, required=True)

    pr = sub.add_parser("prototypes",
                        help="per-class medoid prototypes as JSON on stdout")
    _add_data_dir(pr)
    _add_dataset(pr, allow_all=False)
    pr.add_argument("--k", type=int, default=4)
    pr.add_argument("--metric", default="dtw", choices=["dtw", "euclidean"])
    pr.add_argument("--seed", type=int, default=42)

    b = sub.add_parser("export-bundle",
                       help="prompt + simplified prototypes + test batches")
    _add_data_dir(b)
    _add_dataset(b, allow_all=False)
    b.add_argument("--algorithm", default="os", choices=["rdp", "vw", "bu", "os"])
    b.add_argument("--alpha-c", type=float, required=True)
    b.add_argument("--tests", type=int, default=50)
    b.add_argument("--batch", type=int, default=10)
    b.add_argument("--k", type=int, default=4)
    b.add_argument("--metric", default="dtw", choices=["dtw", "euclidean"])
    b.add_argument("--classifier", default="logreg",
                   help="logreg | knn | external:<csv path>")
    b.add_argument("--knn-k", type=int, default=5)
    b.add_argument("--knn-metric", default="dtw", choices=["dtw", "euclidean"])
    b.add_argument("--seed", type=int, default=42)
    b.add_argument("--out", required=True, help="output directory")

    sv = sub.add_parser("serve", help="JSON HTTP API server")
    _add_data_dir(sv)
    sv.add_argument("--host", default="127.0.0.1")
    sv.add_argument("--port", type=int, default=8787)
    sv.add_argument("--jobs", type=int, default=1)
    sv.add_argument("--static", default=None,
                    help="directory of built frontend files to serve at /")
    return p


def _data_dir(args) -> str:
    return resolve_data_dir(args.data_dir)


def _select_datasets(args) -> list[str]:
    data_dir = _data_dir(args)
    if args.dataset != "all":
        return [args.dataset]
    names = discover_datasets(data_dir)
    if not names:
        raise DataError(f"no dataset pairs found under {data_dir}")
    out = []
    for name in names:
        d = load_dataset(data_dir, name)
        if d.series_length < args.max_len:
            out.append(name)
    return out


def _make_classifier(choice: str, train, knn_k: int = 5, knn_metric: str = "dtw"):
    if choice == "logreg":
        return fit_logreg(train)
    if choice == "knn":
        return fit_knn(train, k=knn_k, metric=knn_metric)
    if choice.startswith("external:"):
        return load_external_predictions(choice.split(":", 1)[1])
    raise ConfigError(f"unknown classifier {choice!r} "
                      "(expected logreg | knn | external:<path>)")


def _cmd_characterize(args) -> int:
    data_dir = _data_dir(args)
    rows = ["name,stationary_fraction,stationarity,seasonal_fraction,"
            "seasonal,mean_entropy,entropy_bin"]
    for name in _select_datasets(args):
        d = load_dataset(data_dir, name)
        c = characterize_dataset(d)
        rows.append(f"{c.name},{c.stationary_fraction!r},{c.stationarity},"
                    f"{c.seasonal_fraction!r},{str(c.seasonal).lower()},"
                    f"{c.mean_entropy!r},{c.entropy_bin}")
    text = "\n".join(rows) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_evaluate(args) -> int:
    data_dir = _data_dir(args)
    os.makedirs(args.out, exist_ok=True)
    algs = ([AlgorithmId.RDP, AlgorithmId.VW, AlgorithmId.BU, AlgorithmId.OS]
            if args.algorithm == "all" else [AlgorithmId[args.algorithm.upper()]])
    results = []
    for name in _select_datasets(args):
        d = load_dataset(data_dir, name)
        clf = _make_classifier(args.classifier, d.train, args.knn_k, args.knn_metric)
        pool = stratified_sample(d.split(args.source_split), args.sample_size,
                                 args.seed, dataset_name=d.name,
                                 source_split=args.source_split)
        curves: dict[str, EvaluationCurve] = {}
        for alg in algs:
            curve = sweep(alg, clf, pool, jobs=args.jobs)
            curves[alg.value] = curve
            out = os.path.join(
                args.out, f"curve_{d.name}_{alg.value.lower()}_{clf.name}.csv")
            write_curve_csv(curve, out)
        chars = None if args.skip_characteristics else characterize_dataset(d)
        results.append(DatasetResult(d.name, len(d.classes), chars, curves))
    write_reports(results, args.out)
    return EXIT_OK


def _cmd_simplify(args) -> int:
    if not 0.0 <= args.alpha_c <= 1.0:
        raise ConfigError(f"--alpha-c must be in [0, 1], got {args.alpha_c}")
    d = load_dataset(_data_dir(args), args.dataset)
    split = d.split(args.split)
    if not 0 <= args.instance < len(split):
        raise DataError(f"instance {args.instance} out of range "
                        f"(split {args.split} has {len(split)})")
    ts = split[args.instance].series
    s = simplify(AlgorithmId[args.algorithm.upper()], ts,
                 ComplexityParam(args.alpha_c))
    json.dump(s.to_dict(), sys.stdout)
    sys.stdout.write("\n")
    return EXIT_OK


def _cmd_prototypes(args) -> int:
    d = load_dataset(_data_dir(args), args.dataset)
    protos = class_prototypes(d, args.k, args.metric, args.seed)
    payload = {
        "dataset": d.name,
        "k_per_class": args.k,
        "metric": args.metric,
        "classes": {
            str(label): [
                {"instance_id": inst.instance_id,
                 "values": [float(v) for v in inst.series.values]}
                for inst in protos.by_class[label]
            ]
            for label in sorted(protos.by_class)
        },
    }
    json.dump(payload, sys.stdout)
    sys.stdout.write("\n")
    return EXIT_OK


def _cmd_export_bundle(args) -> int:
    if not 0.0 <= args.alpha_c <= 1.0:
        raise ConfigError(f"--alpha-c must be in [0, 1], got {args.alpha_c}")
    d = load_dataset(_data_dir(args), args.dataset)
    clf = _make_classifier(args.classifier, d.train, args.knn_k, args.knn_metric)
    protos = class_prototypes(d, args.k, args.metric, args.seed)
    manifest = export_prompt_bundle(d, protos, clf,
                                    AlgorithmId[args.algorithm.upper()],
                                    args.alpha_c, args.tests, args.batch, args.out)
    json.dump(manifest, sys.stdout)
    sys.stdout.write("\n")
    return EXIT_OK


def _cmd_serve(args) -> int:
    from .server import serve
    serve(_data_dir(args), host=args.host, port=args.port, jobs=args.jobs,
          static_dir=args.static)
    return EXIT_OK


_COMMANDS = {
    "characterize": _cmd_characterize,
    "evaluate": _cmd_evaluate,
    "simplify": _cmd_simplify,
    "prototypes": _cmd_prototypes,
    "export-bundle": _cmd_export_bundle,
    "serve": _cmd_serve,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except DataError as exc:
        print(f"tssimp: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ConfigError as exc:
        print(f"tssimp: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
