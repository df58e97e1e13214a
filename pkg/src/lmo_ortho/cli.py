"""``lmo-ortho`` command line: ingest, split, train, evaluate, classify.

Exit codes: 0 success, 1 usage/config error, 2 I/O error, 3 computation failure.
"""

from __future__ import annotations

import argparse
import bz2
import gzip
import json
import logging
import os
import sys
import tempfile
from pathlib import Path

from . import __version__
from .classifiers import FORMAT_VERSION, ModelFileError, TrainingError, load_model, save_model
from .corpus import CorpusFormatError, class_distribution, load_jsonl, stratified_split, write_jsonl
from .evaluation import bulk_classify, evaluate, evaluation_document
from .pipeline import DEFAULT_EXCLUDE, feature_description, parse_features, train_model
from .wiki_ingest import (
    CONFIG_ENV_VAR,
    ConfigError,
    DumpParseError,
    borderline,
    extract_pages,
    ingest,
    load_config,
)

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_COMPUTE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _open_dump(path: Path):
    if path.suffix == ".bz2":
        return bz2.open(path, "rb")
    if path.suffix == ".gz":
        return gzip.open(path, "rb")
    return open(path, "rb")


def _read_corpus(path):
    try:
        return load_jsonl(path)
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc.strerror or exc}") from exc


def cmd_ingest(args) -> int:
    config_path = args.config or os.environ.get(CONFIG_ENV_VAR)
    try:
        tag_map, fconfig = load_config(config_path)
    except OSError as exc:
        print(f"error: cannot read config {config_path}: {exc.strerror}", file=sys.stderr)
        return EXIT_IO
    dump = Path(args.dump)
    if not dump.is_file():
        print(f"error: dump not found: {dump}", file=sys.stderr)
        return EXIT_IO
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    names = ["corpus.jsonl", "untagged.jsonl", "filter_report.txt"] + (["review.tsv"] if args.review else [])
    tmp = Path(tempfile.mkdtemp(prefix=".ingest-", dir=out))
    try:
        with _open_dump(dump) as fh:
            result = ingest(extract_pages(fh), tag_map, fconfig)
        write_jsonl(result.samples, tmp / "corpus.jsonl")
        with open(tmp / "untagged.jsonl", "w", encoding="utf-8", newline="\n") as fh:
            for line in result.untagged:
                fh.write(json.dumps({"text": line, "tag": "NO_TAG"}, ensure_ascii=False) + "\n")
        report = result.report.to_text() + f"pages: {result.n_pages}\n"
        (tmp / "filter_report.txt").write_text(report, encoding="utf-8")
        if args.review:
            with open(tmp / "review.tsv", "w", encoding="utf-8") as fh:
                for sample, why in borderline(result.samples, fconfig):
                    fh.write(f"{sample.tag.value}\t{why}\t{sample.text}\n")
        for name in names:
            os.replace(tmp / name, out / name)
    except DumpParseError as exc:
        print(f"error: {dump}: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    finally:
        for p in tmp.iterdir():
            p.unlink()
        tmp.rmdir()
    sys.stderr.write(report)
    return EXIT_OK


def _parse_ratios(text: str) -> tuple[float, float, float]:
    try:
        ratios = tuple(float(r) for r in text.split(","))
    except ValueError:
        raise UsageError(f"--ratios must be three comma-separated numbers, got {text!r}") from None
    if len(ratios) != 3 or any(r < 0 for r in ratios) or abs(sum(ratios) - 1.0) > 1e-9:
        raise UsageError(f"--ratios must be three non-negative numbers summing to 1, got {text!r}")
    return ratios


def cmd_split(args) -> int:
    ratios = _parse_ratios(args.ratios)
    samples = _read_corpus(args.input)
    if not samples:
        raise UsageError(f"{args.input} holds no samples")
    split = stratified_split(samples, ratios, args.seed)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, part in (("train", split.train), ("valid", split.valid), ("test", split.test)):
        write_jsonl(part, out / f"{name}.jsonl")
    print(f"train {len(split.train)}  valid {len(split.valid)}  test {len(split.test)}")
    print(class_distribution(samples).table())
    return EXIT_OK


def cmd_train(args) -> int:
    try:
        features = parse_features(args.features)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    train = _read_corpus(args.train)
    valid = _read_corpus(args.valid) if args.valid else []
    hyper = {}
    if args.model == "logreg":
        hyper = {"max_iter": args.max_iter or 1000, "tol": args.tol, "l2": args.l2}
    elif args.model == "svm":
        hyper = {"max_iter": args.max_iter or 4000, "tol": args.tol, "C": args.C, "hinge": args.hinge}
    elif args.model == "nb":
        hyper = {"alpha": args.alpha, "weighted": args.weighted}
    else:
        hyper = {"n_trees": args.n_trees, "seed": args.seed}
    exclude = [c for c in args.exclude.split(",") if c] if args.exclude is not None else DEFAULT_EXCLUDE
    try:
        model = train_model(
            args.model, train, features, exclude=exclude, max_features=args.max_features,
            lowercase=not args.no_lowercase, **hyper,
        )
    except TrainingError as exc:
        print(f"error: training failed: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    if valid:
        _, report = evaluate(model, valid)
        print(f"validation accuracy {100 * report.overall_accuracy:.2f}  "
              f"avg class {100 * report.avg_class_accuracy:.2f}")
    save_model(model, args.out)
    print(f"wrote {args.out} ({args.model}, {'+'.join(features)}, classes {','.join(model.classes)})")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    model = load_model(args.model)
    test = _read_corpus(args.test)
    if not test:
        raise UsageError(f"{args.test} holds no samples")
    cm, report = evaluate(model, test)
    print(report.table())
    print("\nmost frequent errors (gold -> predicted):")
    for g, p, n in cm.error_pairs()[:10]:
        print(f"  {g} -> {p}: {n}")
    if args.confusion:
        Path(args.confusion).write_text(cm.to_csv(), encoding="utf-8")
    if args.json:
        doc = evaluation_document(Path(args.model).name, feature_description(model.feature_space), report, cm)
        Path(args.json).write_text(doc + "\n", encoding="utf-8")
    return EXIT_OK


def cmd_classify(args) -> int:
    model = load_model(args.model)
    if args.input and args.input != "-":
        with open(args.input, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    else:
        lines = sys.stdin.read().splitlines()
    if args.min_confidence is not None and not 0 <= args.min_confidence <= 1:
        raise UsageError("--min-confidence must lie in [0, 1]")
    report = bulk_classify(model, lines, args.min_confidence)
    out = sys.stdout
    for text, label, conf in report.records:
        if args.jsonl:
            out.write(json.dumps({"text": text, "tag": label}, ensure_ascii=False) + "\n")
        elif args.echo:
            out.write(f"{label}\t{conf:.4f}\t{text}\n")
        else:
            out.write(f"{label}\t{conf:.4f}\n")
    print(report.summary(), file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="lmo-ortho", description="Lombard orthography corpus building and classification.")
    p.add_argument("--version", action="version",
                   version=f"lmo-ortho {__version__} (model format {FORMAT_VERSION})")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("ingest", help="build a tagged corpus from a MediaWiki XML dump")
    s.add_argument("--dump", required=True, help="pages-articles XML (.xml, .xml.bz2 or .xml.gz)")
    s.add_argument("--config", help=f"TOML config (default: ${CONFIG_ENV_VAR} or packaged defaults)")
    s.add_argument("--out", required=True, help="output directory")
    s.add_argument("--review", action="store_true", help="also write borderline kept lines to review.tsv")
    s.set_defaults(func=cmd_ingest)

    s = sub.add_parser("split", help="stratified train/valid/test split")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--out-dir", required=True)
    s.add_argument("--ratios", default="0.8,0.1,0.1")
    s.add_argument("--seed", type=int, default=42)
    s.set_defaults(func=cmd_split)

    s = sub.add_parser("train", help="fit features and a classifier")
    s.add_argument("--model", required=True, choices=["logreg", "svm", "nb", "rf"])
    s.add_argument("--features", default="byte", help="comma list of byte,char,word")
    s.add_argument("--train", required=True)
    s.add_argument("--valid")
    s.add_argument("--out", required=True)
    s.add_argument("--max-features", type=int, default=10_000)
    s.add_argument("--no-lowercase", action="store_true")
    s.add_argument("--exclude", help=f"comma list of classes left out of training (default {','.join(DEFAULT_EXCLUDE)})")
    s.add_argument("--max-iter", type=int)
    s.add_argument("--tol", type=float, default=1e-4)
    s.add_argument("--l2", type=float, default=1.0, help="logreg L2 strength")
    s.add_argument("--C", type=float, default=1.0, help="svm cost")
    s.add_argument("--hinge", choices=["squared_hinge", "hinge"], default="squared_hinge")
    s.add_argument("--alpha", type=float, default=1.0, help="nb smoothing")
    s.add_argument("--weighted", action="store_true", help="nb with balanced class weights")
    s.add_argument("--n-trees", type=int, default=100)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_train)

    s = sub.add_parser("evaluate", help="score a model on a test file")
    s.add_argument("--model", required=True)
    s.add_argument("--test", required=True)
    s.add_argument("--confusion", help="write the confusion matrix as CSV")
    s.add_argument("--json", help="write a JSON evaluation document")
    s.set_defaults(func=cmd_evaluate)

    s = sub.add_parser("classify", help="tag lines of text")
    s.add_argument("--model", required=True)
    s.add_argument("--input", help="text file, one line per sample (default stdin)")
    s.add_argument("--min-confidence", type=float)
    s.add_argument("--jsonl", action="store_true", help="emit corpus-format records")
    s.add_argument("--echo", action="store_true", help="append the input text to each record")
    s.set_defaults(func=cmd_classify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ModelFileError, CorpusFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except TrainingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
