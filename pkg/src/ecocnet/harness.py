"""Command-line harness: code generation, training, evaluation, comparison.

Subcommands::

    codegen --method {onevsall,onevsone,exhaustive,dense,sparse,bch} --classes C
            [--length b] [--seed s] --out FILE
    train   --config FILE --out BUNDLE
    eval    --bundle BUNDLE --data SRC [--threshold T] --report FILE
    compare --config FILE --report FILE

Exit status is 0 on success, 1 on usage errors, 2 on data errors and 3 on
numerical failures; failures print one ``error: <category>: <detail>`` line
to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import codebook, evaluator, features, network
from .codebook import CodeMatrix
from .dataset import Dataset, SyntheticSpec, generate_synthetic, load_csv, load_image_dir
from .errors import EcocError, InvalidDimension, ParseError, UsageError

log = logging.getLogger(__name__)

BUNDLE_FORMAT_VERSION = 1
DEFAULT_COLUMNS = ("G2/P9", "G4/P7", "G6/P5", "G8/P3")
DEFAULT_THRESHOLD = 25.0
DEFAULT_PCA_K = 30


class ConfigError(UsageError):
    category = "invalid-config"


# ---------------------------------------------------------------------------
# configuration


@dataclass
class ExperimentConfig:
    dataset: dict = field(default_factory=lambda: {"synthetic": {}})
    pca_k: Optional[int] = DEFAULT_PCA_K
    code: dict = field(default_factory=lambda: {"method": "bch", "length": 31})
    hidden_dim: int = 30
    train: network.TrainConfig = field(default_factory=network.TrainConfig)
    split: evaluator.SplitSpec = field(default_factory=lambda: evaluator.SplitSpec(6, 5))
    threshold: float = DEFAULT_THRESHOLD
    columns: tuple = DEFAULT_COLUMNS
    base_dir: Path = Path(".")

    @classmethod
    def from_dict(cls, raw: dict, base_dir=".") -> ExperimentConfig:
        known = {"dataset", "pca_k", "code", "hidden_dim", "train", "split", "threshold", "columns"}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            cfg = cls(base_dir=Path(base_dir))
            if "dataset" in raw:
                cfg.dataset = dict(raw["dataset"])
            if "pca_k" in raw:
                cfg.pca_k = None if raw["pca_k"] is None else int(raw["pca_k"])
            if "code" in raw:
                cfg.code = dict(raw["code"])
            cfg.hidden_dim = int(raw.get("hidden_dim", cfg.hidden_dim))
            cfg.train = network.TrainConfig(**raw.get("train", {}))
            if "split" in raw:
                cfg.split = evaluator.SplitSpec(**raw["split"])
            cfg.threshold = float(raw.get("threshold", cfg.threshold))
            cfg.columns = tuple(raw.get("columns", cfg.columns))
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from None
        if len(cfg.dataset) != 1 or next(iter(cfg.dataset)) not in ("synthetic", "csv", "images"):
            raise ConfigError("dataset must have exactly one of 'synthetic', 'csv', 'images'")
        if not 0.0 <= cfg.threshold <= 100.0:
            raise ConfigError("threshold must be within [0, 100]")
        for col in cfg.columns:
            parse_column(col)
        return cfg

    @classmethod
    def load(cls, path) -> ExperimentConfig:
        path = Path(path)
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError(f"{path}: top level must be a JSON object")
        return cls.from_dict(raw, base_dir=path.parent)

    def resolve(self, p) -> Path:
        p = Path(p)
        return p if p.is_absolute() else self.base_dir / p


def parse_column(name: str) -> tuple[int, int]:
    """``'G6/P5'`` -> ``(6, 5)``."""
    try:
        g, p = name.upper().split("/")
        if g[0] != "G" or p[0] != "P":
            raise ValueError
        return int(g[1:]), int(p[1:])
    except (ValueError, IndexError):
        raise ConfigError(f"bad Gm/Pn column {name!r}") from None


def load_dataset(cfg: ExperimentConfig) -> Dataset:
    kind, value = next(iter(cfg.dataset.items()))
    if kind == "synthetic":
        try:
            return generate_synthetic(SyntheticSpec(**(value or {})))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"synthetic: {exc}") from None
    if kind == "csv":
        return load_csv(cfg.resolve(value))
    return load_image_dir(cfg.resolve(value))


def build_matrix(code: dict, class_count: int, base_dir=Path(".")) -> CodeMatrix:
    """Code matrix from ``{"file": path}`` or ``{"method": name, ...params}``."""
    if "file" in code:
        path = Path(code["file"])
        matrix = codebook.load(path if path.is_absolute() else Path(base_dir) / path)
        codebook.validate(matrix)
        if matrix.class_count != class_count:
            raise ConfigError(f"code matrix has {matrix.class_count} rows, data has {class_count} classes")
        return matrix
    params = dict(code)
    method = params.pop("method", None)
    classes = int(params.pop("classes", class_count))
    if classes != class_count:
        raise ConfigError(f"code spec is for {classes} classes, data has {class_count}")
    return generate(method, classes, **params)


def generate(method, classes, length=None, seed=0, trials=100) -> CodeMatrix:
    if method not in codebook.GENERATORS:
        raise ConfigError(f"unknown code method {method!r}")
    if method in ("onevsall", "onevsone", "exhaustive"):
        return codebook.GENERATORS[method](classes)
    if method == "bch":
        return codebook.bch(classes, 31 if length is None else int(length))
    default = codebook.DEFAULT_DENSE_LENGTH if method == "dense" else codebook.DEFAULT_SPARSE_LENGTH
    return codebook.GENERATORS[method](classes, default if length is None else int(length),
                                       seed=int(seed), trials=int(trials))


# ---------------------------------------------------------------------------
# model bundle


@dataclass
class ModelBundle:
    matrix: CodeMatrix
    net: network.Mlp
    pca: Optional[features.PcaModel] = None

    def transform(self, x):
        return x if self.pca is None else features.pca_project(self.pca, x)

    def outputs(self, x):
        return network.forward(self.net, self.transform(x))


def save_bundle(bundle: ModelBundle, path) -> None:
    arrays = {
        "format_version": np.array(BUNDLE_FORMAT_VERSION),
        "code_matrix": np.array(codebook.serialize(bundle.matrix)),
        "hidden_weights": bundle.net.hidden_weights,
        "output_weights": bundle.net.output_weights,
    }
    if bundle.pca is not None:
        arrays.update(pca_mean=bundle.pca.mean, pca_components=bundle.pca.components,
                      pca_eigenvalues=bundle.pca.eigenvalues)
    with open(path, "wb") as fh:
        np.savez(fh, **arrays)


def load_bundle(path) -> ModelBundle:
    try:
        with np.load(path, allow_pickle=False) as z:
            version = int(z["format_version"])
            if version != BUNDLE_FORMAT_VERSION:
                raise ParseError(f"{path}: unsupported bundle version {version}")
            matrix = codebook.deserialize(str(z["code_matrix"]))
            net = network.Mlp(z["hidden_weights"], z["output_weights"])
            pca = None
            if "pca_mean" in z.files:
                pca = features.PcaModel(z["pca_mean"], z["pca_components"], z["pca_eigenvalues"])
    except (OSError, KeyError, ValueError) as exc:
        if isinstance(exc, EcocError):
            raise
        raise ParseError(f"{path}: {exc}") from None
    if net.output_dim != matrix.code_length:
        raise ParseError(f"{path}: network has {net.output_dim} outputs, code length {matrix.code_length}")
    return ModelBundle(matrix, net, pca)


# ---------------------------------------------------------------------------
# reports


def _fmt(value):
    return "n/a" if value is None else f"{value:.2f}"


def text_table(header, rows) -> str:
    """Tab-free, space-aligned table; first column left-aligned, the rest right-aligned."""
    cells = [list(header)] + [[r[0]] + [_fmt(v) if not isinstance(v, str) else v for v in r[1:]]
                              for r in rows]
    widths = [max(len(row[j]) for row in cells) for j in range(len(header))]
    lines = []
    for row in cells:
        parts = [row[0].ljust(widths[0])] + [c.rjust(w) for c, w in zip(row[1:], widths[1:])]
        lines.append("  ".join(parts).rstrip())
    return "\n".join(lines) + "\n"


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for r in rows:
        writer.writerow([r[0]] + [("" if v is None else repr(float(v))) for v in r[1:]])
    return buf.getvalue()


def _write(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


# ---------------------------------------------------------------------------
# subcommands


def cmd_codegen(args) -> int:
    matrix = generate(args.method, args.classes, args.length, args.seed, args.trials)
    codebook.validate(matrix)
    analysis = codebook.analyze(matrix)
    codebook.save(matrix, args.out)
    summary = {
        "method": args.method,
        "classes": matrix.class_count,
        "length": matrix.code_length,
        "min_row_distance": analysis.min_row_distance,
        "correcting_capability": analysis.correcting_capability,
    }
    _write(f"{args.out}.analysis.json", json.dumps(summary, indent=2) + "\n")
    print(f"{matrix.class_count}x{matrix.code_length} d={analysis.min_row_distance} "
          f"t={analysis.correcting_capability}")
    return 0


def train_bundle(cfg: ExperimentConfig, data: Dataset) -> tuple[ModelBundle, network.TrainTrace]:
    """Fit PCA (if configured) and a network on the whole dataset."""
    matrix = build_matrix(cfg.code, data.class_count, cfg.base_dir)
    x, pca = data.features, None
    k = evaluator.effective_pca_k(cfg.pca_k, len(data), data.dim)
    if k is not None:
        pca = features.pca_fit(x, k)
        x = features.pca_project(pca, x)
    net = network.init(x.shape[1], cfg.hidden_dim, matrix.code_length,
                       seed=evaluator.derived_seed(cfg.train.seed, 0, 1),
                       init_scale=cfg.train.init_scale)
    net, trace = network.train(net, x, codebook.encode_labels(data.labels, matrix), cfg.train)
    return ModelBundle(matrix, net, pca), trace


def trace_csv(trace: network.TrainTrace) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["epoch", "cost_standard", "cost_weighted"])
    for epoch, (e, eb) in enumerate(zip(trace.standard, trace.weighted)):
        writer.writerow([epoch, repr(e), repr(eb)])
    return buf.getvalue()


def trace_path(bundle_path) -> Path:
    return Path(f"{bundle_path}.trace.csv")


def cmd_train(args) -> int:
    cfg = ExperimentConfig.load(args.config)
    data = load_dataset(cfg)
    bundle, trace = train_bundle(cfg, data)
    save_bundle(bundle, args.out)
    _write(trace_path(args.out), trace_csv(trace))
    print(f"trained {len(trace)} epochs: E={trace.standard[-1]:.6g} Ebar={trace.weighted[-1]:.6g}")
    return 0


def _load_eval_source(src) -> Dataset:
    src = Path(src)
    if src.suffix == ".json":
        cfg = ExperimentConfig.load(src)
        return load_dataset(cfg)
    if src.is_dir():
        return load_image_dir(src)
    return load_csv(src)


REPORT_HEADER = ("metric", "value")


def cmd_eval(args) -> int:
    bundle = load_bundle(args.bundle)
    data = _load_eval_source(args.data)
    if data.class_count > bundle.matrix.class_count:
        raise InvalidDimension(
            f"data has {data.class_count} classes, bundle codes {bundle.matrix.class_count}"
        )
    x = bundle.transform(data.features)
    targets = codebook.encode_labels(data.labels, bundle.matrix)
    result = evaluator.score_outputs(network.forward(bundle.net, x), data.labels,
                                     bundle.matrix, args.threshold)
    rows = [
        ("recognition_rate", result.recognition_rate),
        ("error_rate", result.error_rate),
        ("rejection_rate", result.rejection_rate),
        ("reliability", result.reliability),
        ("threshold", float(args.threshold)),
        ("sample_count", float(result.sample_count)),
        ("cost_standard", network.cost_standard(bundle.net, x, targets)),
        ("cost_weighted", network.cost_weighted(bundle.net, x, targets)),
    ]
    _write(args.report, csv_text(REPORT_HEADER, rows))
    sys.stdout.write(text_table(("metric", "value (%)"), rows[:4]))
    return 0


def compare_rows(cfg: ExperimentConfig, data: Dataset, workers: int = 1):
    """Table rows for standard vs. weighted BP across the configured Gm/Pn columns.

    Both variants share splits, initial weights and shuffling seeds. Accuracy
    rows use no rejection; the last two rows give the weighted network's
    reliability and rejection rate at the configured robustness threshold.
    """
    matrix = build_matrix(cfg.code, data.class_count, cfg.base_dir)
    acc = {v: [] for v in network.CostVariant}
    reliability, rejection = [], []
    for col in cfg.columns:
        m, n = parse_column(col)
        spec = evaluator.SplitSpec(m, n, cfg.split.split_count, cfg.split.seed)
        for variant in network.CostVariant:
            train_cfg = network.TrainConfig(**{**asdict(cfg.train), "cost_variant": variant})
            outs = evaluator.experiment_outputs(data, matrix, train_cfg, spec,
                                                cfg.hidden_dim, cfg.pca_k, workers)
            acc[variant].append(evaluator.report_from_outputs(outs, matrix, 0.0).recognition_rate)
            if variant is network.CostVariant.WEIGHTED:
                rep = evaluator.report_from_outputs(outs, matrix, cfg.threshold)
                reliability.append(rep.reliability)
                rejection.append(rep.rejection_rate)
    t = f"{cfg.threshold:g}%"
    return [
        ("Standard BP", *acc[network.CostVariant.STANDARD]),
        ("Proposed method", *acc[network.CostVariant.WEIGHTED]),
        (f"Reliability (RR >= {t})", *reliability),
        (f"Rejection (RR >= {t})", *rejection),
    ]


def cmd_compare(args) -> int:
    cfg = ExperimentConfig.load(args.config)
    data = load_dataset(cfg)
    rows = compare_rows(cfg, data, workers=args.workers)
    header = ("Method", *cfg.columns)
    _write(args.report, csv_text(header, rows))
    table = text_table(header, rows)
    _write(Path(args.report).with_suffix(".txt"), table)
    sys.stdout.write(table)
    return 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: usage-error: {message}\n")
        sys.exit(1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ecocnet", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("codegen", help="generate a code matrix")
    p.add_argument("--method", required=True, choices=sorted(codebook.GENERATORS))
    p.add_argument("--classes", required=True, type=int)
    p.add_argument("--length", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_codegen)

    p = sub.add_parser("train", help="train a model bundle on a dataset")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a model bundle")
    p.add_argument("--bundle", required=True)
    p.add_argument("--data", required=True, help="CSV file, image directory or JSON config")
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    p.add_argument("--report", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("compare", help="standard vs. weighted BP over Gm/Pn splits")
    p.add_argument("--config", required=True)
    p.add_argument("--report", required=True)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except EcocError as exc:
        sys.stderr.write(f"error: {exc.category}: {exc}\n")
        return exc.exit_code
    except ValueError as exc:
        sys.stderr.write(f"error: usage-error: {exc}\n")
        return 1
    except OSError as exc:
        sys.stderr.write(f"error: io-error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
