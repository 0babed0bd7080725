"""Batch CLI: synth | embed | tsne | eval | compare.

Every command is deterministic given (config, seed): reruns emit byte-identical
CSV/JSON, and the SVG carries no timestamp unless requested. Configuration can
come from a flat ``key = value`` file; command-line flags override file values.
Exit codes: 1 usage, 2 data, 3 numeric divergence.

``KTSNE_THREADS`` caps the worker threads used by ``compare``; results do not
depend on it.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields, replace

import numpy as np

from . import embed as embed_mod
from . import metrics as metrics_mod
from .density import DbscanParams, Role
from .embed import EmbedError, FeatureMatrix
from .fileio import (
    DataFileError,
    atomic_write_text,
    read_matrix_csv,
    scatter_svg,
    write_affinity_csv,
    write_curve_csv,
    write_density_csv,
    write_embedding_csv,
    write_feature_csv,
    write_json,
)
from .seqio import ALPHABETS, FastaError, read_fasta, synth_corpus, write_fasta
from .tsne import DivergenceError, OptimizerConfig, run_pipeline

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_DIVERGED = 3

KERNELS = ("gaussian", "isolation", "mik")
INITS = ("random", "pca", "walk")
METHODS = ("spike2vec", "spaced", "pwm2vec")


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    """Resolved parameters for one CLI run; defaults < config file < flags."""

    input: str | None = None
    synth: str | None = None
    classes: int = 3
    per_class: int = 100
    length: int = 60
    mutation_rate: float = 0.05
    alphabet: str = "amino"
    allow_gaps: bool = False
    method: str = "spike2vec"
    k: int | None = None  # per-method default: 3, or 4 for spaced k-mers
    g: int = 9
    pseudocount: float = 0.1
    standardize: bool = False
    kernel: str = "gaussian"
    init: str = "random"
    perplexity: float = 30.0
    iterations: int = 1000
    learning_rate: float = 500.0
    momentum_early: float = 0.5
    momentum_late: float = 0.8
    momentum_switch: int = 250
    exaggeration: float = 1.0
    exaggeration_iters: int = 0
    epsilon: float | None = None  # None: 0.5 x median pairwise distance
    min_samples: int = 4
    psi: int = 64
    t: int = 100
    seed: int = 0
    dims: int = 2
    outdir: str = "."
    out: str | None = None
    repeats: int = 1
    dump_affinity: bool = False
    dump_density: bool = False
    svg_timestamp: bool = False
    timings: bool = False
    elbow: bool = False
    features: str | None = None
    embedding: str | None = None


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}
_OPTIONAL_FLOATS = {"epsilon"}
_OPTIONAL_INTS = {"k"}
_OPTIONAL_STRS = {"input", "synth", "out", "features", "embedding"}


def _coerce(name: str, raw: str):
    if name not in _FIELD_TYPES:
        raise UsageError(f"unknown config key '{name}'")
    if raw.lower() in {"none", ""} and name in (_OPTIONAL_FLOATS | _OPTIONAL_INTS | _OPTIONAL_STRS):
        return None
    kind = _FIELD_TYPES[name]
    if name in _OPTIONAL_FLOATS:
        return float(raw)
    if name in _OPTIONAL_INTS:
        return int(raw)
    if name in _OPTIONAL_STRS:
        return raw
    if kind == "bool":
        if raw.lower() in {"true", "1", "yes", "on"}:
            return True
        if raw.lower() in {"false", "0", "no", "off"}:
            return False
        raise UsageError(f"config key '{name}' expects a boolean, got '{raw}'")
    if kind == "int":
        return int(raw)
    if kind == "float":
        return float(raw)
    return raw


def parse_config_file(path: str) -> dict:
    if not os.path.exists(path):
        raise DataFileError("config file not found", path)
    values: dict = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{line_no}: expected 'key = value'")
            key, value = line.split("=", 1)
            values[key.strip()] = _coerce(key.strip(), value.strip())
    return values


_BOOL_FLAGS = ("standardize", "dump_affinity", "dump_density", "svg_timestamp",
               "timings", "elbow", "allow_gaps")


def resolve_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        cfg = replace(cfg, **parse_config_file(args.config))
    overrides = {
        name: getattr(args, name)
        for name in _FIELD_TYPES
        if name not in _BOOL_FLAGS and getattr(args, name, None) is not None
    }
    # store_true flags only override when actually given
    for flag in _BOOL_FLAGS:
        if getattr(args, flag, False):
            overrides[flag] = True
    return replace(cfg, **overrides)


def method_k(cfg: RunConfig, method: str | None = None) -> int:
    m = method or cfg.method
    if cfg.k is not None:
        return cfg.k
    return 4 if m == "spaced" else 3


def load_corpus(cfg: RunConfig):
    alphabet = ALPHABETS.get(cfg.alphabet)
    if alphabet is None:
        raise UsageError(f"unknown alphabet '{cfg.alphabet}' (choose amino or nucleotide)")
    if cfg.allow_gaps:
        alphabet = alphabet.with_gaps()
    if cfg.input is not None:
        if not os.path.exists(cfg.input):
            raise DataFileError("input file not found", cfg.input)
        return read_fasta(cfg.input, alphabet)
    classes, per_class = cfg.classes, cfg.per_class
    if cfg.synth is not None:
        try:
            a, b = cfg.synth.lower().split("x")
            classes, per_class = int(a), int(b)
        except ValueError as exc:
            raise UsageError(f"--synth expects CLASSESxPER_CLASS, got '{cfg.synth}'") from exc
        return synth_corpus(classes, per_class, cfg.length, cfg.mutation_rate,
                            cfg.seed, alphabet)
    raise UsageError("no input: pass --input FASTA or --synth CLASSESxPER_CLASS")


def embed_corpus(cfg: RunConfig, corpus, method: str | None = None) -> FeatureMatrix:
    m = method or cfg.method
    key = method_k(cfg, m)
    if m == "spike2vec":
        fm = embed_mod.spike2vec(corpus, k=key)
    elif m == "spaced":
        fm = embed_mod.spaced_kmers(corpus, k=key, g=cfg.g)
    elif m == "pwm2vec":
        fm = embed_mod.pwm2vec(corpus, k=key, pseudocount=cfg.pseudocount)
    else:
        raise UsageError(f"unknown embedding method '{m}'")
    if cfg.standardize:
        fm = embed_mod.standardize_columns(fm)
    return fm


def _optimizer_config(cfg: RunConfig) -> OptimizerConfig:
    return OptimizerConfig(
        iterations=cfg.iterations,
        learning_rate=cfg.learning_rate,
        momentum_early=cfg.momentum_early,
        momentum_late=cfg.momentum_late,
        momentum_switch=cfg.momentum_switch,
        exaggeration=cfg.exaggeration,
        exaggeration_iters=cfg.exaggeration_iters,
    )


def _density_params(cfg: RunConfig) -> DbscanParams | None:
    if cfg.epsilon is None:
        return None
    return DbscanParams(epsilon=cfg.epsilon, min_samples=cfg.min_samples)


def write_resolved_config(cfg: RunConfig, outdir: str) -> None:
    write_json(os.path.join(outdir, "config.resolved.json"), asdict(cfg))


def _features_for_tsne(cfg: RunConfig):
    if cfg.features is not None:
        ids, labels, values = read_matrix_csv(cfg.features)
        return ids, labels, values
    corpus = load_corpus(cfg)
    fm = embed_corpus(cfg, corpus)
    return fm.point_ids, fm.labels, fm.values


def cmd_synth(cfg: RunConfig) -> int:
    alphabet = ALPHABETS.get(cfg.alphabet)
    if alphabet is None:
        raise UsageError(f"unknown alphabet '{cfg.alphabet}' (choose amino or nucleotide)")
    classes, per_class = cfg.classes, cfg.per_class
    if cfg.synth is not None:
        try:
            a, b = cfg.synth.lower().split("x")
            classes, per_class = int(a), int(b)
        except ValueError as exc:
            raise UsageError(f"--synth expects CLASSESxPER_CLASS, got '{cfg.synth}'") from exc
    corpus = synth_corpus(classes, per_class, cfg.length, cfg.mutation_rate,
                          cfg.seed, alphabet)
    out = cfg.out or os.path.join(cfg.outdir, "synth.fasta")
    os.makedirs(os.path.dirname(os.path.abspath(out)), exist_ok=True)
    write_fasta(corpus, out)
    os.makedirs(cfg.outdir, exist_ok=True)
    write_resolved_config(cfg, cfg.outdir)
    print(f"wrote {len(corpus)} records to {out}")
    return EXIT_OK


def cmd_embed(cfg: RunConfig) -> int:
    corpus = load_corpus(cfg)
    fm = embed_corpus(cfg, corpus)
    os.makedirs(cfg.outdir, exist_ok=True)
    write_feature_csv(os.path.join(cfg.outdir, "embedding.csv"), fm)
    write_resolved_config(cfg, cfg.outdir)
    print(f"embedded {fm.n} sequences into {fm.dim} dimensions ({fm.method})")
    return EXIT_OK


def cmd_tsne(cfg: RunConfig) -> int:
    ids, labels, X = _features_for_tsne(cfg)
    n = X.shape[0]
    if cfg.kernel in ("gaussian", "mik") and not 1.0 < cfg.perplexity < n:
        raise DataFileError(f"perplexity {cfg.perplexity} invalid for n={n} points")
    result = run_pipeline(
        X,
        kernel=cfg.kernel,
        init=cfg.init,
        cfg=_optimizer_config(cfg),
        perplexity=cfg.perplexity,
        density_params=_density_params(cfg),
        psi=cfg.psi,
        t=cfg.t,
        seed=cfg.seed,
        dims=cfg.dims,
    )
    os.makedirs(cfg.outdir, exist_ok=True)
    trace = result.trace
    write_embedding_csv(os.path.join(cfg.outdir, "Y.csv"), ids, labels, trace.embedding)
    payload = {
        "config": asdict(cfg),
        "losses": [float(v) for v in trace.losses],
        "initial_loss": float(trace.losses[0]) if trace.iterations else trace.final_loss,
        "final_loss": trace.final_loss,
        "iterations": trace.iterations,
    }
    if cfg.timings:
        payload["timings"] = result.timings
        payload["wall_seconds"] = trace.wall_seconds
    write_json(os.path.join(cfg.outdir, "trace.json"), payload)
    stamp = time.strftime("%Y-%m-%dT%H:%M:%S") if cfg.svg_timestamp else None
    svg = scatter_svg(trace.embedding, labels, title=f"{cfg.kernel} / {cfg.init}",
                      timestamp=stamp)
    atomic_write_text(os.path.join(cfg.outdir, "scatter.svg"), svg)
    if cfg.dump_affinity:
        write_affinity_csv(os.path.join(cfg.outdir, "affinity.csv"),
                           result.affinity.values)
    if cfg.dump_density and result.density is not None:
        dp = result.density
        roles = [Role(int(r)).label for r in dp.roles]
        write_density_csv(os.path.join(cfg.outdir, "density.csv"),
                          ids, roles, dp.weights, dp.p)
    write_resolved_config(cfg, cfg.outdir)
    print(f"t-SNE finished: KL {payload['initial_loss']:.6f} -> {trace.final_loss:.6f}")
    return EXIT_OK


def cmd_eval(cfg: RunConfig) -> int:
    if cfg.features is None or cfg.embedding is None:
        raise UsageError("eval needs --features X.csv and --embedding Y.csv")
    x_ids, x_labels, X = read_matrix_csv(cfg.features)
    y_ids, y_labels, Y = read_matrix_csv(cfg.embedding)
    if len(x_ids) != len(y_ids):
        raise DataFileError(
            f"row count mismatch: {len(x_ids)} features vs {len(y_ids)} embeddings",
            cfg.embedding,
        )
    for i, (a, b) in enumerate(zip(x_ids, y_ids)):
        if a != b:
            raise DataFileError(
                f"id mismatch at row {i + 1}: '{a}' vs '{b}'", cfg.embedding
            )
    report = metrics_mod.metric_report(X, Y, x_labels, kmeans_seed=cfg.seed)
    os.makedirs(cfg.outdir, exist_ok=True)
    write_json(os.path.join(cfg.outdir, "metrics.json"), report.to_json_dict())
    write_curve_csv(os.path.join(cfg.outdir, "na_knn.csv"), report.na_knn_curve)
    write_curve_csv(os.path.join(cfg.outdir, "trustworthiness.csv"),
                    report.trustworthiness_curve)
    if cfg.elbow:
        wcss = {
            k: metrics_mod.kmeans(Y, k, seed=cfg.seed).wcss
            for k in range(1, min(10, Y.shape[0]) + 1)
        }
        write_curve_csv(os.path.join(cfg.outdir, "elbow.csv"), wcss)
    print(f"metrics written to {cfg.outdir}")
    return EXIT_OK


def _compare_cell(cfg: RunConfig, fm: FeatureMatrix, kernel: str, init: str):
    """One (kernel, init, embedding) cell; returns per-repeat metric dicts."""
    rows = []
    n = fm.n
    n_labels = len(set(fm.labels))
    for r in range(cfg.repeats):
        seed = cfg.seed + r
        started = time.perf_counter()
        result = run_pipeline(
            fm.values,
            kernel=kernel,
            init=init,
            cfg=_optimizer_config(cfg),
            perplexity=cfg.perplexity,
            density_params=_density_params(cfg),
            psi=cfg.psi,
            t=cfg.t,
            seed=seed,
        )
        Y = result.trace.embedding
        row = {}
        for k in (10, 50, 100):
            row[f"na@{k}"] = metrics_mod.na_knn_overlap(fm.values, Y, min(k, n - 1))
        row["tw@100"] = metrics_mod.trustworthiness(fm.values, Y, 100)
        part = metrics_mod.kmeans(Y, max(n_labels, 2), seed=seed)
        row["silhouette"] = metrics_mod.silhouette(Y, part.labels)
        row["knn_accuracy"] = metrics_mod.knn_loo_accuracy(Y, fm.labels, k=5)
        row["runtime_seconds"] = time.perf_counter() - started
        rows.append(row)
    return rows


COMPARE_METRICS = ("na@10", "na@50", "na@100", "tw@100", "silhouette",
                   "knn_accuracy", "runtime_seconds")


def cmd_compare(cfg: RunConfig) -> int:
    corpus = load_corpus(cfg)
    feature_sets = {m: embed_corpus(cfg, corpus, method=m) for m in METHODS}
    cells = [(k, i, m) for k in KERNELS for i in INITS for m in METHODS]

    def run_cell(cell):
        kernel, init, method = cell
        try:
            return _compare_cell(cfg, feature_sets[method], kernel, init), None
        except Exception as exc:  # record, let other cells proceed
            return None, f"{type(exc).__name__}: {exc}"

    threads = max(1, int(os.environ.get("KTSNE_THREADS", "1")))
    started = time.perf_counter()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(run_cell, cells))
    else:
        outcomes = [run_cell(c) for c in cells]
    total_runtime = time.perf_counter() - started

    header = ["kernel", "init", "embedding"]
    for m in COMPARE_METRICS:
        header += [m, f"{m}_std"]
    header.append("status")
    lines = [",".join(header)]
    for (kernel, init, method), (rows, err) in zip(cells, outcomes):
        record = [kernel, init, method]
        if err is not None:
            record += [""] * (2 * len(COMPARE_METRICS))
            record.append(f"error: {err.replace(',', ';')}")
        else:
            for m in COMPARE_METRICS:
                vals = np.array([row[m] for row in rows])
                record += [repr(float(vals.mean())), repr(float(vals.std()))]
            record.append("ok")
        lines.append(",".join(record))
    os.makedirs(cfg.outdir, exist_ok=True)
    atomic_write_text(os.path.join(cfg.outdir, "summary.csv"), "\n".join(lines) + "\n")
    write_resolved_config(cfg, cfg.outdir)
    print(f"compare: {len(cells)} cells x {cfg.repeats} repeat(s) "
          f"in {total_runtime:.2f}s total")
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's default 2
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat 'key = value' config file")
    p.add_argument("--seed", type=int)
    p.add_argument("--outdir")


def _add_corpus_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", help="FASTA file with >id|label headers")
    p.add_argument("--synth", help="synthetic corpus spec CLASSESxPER_CLASS, e.g. 3x100")
    p.add_argument("--classes", type=int)
    p.add_argument("--per-class", dest="per_class", type=int)
    p.add_argument("--length", type=int)
    p.add_argument("--mutation-rate", dest="mutation_rate", type=float)
    p.add_argument("--alphabet", choices=sorted(ALPHABETS))
    p.add_argument("--allow-gaps", dest="allow_gaps", action="store_true", default=False)


def _add_embed_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--method", choices=METHODS)
    p.add_argument("--k", type=int)
    p.add_argument("--g", type=int)
    p.add_argument("--pseudocount", type=float)
    p.add_argument("--standardize", action="store_true", default=False)


def _add_tsne_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--kernel", choices=KERNELS)
    p.add_argument("--init", choices=INITS)
    p.add_argument("--perplexity", type=float)
    p.add_argument("--iterations", type=int)
    p.add_argument("--learning-rate", dest="learning_rate", type=float)
    p.add_argument("--momentum-early", dest="momentum_early", type=float)
    p.add_argument("--momentum-late", dest="momentum_late", type=float)
    p.add_argument("--momentum-switch", dest="momentum_switch", type=int)
    p.add_argument("--exaggeration", type=float)
    p.add_argument("--exaggeration-iters", dest="exaggeration_iters", type=int)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--min-samples", dest="min_samples", type=int)
    p.add_argument("--psi", type=int)
    p.add_argument("--t", type=int)
    p.add_argument("--dims", type=int)


def build_parser() -> _Parser:
    parser = _Parser(prog="ktsne", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="write a synthetic labeled FASTA corpus")
    _add_common(p)
    _add_corpus_flags(p)
    p.add_argument("--out", help="output FASTA path (default OUTDIR/synth.fasta)")

    p = sub.add_parser("embed", help="embed a corpus into k-mer feature vectors")
    _add_common(p)
    _add_corpus_flags(p)
    _add_embed_flags(p)

    p = sub.add_parser("tsne", help="run the full t-SNE pipeline")
    _add_common(p)
    _add_corpus_flags(p)
    _add_embed_flags(p)
    _add_tsne_flags(p)
    p.add_argument("--features", help="precomputed embedding.csv instead of a corpus")
    p.add_argument("--dump-affinity", dest="dump_affinity", action="store_true",
                   default=False)
    p.add_argument("--dump-density", dest="dump_density", action="store_true",
                   default=False)
    p.add_argument("--svg-timestamp", dest="svg_timestamp", action="store_true",
                   default=False)
    p.add_argument("--timings", action="store_true", default=False,
                   help="include wall-clock timings in trace.json")

    p = sub.add_parser("eval", help="score an embedding against its features")
    _add_common(p)
    p.add_argument("--features", help="feature CSV (id,label,f0,...)")
    p.add_argument("--embedding", help="embedding CSV (id,label,y0,y1)")
    p.add_argument("--elbow", action="store_true", default=False,
                   help="also write a k-means elbow scan")

    p = sub.add_parser("compare", help="kernel x init x embedding cross-product")
    _add_common(p)
    _add_corpus_flags(p)
    _add_embed_flags(p)
    _add_tsne_flags(p)
    p.add_argument("--repeats", type=int)

    return parser


COMMANDS = {
    "synth": cmd_synth,
    "embed": cmd_embed,
    "tsne": cmd_tsne,
    "eval": cmd_eval,
    "compare": cmd_compare,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command](cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except (FastaError, EmbedError, DataFileError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
