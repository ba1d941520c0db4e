"""End-to-end experiment orchestration.

A run is split -> featurize -> train -> evaluate. Every run writes a
manifest that captures the full resolved configuration, and replaying a
manifest reproduces metrics and model files byte for byte: all randomness
flows from the single top-level seed through named streams (tree split,
per-node walks, training shuffle).
"""

from __future__ import annotations

import dataclasses
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .embeddings import (
    DEFAULT_BOW_DIM,
    EmbeddingProvider,
    HashedBowProvider,
    load_external_embeddings,
)
from .errors import ConfigError
from .evaluation import EvalReport, evaluate, split_trees
from .features import (
    AggregationStrategy,
    ConcatScheme,
    LabeledExample,
    TASKS,
    featurize_corpus,
)
from .model import SoftmaxModel, TrainConfig, save_model, train
from .tree import DiscussionTree
from .walks import DEFAULT_WALK_LENGTH, WalkConfig

MANIFEST_FORMAT = "threadwalk-manifest-v1"
_EMBEDDING_SOURCES = ("hashed-bow", "external")


@dataclass(frozen=True)
class RunConfig:
    """Everything a pipeline run depends on, JSON round-trippable."""

    task: str = "polarity"
    p: float = 0.8
    gamma: float = 0.8
    walk_length: int = DEFAULT_WALK_LENGTH
    step_cap: int | None = None
    aggregation: str = AggregationStrategy.WEIGHTED_AVERAGE.value
    scheme: str = ConcatScheme.UV_ABSDIFF.value
    embedding: str = "hashed-bow"
    bow_dim: int = DEFAULT_BOW_DIM
    bow_normalize: bool = True
    embedding_file: str | None = None
    normalize_weights: bool = True
    epochs: int = 50
    batch_size: int = 32
    learning_rate: float = 0.1
    l2: float = 1e-4
    class_weighting: bool = True
    momentum: float = 0.0
    split_fraction: float = 0.8
    seed: int = 0

    def validate(self) -> None:
        if self.task not in TASKS:
            raise ConfigError(f"task must be one of {TASKS}, got {self.task!r}")
        if not 0.0 <= self.p <= 1.0:
            raise ConfigError(f"p must be in [0, 1], got {self.p}")
        if not 0.0 <= self.gamma <= 1.0:
            raise ConfigError(f"gamma must be in [0, 1], got {self.gamma}")
        if self.walk_length < 1:
            raise ConfigError(f"walk_length must be >= 1, got {self.walk_length}")
        if self.step_cap is not None and self.step_cap < self.walk_length - 1:
            raise ConfigError(f"step_cap must be >= walk_length - 1, got {self.step_cap}")
        try:
            AggregationStrategy(self.aggregation)
        except ValueError:
            raise ConfigError(f"unknown aggregation {self.aggregation!r}") from None
        try:
            ConcatScheme(self.scheme)
        except ValueError:
            raise ConfigError(f"unknown scheme {self.scheme!r}") from None
        if self.embedding not in _EMBEDDING_SOURCES:
            raise ConfigError(f"embedding must be one of {_EMBEDDING_SOURCES}")
        if self.embedding == "external" and not self.embedding_file:
            raise ConfigError("embedding 'external' needs embedding_file")
        if self.embedding == "external" and not Path(self.embedding_file).exists():
            raise ConfigError(f"embedding file not found: {self.embedding_file}")
        if self.bow_dim < 1:
            raise ConfigError(f"bow_dim must be >= 1, got {self.bow_dim}")
        if not 0.0 < self.split_fraction < 1.0:
            raise ConfigError(f"split_fraction must be in (0, 1), got {self.split_fraction}")
        try:
            self.train_config()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def walk_config(self, seed: int | None = None) -> WalkConfig:
        return WalkConfig(
            p=self.p,
            gamma=self.gamma,
            L=self.walk_length,
            seed=self.seed if seed is None else seed,
            step_cap=self.step_cap,
        )

    def train_config(self, seed: int | None = None) -> TrainConfig:
        return TrainConfig(
            epochs=self.epochs,
            batch_size=self.batch_size,
            learning_rate=self.learning_rate,
            l2=self.l2,
            seed=self.seed if seed is None else seed,
            class_weighting=self.class_weighting,
            momentum=self.momentum,
        )

    @property
    def strategy(self) -> AggregationStrategy:
        return AggregationStrategy(self.aggregation)

    @property
    def concat_scheme(self) -> ConcatScheme:
        return ConcatScheme(self.scheme)

    def build_provider(self) -> EmbeddingProvider:
        if self.embedding == "external":
            return load_external_embeddings(self.embedding_file)
        return HashedBowProvider(self.bow_dim, normalize=self.bow_normalize)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def replace(self, **changes) -> "RunConfig":
        return dataclasses.replace(self, **changes)


@dataclass
class PipelineResult:
    report: EvalReport
    model: SoftmaxModel
    train_examples: int
    test_examples: int
    artifacts: dict[str, Path]


def featurize_split(
    trees: Sequence[DiscussionTree],
    config: RunConfig,
    provider: EmbeddingProvider,
    seed: int | None = None,
) -> list[LabeledExample]:
    """Featurize one side of a split under the run configuration."""
    return featurize_corpus(
        trees,
        provider,
        config.walk_config(seed),
        config.strategy,
        config.concat_scheme,
        config.task,
        normalize_weights=config.normalize_weights,
    )


def run_pipeline(
    trees: Sequence[DiscussionTree],
    config: RunConfig,
    outdir: str | Path | None = None,
    dump_features: bool = False,
) -> PipelineResult:
    """Execute split -> featurize -> train -> evaluate and write artifacts."""
    config.validate()
    train_trees, test_trees = split_trees(trees, config.split_fraction, config.seed)
    provider = config.build_provider()
    train_examples = featurize_split(train_trees, config, provider)
    test_examples = featurize_split(test_trees, config, provider)
    model = train(train_examples, config.train_config())
    report = evaluate(model, test_examples)

    artifacts: dict[str, Path] = {}
    if outdir is not None:
        outdir = Path(outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        artifacts["manifest"] = outdir / "manifest.json"
        write_manifest(config, artifacts["manifest"])
        artifacts["model"] = outdir / "model.txt"
        save_model(model, artifacts["model"])
        artifacts["report"] = outdir / "report.txt"
        artifacts["report"].write_text(report.to_text(), encoding="utf-8")
        artifacts["metrics"] = outdir / "metrics.json"
        metrics = {
            "report": report.to_dict(),
            "train_examples": len(train_examples),
            "test_examples": len(test_examples),
            "config": config.to_dict(),
        }
        artifacts["metrics"].write_text(
            json.dumps(metrics, sort_keys=True, indent=2) + "\n", encoding="utf-8"
        )
        if dump_features:
            artifacts["features"] = outdir / "features.jsonl"
            with artifacts["features"].open("w", encoding="utf-8") as handle:
                for ex in train_examples + test_examples:
                    handle.write(feature_dump_line(ex) + "\n")
    return PipelineResult(
        report=report,
        model=model,
        train_examples=len(train_examples),
        test_examples=len(test_examples),
        artifacts=artifacts,
    )


def feature_dump_line(example: LabeledExample) -> str:
    """One example per line, for cross-implementation diffing."""
    return json.dumps(
        {
            "tree_id": example.tree_id,
            "node_id": example.node_id,
            "label": example.label,
            "features": [float(v) for v in example.features.values],
        },
        sort_keys=True,
    )


def write_manifest(config: RunConfig, path: str | Path, extra: dict | None = None) -> None:
    payload = {"format": MANIFEST_FORMAT, "config": config.to_dict()}
    if extra:
        payload.update(extra)
    Path(path).write_text(
        json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )


def read_manifest(path: str | Path) -> tuple[RunConfig, dict]:
    """Load a manifest or bare config file; returns (config, extras)."""
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(payload, dict):
        raise ConfigError(f"{path}: expected a JSON object")
    if "config" in payload and isinstance(payload["config"], dict):
        config = RunConfig.from_dict(payload["config"])
        extras = {k: v for k, v in payload.items() if k not in ("config", "format")}
        return config, extras
    known = {f.name for f in dataclasses.fields(RunConfig)}
    extras = {k: v for k, v in payload.items() if k not in known}
    config = RunConfig.from_dict({k: v for k, v in payload.items() if k in known})
    return config, extras


# --- hyperparameter grid search ---


@dataclass(frozen=True)
class GridCell:
    """Seed-averaged metrics for one (p, gamma) pair."""

    p: float
    gamma: float
    accuracy: float
    macro_f1: float
    precision_pos: float
    recall_pos: float
    precision_macro: float
    recall_macro: float
    reports: tuple[EvalReport, ...]


@dataclass
class GridSearchResult:
    """Full Cartesian grid of seed-averaged reports."""

    p_values: tuple[float, ...]
    gamma_values: tuple[float, ...]
    seeds: tuple[int, ...]
    cells: dict[tuple[float, float], GridCell]
    best: tuple[float, float]

    def to_csv(self) -> str:
        lines = ["p,gamma,accuracy,macro_f1,precision_pos,recall_pos,precision_macro,recall_macro"]
        for key in sorted(self.cells):
            c = self.cells[key]
            lines.append(
                f"{c.p!r},{c.gamma!r},{c.accuracy!r},{c.macro_f1!r},"
                f"{c.precision_pos!r},{c.recall_pos!r},{c.precision_macro!r},{c.recall_macro!r}"
            )
        return "\n".join(lines) + "\n"


def _mean(values: list[float | None]) -> float:
    clean = [v for v in values if v is not None]
    return sum(clean) / len(clean) if clean else float("nan")


def _grid_cell(
    p: float,
    gamma: float,
    train_trees: Sequence[DiscussionTree],
    test_trees: Sequence[DiscussionTree],
    config: RunConfig,
    seeds: Sequence[int],
) -> GridCell:
    cell_config = config.replace(p=p, gamma=gamma)
    provider = cell_config.build_provider()
    reports = []
    for seed in seeds:
        train_examples = featurize_split(train_trees, cell_config, provider, seed=seed)
        test_examples = featurize_split(test_trees, cell_config, provider, seed=seed)
        model = train(train_examples, cell_config.train_config(seed=seed))
        reports.append(evaluate(model, test_examples))
    return GridCell(
        p=p,
        gamma=gamma,
        accuracy=_mean([r.accuracy for r in reports]),
        macro_f1=_mean([r.macro_f1 for r in reports]),
        precision_pos=_mean([r.precision_pos for r in reports]),
        recall_pos=_mean([r.recall_pos for r in reports]),
        precision_macro=_mean([r.macro_precision for r in reports]),
        recall_macro=_mean([r.macro_recall for r in reports]),
        reports=tuple(reports),
    )


def grid_search(
    trees: Sequence[DiscussionTree],
    task: str,
    p_values: Sequence[float],
    gamma_values: Sequence[float],
    config: RunConfig,
    seeds: Sequence[int],
    jobs: int = 1,
) -> GridSearchResult:
    """Evaluate every (p, gamma) cell, averaging metrics over the seeds.

    The tree split is fixed by ``config.seed``; each replicate reseeds
    only the walks and the training shuffle. Ties on macro-F1 break by
    higher accuracy, then lower p, then lower gamma.
    """
    if not p_values or not gamma_values or not seeds:
        raise ConfigError("p_values, gamma_values and seeds must be non-empty")
    config = config.replace(task=task)
    config.validate()
    train_trees, test_trees = split_trees(trees, config.split_fraction, config.seed)

    pairs = [(p, g) for p in p_values for g in gamma_values]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [
                pool.submit(_grid_cell, p, g, train_trees, test_trees, config, list(seeds))
                for p, g in pairs
            ]
            cells = {(c.p, c.gamma): c for c in (f.result() for f in futures)}
    else:
        cells = {}
        for p, g in pairs:
            cells[(p, g)] = _grid_cell(p, g, train_trees, test_trees, config, seeds)

    best = _select_best(cells)
    return GridSearchResult(
        p_values=tuple(p_values),
        gamma_values=tuple(gamma_values),
        seeds=tuple(seeds),
        cells=cells,
        best=best,
    )


def _select_best(cells: dict[tuple[float, float], GridCell]) -> tuple[float, float]:
    """Best cell by macro-F1; ties break by higher accuracy, then lower p,
    then lower gamma."""
    return max(
        cells,
        key=lambda key: (cells[key].macro_f1, cells[key].accuracy, -key[0], -key[1]),
    )


# --- concatenation ablation ---


@dataclass(frozen=True)
class AblationRow:
    scheme: str
    accuracy: float
    macro_f1: float
    precision_pos: float
    recall_pos: float


def ablate_concat(
    trees: Sequence[DiscussionTree],
    task: str,
    config: RunConfig,
    seeds: Sequence[int],
) -> list[AblationRow]:
    """Compare the four concatenation schemes under identical seeds."""
    if not seeds:
        raise ConfigError("seeds must be non-empty")
    config = config.replace(task=task)
    config.validate()
    train_trees, test_trees = split_trees(trees, config.split_fraction, config.seed)
    rows = []
    for scheme in ConcatScheme:
        scheme_config = config.replace(scheme=scheme.value)
        provider = scheme_config.build_provider()
        reports = []
        for seed in seeds:
            train_examples = featurize_split(train_trees, scheme_config, provider, seed=seed)
            test_examples = featurize_split(test_trees, scheme_config, provider, seed=seed)
            model = train(train_examples, scheme_config.train_config(seed=seed))
            reports.append(evaluate(model, test_examples))
        rows.append(
            AblationRow(
                scheme=scheme.value,
                accuracy=_mean([r.accuracy for r in reports]),
                macro_f1=_mean([r.macro_f1 for r in reports]),
                precision_pos=_mean([r.precision_pos for r in reports]),
                recall_pos=_mean([r.recall_pos for r in reports]),
            )
        )
    return rows


def ablation_csv(rows: Sequence[AblationRow]) -> str:
    lines = ["scheme,accuracy,macro_f1,precision_pos,recall_pos"]
    for row in rows:
        lines.append(
            f"{row.scheme},{row.accuracy!r},{row.macro_f1!r},"
            f"{row.precision_pos!r},{row.recall_pos!r}"
        )
    return "\n".join(lines) + "\n"
