"""Synthetic labeled discussion corpora.

Stands in for unavailable production datasets. Tree shapes come from a
preferential-attachment reply process (heavy-tailed thread sizes); texts
are filler tokens plus planted signal tokens. The central knob is
``context_signal``: that fraction of labels is decodable only from a
token planted on an ancestor (the parent for the hate task, the
grandparent for polarity, so the signal sits outside the baseline's
input), while the node's own text stays label-neutral. The rest of the
labels are decodable from a token in the node's own text.

Concretely, every node is independently "hot" with the positive-class
probability and hot nodes carry a depth-tagged plant token; a
context-borne node is positive exactly when its designated ancestor is
hot. Depth tags cycle fast enough that the token deciding a node's label
never appears in that node's own text.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidSpecError
from .features import HATE_TASK, POLARITY_TASK, TASKS
from .tree import CommentNode, DiscussionTree, build_tree

PLANT_PREFIX = "kcx"
SELF_POS_TOKEN = "ksp"
SELF_NEG_TOKEN = "ksn"
_SIGNAL_REPEATS = 3
_ANCESTOR_DISTANCE = {HATE_TASK: 1, POLARITY_TASK: 2}
POSITIVE_LABEL = {HATE_TASK: "hate", POLARITY_TASK: "support"}
NEGATIVE_LABEL = {HATE_TASK: "non-hate", POLARITY_TASK: "attack"}


@dataclass(frozen=True)
class CorpusSpec:
    """Knobs of the generator; identical spec and seed give identical files."""

    num_trees: int = 200
    mean_tree_size: float = 12.0
    size_dispersion: float = 0.8
    branching: float = 1.0
    positive_fraction: float = 0.5
    context_signal: float = 0.5
    vocabulary_size: int = 200
    seed: int = 0
    task: str = HATE_TASK

    def __post_init__(self) -> None:
        if self.num_trees < 1:
            raise InvalidSpecError(f"num_trees must be >= 1, got {self.num_trees}")
        if self.mean_tree_size < 1:
            raise InvalidSpecError(f"mean_tree_size must be >= 1, got {self.mean_tree_size}")
        if self.size_dispersion < 0:
            raise InvalidSpecError(f"size_dispersion must be >= 0, got {self.size_dispersion}")
        if self.branching <= 0:
            raise InvalidSpecError(f"branching must be > 0, got {self.branching}")
        for name in ("positive_fraction", "context_signal"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise InvalidSpecError(f"{name} must be in [0, 1], got {value}")
        if self.vocabulary_size < 1:
            raise InvalidSpecError(f"vocabulary_size must be >= 1, got {self.vocabulary_size}")
        if self.task not in TASKS:
            raise InvalidSpecError(f"task must be one of {TASKS}, got {self.task!r}")


@dataclass(frozen=True)
class NodeProvenance:
    """Ground truth about how a node's label was planted."""

    source: str  # "context" or "self"
    ancestor_id: str | None
    plant_token: str | None


@dataclass
class GeneratedCorpus:
    """Trees plus the ground-truth provenance used by tests."""

    trees: list[DiscussionTree]
    provenance: dict[str, NodeProvenance] = field(default_factory=dict)
    spec: CorpusSpec | None = None

    @property
    def labeled_nodes(self) -> int:
        return len(self.provenance)

    def positive_fraction_realized(self) -> float:
        positive = POSITIVE_LABEL[self.spec.task]
        total = hits = 0
        for tree in self.trees:
            for node in tree:
                if node.label is None:
                    continue
                total += 1
                hits += node.label == positive
        return hits / total if total else 0.0

    def context_fraction_realized(self) -> float:
        if not self.provenance:
            return 0.0
        borne = sum(1 for p in self.provenance.values() if p.source == "context")
        return borne / len(self.provenance)


def plant_token(depth: int, task: str) -> str:
    """Plant token carried by a hot node at the given depth.

    The depth tag cycles with period (ancestor distance + 1), so the
    token deciding a node's label is never the one in its own text.
    """
    cycle = _ANCESTOR_DISTANCE[task] + 1
    return f"{PLANT_PREFIX}{depth % cycle}"


def generate(spec: CorpusSpec) -> GeneratedCorpus:
    """Generate a labeled corpus; deterministic per spec and seed."""
    rng = np.random.default_rng(spec.seed)
    positive = POSITIVE_LABEL[spec.task]
    negative = NEGATIVE_LABEL[spec.task]
    distance = _ANCESTOR_DISTANCE[spec.task]

    trees: list[DiscussionTree] = []
    provenance: dict[str, NodeProvenance] = {}
    digits = max(5, len(str(spec.num_trees)))

    for t in range(spec.num_trees):
        tree_id = f"t{t:0{digits}d}"
        size = _draw_size(spec, rng)
        parents = _tree_shape(size, spec.branching, rng)
        depths = [0] * size
        for i in range(1, size):
            depths[i] = depths[parents[i]] + 1

        hot = rng.random(size) < spec.positive_fraction
        node_ids = [f"{tree_id}n{i:05d}" for i in range(size)]

        texts = []
        for i in range(size):
            n_filler = int(rng.integers(4, 9))
            tokens = [f"w{int(k)}" for k in rng.integers(0, spec.vocabulary_size, n_filler)]
            if hot[i]:
                tokens += [plant_token(depths[i], spec.task)] * _SIGNAL_REPEATS
            texts.append(tokens)

        labels: list[str | None] = [None] * size
        for i in range(size):
            if spec.task == POLARITY_TASK and i == 0:
                continue
            ancestor = i
            for _ in range(distance):
                ancestor = parents[ancestor] if ancestor is not None else None
                if ancestor is None:
                    break
            context_borne = ancestor is not None and rng.random() < spec.context_signal
            if context_borne:
                is_positive = bool(hot[ancestor])
                provenance[node_ids[i]] = NodeProvenance(
                    source="context",
                    ancestor_id=node_ids[ancestor],
                    plant_token=plant_token(depths[ancestor], spec.task),
                )
            else:
                is_positive = bool(rng.random() < spec.positive_fraction)
                texts[i] += [SELF_POS_TOKEN if is_positive else SELF_NEG_TOKEN] * _SIGNAL_REPEATS
                provenance[node_ids[i]] = NodeProvenance(
                    source="self", ancestor_id=None, plant_token=None
                )
            labels[i] = positive if is_positive else negative

        records = [
            CommentNode(
                id=node_ids[i],
                parent_id=None if parents[i] is None else node_ids[parents[i]],
                text=" ".join(texts[i]),
                label=labels[i],
            )
            for i in range(size)
        ]
        trees.append(build_tree(records, tree_id=tree_id))

    return GeneratedCorpus(trees=trees, provenance=provenance, spec=spec)


def _draw_size(spec: CorpusSpec, rng: np.random.Generator) -> int:
    if spec.size_dispersion == 0:
        return max(1, int(round(spec.mean_tree_size)))
    sigma = spec.size_dispersion
    mu = float(np.log(spec.mean_tree_size)) - 0.5 * sigma * sigma
    return max(1, int(rng.lognormal(mu, sigma) + 0.5))


def _tree_shape(size: int, branching: float, rng: np.random.Generator) -> list[int | None]:
    """Reply targets via preferential attachment with smoothing."""
    parents: list[int | None] = [None]
    weight = [branching]
    for i in range(1, size):
        w = np.asarray(weight)
        parent = int(rng.choice(i, p=w / w.sum()))
        parents.append(parent)
        weight[parent] += 1.0
        weight.append(branching)
    return parents
