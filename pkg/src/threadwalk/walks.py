"""Biased root-seeking walks over discussion trees.

From a starting comment the walk steps to the parent with probability
``p`` and to each of the ``c`` children with probability ``(1 - p) / c``,
ignoring edge directions. Revisited nodes move the walk but are dropped
from the output; the walk ends once ``L`` distinct nodes are collected,
nothing unvisited remains, or a hard step cap is hit. Position ``k`` of
the collected sequence carries discount weight ``gamma ** k`` (with the
``0 ** 0 == 1`` convention, so ``gamma = 0`` keeps only the start).

Boundary rules: at a leaf all probability mass goes to the parent; at the
root it is spread uniformly over the children, except that a ``p == 1``
walk terminates there because a deterministic walk cannot move up any
further. That makes ``p == 1`` exactly the ancestor chain for every seed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import UnknownIdError
from .seeding import derived_rng
from .tree import DiscussionTree, ancestors

DEFAULT_WALK_LENGTH = 4


@dataclass(frozen=True)
class WalkConfig:
    """Parameters of a biased root-seeking walk.

    ``L`` is the maximum number of distinct nodes including the start;
    ``step_cap`` bounds raw steps (defaults to ``10 * L``) so walks that
    oscillate among visited nodes terminate.
    """

    p: float = 1.0
    gamma: float = 1.0
    L: int = DEFAULT_WALK_LENGTH
    seed: int = 0
    step_cap: int | None = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must be in [0, 1], got {self.p}")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must be in [0, 1], got {self.gamma}")
        if self.L < 1:
            raise ValueError(f"L must be >= 1, got {self.L}")
        if self.step_cap is not None and self.step_cap < self.L - 1:
            raise ValueError(f"step_cap must be >= L - 1, got {self.step_cap}")

    @property
    def resolved_step_cap(self) -> int:
        return self.step_cap if self.step_cap is not None else 10 * self.L


@dataclass(frozen=True)
class WalkSample:
    """Ordered distinct nodes collected by one walk.

    ``raw_steps`` is the physical trajectory after the start (revisits
    included), kept so tests can replay a walk step by step.
    """

    node_ids: tuple[str, ...]
    weights: tuple[float, ...]
    raw_steps: tuple[str, ...]

    @property
    def start(self) -> str:
        return self.node_ids[0]

    def trace_record(self, tree_id: str = "") -> dict:
        return {
            "tree_id": tree_id,
            "start": self.start,
            "raw_steps": list(self.raw_steps),
            "node_ids": list(self.node_ids),
            "weights": list(self.weights),
        }

    def trace_line(self, tree_id: str = "") -> str:
        return json.dumps(self.trace_record(tree_id), sort_keys=True)


def walk_weights(length: int, gamma: float) -> list[float]:
    """Discount weights ``[gamma**0, ..., gamma**(length - 1)]``."""
    if length < 1:
        raise ValueError(f"length must be >= 1, got {length}")
    return [float(gamma) ** k for k in range(length)]


def transition_distribution(
    tree: DiscussionTree, current: str, p: float
) -> list[tuple[str, float]]:
    """Next-step distribution from ``current``: parent gets ``p``, each of
    the ``c`` children gets ``(1 - p) / c``. A leaf sends all mass to its
    parent, the root spreads all mass over its children, and an isolated
    node has an empty distribution."""
    if current not in tree:
        raise UnknownIdError(current)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p}")
    parent = tree.parent(current)
    children = tree.children(current)
    if parent is None and not children:
        return []
    if parent is None:
        share = 1.0 / len(children)
        return [(kid, share) for kid in children]
    if not children:
        return [(parent, 1.0)]
    share = (1.0 - p) / len(children)
    return [(parent, p)] + [(kid, share) for kid in children]


def sample_walk(
    tree: DiscussionTree,
    start: str,
    config: WalkConfig,
    rng: np.random.Generator,
) -> WalkSample:
    """Run one biased root-seeking walk from ``start``.

    Steps are drawn from :func:`transition_distribution` at the walk's
    current physical position. With ``p == 1`` the output is seed
    independent and equals :func:`root_seeking_walk`.
    """
    if start not in tree:
        raise UnknownIdError(start)
    collected = [start]
    visited = {start}
    raw: list[str] = []
    position = start
    steps = 0
    cap = config.resolved_step_cap
    total = len(tree)
    deterministic = config.p == 1.0

    while len(collected) < config.L and steps < cap and len(visited) < total:
        if deterministic and tree.parent(position) is None:
            break
        dist = transition_distribution(tree, position, config.p)
        if not dist:
            break
        position = _draw(dist, rng)
        raw.append(position)
        steps += 1
        if position not in visited:
            visited.add(position)
            collected.append(position)

    weights = walk_weights(len(collected), config.gamma)
    return WalkSample(tuple(collected), tuple(weights), tuple(raw))


def root_seeking_walk(
    tree: DiscussionTree, start: str, L: int, gamma: float = 1.0
) -> WalkSample:
    """Deterministic ancestor chain towards the root, truncated to ``L``."""
    if L < 1:
        raise ValueError(f"L must be >= 1, got {L}")
    if start not in tree:
        raise UnknownIdError(start)
    chain = [start] + ancestors(tree, start)
    collected = tuple(chain[:L])
    weights = tuple(walk_weights(len(collected), gamma))
    return WalkSample(collected, weights, collected[1:])


def walk_rng(seed: int, tree_id: str, node_id: str) -> np.random.Generator:
    """Per-node walk stream, independent of featurization order."""
    return derived_rng(seed, "walk", tree_id, node_id)


def _draw(dist: list[tuple[str, float]], rng: np.random.Generator) -> str:
    r = rng.random()
    acc = 0.0
    for node_id, prob in dist:
        acc += prob
        if r < acc:
            return node_id
    return dist[-1][0]
