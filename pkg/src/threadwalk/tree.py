"""Discussion trees: validated single-rooted reply structures.

A discussion is a tree of comments. Exactly one comment (the root) replies
to nothing; every other comment replies to exactly one existing comment.
Trees are immutable after construction, so concurrent read-only traversal
from multiple workers is safe.
"""

from __future__ import annotations

import warnings
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import (
    CycleDetectedError,
    DanglingParentError,
    DuplicateIdError,
    MissingPolarityLabelError,
    MultipleRootsError,
    NoRootError,
    UnknownIdError,
)

SUPPORT = "support"
ATTACK = "attack"
POLARITY_LABELS = (SUPPORT, ATTACK)


@dataclass(frozen=True)
class CommentNode:
    """One comment record: an id, an optional parent and a task label.

    The label is task dependent: for polarity it describes the edge to the
    parent (support/attack), for hate detection it describes the node
    itself (hate/non-hate).
    """

    id: str
    parent_id: str | None
    text: str
    label: str | None = None


@dataclass(frozen=True)
class BipolarFramework:
    """Arguments with disjoint attack and support relations."""

    arguments: frozenset[str]
    attacks: frozenset[tuple[str, str]]
    supports: frozenset[tuple[str, str]]

    def is_conflict_free(self, subset: Iterable[str]) -> bool:
        """True when no argument in ``subset`` attacks another one in it."""
        members = set(subset)
        unknown = members - self.arguments
        if unknown:
            raise UnknownIdError(f"not arguments of this framework: {sorted(unknown)}")
        return all(not (a in members and b in members) for a, b in self.attacks)


@dataclass(frozen=True)
class TreeStats:
    """Exact per-tree counts."""

    nodes: int
    depth: int
    label_counts: dict[str, int]
    attacks: int
    supports: int
    support_fraction: float | None


class DiscussionTree:
    """A validated reply tree. Build instances through :func:`build_tree`.

    Children keep the order in which their records were supplied, which
    makes seeded walks reproducible.
    """

    def __init__(
        self,
        nodes: dict[str, CommentNode],
        root_id: str,
        children_index: dict[str, tuple[str, ...]],
        tree_id: str = "",
    ) -> None:
        self._nodes = nodes
        self._children = children_index
        self.root_id = root_id
        self.tree_id = tree_id

    def __len__(self) -> int:
        return len(self._nodes)

    def __contains__(self, node_id: str) -> bool:
        return node_id in self._nodes

    def __iter__(self) -> Iterator[CommentNode]:
        return iter(self._nodes.values())

    def node(self, node_id: str) -> CommentNode:
        try:
            return self._nodes[node_id]
        except KeyError:
            raise UnknownIdError(node_id) from None

    def node_ids(self) -> tuple[str, ...]:
        return tuple(self._nodes)

    def parent(self, node_id: str) -> str | None:
        return self.node(node_id).parent_id

    def children(self, node_id: str) -> tuple[str, ...]:
        if node_id not in self._nodes:
            raise UnknownIdError(node_id)
        return self._children.get(node_id, ())


def build_tree(records: Sequence[CommentNode], tree_id: str = "") -> DiscussionTree:
    """Assemble and validate a discussion tree from flat comment records.

    Raises:
        NoRootError: empty input or no parentless record.
        DuplicateIdError, DanglingParentError, MultipleRootsError: shape
            violations.
        CycleDetectedError: the parent relation loops (self-reference or
            a longer cycle).
    """
    if not records:
        raise NoRootError("cannot build a tree from zero records")

    nodes: dict[str, CommentNode] = {}
    for rec in records:
        if not rec.id:
            raise ValueError("comment ids must be non-empty")
        if rec.id in nodes:
            raise DuplicateIdError(f"duplicate comment id {rec.id!r}")
        if rec.parent_id == rec.id:
            raise CycleDetectedError(f"comment {rec.id!r} replies to itself")
        nodes[rec.id] = rec

    roots = [r.id for r in records if r.parent_id is None]
    for rec in records:
        if rec.parent_id is not None and rec.parent_id not in nodes:
            raise DanglingParentError(
                f"comment {rec.id!r} replies to unknown id {rec.parent_id!r}"
            )

    _check_acyclic(nodes)

    if not roots:
        raise NoRootError("every record has a parent; no root found")
    if len(roots) > 1:
        raise MultipleRootsError(f"multiple parentless records: {roots}")

    children: dict[str, list[str]] = {}
    for rec in records:
        if rec.parent_id is not None:
            children.setdefault(rec.parent_id, []).append(rec.id)

    empty = sum(1 for rec in records if not rec.text)
    if empty:
        warnings.warn(
            f"{empty} comment(s) with empty text kept in tree {tree_id or roots[0]!r}",
            stacklevel=2,
        )

    index = {pid: tuple(kids) for pid, kids in children.items()}
    return DiscussionTree(nodes, roots[0], index, tree_id=tree_id)


def _check_acyclic(nodes: dict[str, CommentNode]) -> None:
    # Follow parent pointers with memoisation; a chain that re-enters
    # itself before reaching a known-good node is a cycle.
    done: set[str] = set()
    for start in nodes:
        chain: list[str] = []
        on_chain: set[str] = set()
        cur: str | None = start
        while cur is not None and cur not in done:
            if cur in on_chain:
                raise CycleDetectedError(f"reply cycle through {cur!r}")
            chain.append(cur)
            on_chain.add(cur)
            cur = nodes[cur].parent_id
        done.update(chain)


def ancestors(tree: DiscussionTree, node_id: str) -> list[str]:
    """Chain [parent, grandparent, ..., root]; empty for the root."""
    chain: list[str] = []
    cur = tree.parent(node_id)
    while cur is not None:
        chain.append(cur)
        cur = tree.parent(cur)
    return chain


def to_baf(tree: DiscussionTree) -> BipolarFramework:
    """Export the tree as a bipolar argumentation framework.

    Every reply edge (child, parent) lands in the attack or support
    relation according to the child's polarity label; the relations are
    disjoint by construction.
    """
    attacks: set[tuple[str, str]] = set()
    supports: set[tuple[str, str]] = set()
    for node in tree:
        if node.id == tree.root_id:
            continue
        if node.label == ATTACK:
            attacks.add((node.id, node.parent_id))
        elif node.label == SUPPORT:
            supports.add((node.id, node.parent_id))
        else:
            raise MissingPolarityLabelError(
                f"node {node.id!r} has no support/attack label (got {node.label!r})"
            )
    return BipolarFramework(
        arguments=frozenset(tree.node_ids()),
        attacks=frozenset(attacks),
        supports=frozenset(supports),
    )


def tree_stats(tree: DiscussionTree) -> TreeStats:
    """Exact node, depth and label counts for one tree.

    The support fraction is reported as ``None`` when no edge carries a
    polarity label.
    """
    label_counts: dict[str, int] = {}
    n_attack = 0
    n_support = 0
    for node in tree:
        if node.label is not None:
            label_counts[node.label] = label_counts.get(node.label, 0) + 1
        if node.id == tree.root_id:
            continue
        if node.label == ATTACK:
            n_attack += 1
        elif node.label == SUPPORT:
            n_support += 1

    depth = 0
    queue = deque([(tree.root_id, 0)])
    while queue:
        nid, d = queue.popleft()
        depth = max(depth, d)
        for kid in tree.children(nid):
            queue.append((kid, d + 1))

    labeled_edges = n_attack + n_support
    fraction = n_support / labeled_edges if labeled_edges else None
    return TreeStats(
        nodes=len(tree),
        depth=depth,
        label_counts=label_counts,
        attacks=n_attack,
        supports=n_support,
        support_fraction=fraction,
    )
