"""Shared fixtures: small reference trees and random-tree helpers."""

from __future__ import annotations

import numpy as np
import pytest

from threadwalk import CommentNode, DiscussionTree, build_tree


@pytest.fixture
def fan_tree() -> DiscussionTree:
    """Root a0, child a1, and three replies a2/a3/a4 under a1."""
    return build_tree(
        [
            CommentNode("a0", None, "thesis"),
            CommentNode("a1", "a0", "first reply"),
            CommentNode("a2", "a1", "reply one"),
            CommentNode("a3", "a1", "reply two"),
            CommentNode("a4", "a1", "reply three"),
        ],
        tree_id="fan",
    )


@pytest.fixture
def forked_tree() -> DiscussionTree:
    """Root a0, child a1, replies a2/a3 under a1, and a4 under a2."""
    return build_tree(
        [
            CommentNode("a0", None, "thesis"),
            CommentNode("a1", "a0", "first reply"),
            CommentNode("a2", "a1", "reply one"),
            CommentNode("a3", "a1", "reply two"),
            CommentNode("a4", "a2", "deep reply"),
        ],
        tree_id="forked",
    )


@pytest.fixture
def debate_tree() -> DiscussionTree:
    """Four-argument chain: b attacks a, c supports b, d attacks c."""
    return build_tree(
        [
            CommentNode("a", None, "all humans should change their diet"),
            CommentNode("b", "a", "that diet is too restrictive", label="attack"),
            CommentNode("c", "b", "it often needs supplements", label="support"),
            CommentNode("d", "c", "research found no deficiencies", label="attack"),
        ],
        tree_id="debate",
    )


def make_chain(depth: int, tree_id: str = "chain") -> DiscussionTree:
    """A path of depth + 1 nodes: n0 <- n1 <- ... <- n<depth>."""
    records = [CommentNode("n0", None, "root")]
    records += [
        CommentNode(f"n{i}", f"n{i - 1}", f"comment {i}") for i in range(1, depth + 1)
    ]
    return build_tree(records, tree_id=tree_id)


def random_records(
    rng: np.random.Generator, size: int, label_choices: tuple[str, ...] | None = None
) -> list[CommentNode]:
    """Uniform random recursive tree as flat records (node i replies to < i)."""
    records = [CommentNode("m0000", None, "root text")]
    for i in range(1, size):
        parent = int(rng.integers(0, i))
        label = None
        if label_choices is not None:
            label = str(rng.choice(label_choices))
        records.append(
            CommentNode(f"m{i:04d}", f"m{parent:04d}", f"text {i}", label=label)
        )
    return records


def random_tree(
    rng: np.random.Generator,
    size: int,
    tree_id: str = "rand",
    label_choices: tuple[str, ...] | None = None,
) -> DiscussionTree:
    return build_tree(random_records(rng, size, label_choices), tree_id=tree_id)
