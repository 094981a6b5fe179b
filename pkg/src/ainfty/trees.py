"""Rooted planar trees, grafting, enumeration and root-forgetting (cyclic) classes.

A tree is either the bare edge ``LEAF`` or a vertex with an ordered tuple of at
least two subtrees.  Trees are hashable values ordered by :func:`order_key`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .combinat import compositions

__all__ = [
    "LEAF",
    "CyclicClass",
    "PlanarTree",
    "boundary_face_count",
    "corolla",
    "cyclic_classes",
    "enumerate_trees",
    "graft",
    "order_key",
    "reroot",
]


@dataclass(frozen=True)
class PlanarTree:
    children: tuple["PlanarTree", ...] = ()

    def __post_init__(self) -> None:
        if len(self.children) == 1:
            raise ValueError("internal vertices need at least two children")

    @property
    def is_leaf(self) -> bool:
        return not self.children

    @property
    def leaves(self) -> int:
        if not self.children:
            return 1
        return sum(c.leaves for c in self.children)

    @property
    def vertices(self) -> int:
        if not self.children:
            return 0
        return 1 + sum(c.vertices for c in self.children)

    @property
    def internal_edges(self) -> int:
        if not self.children:
            return 0
        return sum(c.internal_edges + (0 if c.is_leaf else 1) for c in self.children)

    def vertex_valences(self) -> list[int]:
        """Incident-edge counts of the vertices (children plus the edge below)."""
        if not self.children:
            return []
        out = [len(self.children) + 1]
        for c in self.children:
            out += c.vertex_valences()
        return out

    def bracket(self) -> str:
        if not self.children:
            return "•"
        return "(" + "".join(c.bracket() for c in self.children) + ")"

    def __str__(self) -> str:
        return self.bracket()

    def __repr__(self) -> str:
        return f"PlanarTree({self.bracket()})"


LEAF = PlanarTree()


def corolla(k: int) -> PlanarTree:
    if k == 1:
        return LEAF
    return PlanarTree((LEAF,) * k)


def order_key(t: PlanarTree) -> tuple:
    """Canonical order: leaf first, then by child count and children recursively."""
    if t.is_leaf:
        return (0,)
    return (len(t.children),) + tuple(order_key(c) for c in t.children)


@lru_cache(maxsize=None)
def _enumerate(k: int) -> tuple[PlanarTree, ...]:
    if k == 1:
        return (LEAF,)
    out = []
    for r in range(2, k + 1):
        for comp in compositions(k, r):
            for kids in itertools.product(*(_enumerate(p) for p in comp)):
                out.append(PlanarTree(tuple(kids)))
    return tuple(sorted(out, key=order_key))


def enumerate_trees(k: int) -> list[PlanarTree]:
    """All planar rooted trees with ``k`` leaves and internal vertices of valence >= 3."""
    if k < 1:
        raise ValueError("k must be positive")
    return list(_enumerate(k))


def graft(outer: PlanarTree, i: int, inner: PlanarTree) -> PlanarTree:
    """Identify the root edge of ``inner`` with leaf ``i`` (1-based) of ``outer``."""
    if not 1 <= i <= outer.leaves:
        raise IndexError(f"leaf index {i} out of range 1..{outer.leaves}")

    def go(t: PlanarTree, j: int) -> PlanarTree:
        if t.is_leaf:
            return inner
        kids = []
        for c in t.children:
            n = c.leaves
            if 0 < j <= n:
                kids.append(go(c, j))
            else:
                kids.append(c)
            j -= n
        return PlanarTree(tuple(kids))

    return go(outer, i)


def boundary_face_count(n: int) -> int:
    """``sum_{k+l=n+1, k,l>=2} k``: codimension-one faces of the n-th associahedron."""
    if n < 3:
        raise ValueError("n must be at least 3")
    return sum(k for k in range(2, n) if n + 1 - k >= 2)


# ---------------------------------------------------------------------------
# re-rooting
# ---------------------------------------------------------------------------


def _graph(t: PlanarTree):
    """Cyclic neighbour lists; external legs are nodes ``0`` (root) .. ``k``."""
    nbrs: dict[object, list] = {}
    counter = itertools.count(1)

    def build(node: PlanarTree, parent) -> object:
        if node.is_leaf:
            leg = next(counter)
            nbrs[leg] = [parent]
            return leg
        vid = ("v", len([x for x in nbrs if isinstance(x, tuple)]))
        nbrs[vid] = [parent]
        for c in node.children:
            nbrs[vid].append(build(c, vid))
        return vid

    if t.is_leaf:
        nbrs[0] = [1]
        nbrs[1] = [0]
        return nbrs
    top = build(t, 0)
    nbrs[0] = [top]
    return nbrs


def reroot(t: PlanarTree, leg: int) -> tuple[PlanarTree, tuple[int, ...]]:
    """Re-root at external leg ``leg`` (0 = current root, 1..k leaves left to right).

    Returns the new tree and the old labels of its leaves read left to right;
    these are the cyclic successors of ``leg`` in ``0, 1, .., k``.
    """
    nbrs = _graph(t)
    k = t.leaves
    if not 0 <= leg <= k:
        raise IndexError("leg out of range")
    labels: list[int] = []

    def down(node, came_from) -> PlanarTree:
        if not isinstance(node, tuple):
            labels.append(node)
            return LEAF
        order = nbrs[node]
        p = order.index(came_from)
        rest = order[p + 1:] + order[:p]
        return PlanarTree(tuple(down(x, node) for x in rest))

    start = nbrs[leg][0]
    if not isinstance(start, tuple):  # bare edge
        return LEAF, (start,)
    new = down(start, leg)
    return new, tuple(labels)


@dataclass(frozen=True)
class CyclicClass:
    """A planar tree with ``n`` external legs up to rotation.

    ``representative`` is the least rooted tree of the class, ``fiber`` the
    distinct rooted trees in ``G_{n-1}`` mapping to it and ``symmetric_factor``
    equals ``#fiber / n``, the inverse order of its rotational symmetry group.
    """

    n: int
    representative: PlanarTree
    fiber: tuple[PlanarTree, ...]
    symmetric_factor: Fraction

    @property
    def automorphisms(self) -> int:
        return self.n // len(self.fiber)


def cyclic_class_of(t: PlanarTree) -> PlanarTree:
    """Root-forgetting map: the least re-rooting of ``t``."""
    n = t.leaves + 1
    return min((reroot(t, leg)[0] for leg in range(n)), key=order_key)


def cyclic_classes(n: int) -> list[CyclicClass]:
    if n < 3:
        raise ValueError("n must be at least 3")
    groups: dict[PlanarTree, list[PlanarTree]] = {}
    for t in enumerate_trees(n - 1):
        groups.setdefault(cyclic_class_of(t), []).append(t)
    out = []
    for rep in sorted(groups, key=order_key):
        fiber = tuple(groups[rep])
        out.append(CyclicClass(n, rep, fiber, Fraction(len(fiber), n)))
    return out


__all__ += ["cyclic_class_of"]
