"""Tree graphs with oriented incidence matrices.

A tree on ``n`` nodes has exactly ``n - 1`` edges and a unique path between
any two nodes. Each edge carries the orientation given at construction
time as a ``(tail, head)`` pair; the incidence matrix column for edge
``e = (tail, head)`` holds ``+1`` at the tail row and ``-1`` at the head
row. The oscillator dynamics built on top of these graphs depend only on
neighbor sets, so flipping an edge's orientation does not change
trajectories (the orientation-carrying matrix always appears in
quadratic or sign-cancelling combinations).

Matrices are dense: the target scale is tens to a few hundred nodes,
where sparse machinery buys nothing.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ConfigError


class GraphError(ConfigError):
    """Invalid graph structure."""


class BadIndex(GraphError):
    """Edge endpoint outside ``0..n-1`` or node count below 2."""


class SelfLoop(GraphError):
    """Edge connecting a node to itself."""


class DuplicateEdge(GraphError):
    """Same undirected edge listed twice."""


class CycleDetected(GraphError):
    """Edge set contains a cycle."""


class Disconnected(GraphError):
    """Edge set does not connect all nodes."""


@dataclass(frozen=True)
class TreeGraph:
    """Validated tree: ``n`` nodes, ``n - 1`` oriented edges.

    Construct through :func:`build_tree`, which enforces the tree
    invariants. Instances are immutable and safe to share across
    concurrent trials.
    """

    n: int
    edges: tuple[tuple[int, int], ...]

    @property
    def m(self) -> int:
        """Edge count (``n - 1`` for a tree)."""
        return len(self.edges)

    @cached_property
    def tails(self) -> np.ndarray:
        arr = np.array([t for t, _ in self.edges], dtype=np.intp)
        arr.setflags(write=False)
        return arr

    @cached_property
    def heads(self) -> np.ndarray:
        arr = np.array([h for _, h in self.edges], dtype=np.intp)
        arr.setflags(write=False)
        return arr

    @cached_property
    def incidence_matrix(self) -> np.ndarray:
        """Cached oriented incidence matrix, see :func:`incidence`."""
        b = incidence(self)
        b.setflags(write=False)
        return b


def build_tree(n: int, edges) -> TreeGraph:
    """Validate ``edges`` as a tree on ``n`` nodes.

    Args:
        n: Node count, at least 2. Nodes are indexed ``0..n-1``.
        edges: Iterable of ``(tail, head)`` pairs. Orientation is kept
            as given.

    Returns:
        The validated :class:`TreeGraph`.

    Raises:
        BadIndex: node count below 2 or an endpoint out of range.
        SelfLoop: an edge joins a node to itself.
        DuplicateEdge: an undirected edge appears twice.
        CycleDetected: the edges close a cycle.
        Disconnected: the edges leave the graph in several components.
    """
    if n < 2:
        raise BadIndex(f"need at least 2 nodes, got n={n}")

    edge_list = []
    seen = set()
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for raw in edges:
        tail, head = int(raw[0]), int(raw[1])
        if not (0 <= tail < n and 0 <= head < n):
            raise BadIndex(f"edge ({tail}, {head}) outside 0..{n - 1}")
        if tail == head:
            raise SelfLoop(f"edge ({tail}, {head}) is a self-loop")
        key = (min(tail, head), max(tail, head))
        if key in seen:
            raise DuplicateEdge(f"undirected edge {key} listed twice")
        seen.add(key)
        rt, rh = find(tail), find(head)
        if rt == rh:
            raise CycleDetected(f"edge ({tail}, {head}) closes a cycle")
        parent[rt] = rh
        edge_list.append((tail, head))

    roots = {find(i) for i in range(n)}
    if len(roots) > 1:
        raise Disconnected(f"{len(roots)} components, expected 1")

    return TreeGraph(n=n, edges=tuple(edge_list))


def incidence(g: TreeGraph) -> np.ndarray:
    """Oriented incidence matrix ``B`` of shape ``(n, m)``.

    Column ``e`` has ``+1`` at the tail of edge ``e``, ``-1`` at its
    head, zeros elsewhere; every column sums to zero. Deterministic
    given the edge order.
    """
    b = np.zeros((g.n, g.m))
    for e, (tail, head) in enumerate(g.edges):
        b[tail, e] = 1.0
        b[head, e] = -1.0
    return b


def edge_laplacian(g: TreeGraph) -> np.ndarray:
    """Edge Laplacian ``B^T B`` of shape ``(m, m)``.

    Symmetric and positive definite on trees, so its spectrum equals
    the nonzero spectrum of the node Laplacian ``B B^T``.
    """
    b = g.incidence_matrix
    lap = b.T @ b
    return 0.5 * (lap + lap.T)
