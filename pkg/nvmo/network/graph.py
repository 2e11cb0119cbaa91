"""
Communication digraph, Assumption 1 checks and the graph constant ``W``.

An edge ``(j, i)`` means camera ``i`` receives from camera ``j``. ``W`` is the
minimum, over roots and spanning trees of the undirected graph, of the largest
per-edge load, where the load of a tree edge is the summed root depth of all
nodes whose root path traverses it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple

import networkx as nx
from memoization import CachingAlgorithmFlag, cached

from ..errors import DisconnectedGraphError, EnumerationLimitError, InvalidNodeError
from ..utils.log_common import build_logger
from ..utils.timing import measure_time

logger = build_logger()

ENUMERATION_LIMIT = 10

Edge = tuple[int, int]


@dataclass(frozen=True, slots=True)
class Digraph:
    """Directed graph on nodes ``1..n``; ``edges`` holds ``(sender, receiver)`` pairs."""

    n: int
    edges: frozenset[Edge] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.n < 1:
            raise InvalidNodeError(f"graph needs at least one node, got n={self.n}")
        edges = frozenset((int(j), int(i)) for j, i in self.edges)
        for j, i in edges:
            if not (1 <= j <= self.n and 1 <= i <= self.n):
                raise InvalidNodeError(f"edge ({j}, {i}) references a node outside 1..{self.n}")
            if j == i:
                raise InvalidNodeError(f"self-loop on node {i}")
        object.__setattr__(self, "edges", edges)

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[Iterable[int]]) -> Digraph:
        return cls(n, frozenset(tuple(p) for p in pairs))

    @classmethod
    def bidirectional(cls, n: int, pairs: Iterable[Edge]) -> Digraph:
        """Digraph with both orientations of every given undirected pair."""
        edges = set()
        for a, b in pairs:
            edges.add((a, b))
            edges.add((b, a))
        return cls(n, frozenset(edges))

    @classmethod
    def star(cls, n: int, center: int = 1) -> Digraph:
        return cls.bidirectional(n, [(center, k) for k in range(1, n + 1) if k != center])

    def nodes(self) -> range:
        return range(1, self.n + 1)

    def undirected_edges(self) -> list[Edge]:
        """Sorted edge list of the undirected version ``G_u``."""
        return sorted({(min(j, i), max(j, i)) for j, i in self.edges})

    def to_networkx(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(self.nodes())
        g.add_edges_from(self.edges)
        return g

    def to_undirected_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.nodes())
        g.add_edges_from(self.undirected_edges())
        return g


class Assumption1Flags(NamedTuple):
    balanced: bool
    strongly_connected: bool

    @property
    def ok(self) -> bool:
        return self.balanced and self.strongly_connected


@dataclass(frozen=True, slots=True)
class TreeReport:
    """Spanning tree of ``G_u`` rooted at ``root`` with its per-edge loads."""

    root: int
    tree_edges: tuple[Edge, ...]
    d_tilde: int
    per_edge_load: dict[Edge, int]
    depth: dict[int, int]

    def as_dict(self) -> dict:
        return {
            "root": self.root,
            "d_tilde": self.d_tilde,
            "edges": [
                {"edge": list(e), "load": self.per_edge_load[e]} for e in self.tree_edges
            ],
        }


class WResult(NamedTuple):
    w: int
    witness: TreeReport


def validate_assumption1(g: Digraph) -> Assumption1Flags:
    """Balance (in-degree equals out-degree everywhere) and strong connectivity."""
    dg = g.to_networkx()
    balanced = all(dg.in_degree(v) == dg.out_degree(v) for v in dg.nodes)
    return Assumption1Flags(balanced, bool(nx.is_strongly_connected(dg)))


def neighbors(g: Digraph, i: int) -> frozenset[int]:
    """Senders ``{j : (j, i) in E}`` of node ``i``."""
    if not 1 <= i <= g.n:
        raise InvalidNodeError(f"node {i} outside 1..{g.n}")
    return frozenset(j for j, k in g.edges if k == i)


def spanning_trees(n: int, edges: list[Edge]) -> Iterator[tuple[Edge, ...]]:
    """
    Yield every spanning tree of the undirected graph as a sorted edge tuple.

    Include/exclude recursion over ``edges`` (which must be sorted) with a
    union-find; trees come out in lexicographic order.
    """
    need = n - 1
    m = len(edges)

    def find(parent: list[int], x: int) -> int:
        while parent[x] != x:
            x = parent[x]
        return x

    def grow(idx: int, chosen: list[Edge], parent: list[int]) -> Iterator[tuple[Edge, ...]]:
        if len(chosen) == need:
            yield tuple(chosen)
            return
        if m - idx < need - len(chosen):
            return
        a, b = edges[idx]
        ra, rb = find(parent, a), find(parent, b)
        if ra != rb:
            merged = parent.copy()
            merged[rb] = ra
            chosen.append((a, b))
            yield from grow(idx + 1, chosen, merged)
            chosen.pop()
        yield from grow(idx + 1, chosen, parent)

    yield from grow(0, [], list(range(n + 1)))


def tree_loads(n: int, tree: tuple[Edge, ...], root: int) -> TreeReport:
    """Root depths and per-edge loads of ``tree`` seen from ``root``."""
    adj: dict[int, list[int]] = {v: [] for v in range(1, n + 1)}
    for a, b in tree:
        adj[a].append(b)
        adj[b].append(a)

    depth = {root: 0}
    parent = {root: 0}
    order = [root]
    for v in order:
        for w in adj[v]:
            if w not in depth:
                depth[w] = depth[v] + 1
                parent[w] = v
                order.append(w)

    subtree = dict(depth)
    loads: dict[Edge, int] = {}
    for v in reversed(order[1:]):
        p = parent[v]
        loads[(min(p, v), max(p, v))] = subtree[v]
        subtree[p] += subtree[v]

    return TreeReport(
        root=root,
        tree_edges=tree,
        d_tilde=max(loads.values(), default=0),
        per_edge_load=loads,
        depth=depth,
    )


@cached(max_size=64, algorithm=CachingAlgorithmFlag.LRU, thread_safe=True)
@measure_time(tag="graph")
def compute_W(g: Digraph, limit: int = ENUMERATION_LIMIT) -> WResult:
    """
    Exact ``W`` by enumeration of all roots and spanning trees of ``G_u``.

    The witness is the lexicographically lowest tree edge set among minimizers,
    then the lowest root. A single node gives ``W = 0``.

    Raises:
        DisconnectedGraphError: ``G_u`` is not connected.
        EnumerationLimitError: ``n`` exceeds ``limit``.

    """
    if g.n > limit:
        raise EnumerationLimitError(
            f"enumeration limit: n={g.n} exceeds {limit} nodes for spanning-tree enumeration"
        )
    if not nx.is_connected(g.to_undirected_networkx()):
        raise DisconnectedGraphError(f"undirected graph on {g.n} nodes is disconnected")

    best: TreeReport | None = None
    count = 0
    for tree in spanning_trees(g.n, g.undirected_edges()):
        count += 1
        for root in g.nodes():
            report = tree_loads(g.n, tree, root)
            if best is None or report.d_tilde < best.d_tilde:
                best = report
    logger.debug(f"W={best.d_tilde} over {count} spanning trees and {g.n} roots")
    return WResult(best.d_tilde, best)
