"""Bipartite matchings, Hall certificates, and matchings with multiplicities.

Graphs are small throughout (desk scale), so the engine is a phased
augmenting-path maximum matching with deterministic vertex order; the
witness extraction follows alternating reachability from unmatched left
vertices.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass


@dataclass(frozen=True)
class BipartiteGraph:
    """Left/right vertex counts plus an edge set of (left, right) pairs."""

    num_left: int
    num_right: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        for u, v in self.edges:
            if not (0 <= u < self.num_left and 0 <= v < self.num_right):
                raise ValueError(f"edge ({u}, {v}) out of range")

    def neighbors(self, u: int) -> list[int]:
        return sorted(v for (a, v) in self.edges if a == u)

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.num_left)]
        for u, v in sorted(self.edges):
            adj[u].append(v)
        return adj


@dataclass(frozen=True)
class HallViolation:
    """A subset of left vertices whose neighborhood is too small for its demand."""

    subset: tuple[int, ...]
    neighborhood: tuple[int, ...]
    demand: int

    @property
    def deficiency(self) -> int:
        return self.demand - len(self.neighborhood)


@dataclass(frozen=True)
class MMatching:
    """Edges using each left vertex v exactly m(v) times, each right vertex at most once."""

    edges: frozenset[tuple[int, int]]


def max_matching(graph: BipartiteGraph) -> frozenset[tuple[int, int]]:
    """Maximum-cardinality matching via phased BFS/DFS augmentation."""
    adj = graph.adjacency()
    INF = -1
    pair_left: list[int] = [INF] * graph.num_left
    pair_right: list[int] = [INF] * graph.num_right
    dist: list[int] = [INF] * graph.num_left

    def bfs() -> bool:
        q: deque[int] = deque()
        for u in range(graph.num_left):
            if pair_left[u] == INF:
                dist[u] = 0
                q.append(u)
            else:
                dist[u] = INF
        reachable_free = False
        while q:
            u = q.popleft()
            for v in adj[u]:
                w = pair_right[v]
                if w == INF:
                    reachable_free = True
                elif dist[w] == INF:
                    dist[w] = dist[u] + 1
                    q.append(w)
        return reachable_free

    def dfs(u: int) -> bool:
        for v in adj[u]:
            w = pair_right[v]
            if w == INF or (dist[w] == dist[u] + 1 and dfs(w)):
                pair_left[u] = v
                pair_right[v] = u
                return True
        dist[u] = INF
        return False

    while bfs():
        for u in range(graph.num_left):
            if pair_left[u] == INF:
                dfs(u)
    return frozenset((u, pair_left[u]) for u in range(graph.num_left) if pair_left[u] != INF)


def hall_check(graph: BipartiteGraph):
    """Either a matching saturating the left side, or a HallViolation.

    The violation is the set of left vertices reachable by alternating paths
    from some unmatched left vertex; its neighborhood is then fully matched
    into it, which certifies the deficiency.
    """
    matching = max_matching(graph)
    matched_left = {u for (u, _) in matching}
    if len(matched_left) == graph.num_left:
        return matching
    adj = graph.adjacency()
    pair_right = {v: u for (u, v) in matching}
    pair_left = {u: v for (u, v) in matching}
    frontier = sorted(set(range(graph.num_left)) - matched_left)
    seen_left = set(frontier)
    seen_right: set[int] = set()
    queue = deque(frontier)
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v in seen_right:
                continue
            seen_right.add(v)
            w = pair_right.get(v)
            if w is not None and w not in seen_left:
                seen_left.add(w)
                queue.append(w)
    subset = tuple(sorted(seen_left))
    hood = tuple(sorted(seen_right))
    violation = HallViolation(subset=subset, neighborhood=hood, demand=len(subset))
    assert violation.deficiency >= 1
    # sanity: the neighborhood really is N(subset)
    assert set(hood) == {v for u in subset for v in adj[u]}
    # unused when saturated; keep the matched pairs referenced for clarity
    del pair_left
    return violation


def split_graph(graph: BipartiteGraph, multiplicity: dict[int, int]) -> BipartiteGraph:
    """Clone each left vertex m(v) times, clones inheriting all its edges."""
    _check_multiplicity(graph, multiplicity)
    clone_of: list[int] = []
    for u in range(graph.num_left):
        clone_of.extend([u] * multiplicity[u])
    edges = set()
    for i, u in enumerate(clone_of):
        for v in graph.neighbors(u):
            edges.add((i, v))
    return BipartiteGraph(len(clone_of), graph.num_right, frozenset(edges))


def m_matching(graph: BipartiteGraph, multiplicity: dict[int, int]):
    """An MMatching for the given multiplicities, or a HallViolation.

    Runs the split construction, matches the clones, and merges the result
    (or the violating subset) back to the original left vertices.
    """
    _check_multiplicity(graph, multiplicity)
    clone_of: list[int] = []
    for u in range(graph.num_left):
        clone_of.extend([u] * multiplicity[u])
    split = split_graph(graph, multiplicity)
    result = hall_check(split)
    if isinstance(result, HallViolation):
        originals = tuple(sorted({clone_of[i] for i in result.subset}))
        hood = tuple(sorted({v for u in originals for v in graph.neighbors(u)}))
        demand = sum(multiplicity[u] for u in originals)
        merged = HallViolation(subset=originals, neighborhood=hood, demand=demand)
        assert merged.deficiency >= 1, "merged witness must still violate the bound"
        return merged
    edges = frozenset((clone_of[i], v) for (i, v) in result)
    matched = MMatching(edges=edges)
    verify_m_matching(graph, multiplicity, matched)
    return matched


def verify_m_matching(graph: BipartiteGraph, multiplicity: dict[int, int], matching: MMatching) -> None:
    """Raise if the matching breaks either degree constraint or leaves the graph."""
    right_used: set[int] = set()
    left_count = {u: 0 for u in range(graph.num_left)}
    for u, v in matching.edges:
        if (u, v) not in graph.edges:
            raise ValueError(f"matching edge ({u}, {v}) not in graph")
        if v in right_used:
            raise ValueError(f"right vertex {v} used twice")
        right_used.add(v)
        left_count[u] += 1
    for u in range(graph.num_left):
        if left_count[u] != multiplicity[u]:
            raise ValueError(f"left vertex {u} has degree {left_count[u]}, wants {multiplicity[u]}")


def _check_multiplicity(graph: BipartiteGraph, multiplicity: dict[int, int]) -> None:
    for u in range(graph.num_left):
        m = multiplicity.get(u)
        if not isinstance(m, int) or m < 1:
            raise ValueError(f"multiplicity of left vertex {u} must be a positive integer")
