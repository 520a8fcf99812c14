"""Shared oracles and random instance builders for the test suite."""

from __future__ import annotations

import random

from coherence.complexes import (
    CombinatorialMap,
    TwoComplex,
    WeightFunction,
    _boundary_lift_tracks,
    _valid_offsets,
    is_immersion_on_edges,
)
from coherence.reduction import fold


# ---------------------------------------------------------------------------
# independent Stallings core oracle (dict-based, repeated pairwise merging)


def stallings_core_oracle(words, basepoint_loops=True):
    """Fold a wedge of word-labeled circles by brute pairwise identification.

    Vertices are integers, 0 the basepoint.  Returns the canonical
    transition table ``frozenset of (vertex, letter, vertex)`` after BFS
    relabeling from the basepoint, letters ordered 1, -1, 2, -2, ...
    """
    edges = []  # (u, letter, v), letter > 0
    fresh = 1
    for word in words:
        if not word:
            continue
        prev = 0
        for i, x in enumerate(word):
            nxt = 0 if i == len(word) - 1 else fresh
            if nxt != 0:
                fresh += 1
            if x > 0:
                edges.append((prev, x, nxt))
            else:
                edges.append((nxt, -x, prev))
            prev = nxt

    parent = list(range(fresh))

    def root(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    changed = True
    while changed:
        changed = False
        out = {}
        dedup = set()
        new_edges = []
        for u, x, v in edges:
            ru, rv = root(u), root(v)
            if (ru, x, rv) in dedup:
                changed = True
                continue
            dedup.add((ru, x, rv))
            new_edges.append((ru, x, rv))
        edges = new_edges
        for u, x, v in edges:
            for key, tgt in (((u, x, "out"), v), ((v, x, "in"), u)):
                if key in out and root(out[key]) != root(tgt):
                    a, b = sorted((root(out[key]), root(tgt)))
                    parent[b] = a
                    changed = True
                out[key] = tgt

    return _canonical_table(edges, root(0))


def _canonical_table(edges, base):
    adj = {}
    for u, x, v in edges:
        adj.setdefault(u, []).append((x, v))
        adj.setdefault(v, []).append((-x, u))
    order = {base: 0}
    queue = [base]
    while queue:
        u = queue.pop(0)
        key = lambda t: (abs(t[0]), t[0] < 0)
        for x, v in sorted(adj.get(u, []), key=key):
            if v not in order:
                order[v] = len(order)
                queue.append(v)
    table = set()
    for u, x, v in edges:
        table.add((order[u], x, order[v]))
    return frozenset(table)


def canonical_graph(phi: CombinatorialMap, basepoint: int = 0):
    """Canonical transition table of an immersed 1-skeleton, for oracle comparison."""
    edges = []
    for e in range(phi.source.num_edges):
        u, v = phi.source.edges[e]
        label = phi.edge_map[e]
        if label > 0:
            edges.append((u, label, v))
        else:
            edges.append((v, -label, u))
    return _canonical_table(edges, basepoint)


# ---------------------------------------------------------------------------
# random instances


def random_two_complex(rng: random.Random, max_vertices=2, max_edges=4, max_faces=3,
                       max_boundary=8) -> TwoComplex:
    nv = rng.randint(1, max_vertices)
    ne = rng.randint(1, max_edges)
    edges = tuple((rng.randrange(nv), rng.randrange(nv)) for _ in range(ne))
    shell = TwoComplex(num_vertices=nv, edges=edges)
    outgoing = {v: [] for v in range(nv)}
    for e in range(ne):
        src, dst = edges[e]
        outgoing[src].append(e + 1)
        outgoing[dst].append(-(e + 1))
    faces = []
    for _ in range(rng.randint(0, max_faces)):
        for _attempt in range(30):
            length = rng.randint(2, max_boundary)
            v0 = rng.randrange(nv)
            v, walk = v0, []
            ok = True
            for _ in range(length):
                options = outgoing[v]
                if not options:
                    ok = False
                    break
                t = rng.choice(options)
                walk.append(t)
                v = shell.traversal_endpoints(t)[1]
            if ok and v == v0:
                faces.append(tuple(walk))
                break
    return TwoComplex(num_vertices=nv, edges=edges, faces=tuple(faces))


def random_immersed_packed_map(rng: random.Random, target: TwoComplex,
                               max_vertices=4, max_edges=6, packet_prob=0.5):
    """A random 1-skeleton immersion into the target with full packets on a
    random subset of its boundary circles (so the map is packed)."""
    nv = rng.randint(1, max_vertices)
    vmap = tuple(rng.randrange(target.num_vertices) for _ in range(nv))
    candidates = []
    for u in range(nv):
        for v in range(nv):
            for e in range(target.num_edges):
                src, dst = target.edges[e]
                if (vmap[u], vmap[v]) == (src, dst):
                    candidates.append((u, v, e + 1))
    rng.shuffle(candidates)
    chosen = candidates[: rng.randint(1, max_edges)]
    if not chosen:
        chosen = [(0, 0, 1)] if target.edges and target.edges[0] == (vmap[0], vmap[0]) else []
    if not chosen:
        return None
    edges = tuple((u, v) for u, v, _ in chosen)
    emap = tuple(t for _, _, t in chosen)
    raw = CombinatorialMap(
        source=TwoComplex(num_vertices=nv, edges=edges),
        target=target,
        vertex_map=vmap,
        edge_map=emap,
        face_map=(),
    )
    phi = fold(raw).phi
    assert is_immersion_on_edges(phi)

    # attach full packets along a random subset of boundary circles
    new_faces, new_map = [], []
    for F in range(target.num_faces):
        for _key, rep in sorted(_boundary_lift_tracks(phi, F).items()):
            if rng.random() >= packet_prob:
                continue
            for r in _valid_offsets(phi, F, rep):
                new_faces.append(rep)
                new_map.append((F, r, False))
    if new_faces:
        phi = CombinatorialMap(
            source=TwoComplex(
                num_vertices=phi.source.num_vertices,
                edges=phi.source.edges,
                faces=tuple(new_faces),
            ),
            target=target,
            vertex_map=phi.vertex_map,
            edge_map=phi.edge_map,
            face_map=tuple(new_map),
        )
    return phi


def random_weights(rng: random.Random, complex_: TwoComplex, max_weight=3) -> WeightFunction:
    overrides = {}
    for f in range(complex_.num_faces):
        for j in range(complex_.boundary_length(f)):
            if rng.random() < 0.6:
                overrides[(f, j)] = rng.randint(0, max_weight)
    return WeightFunction(default=rng.choice([0, 1]), overrides=overrides)
