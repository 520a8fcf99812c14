"""Reductions of a packed map: search, maximality, disc amalgamation, folding.

A reduction pins a boundary arc of a target face disc onto a path in the
source that no existing face realizes.  Applying it amalgamates the disc
along the arc (identifying arc endpoints first when the arc covers the
whole boundary), completes the disc's packet, and checks the missing
weight bookkeeping:

* maximal incomplete: M(after) = M(before) + M(complement path) - n*w(f)
* complete:           M(after) <= M(before) - w(f)

Both identities are guaranteed when the source is an immersion on the
1-skeleton (the only setting in which reductions are used here); the
checks are skipped otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass

from .complexes import (
    CombinatorialMap,
    TwoComplex,
    WeightFunction,
    is_immersion_on_edges,
    missing_weight,
    pack,
    path_missing_weight,
)
from .words import Word


@dataclass(frozen=True)
class Reduction:
    """An arc of the boundary of a target face realized by a source path.

    ``start``/``length`` select boundary positions ``start .. start+length-1``
    (mod boundary length) of the target face; ``path`` is the realizing
    source path, with ``phi(path[t])`` reading the boundary traversal at
    position ``start + t``.
    """

    face: int
    start: int
    length: int
    path: Word

    def is_complete(self, phi: CombinatorialMap) -> bool:
        return self.length == phi.target.boundary_length(self.face)


@dataclass(frozen=True)
class ReductionOutcome:
    phi_plus: CombinatorialMap
    kind: str  # "complete" | "incomplete"
    missing_before: int
    missing_after: int
    complement_weight: int | None
    disc_boundary: Word  # traversal realizing each boundary position, in the new source
    disc_face: int
    vertex_image: tuple[int, ...]

    @property
    def delta_missing(self) -> int:
        return self.missing_after - self.missing_before


def _check_commutation(phi: CombinatorialMap, red: Reduction) -> None:
    word = phi.target.faces[red.face]
    L = len(word)
    if not 1 <= red.length <= L or len(red.path) != red.length:
        raise ValueError("reduction arc length out of range")
    for t in range(red.length):
        if phi.map_traversal(red.path[t]) != word[(red.start + t) % L]:
            raise ValueError(f"path does not read the face boundary at offset {t}")
        if t and red.path[t] == -red.path[t - 1]:
            raise ValueError("realizing path must be immersed")


def find_disc(
    phi: CombinatorialMap, face: int, start: int, length: int, path: Word
) -> Word | None:
    """A full-boundary realization through a source face agreeing with the arc.

    Returns the traversal at every boundary position (index = position) or
    None.  Both polygon orientations are tried; existence is exactly the
    failure of a reduction's no-lift condition.
    """
    word = phi.target.faces[face]
    L = len(word)
    for g in range(phi.source.num_faces):
        if phi.face_map[g][0] != face:
            continue
        bd = phi.source.faces[g]
        for a in range(L):
            for reflected in (False, True):
                if reflected:
                    beta = tuple(-bd[(a - j) % L] for j in range(L))
                else:
                    beta = tuple(bd[(j + a) % L] for j in range(L))
                if any(phi.map_traversal(beta[j]) != word[j] for j in range(L)):
                    continue
                if any(beta[(start + t) % L] != path[t] for t in range(length)):
                    continue
                return beta
    return None


def _outgoing(complex_: TwoComplex) -> dict[int, list[int]]:
    out: dict[int, list[int]] = {v: [] for v in range(complex_.num_vertices)}
    for e in range(complex_.num_edges):
        src, dst = complex_.edges[e]
        out[src].append(e + 1)
        out[dst].append(-(e + 1))
    for v in out:
        out[v].sort(key=lambda t: (abs(t), t < 0))
    return out


def _right_extensions(phi, word, start, path, outgoing):
    L = len(word)
    if len(path) >= L:
        return []
    p = (start + len(path)) % L
    v = phi.source.traversal_endpoints(path[-1])[1]
    return [
        t
        for t in outgoing[v]
        if phi.map_traversal(t) == word[p] and t != -path[-1]
    ]


def _left_extensions(phi, word, start, path, outgoing):
    L = len(word)
    if len(path) >= L:
        return []
    p = (start - 1) % L
    v = phi.source.traversal_endpoints(path[0])[0]
    # need a traversal ending at v, i.e. the reverse starts at v
    return [
        -t
        for t in outgoing[v]
        if phi.map_traversal(-t) == word[p] and -t != -path[0]
    ]


def extend_to_maximal(phi: CombinatorialMap, red: Reduction) -> Reduction:
    """Grow the arc greedily on the right, then on the left, until stuck."""
    _check_commutation(phi, red)
    word = phi.target.faces[red.face]
    outgoing = _outgoing(phi.source)
    start, path = red.start, list(red.path)
    while True:
        exts = _right_extensions(phi, word, start, tuple(path), outgoing)
        if not exts:
            break
        path.append(exts[0])
    while True:
        exts = _left_extensions(phi, word, start, tuple(path), outgoing)
        if not exts:
            break
        path.insert(0, exts[0])
        start = (start - 1) % len(word)
    out = Reduction(face=red.face, start=start, length=len(path), path=tuple(path))
    _assert_no_aligned_repeat(phi, out)
    return out


def is_maximal(phi: CombinatorialMap, red: Reduction) -> bool:
    word = phi.target.faces[red.face]
    outgoing = _outgoing(phi.source)
    return not _right_extensions(phi, word, red.start, red.path, outgoing) and not _left_extensions(
        phi, word, red.start, red.path, outgoing
    )


def _assert_no_aligned_repeat(phi: CombinatorialMap, red: Reduction) -> None:
    """A maximal incomplete arc on an immersed source never repeats a traversal
    at rotation-aligned boundary positions.

    Such a repeat would let the arc grow by retracing (immersed sources
    lift forward uniquely), contradicting maximality; its absence is what
    keeps the packet copies' triangle coverage collision-free, hence the
    incomplete bookkeeping exact.  Misaligned repeats are possible and
    harmless.
    """
    L = phi.target.boundary_length(red.face)
    if red.length == L or not is_immersion_on_edges(phi):
        return
    step = L // phi.target.face_exponent(red.face)
    seen = set()
    for t, trav in enumerate(red.path):
        key = ((red.start + t) % step, trav)
        assert key not in seen, "maximal arc repeated an aligned traversal"
        seen.add(key)


def find_reduction(
    phi: CombinatorialMap, face: int, seed: Reduction | None = None
) -> Reduction | None:
    """Search for a reduction of the given target face, optionally through a seed.

    Explores every extension branch; since freedom from full-boundary lifts
    is inherited by extensions, testing maximal arcs is exhaustive.  Returns
    the first maximal arc (deterministic order) with no fitting disc, or
    None when every candidate is realized by an existing face.
    """
    word = phi.target.faces[face]
    L = len(word)
    outgoing = _outgoing(phi.source)
    if seed is not None:
        if seed.face != face:
            raise ValueError("seed face mismatch")
        _check_commutation(phi, seed)
        seeds = [(seed.start, seed.path)]
    else:
        seeds = []
        for s in range(L):
            for v in range(phi.source.num_vertices):
                for t in outgoing[v]:
                    if phi.map_traversal(t) == word[s]:
                        seeds.append((s, (t,)))

    tested: set[tuple[int, Word]] = set()

    def dfs(start: int, path: Word) -> Reduction | None:
        rights = _right_extensions(phi, word, start, path, outgoing)
        lefts = _left_extensions(phi, word, start, path, outgoing)
        if not rights and not lefts:
            key = (start, path)
            if key in tested:
                return None
            tested.add(key)
            if find_disc(phi, face, start, len(path), path) is None:
                return Reduction(face=face, start=start, length=len(path), path=path)
            return None
        for t in rights:
            found = dfs(start, path + (t,))
            if found:
                return found
        for t in lefts:
            found = dfs((start - 1) % L, (t,) + path)
            if found:
                return found
        return None

    for s, p in seeds:
        found = dfs(s, p)
        if found:
            return found
    return None


def apply_reduction(
    phi: CombinatorialMap,
    red: Reduction,
    weights: WeightFunction,
    check: bool = True,
) -> ReductionOutcome:
    """Amalgamate the disc along the arc, complete its packet, check bookkeeping.

    Complete arcs with distinct endpoints get the endpoints identified
    first (missing weight unchanged); non-maximal incomplete arcs are
    rejected because the incomplete identity is only guaranteed for
    maximal ones.
    """
    X = phi.target
    word = X.faces[red.face]
    L = len(word)
    n = X.face_exponent(red.face)
    if check:
        _check_commutation(phi, red)
        if find_disc(phi, red.face, red.start, red.length, red.path) is not None:
            raise ValueError("arc is realized by an existing face; not a reduction")
    complete = red.length == L
    if not complete and check and not is_maximal(phi, red):
        raise ValueError("incomplete reductions must be maximal")
    immersed = is_immersion_on_edges(phi)
    m_before = missing_weight(phi, weights)

    Y = phi.source
    chain = [Y.traversal_endpoints(red.path[0])[0]]
    for t in red.path:
        chain.append(Y.traversal_endpoints(t)[1])

    # step 1: identify arc endpoints when the arc is the whole boundary
    vertex_image = list(range(Y.num_vertices))
    if complete and chain[0] != chain[-1]:
        keep, drop = sorted((chain[0], chain[-1]))
        for v in range(Y.num_vertices):
            if v == drop:
                vertex_image[v] = keep
            elif v > drop:
                vertex_image[v] = v - 1
            else:
                vertex_image[v] = v
        assert phi.vertex_map[chain[0]] == phi.vertex_map[chain[-1]]
        Y1 = TwoComplex(
            num_vertices=Y.num_vertices - 1,
            edges=tuple((vertex_image[u], vertex_image[v]) for u, v in Y.edges),
            faces=Y.faces,
            edge_names=Y.edge_names,
        )
        new_vmap = [0] * Y1.num_vertices
        for v in range(Y.num_vertices):
            new_vmap[vertex_image[v]] = phi.vertex_map[v]
        phi1 = CombinatorialMap(
            source=Y1,
            target=X,
            vertex_map=tuple(new_vmap),
            edge_map=phi.edge_map,
            face_map=phi.face_map,
        )
        if check:
            assert missing_weight(phi1, weights) == m_before
    else:
        Y1, phi1 = Y, phi
    chain = [vertex_image[v] for v in chain]

    # step 2: amalgamate the disc along the arc
    corner_vertex: dict[int, int] = {}
    for t in range(red.length + 1):
        corner_vertex[(red.start + t) % L] = chain[t]
    fresh_vertices = []
    for k in range(1, L - red.length):
        pos = (red.start + red.length + k) % L
        corner_vertex[pos] = Y1.num_vertices + len(fresh_vertices)
        fresh_vertices.append(X.corner_vertex(red.face, pos))
    fresh_edges: list[tuple[int, int]] = []
    fresh_edge_map: list[int] = []
    attach = list(red.path)
    for k in range(L - red.length):
        pos = (red.start + red.length + k) % L
        e_id = Y1.num_edges + len(fresh_edges)
        fresh_edges.append((corner_vertex[pos], corner_vertex[(pos + 1) % L]))
        fresh_edge_map.append(word[pos])
        attach.append(e_id + 1)
    disc_face = Y1.num_faces
    Y2 = TwoComplex(
        num_vertices=Y1.num_vertices + len(fresh_vertices),
        edges=Y1.edges + tuple(fresh_edges),
        faces=Y1.faces + (tuple(attach),),
        edge_names=Y1.edge_names
        + tuple(f"s{Y1.num_edges + i}" for i in range(len(fresh_edges))),
    )
    phi2 = CombinatorialMap(
        source=Y2,
        target=X,
        vertex_map=phi1.vertex_map + tuple(fresh_vertices),
        edge_map=phi1.edge_map + tuple(fresh_edge_map),
        face_map=phi1.face_map + ((red.face, red.start, False),),
    )

    # step 3: complete the packet of the new disc (face-triggered packing only,
    # so the bookkeeping below stays exact)
    phi_plus = pack(phi2, faces_only=True)

    m_after = missing_weight(phi_plus, weights)
    if complete:
        kind = "complete"
        comp_weight = None
        if check and immersed:
            wf = weights.face_weight(X, red.face)
            assert m_after <= m_before - wf, (m_after, m_before, wf)
    else:
        kind = "incomplete"
        sigma = tuple(word[(red.start + red.length + k) % L] for k in range(L - red.length))
        comp_weight = path_missing_weight(X, weights, sigma)
        if check and immersed:
            wf = weights.face_weight(X, red.face)
            predicted = m_before + comp_weight - n * wf
            assert m_after == predicted, (m_after, predicted)

    disc_boundary = [0] * L
    for j, t in enumerate(attach):
        disc_boundary[(red.start + j) % L] = t
    return ReductionOutcome(
        phi_plus=phi_plus,
        kind=kind,
        missing_before=m_before,
        missing_after=m_after,
        complement_weight=comp_weight,
        disc_boundary=tuple(disc_boundary),
        disc_face=disc_face,
        vertex_image=tuple(vertex_image),
    )


@dataclass(frozen=True)
class FoldResult:
    phi: CombinatorialMap
    vertex_image: tuple[int, ...]
    edge_image: tuple[int, ...]  # signed new edge per old edge

    def map_edge(self, t: int) -> int:
        image = self.edge_image[abs(t) - 1]
        return image if t > 0 else -image

    def map_path(self, path: Word) -> Word:
        return tuple(self.map_edge(t) for t in path)


def fold(phi: CombinatorialMap, weights: WeightFunction | None = None) -> FoldResult:
    """Identify same-image edge germs until the edge map is an immersion.

    Folding quotients the source; every loop survives (via ``edge_image``)
    with the same image word, and the missing weight never increases.
    """
    Y = phi.source
    parent = list(range(Y.num_vertices))

    def root(v: int) -> int:
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    alive = [True] * Y.num_edges
    endpoints = list(Y.edges)
    repl: dict[int, int] = {}  # dead edge id -> signed surviving edge

    def resolve(t: int) -> int:
        e = abs(t) - 1
        while e in repl:
            t = repl[e] if t > 0 else -repl[e]
            e = abs(t) - 1
        return t

    changed = True
    while changed:
        changed = False
        germs: dict[tuple[int, int], int] = {}
        for e in range(Y.num_edges):
            if not alive[e]:
                continue
            src, dst = root(endpoints[e][0]), root(endpoints[e][1])
            endpoints[e] = (src, dst)
            for t, at in ((e + 1, src), (-(e + 1), dst)):
                key = (at, phi.map_traversal(t))
                if key not in germs:
                    germs[key] = t
                    continue
                t1 = germs[key]
                e1, e2 = abs(t1) - 1, abs(t2 := t) - 1
                assert e1 != e2
                same_dir = (t1 > 0) == (t2 > 0)
                repl[e2] = (e1 + 1) if same_dir else -(e1 + 1)
                alive[e2] = False
                far1 = endpoints[e1][1 if t1 > 0 else 0]
                far2 = endpoints[e2][1 if t2 > 0 else 0]
                r1, r2 = root(far1), root(far2)
                if r1 != r2:
                    parent[max(r1, r2)] = min(r1, r2)
                changed = True
                break
            if changed:
                break

    vertex_roots = sorted({root(v) for v in range(Y.num_vertices)})
    vnew = {r: i for i, r in enumerate(vertex_roots)}
    vertex_image = tuple(vnew[root(v)] for v in range(Y.num_vertices))
    edge_survivors = [e for e in range(Y.num_edges) if alive[e]]
    enew = {e: i for i, e in enumerate(edge_survivors)}

    def edge_image_of(e: int) -> int:
        t = resolve(e + 1)
        return (enew[abs(t) - 1] + 1) * (1 if t > 0 else -1)

    edge_image = tuple(edge_image_of(e) for e in range(Y.num_edges))
    new_edges = tuple(
        (vertex_image[Y.edges[e][0]], vertex_image[Y.edges[e][1]]) for e in edge_survivors
    )
    seen_faces = set()
    new_faces: list[Word] = []
    new_face_map: list[tuple[int, int, bool]] = []
    for g in range(Y.num_faces):
        bd = tuple(
            (enew[abs(resolve(t)) - 1] + 1) * (1 if resolve(t) > 0 else -1)
            for t in Y.faces[g]
        )
        entry = (bd, phi.face_map[g])
        if entry in seen_faces:
            continue
        seen_faces.add(entry)
        new_faces.append(bd)
        new_face_map.append(phi.face_map[g])
    new_vmap = [0] * len(vertex_roots)
    for v in range(Y.num_vertices):
        new_vmap[vertex_image[v]] = phi.vertex_map[v]
    new_emap = [0] * len(edge_survivors)
    for e in edge_survivors:
        new_emap[enew[e]] = phi.edge_map[e]
    folded = CombinatorialMap(
        source=TwoComplex(
            num_vertices=len(vertex_roots),
            edges=new_edges,
            faces=tuple(new_faces),
        ),
        target=phi.target,
        vertex_map=tuple(new_vmap),
        edge_map=tuple(new_emap),
        face_map=tuple(new_face_map),
    )
    assert is_immersion_on_edges(folded)
    if weights is not None:
        assert missing_weight(folded, weights) <= missing_weight(phi, weights)
    return FoldResult(phi=folded, vertex_image=vertex_image, edge_image=edge_image)
