"""Combinatorial 2-complexes, maps, weights, missing weight, and packing.

Conventions fixed here and relied on everywhere else:

* An attaching word is a closed path of signed edge traversals; ``+e+1``
  traverses edge ``e`` forward, ``-(e+1)`` backward.  Consecutive
  traversals chain head to tail and wrap around.
* Each k-gon face is implicitly coned to k triangles, one per boundary
  position; edges are not subdivided.  Triangle ``(f, j)`` is adjacent to
  the edge traversed at position j of the boundary of f.
* A map sends i-cells to i-cells.  A face entry ``(F, off, flip)`` means
  position i of the source boundary reads position ``(i + off) % L`` of
  the target boundary, or ``(off - i) % L`` reversed when flipped.  The
  induced triangle map uses the same position formula.
* The missing weight of a source edge is the weight of the triangles in
  the star of its image that the induced triangle map misses; set
  difference is taken on target-triangle identity, never with
  multiplicity.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .words import Presentation, Word, letter_gen, minimal_period

Triangle = tuple[int, int]


def _auto_names(prefix: str, n: int) -> tuple[str, ...]:
    return tuple(f"{prefix}{i}" for i in range(n))


@dataclass(frozen=True)
class TwoComplex:
    num_vertices: int
    edges: tuple[tuple[int, int], ...]
    faces: tuple[Word, ...] = ()
    vertex_names: tuple[str, ...] = ()
    edge_names: tuple[str, ...] = ()
    face_names: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.vertex_names:
            object.__setattr__(self, "vertex_names", _auto_names("v", self.num_vertices))
        if not self.edge_names:
            object.__setattr__(self, "edge_names", _auto_names("e", len(self.edges)))
        if not self.face_names:
            object.__setattr__(self, "face_names", _auto_names("f", len(self.faces)))
        for u, v in self.edges:
            if not (0 <= u < self.num_vertices and 0 <= v < self.num_vertices):
                raise ValueError(f"edge endpoint out of range: ({u}, {v})")
        for f, word in enumerate(self.faces):
            if not word:
                raise ValueError(f"face {f} has an empty attaching word")
            ends = [self.traversal_endpoints(t) for t in word]
            for (_, head), (tail, _) in zip(ends, ends[1:] + ends[:1]):
                if head != tail:
                    raise ValueError(f"attaching word of face {f} is not a closed edge path")

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def num_faces(self) -> int:
        return len(self.faces)

    def traversal_endpoints(self, t: int) -> tuple[int, int]:
        src, dst = self.edges[abs(t) - 1]
        return (src, dst) if t > 0 else (dst, src)

    def boundary_length(self, f: int) -> int:
        return len(self.faces[f])

    def face_exponent(self, f: int) -> int:
        """Maximal n such that the attaching word is a literal n-th power."""
        word = self.faces[f]
        return len(word) // minimal_period(word)

    def corner_vertex(self, f: int, position: int) -> int:
        """Vertex at the start of the given boundary position."""
        word = self.faces[f]
        return self.traversal_endpoints(word[position % len(word)])[0]


def star(complex_: TwoComplex, edge: int) -> tuple[Triangle, ...]:
    """Triangles whose boundary position traverses the edge, either direction."""
    out = []
    for f, word in enumerate(complex_.faces):
        for j, t in enumerate(word):
            if abs(t) - 1 == edge:
                out.append((f, j))
    return tuple(out)


@dataclass(frozen=True)
class WeightFunction:
    """Nonnegative integer weight per triangle with an explicit default mode.

    default 1 is the standard weight function; default 0 gives sparse
    weights where only the overrides carry weight.
    """

    default: int
    overrides: dict[Triangle, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.default < 0 or any(w < 0 for w in self.overrides.values()):
            raise ValueError("weights must be nonnegative integers")

    @classmethod
    def standard(cls) -> "WeightFunction":
        return cls(default=1)

    @classmethod
    def sparse(cls, overrides: dict[Triangle, int] | None = None) -> "WeightFunction":
        return cls(default=0, overrides=dict(overrides or {}))

    def triangle(self, tri: Triangle) -> int:
        return self.overrides.get(tri, self.default)

    def face_weight(self, complex_: TwoComplex, f: int) -> int:
        return sum(self.triangle((f, j)) for j in range(complex_.boundary_length(f)))

    def star_weight(self, complex_: TwoComplex, edge: int) -> int:
        return sum(self.triangle(tri) for tri in star(complex_, edge))


@dataclass(frozen=True)
class CombinatorialMap:
    """A dimension-preserving cellular map between two 2-complexes.

    ``edge_map[e]`` is a signed target edge; ``face_map[g]`` is
    ``(target face, rotation offset, orientation flip)``.
    """

    source: TwoComplex
    target: TwoComplex
    vertex_map: tuple[int, ...]
    edge_map: tuple[int, ...]
    face_map: tuple[tuple[int, int, bool], ...]

    def __post_init__(self):
        if len(self.vertex_map) != self.source.num_vertices:
            raise ValueError("vertex map has wrong length")
        if len(self.edge_map) != self.source.num_edges:
            raise ValueError("edge map has wrong length")
        if len(self.face_map) != self.source.num_faces:
            raise ValueError("face map has wrong length")
        for v in self.vertex_map:
            if not 0 <= v < self.target.num_vertices:
                raise ValueError("vertex image out of range")
        for e, t in enumerate(self.edge_map):
            if t == 0 or not abs(t) - 1 < self.target.num_edges:
                raise ValueError(f"edge image of {e} out of range")
            src, dst = self.source.edges[e]
            isrc, idst = self.target.traversal_endpoints(t)
            if (self.vertex_map[src], self.vertex_map[dst]) != (isrc, idst):
                raise ValueError(f"edge {e} does not commute with the vertex map")
        for g, (F, off, flip) in enumerate(self.face_map):
            word = self.source.faces[g]
            if not 0 <= F < self.target.num_faces:
                raise ValueError(f"face image of {g} out of range")
            image = self.target.faces[F]
            L = len(image)
            if len(word) != L:
                raise ValueError(f"face {g} has boundary length {len(word)}, image has {L}")
            for i, t in enumerate(word):
                expected = image[(off - i) % L] * -1 if flip else image[(i + off) % L]
                if self.map_traversal(t) != expected:
                    raise ValueError(f"face {g} boundary does not align at position {i}")

    def map_traversal(self, t: int) -> int:
        image = self.edge_map[abs(t) - 1]
        return image if t > 0 else -image

    def map_path(self, path: Word) -> Word:
        return tuple(self.map_traversal(t) for t in path)

    def triangle_image(self, tri: Triangle) -> Triangle:
        g, i = tri
        F, off, flip = self.face_map[g]
        L = self.target.boundary_length(F)
        return (F, (off - i) % L) if flip else (F, (i + off) % L)


def identity_map(complex_: TwoComplex) -> CombinatorialMap:
    return CombinatorialMap(
        source=complex_,
        target=complex_,
        vertex_map=tuple(range(complex_.num_vertices)),
        edge_map=tuple(e + 1 for e in range(complex_.num_edges)),
        face_map=tuple((f, 0, False) for f in range(complex_.num_faces)),
    )


def presentation_complex(presentation: Presentation) -> TwoComplex:
    """One vertex, one loop per generator, one face per relator."""
    edges = tuple((0, 0) for _ in presentation.generators)
    faces = tuple(presentation.relators)  # letters double as edge traversals
    return TwoComplex(
        num_vertices=1,
        edges=edges,
        faces=faces,
        vertex_names=("P",),
        edge_names=tuple(presentation.generators),
        face_names=_auto_names("r", len(presentation.relators)),
    )


def missing_weight_edge(phi: CombinatorialMap, weights: WeightFunction, edge: int) -> int:
    image_edge = abs(phi.edge_map[edge]) - 1
    hit = {phi.triangle_image(tri) for tri in star(phi.source, edge)}
    return sum(
        weights.triangle(tri) for tri in star(phi.target, image_edge) if tri not in hit
    )


def missing_weight(phi: CombinatorialMap, weights: WeightFunction) -> int:
    return sum(missing_weight_edge(phi, weights, e) for e in range(phi.source.num_edges))


def path_missing_weight(complex_: TwoComplex, weights: WeightFunction, word: Word) -> int:
    """Missing weight of a path mapped edge-wise into the complex.

    A path domain carries no triangles, so every star is missed whole.
    """
    total = 0
    for t in word:
        e = abs(t) - 1
        if not 0 <= e < complex_.num_edges:
            raise ValueError(f"letter {t} is not an edge of the complex")
        total += weights.star_weight(complex_, e)
    return total


# ---------------------------------------------------------------------------
# packets, tracks, and packing


def reverse_path(path: Word) -> Word:
    return tuple(-t for t in reversed(path))


def _min_rotation(path: Word) -> Word:
    return min(path[k:] + path[:k] for k in range(len(path)))


def undirected_cycle_key(path: Word) -> Word:
    """Canonical form of a closed path up to rotation and reversal."""
    return min(_min_rotation(path), _min_rotation(reverse_path(path)))


@dataclass(frozen=True)
class Packet:
    """All rotated copies of a face disc glued along one boundary circle."""

    base_face: int
    complex: TwoComplex
    attachment: CombinatorialMap

    @property
    def copies(self) -> int:
        return self.complex.num_faces


def packet(complex_: TwoComplex, f: int) -> Packet:
    """The packet of a face: n rotated discs on one circle, n the exponent."""
    word = complex_.faces[f]
    L = len(word)
    n = complex_.face_exponent(f)
    step = L // n
    circle = tuple(i + 1 for i in range(L))
    faces = tuple(circle[i * step:] + circle[: i * step] for i in range(n))
    pk = TwoComplex(
        num_vertices=L,
        edges=tuple((i, (i + 1) % L) for i in range(L)),
        faces=faces,
        face_names=tuple(f"copy{i}" for i in range(n)),
    )
    attachment = CombinatorialMap(
        source=pk,
        target=complex_,
        vertex_map=tuple(complex_.corner_vertex(f, i) for i in range(L)),
        edge_map=tuple(word),
        face_map=tuple((f, i * step, False) for i in range(n)),
    )
    return Packet(base_face=f, complex=pk, attachment=attachment)


def _forward_form(phi: CombinatorialMap, g: int) -> tuple[Word, int]:
    """Source boundary path of face g, oriented to read the target boundary forward.

    Returns ``(path, off)`` with ``phi(path[j]) == target_boundary[(j + off) % L]``.
    """
    F, off, flip = phi.face_map[g]
    path = phi.source.faces[g]
    if flip:
        path = reverse_path(path)
        off = (off + 1) % phi.target.boundary_length(F)
    image = phi.target.faces[F]
    L = len(image)
    assert all(phi.map_traversal(t) == image[(j + off) % L] for j, t in enumerate(path))
    return path, off


def _valid_offsets(phi: CombinatorialMap, F: int, path: Word) -> tuple[int, ...]:
    """Rotation offsets r with image(path)[j] == boundary(F)[(j + r) % L] for all j."""
    image = phi.target.faces[F]
    L = len(image)
    mapped = phi.map_path(path)
    return tuple(
        r for r in range(L) if all(mapped[j] == image[(j + r) % L] for j in range(L))
    )


def _track_representative(phi: CombinatorialMap, F: int, path: Word) -> Word:
    """Deterministic forward-aligning representative of a track's cycle class."""
    candidates = set()
    for base in (path, reverse_path(path)):
        for k in range(len(base)):
            rot = base[k:] + base[:k]
            if _valid_offsets(phi, F, rot):
                candidates.add(rot)
    if not candidates:
        raise AssertionError("track has no forward-aligning orientation")
    return min(candidates)


def _copy_coverage(phi: CombinatorialMap, F: int, path: Word, r: int) -> frozenset:
    """(edge, target triangle) pairs covered by a packet copy along path at phase r."""
    L = len(path)
    return frozenset((abs(path[j]) - 1, (F, (j + r) % L)) for j in range(L))


def _face_coverage(phi: CombinatorialMap, g: int) -> frozenset:
    word = phi.source.faces[g]
    return frozenset(
        (abs(t) - 1, phi.triangle_image((g, i))) for i, t in enumerate(word)
    )


def _track_families(phi: CombinatorialMap, F: int, rep: Word):
    """Packet coverage patterns along a track, one family per orientation.

    Forward copies run along rep, mirrored copies along its reverse (the
    mirror family is empty unless the reversed reading also spells the
    face boundary).  Every face on the track realizes exactly the coverage
    of one pattern; the packet over a family is complete when all its
    patterns are covered.
    """
    families = {}
    for mirrored, path in ((False, rep), (True, reverse_path(rep))):
        offsets = _valid_offsets(phi, F, path)
        if offsets:
            # valid offsets form one coset of the rotation symmetries
            assert len(offsets) == phi.target.face_exponent(F), (offsets, F)
            families[mirrored] = {
                r: _copy_coverage(phi, F, path, r) for r in offsets
            }
    assert False in families, "a track representative must align forward"
    return families


@dataclass(frozen=True)
class PackingGap:
    """A boundary circle over a target face missing some packet rotations."""

    target_face: int
    track: Word
    missing_phases: tuple[int, ...]
    mirrored: bool = False


def _boundary_lift_tracks(phi: CombinatorialMap, F: int) -> dict[Word, Word]:
    """All closed lifts of the attaching circle of F, keyed by cycle class.

    Returns ``{undirected key: forward representative}``.  Lifts of the
    reversed reading are rotations/reversals of forward lifts, so scanning
    exact forward lifts suffices.
    """
    word = phi.target.faces[F]
    L = len(word)
    start_vertex_of = {}
    for v in range(phi.source.num_vertices):
        start_vertex_of.setdefault(phi.vertex_map[v], []).append(v)
    out: dict[Word, Word] = {}
    want0 = word[0]
    x0 = phi.target.traversal_endpoints(want0)[0]
    outgoing: dict[int, list[int]] = {v: [] for v in range(phi.source.num_vertices)}
    for e in range(phi.source.num_edges):
        src, dst = phi.source.edges[e]
        outgoing[src].append(e + 1)
        outgoing[dst].append(-(e + 1))

    def extend(v: int, j: int, acc: list[int]) -> None:
        if j == L:
            if v == acc_start[0]:
                path = tuple(acc)
                out.setdefault(undirected_cycle_key(path), _track_representative(phi, F, path))
            return
        for t in sorted(outgoing[v], key=abs):
            if phi.map_traversal(t) == word[j]:
                acc.append(t)
                extend(phi.source.traversal_endpoints(t)[1], j + 1, acc)
                acc.pop()

    acc_start = [0]
    for v in sorted(start_vertex_of.get(x0, [])):
        acc_start[0] = v
        extend(v, 0, [])
    return out


def _face_tracks(phi: CombinatorialMap, F: int) -> dict[Word, Word]:
    out: dict[Word, Word] = {}
    for g in range(phi.source.num_faces):
        if phi.face_map[g][0] != F:
            continue
        path, _ = _forward_form(phi, g)
        out.setdefault(undirected_cycle_key(path), _track_representative(phi, F, path))
    return out


def _track_deficits(phi: CombinatorialMap, F: int, faces_only: bool):
    """Missing packet patterns per track of a target face.

    Yields ``(rep, mirrored, missing offsets)`` triples.  A face demands
    its own orientation family complete; enumerated boundary lifts (when
    not restricted to faces) demand the forward family.
    """
    tracks = dict(_face_tracks(phi, F))
    demanded: dict[Word, set[bool]] = {key: set() for key in tracks}
    covered: dict[Word, set[frozenset]] = {key: set() for key in tracks}
    if not faces_only:
        for key, rep in _boundary_lift_tracks(phi, F).items():
            tracks.setdefault(key, rep)
            demanded.setdefault(key, set()).add(False)
            covered.setdefault(key, set())
    for g in range(phi.source.num_faces):
        if phi.face_map[g][0] != F:
            continue
        path, _ = _forward_form(phi, g)
        key = undirected_cycle_key(path)
        if key not in tracks:
            continue
        families = _track_families(phi, F, tracks[key])
        cover = _face_coverage(phi, g)
        matched = [m for m, pats in families.items() if cover in pats.values()]
        assert matched, "a mapped face must realize a packet pattern on its track"
        covered[key].add(cover)
        demanded[key].update(matched)
    for key in sorted(tracks):
        rep = tracks[key]
        families = _track_families(phi, F, rep)
        for mirrored in sorted(demanded[key]):
            if mirrored not in families:
                continue
            missing = []
            seen = set(covered[key])
            for r, pat in sorted(families[mirrored].items()):
                if pat not in seen:
                    missing.append(r)
                    seen.add(pat)  # offsets with identical coverage need one copy
            if missing:
                yield rep, mirrored, tuple(missing)


def is_packed(phi: CombinatorialMap) -> tuple[bool, list[PackingGap]]:
    """Whether every mapped face has its full packet along its boundary circle.

    The check is triggered by faces of the source only; a boundary circle
    with no face over it demands nothing (the lift condition is vacuous
    there).  Returns the verdict plus one gap witness per deficient circle.
    """
    gaps: list[PackingGap] = []
    for F in range(phi.target.num_faces):
        for rep, mirrored, missing in _track_deficits(phi, F, faces_only=True):
            gaps.append(
                PackingGap(target_face=F, track=rep, missing_phases=missing, mirrored=mirrored)
            )
    return (not gaps, gaps)


def pack(phi: CombinatorialMap, faces_only: bool = False) -> CombinatorialMap:
    """Complete packets along boundary circles by attaching missing face copies.

    With ``faces_only`` the completion is triggered only by circles already
    carrying a face (enough to keep a freshly amalgamated disc's packet
    honest); by default every closed lift of every attaching circle is
    completed, which is what drives missing weight down to its floor.

    Edges and vertices are never touched, so every loop of the old source
    persists with its image word; with nonnegative weights the missing
    weight cannot increase.
    """
    new_faces: list[Word] = []
    new_face_map: list[tuple[int, int, bool]] = []
    for F in range(phi.target.num_faces):
        for rep, mirrored, missing in _track_deficits(phi, F, faces_only=faces_only):
            path = reverse_path(rep) if mirrored else rep
            for r in missing:
                new_faces.append(path)
                new_face_map.append((F, r, False))
    if not new_faces:
        return phi
    source = TwoComplex(
        num_vertices=phi.source.num_vertices,
        edges=phi.source.edges,
        faces=phi.source.faces + tuple(new_faces),
        vertex_names=phi.source.vertex_names,
        edge_names=phi.source.edge_names,
    )
    return CombinatorialMap(
        source=source,
        target=phi.target,
        vertex_map=phi.vertex_map,
        edge_map=phi.edge_map,
        face_map=phi.face_map + tuple(new_face_map),
    )


def is_immersion_on_edges(phi: CombinatorialMap) -> bool:
    """No two distinct edge-ends at a vertex share an image traversal."""
    for v in range(phi.source.num_vertices):
        seen = set()
        for e in range(phi.source.num_edges):
            src, dst = phi.source.edges[e]
            for t, at in ((e + 1, src), (-(e + 1), dst)):
                if at != v:
                    continue
                image = phi.map_traversal(t)
                if image in seen:
                    return False
                seen.add(image)
    return True


def loop_image_words(phi: CombinatorialMap, basepoint: int = 0):
    """Image words of a spanning-tree loop basis at the basepoint, for tests."""
    from .subgroup import LoopBasis  # local import to avoid a cycle

    basis = LoopBasis(phi.source, basepoint)
    return [phi.map_path(basis.loop(i + 1)) for i in range(len(basis.edges))]


def subcomplex_inclusion(
    sub_vertices: list[int],
    sub_edges: list[int],
    sub_faces: list[int],
    target: TwoComplex,
) -> CombinatorialMap:
    """Inclusion map of the subcomplex spanned by the listed target cells."""
    vindex = {v: i for i, v in enumerate(sub_vertices)}
    eindex = {e: i for i, e in enumerate(sub_edges)}
    edges = []
    for e in sub_edges:
        u, v = target.edges[e]
        if u not in vindex or v not in vindex:
            raise ValueError(f"edge {e} endpoints not in the subcomplex")
        edges.append((vindex[u], vindex[v]))
    faces = []
    for f in sub_faces:
        word = []
        for t in target.faces[f]:
            e = abs(t) - 1
            if e not in eindex:
                raise ValueError(f"face {f} uses edge {e} outside the subcomplex")
            word.append((eindex[e] + 1) * (1 if t > 0 else -1))
        faces.append(tuple(word))
    source = TwoComplex(len(sub_vertices), tuple(edges), tuple(faces))
    return CombinatorialMap(
        source=source,
        target=target,
        vertex_map=tuple(sub_vertices),
        edge_map=tuple(e + 1 for e in sub_edges),
        face_map=tuple((f, 0, False) for f in sub_faces),
    )
