"""Constructive presentations of finitely generated subgroups.

Start from the folded wedge of the generator loops, hunt for loops whose
image words rewrite to nothing, and replay each rewriting step upstairs:
steps that lift through existing discs are free, steps that do not seed a
reduction whose application glues the disc (and its packet) in.  Every
pass that applies a complete reduction strictly lowers the missing
weight, and nonnegative integer weights only drop finitely often, which
is the termination certificate.

Kernel hunting is bounded: a run that exhausts the search radius reports
``stable-at-bound``, an honest label for a candidate presentation checked
out to that radius.
"""

from __future__ import annotations

from dataclasses import dataclass

from .certify import Certificate, verify_certificate
from .complexes import (
    CombinatorialMap,
    TwoComplex,
    WeightFunction,
    is_immersion_on_edges,
    is_packed,
    missing_weight,
    pack,
    presentation_complex,
)
from .reduction import Reduction, apply_reduction, find_disc, find_reduction, fold
from .smallcancel import DehnResult, dehn_solve, tighten
from .words import (
    Presentation,
    Word,
    cyclic_reduce,
    enumerate_reduced_words,
    free_reduce,
    invert,
    is_reduced,
    rotations,
)


# ---------------------------------------------------------------------------
# loop bases over a breadth-first spanning tree


def _reduce_path(path: Word) -> Word:
    out: list[int] = []
    for t in path:
        if out and out[-1] == -t:
            out.pop()
        else:
            out.append(t)
    return tuple(out)


class LoopBasis:
    """Loops at the basepoint indexed by the non-tree edges."""

    def __init__(self, complex_: TwoComplex, basepoint: int = 0):
        self.complex = complex_
        self.basepoint = basepoint
        outgoing: dict[int, list[int]] = {v: [] for v in range(complex_.num_vertices)}
        for e in range(complex_.num_edges):
            src, dst = complex_.edges[e]
            outgoing[src].append(e + 1)
            outgoing[dst].append(-(e + 1))
        for v in outgoing:
            outgoing[v].sort(key=lambda t: (abs(t), t < 0))
        parent: dict[int, int] = {}
        parent_vertex: dict[int, int] = {}
        tree: set[int] = set()
        seen = {basepoint}
        queue = [basepoint]
        while queue:
            v = queue.pop(0)
            for t in outgoing[v]:
                w = complex_.traversal_endpoints(t)[1]
                if w in seen:
                    continue
                seen.add(w)
                parent[w] = t
                parent_vertex[w] = v
                tree.add(abs(t) - 1)
                queue.append(w)
        if len(seen) != complex_.num_vertices:
            raise ValueError("complex is not connected")
        self.tree_edges = frozenset(tree)
        self._parent = parent
        self._parent_vertex = parent_vertex
        self.edges = tuple(
            e for e in range(complex_.num_edges) if e not in self.tree_edges
        )

    def path_from_base(self, v: int) -> Word:
        out: list[int] = []
        while v != self.basepoint:
            out.append(self._parent[v])
            v = self._parent_vertex[v]
        return tuple(reversed(out))

    def loop(self, letter: int) -> Word:
        """Loop for a signed basis letter (1-based index into self.edges)."""
        e = self.edges[abs(letter) - 1]
        src, dst = self.complex.edges[e]
        base = self.path_from_base(src) + (e + 1,) + invert_path(self.path_from_base(dst))
        return base if letter > 0 else invert_path(base)

    def word_loop(self, word: Word) -> Word:
        path: tuple[int, ...] = ()
        for x in word:
            path += self.loop(x)
        return _reduce_path(path)

    def rewrite_path(self, path: Word) -> Word:
        """Collapse the tree: basis letters of the non-tree edges, in order."""
        index = {e: i + 1 for i, e in enumerate(self.edges)}
        out = []
        for t in path:
            e = abs(t) - 1
            if e in index:
                out.append(index[e] if t > 0 else -index[e])
        return free_reduce(tuple(out))


def invert_path(path: Word) -> Word:
    return tuple(-t for t in reversed(path))


# ---------------------------------------------------------------------------
# building the initial immersion


def build_immersion(
    presentation: Presentation, words: tuple[Word, ...]
) -> tuple[CombinatorialMap, int]:
    """Folded wedge of circles spelling the generator words.

    Returns the map and its basepoint.  The result is an immersion on the
    1-skeleton with no faces, hence packed.
    """
    target = presentation_complex(presentation)
    reduced = []
    for w in words:
        r = free_reduce(w)
        if not r:
            raise ValueError("subgroup generator words must be nontrivial")
        reduced.append(r)
    vertices = 1
    edges: list[tuple[int, int]] = []
    emap: list[int] = []
    for word in reduced:
        prev = 0
        for i, x in enumerate(word):
            nxt = 0 if i == len(word) - 1 else vertices
            if nxt != 0:
                vertices += 1
            if x > 0:
                edges.append((prev, nxt))
                emap.append(x)
            else:
                edges.append((nxt, prev))
                emap.append(-x)
            prev = nxt
    wedge = CombinatorialMap(
        source=TwoComplex(num_vertices=vertices, edges=tuple(edges)),
        target=target,
        vertex_map=(0,) * vertices,
        edge_map=tuple(emap),
        face_map=(),
    )
    folded = fold(wedge)
    return folded.phi, folded.vertex_image[0]


# ---------------------------------------------------------------------------
# kernel hunting


@dataclass(frozen=True)
class KernelLoop:
    basis_word: Word
    loop_path: Word
    image_word: Word
    result: DehnResult


def find_kernel_loop(
    phi: CombinatorialMap,
    basepoint: int,
    presentation: Presentation,
    bound: int,
    skip: set[Word] | None = None,
    verdict_cache: dict[Word, DehnResult] | None = None,
) -> KernelLoop | None:
    """First basis word (shortest, then lexicographic) whose loop image
    rewrites to the empty word.

    ``skip`` holds image words already known to bound nothing new (their
    loops died in the source); growth only shrinks kernels, so the set
    stays valid across iterations.
    """
    skip = skip if skip is not None else set()
    cache = verdict_cache if verdict_cache is not None else {}
    basis = LoopBasis(phi.source, basepoint)
    if not basis.edges:
        return None
    for word in enumerate_reduced_words(len(basis.edges), bound):
        loop = basis.word_loop(word)
        assert loop, "a reduced basis word spells an essential graph loop"
        image = phi.map_path(loop)
        assert is_reduced(image) and image, "immersions preserve reduced loops"
        if image in skip:
            continue
        if image not in cache:
            cache[image] = dehn_solve(presentation, image)
        result = cache[image]
        if result.verdict == "trivial":
            return KernelLoop(basis_word=word, loop_path=loop, image_word=image, result=result)
    return None


# ---------------------------------------------------------------------------
# replaying a rewriting trace upstairs


@dataclass(frozen=True)
class TameOutcome:
    phi: CombinatorialMap
    basepoint: int
    missing_before: int
    missing_after: int
    complete_reductions: int
    applied_reductions: int


def _tighten_path(path: Word) -> Word:
    reduced = _reduce_path(path)
    while len(reduced) >= 2 and reduced[0] == -reduced[-1]:
        reduced = reduced[1:-1]
    return reduced


def tame(
    phi: CombinatorialMap,
    basepoint: int,
    loop: Word,
    result: DehnResult,
    weights: WeightFunction,
    presentation: Presentation,
) -> TameOutcome:
    """Replay a rewriting trace over the lifted loop, gluing discs as needed.

    Rewriting steps whose disc already lifts are pure path homotopies;
    the rest seed reductions which are extended to maximal ones, applied,
    and folded away.  The replayed loop must land on the trace's terminal
    word after every step, and the terminal here is the empty word.
    """
    X = phi.target
    beta = list(loop)
    alpha = phi.map_path(tuple(beta))
    m_before = missing_weight(phi, weights)
    complete = 0
    applied = 0
    for move in result.trace:
        if move.kind == "tighten":
            beta = list(_tighten_path(tuple(beta)))
            alpha = tighten(alpha)
            assert phi.map_path(tuple(beta)) == alpha
            continue
        n = len(alpha)
        relator = presentation.relators[move.relator]
        L = len(relator)
        seg = tuple(beta[(move.start + i) % n] for i in range(move.length))
        rest = tuple(beta[(move.start + move.length + i) % n] for i in range(n - move.length))
        if move.inverted:
            start = (L - move.rotation - move.length) % L
            seed = Reduction(
                face=move.relator,
                start=start,
                length=move.length,
                path=invert_path(seg),
            )
        else:
            start = move.rotation
            seed = Reduction(face=move.relator, start=start, length=move.length, path=seg)
        boundary = find_disc(phi, seed.face, seed.start, seed.length, seed.path)
        if boundary is None:
            red = find_reduction(phi, seed.face, seed=seed)
            assert red is not None, "an unliftable rewriting step must seed a reduction"
            out = apply_reduction(phi, red, weights)
            phi = out.phi_plus
            basepoint = out.vertex_image[basepoint]
            boundary = out.disc_boundary
            applied += 1
            if out.kind == "complete":
                complete += 1
        if move.inverted:
            replacement = tuple(
                boundary[(seed.start + seed.length + j) % L] for j in range(L - move.length)
            )
        else:
            replacement = tuple(
                -boundary[(seed.start - 1 - j) % L] for j in range(L - move.length)
            )
        beta = list(replacement + rest)
        folded = fold(phi, weights=weights)
        phi = folded.phi
        basepoint = folded.vertex_image[basepoint]
        beta = list(folded.map_path(tuple(beta)))
        phi = pack(phi, faces_only=True)
        alpha = move.replacement + tuple(
            alpha[(move.start + move.length + i) % n] for i in range(n - move.length)
        )
        assert phi.map_path(tuple(beta)) == alpha
    assert tighten(alpha) == result.terminal == ()
    assert not _tighten_path(tuple(beta)), "the lifted loop must close up"
    assert is_immersion_on_edges(phi)
    assert is_packed(phi)[0]
    m_after = missing_weight(phi, weights)
    if complete:
        assert m_after <= m_before - complete
    return TameOutcome(
        phi=phi,
        basepoint=basepoint,
        missing_before=m_before,
        missing_after=m_after,
        complete_reductions=complete,
        applied_reductions=applied,
    )


# ---------------------------------------------------------------------------
# the presentation loop


@dataclass(frozen=True)
class SubgroupInstance:
    presentation: Presentation
    certificate: Certificate
    generator_words: tuple[Word, ...]
    bound: int
    max_iterations: int = 50


@dataclass(frozen=True)
class IterationRecord:
    kernel_word: str
    trace_length: int
    missing_before: int
    missing_after: int
    complete_reductions: int
    productive: bool


@dataclass(frozen=True)
class SubgroupPresentation:
    presentation: Presentation
    status: str  # "stable-at-bound" | "iteration-capped"
    initial_missing_weight: int
    final_missing_weight: int
    trajectory: tuple[int, ...]
    iterations: tuple[IterationRecord, ...]
    complete_total: int
    phi: CombinatorialMap
    basepoint: int


def present_subgroup(instance: SubgroupInstance) -> SubgroupPresentation:
    """Run the loop: hunt a kernel loop, tame it, repeat until stable or capped.

    Requires a ``coherent`` certificate whose rewriting class supplies
    replay traces (the majority-subword class); its synthesized weights
    are what make every complete reduction count against the initial
    missing weight.
    """
    p = instance.presentation
    cert = instance.certificate
    if cert.verdict != "coherent":
        raise ValueError("subgroup presentation needs a coherent certificate")
    if cert.class_name != "dehn":
        raise ValueError("only majority-subword (dehn) class replay is supported")
    if not verify_certificate(p, cert):
        raise ValueError("certificate does not verify against the presentation")
    weights = cert.weight_function()
    phi, basepoint = build_immersion(p, instance.generator_words)
    m0 = missing_weight(phi, weights)
    trajectory = [m0]
    records: list[IterationRecord] = []
    skip: set[Word] = set()
    cache: dict[Word, DehnResult] = {}
    complete_total = 0
    status = None
    iterations = 0
    while True:
        found = find_kernel_loop(phi, basepoint, p, instance.bound, skip, cache)
        if found is None:
            status = "stable-at-bound"
            break
        if iterations >= instance.max_iterations:
            status = "iteration-capped"
            break
        out = tame(phi, basepoint, found.loop_path, found.result, weights, p)
        phi, basepoint = out.phi, out.basepoint
        productive = out.applied_reductions > 0
        records.append(
            IterationRecord(
                kernel_word=p.word_str(found.image_word),
                trace_length=len(found.result.trace),
                missing_before=out.missing_before,
                missing_after=out.missing_after,
                complete_reductions=out.complete_reductions,
                productive=productive,
            )
        )
        complete_total += out.complete_reductions
        assert complete_total <= m0, "complete reductions are bounded by the initial weight"
        if productive:
            iterations += 1
            trajectory.append(out.missing_after)
        else:
            skip.add(found.image_word)
    emitted = _read_off_presentation(phi, basepoint)
    return SubgroupPresentation(
        presentation=emitted,
        status=status,
        initial_missing_weight=m0,
        final_missing_weight=missing_weight(phi, weights),
        trajectory=tuple(trajectory),
        iterations=tuple(records),
        complete_total=complete_total,
        phi=phi,
        basepoint=basepoint,
    )


def _read_off_presentation(phi: CombinatorialMap, basepoint: int) -> Presentation:
    basis = LoopBasis(phi.source, basepoint)
    names = tuple(f"t{i}" for i in range(len(basis.edges)))
    relators = []
    seen = set()
    for g in range(phi.source.num_faces):
        word = basis.rewrite_path(phi.source.faces[g])
        word = cyclic_reduce(word)[0]
        if not word:
            continue
        canonical = min(
            min(rotations(word)), min(rotations(invert(word)))
        )
        if canonical in seen:
            continue
        seen.add(canonical)
        relators.append(word)
    return Presentation(names, tuple(relators))


def rewrite_in_basis(phi: CombinatorialMap, basepoint: int, image_word: Word) -> Word | None:
    """Express a loop given by its image word in the emitted loop basis.

    Follows the unique lift from the basepoint (the map is an immersion);
    None when the word does not lift to a closed loop there.
    """
    outgoing: dict[int, dict[int, int]] = {v: {} for v in range(phi.source.num_vertices)}
    for e in range(phi.source.num_edges):
        src, dst = phi.source.edges[e]
        outgoing[src][phi.map_traversal(e + 1)] = e + 1
        outgoing[dst][phi.map_traversal(-(e + 1))] = -(e + 1)
    path = []
    v = basepoint
    for x in image_word:
        t = outgoing[v].get(x)
        if t is None:
            return None
        path.append(t)
        v = phi.source.traversal_endpoints(t)[1]
    if v != basepoint:
        return None
    return LoopBasis(phi.source, basepoint).rewrite_path(tuple(path))
