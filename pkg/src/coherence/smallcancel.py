"""Piece analysis, overlap classes, star graphs, and majority-subword rewriting.

Pieces follow the classical convention: a word is a piece when it is a
common prefix of two distinct elements of the symmetrized relator set
(all rotations of all relators and their inverses, deduplicated as
words).  Rotations of a periodic relator coincide as words and therefore
witness nothing by themselves.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .words import (
    Presentation,
    Word,
    cyclic_reduce,
    exponent_decompose,
    free_reduce,
    invert,
    rotations,
)


def symmetrized_set(presentation: Presentation) -> tuple[Word, ...]:
    """All rotations of all relators and of their inverses, deduplicated."""
    out: set[Word] = set()
    for r in presentation.relators:
        for w in (r, invert(r)):
            out.update(rotations(w))
    return tuple(sorted(out))


def _longest_common_prefix(a: Word, b: Word) -> int:
    n = 0
    for x, y in zip(a, b):
        if x != y:
            break
        n += 1
    return n


@dataclass(frozen=True)
class PieceReport:
    pieces: tuple[Word, ...]  # maximal common prefixes, deduplicated
    max_piece_length: int
    min_relator_length: int
    factorization_lengths: tuple[int | None, ...]  # per relator; None = not a product of pieces
    metric_ratio: Fraction | None  # max piece length / min relator length
    prefix_closure: frozenset = frozenset()  # every piece, maximal or not

    def is_piece(self, word: Word) -> bool:
        return len(word) > 0 and word in self.prefix_closure


def pieces(presentation: Presentation) -> PieceReport:
    """Maximal common prefixes across the symmetrized set, plus factorizations.

    The factorization length of a relator is the least number of pieces
    multiplying to one of its rotations (equivalently, a cyclic
    factorization), or None when no rotation is a product of pieces.
    """
    sym = symmetrized_set(presentation)
    maximal: set[Word] = set()
    for i, a in enumerate(sym):
        best = 0
        for j, b in enumerate(sym):
            if i == j:
                continue
            best = max(best, _longest_common_prefix(a, b))
        if best:
            maximal.add(a[:best])
    # drop prefixes of longer pieces for the report; keep the closure for tests
    pieces_out = tuple(
        sorted(p for p in maximal if not any(p != q and q[: len(p)] == p for q in maximal))
    )
    closure = frozenset(p[:i] for p in maximal for i in range(1, len(p) + 1))

    def min_cyclic_factorization(word: Word) -> int | None:
        # pieces are prefix-closed, so only the longest piece-prefix at each
        # cyclic position matters; DP per rotation is then linear
        n = len(word)
        doubled = word + word
        reach = [0] * n
        for i in range(n):
            ln = 0
            while ln < n and doubled[i : i + ln + 1] in closure:
                ln += 1
            reach[i] = ln
        best_overall = None
        for r in range(n):
            INF = n + 1
            best = [INF] * (n + 1)
            best[n] = 0
            for i in range(n - 1, -1, -1):
                top = reach[(r + i) % n]
                for ln in range(1, min(top, n - i) + 1):
                    if best[i + ln] < INF:
                        best[i] = min(best[i], 1 + best[i + ln])
            if best[0] <= n and (best_overall is None or best[0] < best_overall):
                best_overall = best[0]
        return best_overall

    fac = tuple(min_cyclic_factorization(r) for r in presentation.relators)
    max_len = max((len(p) for p in pieces_out), default=0)
    min_rel = min((len(r) for r in presentation.relators), default=0)
    ratio = Fraction(max_len, min_rel) if presentation.relators else None
    return PieceReport(
        pieces=pieces_out,
        max_piece_length=max_len,
        min_relator_length=min_rel,
        factorization_lengths=fac,
        metric_ratio=ratio,
        prefix_closure=closure,
    )


def c_value(presentation: Presentation, report: PieceReport | None = None) -> int | None:
    """Largest p such that no relator factors into fewer than p pieces.

    None means unbounded (some relator is not a product of pieces at all,
    so every overlap condition C(p) holds vacuously).
    """
    report = report or pieces(presentation)
    if not presentation.relators:
        return None
    values = report.factorization_lengths
    if any(v is None for v in values):
        return None
    return min(values)


def star_graph(presentation: Presentation) -> tuple[tuple[int, ...], set[frozenset]]:
    """Vertices are letters and their inverses; each adjacent pair y z in a
    symmetrized relator joins the vertices y^-1 and z.

    Returns (vertex letters, undirected edge set on those letters).
    """
    k = presentation.num_generators
    vertices = tuple(range(1, k + 1)) + tuple(range(-1, -k - 1, -1))
    edges: set[frozenset] = set()
    for r in presentation.relators:
        for w in (r, invert(r)):
            n = len(w)
            for i in range(n):
                y, z = w[i], w[(i + 1) % n]
                assert -y != z  # relators are cyclically reduced
                edges.add(frozenset((-y, z)))
    return vertices, edges


def star_graph_cycle_rank(presentation: Presentation) -> int:
    """Number of independent cycles (edges - vertices + components)."""
    vertices, edges = star_graph(presentation)
    adjacency: dict[int, set[int]] = {v: set() for v in vertices}
    for e in edges:
        a, b = tuple(e)
        adjacency[a].add(b)
        adjacency[b].add(a)
    seen: set[int] = set()
    components = 0
    for v in vertices:
        if v in seen:
            continue
        components += 1
        stack = [v]
        while stack:
            u = stack.pop()
            if u in seen:
                continue
            seen.add(u)
            stack.extend(adjacency[u] - seen)
    return len(edges) - len(vertices) + components


GIRTH_SEARCH_CAP = 12


def t_value(presentation: Presentation) -> int | None:
    """Length of the shortest reduced star-graph cycle of length at least 3.

    The gap conditions T(q) hold exactly for q up to this value.  None
    means no such cycle exists up to the search cap, so every T(q) holds.
    A reduced cycle never repeats an edge consecutively, including across
    the wrap, so the search fixes the first edge and forbids it at closure.
    """
    _, edge_set = star_graph(presentation)
    edges = [tuple(e) for e in sorted(edge_set, key=sorted)]
    incident: dict[int, list[int]] = {}
    for idx, (a, b) in enumerate(edges):
        incident.setdefault(a, []).append(idx)
        incident.setdefault(b, []).append(idx)
    best = None
    for first, (v0, v1) in enumerate(edges):
        for start, after in ((v0, v1), (v1, v0)):
            frontier = [(after, first, 1)]
            seen = {(after, first): 1}
            while frontier:
                nxt = []
                for v, in_edge, depth in frontier:
                    if depth >= GIRTH_SEARCH_CAP or (best is not None and depth >= best):
                        continue
                    for idx in incident[v]:
                        if idx == in_edge:
                            continue
                        a, b = edges[idx]
                        w = b if v == a else a
                        d = depth + 1
                        if w == start and idx != first and d >= 3:
                            if best is None or d < best:
                                best = d
                            continue
                        if seen.get((w, idx), GIRTH_SEARCH_CAP + 1) <= d:
                            continue
                        seen[(w, idx)] = d
                        nxt.append((w, idx, d))
                frontier = nxt
    return best


def property_p(presentation: Presentation, report: PieceReport | None = None) -> bool:
    """All pieces of length one and no relator a proper power."""
    report = report or pieces(presentation)
    if report.max_piece_length > 1:
        return False
    for r in presentation.relators:
        if exponent_decompose(r).exponent > 1:
            return False
    return True


@dataclass(frozen=True)
class MetricGate:
    certified_dehn: bool
    ratio: Fraction | None  # max piece length / min relator length


def metric_gate(presentation: Presentation, report: PieceReport | None = None) -> MetricGate:
    """Sufficient rewriting certificate: every piece occurrence shorter than
    a sixth of its host relator.

    Passing certifies that majority-subword rewriting decides the word
    problem; failing decides nothing.
    """
    report = report or pieces(presentation)
    ok = True
    for r in presentation.relators:
        # longest piece occurring as a cyclic subword of r
        longest = 0
        for rot in rotations(r):
            for ln in range(len(rot), 0, -1):
                if report.is_piece(rot[:ln]):
                    longest = max(longest, ln)
                    break
        if 6 * longest >= len(r):
            ok = False
    return MetricGate(certified_dehn=ok, ratio=report.metric_ratio)


# ---------------------------------------------------------------------------
# majority-subword rewriting with replayable traces


@dataclass(frozen=True)
class ReplaceMove:
    relator: int
    inverted: bool
    rotation: int
    start: int  # position in the current (tightened) word
    length: int
    replacement: Word

    kind = "replace"


@dataclass(frozen=True)
class TightenMove:
    kind = "tighten"


@dataclass(frozen=True)
class DehnResult:
    verdict: str  # "trivial" | "stuck"
    terminal: Word
    trace: tuple


def tighten(word: Word) -> Word:
    return cyclic_reduce(free_reduce(word))[0]


def apply_replace(word: Word, move: ReplaceMove) -> Word:
    """Rewrite the cyclic occurrence, rebasing the word at the replacement."""
    n = len(word)
    occurrence = tuple(word[(move.start + i) % n] for i in range(move.length))
    rest = tuple(word[(move.start + move.length + i) % n] for i in range(n - move.length))
    del occurrence
    return move.replacement + rest


def replay_trace(word: Word, trace) -> Word:
    for move in trace:
        if move.kind == "tighten":
            word = tighten(word)
        else:
            word = apply_replace(word, move)
    return word


def dehn_solve(presentation: Presentation, word: Word, max_moves: int | None = None) -> DehnResult:
    """Repeatedly tighten and replace majority subwords of relators.

    An empty terminal word proves triviality unconditionally (the trace
    replays as a proof).  A stuck verdict certifies nothing unless the
    presentation's rewriting is known to decide the word problem.  Each
    replacement strictly shortens the word, so at most ``len(word)``
    replacements happen.
    """
    by_relator = []
    for r in presentation.relators:
        members = []
        for inverted, base in ((False, r), (True, invert(r))):
            for rot in range(len(base)):
                members.append((inverted, rot, base[rot:] + base[:rot]))
        by_relator.append(members)
    trace: list = []
    current = word
    budget = max_moves if max_moves is not None else max(1, len(word))
    replaces = 0
    while True:
        reduced = tighten(current)
        if reduced != current:
            trace.append(TightenMove())
            current = reduced
        if not current:
            return DehnResult(verdict="trivial", terminal=(), trace=tuple(trace))
        move = _find_replace(by_relator, current)
        if move is None or replaces >= budget:
            return DehnResult(verdict="stuck", terminal=current, trace=tuple(trace))
        trace.append(move)
        current = apply_replace(current, move)
        replaces += 1


def _find_replace(by_relator, word: Word) -> ReplaceMove | None:
    """First applicable move: smallest relator, then smallest start, then longest."""
    n = len(word)
    for ri, members in enumerate(by_relator):
        if not members:
            continue
        rl = len(members[0][2])
        floor = rl // 2 + 1  # strictly more than half the relator
        for start in range(n):
            for length in range(min(n, rl), floor - 1, -1):
                occurrence = tuple(word[(start + i) % n] for i in range(length))
                for inverted, rot, member in members:
                    if occurrence == member[:length]:
                        return ReplaceMove(
                            relator=ri,
                            inverted=inverted,
                            rotation=rot,
                            start=start,
                            length=length,
                            replacement=invert(member[length:]),
                        )
    return None
