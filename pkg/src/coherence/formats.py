"""Line-oriented file formats: presentations, bipartite graphs, complexes, maps.

All formats share the conventions: UTF-8 text, ``#`` starts a comment,
blank lines are ignored, unknown directives are errors.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass
from fractions import Fraction

from .complexes import CombinatorialMap, TwoComplex, WeightFunction
from .matching import BipartiteGraph
from .words import Presentation, Word, cyclic_reduce, free_reduce

_NAME = re.compile(r"[A-Za-z][A-Za-z0-9_]*")
_TOKEN = re.compile(r"([A-Za-z][A-Za-z0-9_]*)(-|\^-?[0-9]+)?$")

CLASS_DIRECTIVES = ("dehn", "c6p", "c4t4p", "lambda")


class ParseError(ValueError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def _lines(text: str):
    for i, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield i, line.split()


def parse_word(tokens: list[str], gen_index: dict[str, int], line_no: int) -> Word:
    letters: list[int] = []
    for token in tokens:
        m = _TOKEN.match(token)
        if not m:
            raise ParseError(line_no, f"bad token {token!r}")
        name, suffix = m.group(1), m.group(2)
        if name not in gen_index:
            raise ParseError(line_no, f"unknown generator {name!r}")
        base = gen_index[name] + 1
        if suffix is None:
            letters.append(base)
        elif suffix == "-":
            letters.append(-base)
        else:
            power = int(suffix[1:])
            if power == 0:
                raise ParseError(line_no, "zero powers are not allowed")
            letters.extend([base if power > 0 else -base] * abs(power))
    return tuple(letters)


def parse_presentation(text: str) -> Presentation:
    """Grammar: ``gens <name>+`` / ``rel <token>+`` / ``assert <class> [p/q]``.

    Tokens are ``name``, ``name-`` for the inverse, or ``name^k`` with a
    nonzero integer k.  Relators are cyclically reduced on load, with a
    warning if that changed them.
    """
    generators: list[str] = []
    gen_index: dict[str, int] = {}
    relators: list[Word] = []
    asserted: list[str] = []
    asserted_lambda: Fraction | None = None
    for line_no, tokens in _lines(text):
        head, rest = tokens[0], tokens[1:]
        if head == "gens":
            if not rest:
                raise ParseError(line_no, "gens needs at least one name")
            for name in rest:
                if not _NAME.fullmatch(name):
                    raise ParseError(line_no, f"bad generator name {name!r}")
                if name in gen_index:
                    raise ParseError(line_no, f"duplicate generator {name!r}")
                gen_index[name] = len(generators)
                generators.append(name)
        elif head == "rel":
            if not rest:
                raise ParseError(line_no, "rel needs at least one token")
            raw = parse_word(rest, gen_index, line_no)
            core, _ = cyclic_reduce(raw)
            if not core:
                raise ParseError(line_no, "relator is trivial after cyclic reduction")
            if core != raw:
                warnings.warn(
                    f"line {line_no}: relator cyclically reduced to "
                    f"{' '.join(_spell(core, generators))}",
                    stacklevel=2,
                )
            relators.append(core)
        elif head == "assert":
            if not rest or rest[0] not in CLASS_DIRECTIVES:
                raise ParseError(line_no, f"assert needs one of {CLASS_DIRECTIVES}")
            asserted.append(rest[0])
            if rest[0] == "lambda":
                if len(rest) != 2:
                    raise ParseError(line_no, "assert lambda needs a fraction p/q")
                try:
                    asserted_lambda = Fraction(rest[1])
                except (ValueError, ZeroDivisionError) as exc:
                    raise ParseError(line_no, f"bad fraction {rest[1]!r}") from exc
        else:
            raise ParseError(line_no, f"unknown directive {head!r}")
    return Presentation(
        generators=tuple(generators),
        relators=tuple(relators),
        asserted_classes=tuple(asserted),
        asserted_lambda=asserted_lambda,
    )


def _spell(word: Word, generators: list[str]) -> list[str]:
    return [generators[abs(x) - 1] + ("" if x > 0 else "-") for x in word]


def format_presentation(presentation: Presentation) -> str:
    """Write a presentation back in the input grammar."""
    lines = ["gens " + " ".join(presentation.generators)]
    for r in presentation.relators:
        lines.append("rel " + " ".join(_spell(r, list(presentation.generators))))
    for cls in presentation.asserted_classes:
        if cls == "lambda":
            lines.append(f"assert lambda {presentation.asserted_lambda}")
        else:
            lines.append(f"assert {cls}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class NamedGraph:
    graph: BipartiteGraph
    multiplicity: dict[int, int]
    left_names: tuple[str, ...]
    right_names: tuple[str, ...]


def parse_graph(text: str) -> NamedGraph:
    """Grammar: ``left <name> [multiplicity]`` / ``right <name>`` / ``edge <l> <r>``."""
    left: list[str] = []
    right: list[str] = []
    mult: dict[int, int] = {}
    edges: set[tuple[int, int]] = set()
    lindex: dict[str, int] = {}
    rindex: dict[str, int] = {}
    for line_no, tokens in _lines(text):
        head, rest = tokens[0], tokens[1:]
        if head == "left":
            if not 1 <= len(rest) <= 2 or rest[0] in lindex:
                raise ParseError(line_no, "left needs a fresh name and optional multiplicity")
            lindex[rest[0]] = len(left)
            left.append(rest[0])
            m = int(rest[1]) if len(rest) == 2 else 1
            if m < 1:
                raise ParseError(line_no, "multiplicity must be positive")
            mult[lindex[rest[0]]] = m
        elif head == "right":
            if len(rest) != 1 or rest[0] in rindex:
                raise ParseError(line_no, "right needs a fresh name")
            rindex[rest[0]] = len(right)
            right.append(rest[0])
        elif head == "edge":
            if len(rest) != 2:
                raise ParseError(line_no, "edge needs two names")
            if rest[0] not in lindex or rest[1] not in rindex:
                raise ParseError(line_no, f"unknown vertex in edge {rest}")
            edges.add((lindex[rest[0]], rindex[rest[1]]))
        else:
            raise ParseError(line_no, f"unknown directive {head!r}")
    graph = BipartiteGraph(len(left), len(right), frozenset(edges))
    return NamedGraph(graph=graph, multiplicity=mult, left_names=tuple(left), right_names=tuple(right))


@dataclass(frozen=True)
class NamedComplex:
    complex: TwoComplex
    weights: WeightFunction


def _parse_cells(entries, line_no_of):
    """Shared cell construction for complex and map files."""
    vertices: list[str] = []
    vindex: dict[str, int] = {}
    edges: list[tuple[int, int]] = []
    enames: list[str] = []
    eindex: dict[str, int] = {}
    faces: list[Word] = []
    fnames: list[str] = []
    findex: dict[str, int] = {}
    for line_no, head, rest in entries:
        if head == "vertex":
            if len(rest) != 1 or rest[0] in vindex:
                raise ParseError(line_no, "vertex needs a fresh name")
            vindex[rest[0]] = len(vertices)
            vertices.append(rest[0])
        elif head == "edge":
            if len(rest) != 3 or rest[0] in eindex:
                raise ParseError(line_no, "edge needs a fresh name and two vertices")
            name, a, b = rest
            if a not in vindex or b not in vindex:
                raise ParseError(line_no, f"unknown vertex in edge {name!r}")
            eindex[name] = len(edges)
            enames.append(name)
            edges.append((vindex[a], vindex[b]))
        elif head == "face":
            if len(rest) < 2 or rest[0] in findex:
                raise ParseError(line_no, "face needs a fresh name and an edge path")
            word = []
            for token in rest[1:]:
                reverse = token.endswith("-")
                ename = token[:-1] if reverse else token
                if ename not in eindex:
                    raise ParseError(line_no, f"unknown edge {ename!r}")
                word.append(-(eindex[ename] + 1) if reverse else eindex[ename] + 1)
            findex[rest[0]] = len(faces)
            fnames.append(rest[0])
            faces.append(tuple(word))
        else:
            raise ParseError(line_no, f"unknown directive {head!r}")
    try:
        complex_ = TwoComplex(
            num_vertices=len(vertices),
            edges=tuple(edges),
            faces=tuple(faces),
            vertex_names=tuple(vertices),
            edge_names=tuple(enames),
            face_names=tuple(fnames),
        )
    except ValueError as exc:
        raise ParseError(line_no_of, str(exc)) from exc
    return complex_, vindex, eindex, findex


def parse_complex(text: str) -> NamedComplex:
    """Grammar: ``weights standard|zero`` / ``vertex v`` / ``edge e v1 v2`` /
    ``face f <edge-token>+`` / ``weight <face> <position> <k>``.

    Edge tokens are ``e`` or ``e-`` for the reversed traversal.
    """
    mode = 1
    cells = []
    weight_lines = []
    last_line = 0
    for line_no, tokens in _lines(text):
        last_line = line_no
        head, rest = tokens[0], tokens[1:]
        if head == "weights":
            if rest not in (["standard"], ["zero"]):
                raise ParseError(line_no, "weights needs 'standard' or 'zero'")
            mode = 1 if rest == ["standard"] else 0
        elif head == "weight":
            weight_lines.append((line_no, rest))
        elif head in ("vertex", "edge", "face"):
            cells.append((line_no, head, rest))
        else:
            raise ParseError(line_no, f"unknown directive {head!r}")
    complex_, _, _, findex = _parse_cells(cells, last_line)
    overrides = {}
    for line_no, rest in weight_lines:
        if len(rest) != 3:
            raise ParseError(line_no, "weight needs face, position, value")
        fname, pos_s, val_s = rest
        if fname not in findex:
            raise ParseError(line_no, f"unknown face {fname!r}")
        f = findex[fname]
        try:
            pos, val = int(pos_s), int(val_s)
        except ValueError as exc:
            raise ParseError(line_no, "position and value must be integers") from exc
        if not 0 <= pos < complex_.boundary_length(f):
            raise ParseError(line_no, f"position {pos} out of range for face {fname!r}")
        if val < 0:
            raise ParseError(line_no, "weights are nonnegative")
        overrides[(f, pos)] = val
    return NamedComplex(
        complex=complex_, weights=WeightFunction(default=mode, overrides=overrides)
    )


def parse_map(text: str, target: TwoComplex) -> CombinatorialMap:
    """A source complex plus its map into a given target, in one file.

    Grammar: source cells as in the complex format prefixed ``source-``,
    then ``map-vertex <src> <dst>`` / ``map-edge <src> <dst>[-]`` /
    ``map-face <src> <dstface> <offset> [flip]``.
    """
    cells = []
    map_lines = []
    last_line = 0
    for line_no, tokens in _lines(text):
        last_line = line_no
        head, rest = tokens[0], tokens[1:]
        if head.startswith("source-"):
            cells.append((line_no, head[len("source-"):], rest))
        elif head in ("map-vertex", "map-edge", "map-face"):
            map_lines.append((line_no, head, rest))
        else:
            raise ParseError(line_no, f"unknown directive {head!r}")
    source, vindex, eindex, findex = _parse_cells(cells, last_line)
    tv = {name: i for i, name in enumerate(target.vertex_names)}
    te = {name: i for i, name in enumerate(target.edge_names)}
    tf = {name: i for i, name in enumerate(target.face_names)}
    vertex_map = [None] * source.num_vertices
    edge_map = [None] * source.num_edges
    face_map = [None] * source.num_faces
    for line_no, head, rest in map_lines:
        if head == "map-vertex":
            if len(rest) != 2 or rest[0] not in vindex or rest[1] not in tv:
                raise ParseError(line_no, f"bad vertex mapping {rest}")
            vertex_map[vindex[rest[0]]] = tv[rest[1]]
        elif head == "map-edge":
            if len(rest) != 2 or rest[0] not in eindex:
                raise ParseError(line_no, f"bad edge mapping {rest}")
            token = rest[1]
            reverse = token.endswith("-")
            ename = token[:-1] if reverse else token
            if ename not in te:
                raise ParseError(line_no, f"unknown target edge {ename!r}")
            signed = te[ename] + 1
            edge_map[eindex[rest[0]]] = -signed if reverse else signed
        else:
            if len(rest) not in (3, 4) or rest[0] not in findex or rest[1] not in tf:
                raise ParseError(line_no, f"bad face mapping {rest}")
            flip = len(rest) == 4
            if flip and rest[3] != "flip":
                raise ParseError(line_no, "the fourth face-mapping token must be 'flip'")
            try:
                offset = int(rest[2])
            except ValueError as exc:
                raise ParseError(line_no, "face offset must be an integer") from exc
            face_map[findex[rest[0]]] = (tf[rest[1]], offset, flip)
    for kind, entries in (("vertex", vertex_map), ("edge", edge_map), ("face", face_map)):
        for i, val in enumerate(entries):
            if val is None:
                raise ParseError(last_line, f"source {kind} {i} has no mapping")
    try:
        return CombinatorialMap(
            source=source,
            target=target,
            vertex_map=tuple(vertex_map),
            edge_map=tuple(edge_map),
            face_map=tuple(face_map),
        )
    except ValueError as exc:
        raise ParseError(last_line, str(exc)) from exc
