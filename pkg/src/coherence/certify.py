"""Coherence certificates from matchings with multiplicities.

The sufficient test: pick per-relator multiplicities according to the
presentation's rewriting class, ask for a matching of the incidence graph
using each relator with its multiplicity and each generator at most once,
and on success synthesize triangle weights putting weight one at one
boundary position per matched generator.  Every 1-cell of the presentation
complex then carries star weight at most one while every 2-cell has
strictly positive weight equal to its multiplicity, which is exactly what
the subgroup presentation loop needs to terminate.

The verdict is ``coherent`` or ``inconclusive``; the test is sufficient,
never necessary, so no presentation is ever declared incoherent.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction

from .complexes import WeightFunction, presentation_complex
from .matching import BipartiteGraph, HallViolation, MMatching, m_matching
from .smallcancel import PieceReport, c_value, metric_gate, pieces, property_p, t_value
from .words import Presentation, exponent_decompose, letter_gen, rotate

CLASSES = ("dehn", "c6p", "c4t4p", "lambda", "power")


class PrerequisiteError(ValueError):
    """The presentation does not (verifiably) belong to the requested class."""


def incidence_graph(presentation: Presentation) -> BipartiteGraph:
    """Left vertices the relators, right the generators, edges by occurrence."""
    edges = set()
    for i in range(len(presentation.relators)):
        for g in presentation.occurring_generators(i):
            edges.add((i, g))
    return BipartiteGraph(
        num_left=len(presentation.relators),
        num_right=presentation.num_generators,
        edges=frozenset(edges),
    )


def _largest_below(bound: Fraction) -> int:
    """Largest integer strictly below the bound."""
    floor = bound.numerator // bound.denominator
    return floor - 1 if bound == floor else floor


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def _max_piece_in(report: PieceReport, relator) -> int:
    longest = 0
    for k in range(len(relator)):
        rot = rotate(relator, k)
        for ln in range(len(rot), longest, -1):
            if report.is_piece(rot[:ln]):
                longest = ln
                break
    return longest


@dataclass(frozen=True)
class ClassAnalysis:
    """Resolved class data: prerequisites evidence and per-relator bounds."""

    name: str
    prerequisites: dict
    multiplicities: tuple[int, ...]
    bounds: tuple[int, ...]  # per relator, the replacement-length bound n*m must cover


def analyze_class(
    presentation: Presentation,
    class_name: str,
    lam: Fraction | None = None,
    assert_dehn: bool = False,
) -> ClassAnalysis:
    """Check prerequisites and produce multiplicities for the given class.

    Multiplicity formulas follow the class conventions, clamped to stay
    positive (a matching uses each relator at least once); the clamp only
    relaxes the matching demand, never the covering bound.
    """
    if class_name not in CLASSES:
        raise PrerequisiteError(f"unknown class {class_name!r}")
    relators = presentation.relators
    if not relators:
        # nothing to match; any class certifies a free presentation
        return ClassAnalysis(class_name, {"free": True}, (), ())
    report = pieces(presentation)
    decomp = [exponent_decompose(r) for r in relators]

    if class_name == "dehn":
        gate = metric_gate(presentation, report)
        asserted = "dehn" in presentation.asserted_classes or assert_dehn
        if not gate.certified_dehn and not asserted:
            raise PrerequisiteError(
                "majority-subword rewriting is not certified for this presentation; "
                "pass an explicit assertion to proceed"
            )
        prereq = {
            "metric_gate": gate.certified_dehn,
            "asserted": bool(asserted),
            "ratio": str(gate.ratio) if gate.ratio is not None else None,
        }
        ms, bounds = [], []
        for r, d in zip(relators, decomp):
            w, n = len(d.root), d.exponent
            if n == 1:
                base = (w - 1) // 2
            elif n == 2:
                base = w // 2
            else:
                base = (w + 1) // 2
            m = max(1, base)
            bound = (len(r) - 1) // 2
            assert n * m >= bound
            ms.append(m)
            bounds.append(bound)
        return ClassAnalysis(class_name, prereq, tuple(ms), tuple(bounds))

    if class_name in ("c6p", "c4t4p"):
        c = c_value(presentation, report)
        has_p = property_p(presentation, report)
        need_c = 6 if class_name == "c6p" else 4
        ok_c = c is None or c >= need_c
        prereq = {"c_value": c, "property_p": has_p}
        if class_name == "c4t4p":
            t = t_value(presentation)
            prereq["t_value"] = t
            ok_t = t is None or t >= 4
        else:
            ok_t = True
        if not (ok_c and has_p and ok_t):
            raise PrerequisiteError(f"presentation fails the {class_name} prerequisites: {prereq}")
        per_copy = 3 if class_name == "c6p" else 2
        ms, bounds = [], []
        for r in relators:
            ms.append(per_copy)
            bounds.append(per_copy * _max_piece_in(report, r))
        for r, d, m, bound in zip(relators, decomp, ms, bounds):
            assert d.exponent * m >= bound
        return ClassAnalysis(class_name, prereq, tuple(ms), tuple(bounds))

    # replacement-quality classes: a subword longer than (1 - lambda)|r|
    # always has a complement shorter than lambda |r|
    if class_name == "power":
        if len(relators) != 1:
            raise PrerequisiteError("the power-relator class needs exactly one relator")
        n = decomp[0].exponent
        lam = Fraction(1, n)
        source = "newman=>1/n"
    else:
        if lam is None:
            lam = presentation.asserted_lambda
        if lam is not None:
            source = "asserted"
        elif len(relators) == 1 and decomp[0].exponent >= 2:
            # the sharper derivation: a single power relator replaces along
            # arcs longer than (1 - 1/n) of the boundary
            lam = Fraction(1, decomp[0].exponent)
            source = "newman=>1/n"
        else:
            gate = metric_gate(presentation, report)
            if gate.certified_dehn or "dehn" in presentation.asserted_classes or assert_dehn:
                lam = Fraction(1, 2)
                source = "dehn=>1/2"
            else:
                raise PrerequisiteError(
                    "no replacement-quality parameter available: supply one or "
                    "use a class that derives it"
                )
    lam = Fraction(lam)
    if not 0 < lam <= 1:
        raise PrerequisiteError("the replacement-quality parameter must lie in (0, 1]")
    prereq = {"lambda": str(lam), "source": source}
    ms, bounds = [], []
    for r, d in zip(relators, decomp):
        k = _largest_below(lam * len(r))
        m = max(1, _ceil_div(max(k, 0), d.exponent))
        assert d.exponent * m >= k
        ms.append(m)
        bounds.append(max(k, 0))
    if class_name == "power":
        prereq["exponent"] = decomp[0].exponent
        prereq["root_length"] = len(decomp[0].root)
    return ClassAnalysis(class_name, prereq, tuple(ms), tuple(bounds))


def multiplicities(
    presentation: Presentation,
    class_name: str,
    lam: Fraction | None = None,
    assert_dehn: bool = False,
) -> dict[int, int]:
    analysis = analyze_class(presentation, class_name, lam=lam, assert_dehn=assert_dehn)
    return {i: m for i, m in enumerate(analysis.multiplicities)}


def synthesize_weights(
    presentation: Presentation, matching: MMatching
) -> tuple[WeightFunction, tuple[tuple[int, int], ...]]:
    """Weight one at one boundary position per matching edge.

    For the edge (relator, generator) the smallest position of the relator
    reading the generator (either sign) and not yet used gets the weight;
    positions for one relator are automatically distinct since the matched
    generators are.  Returns the weight function and the chosen
    (face, position) pairs.
    """
    chosen: list[tuple[int, int]] = []
    used: dict[int, set[int]] = {}
    for r, g in sorted(matching.edges):
        word = presentation.relators[r]
        taken = used.setdefault(r, set())
        position = next(
            j for j, x in enumerate(word) if letter_gen(x) == g and j not in taken
        )
        taken.add(position)
        chosen.append((r, position))
    overrides = {(r, j): 1 for r, j in chosen}
    return WeightFunction.sparse(overrides), tuple(sorted(chosen))


def presentation_digest(presentation: Presentation) -> str:
    """Hash of a canonical spelling: sorted generators, relators at their
    lexicographically least rotation."""
    gens = ",".join(sorted(presentation.generators))
    rels = []
    for r in presentation.relators:
        spelled = min(
            "|".join(presentation.letter_name(x) for x in rotate(r, k))
            for k in range(len(r))
        )
        rels.append(spelled)
    payload = gens + ";" + ";".join(sorted(rels))
    return hashlib.sha256(payload.encode()).hexdigest()


@dataclass(frozen=True)
class Certificate:
    presentation: dict
    digest: str
    class_name: str
    prerequisites: dict
    multiplicities: dict[int, int]
    matching: tuple[tuple[int, str], ...]
    weights: tuple[tuple[int, int, int], ...]
    inequality_checks: tuple[dict, ...]
    verdict: str
    violation: dict | None = None

    def to_json_dict(self) -> dict:
        out = {
            "presentation": self.presentation,
            "digest": self.digest,
            "class": self.class_name,
            "prerequisites": self.prerequisites,
            "multiplicities": {str(k): v for k, v in sorted(self.multiplicities.items())},
            "matching": [list(edge) for edge in self.matching],
            "weights": [list(w) for w in self.weights],
            "inequality_checks": list(self.inequality_checks),
            "verdict": self.verdict,
        }
        if self.violation is not None:
            out["violation"] = self.violation
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json_dict(cls, data: dict) -> "Certificate":
        return cls(
            presentation=data["presentation"],
            digest=data["digest"],
            class_name=data["class"],
            prerequisites=data["prerequisites"],
            multiplicities={int(k): v for k, v in data["multiplicities"].items()},
            matching=tuple((int(r), g) for r, g in data["matching"]),
            weights=tuple((int(r), int(j), int(w)) for r, j, w in data["weights"]),
            inequality_checks=tuple(data["inequality_checks"]),
            verdict=data["verdict"],
            violation=data.get("violation"),
        )

    @classmethod
    def from_json(cls, text: str) -> "Certificate":
        return cls.from_json_dict(json.loads(text))

    def weight_function(self) -> WeightFunction:
        return WeightFunction.sparse({(r, j): w for r, j, w in self.weights})


def _presentation_snapshot(presentation: Presentation) -> dict:
    return {
        "generators": list(presentation.generators),
        "relators": [presentation.word_str(r) for r in presentation.relators],
    }


def certify(
    presentation: Presentation,
    class_name: str,
    lam: Fraction | None = None,
    assert_dehn: bool = False,
) -> Certificate:
    """Run the full pipeline and emit a re-checkable certificate."""
    analysis = analyze_class(presentation, class_name, lam=lam, assert_dehn=assert_dehn)
    graph = incidence_graph(presentation)
    mult = {i: m for i, m in enumerate(analysis.multiplicities)}
    checks = []
    decomp = [exponent_decompose(r) for r in presentation.relators]
    for i, (d, m, bound) in enumerate(zip(decomp, analysis.multiplicities, analysis.bounds)):
        checks.append(
            {
                "relator": i,
                "exponent": d.exponent,
                "multiplicity": m,
                "bound": bound,
                "holds": d.exponent * m >= bound,
            }
        )
    base = dict(
        presentation=_presentation_snapshot(presentation),
        digest=presentation_digest(presentation),
        class_name=analysis.name,
        prerequisites=analysis.prerequisites,
        multiplicities=mult,
        inequality_checks=tuple(checks),
    )
    if not presentation.relators:
        return Certificate(
            matching=(), weights=(), verdict="coherent", **base
        )
    outcome = m_matching(graph, mult)
    if isinstance(outcome, HallViolation):
        violation = {
            "relators": list(outcome.subset),
            "neighborhood": [presentation.generators[g] for g in outcome.neighborhood],
            "demand": outcome.demand,
        }
        return Certificate(
            matching=(), weights=(), verdict="inconclusive", violation=violation, **base
        )
    _, chosen = synthesize_weights(presentation, outcome)
    matching_named = tuple(
        sorted((r, presentation.generators[g]) for r, g in outcome.edges)
    )
    weights = tuple((r, j, 1) for r, j in chosen)
    return Certificate(matching=matching_named, weights=weights, verdict="coherent", **base)


def verify_certificate(presentation: Presentation, certificate: Certificate) -> bool:
    """Recompute every certificate field from scratch; True iff all agree."""
    try:
        if certificate.digest != presentation_digest(presentation):
            return False
        lam = None
        if certificate.class_name == "lambda":
            lam = Fraction(certificate.prerequisites["lambda"])
        asserted = bool(certificate.prerequisites.get("asserted"))
        analysis = analyze_class(
            presentation, certificate.class_name, lam=lam, assert_dehn=asserted
        )
        if {i: m for i, m in enumerate(analysis.multiplicities)} != certificate.multiplicities:
            return False
        recomputed = []
        for i, r in enumerate(presentation.relators):
            d = exponent_decompose(r)
            recomputed.append(
                {
                    "relator": i,
                    "exponent": d.exponent,
                    "multiplicity": analysis.multiplicities[i],
                    "bound": analysis.bounds[i],
                    "holds": d.exponent * analysis.multiplicities[i] >= analysis.bounds[i],
                }
            )
        if tuple(recomputed) != tuple(certificate.inequality_checks):
            return False
        if not all(check["holds"] for check in recomputed):
            return False
        graph = incidence_graph(presentation)
        if certificate.verdict == "inconclusive":
            if certificate.violation is None or certificate.matching or certificate.weights:
                return False
            subset = list(certificate.violation["relators"])
            hood = {
                g
                for r in subset
                for g in presentation.occurring_generators(r)
            }
            named = sorted(presentation.generators[g] for g in hood)
            if named != sorted(certificate.violation["neighborhood"]):
                return False
            demand = sum(certificate.multiplicities[r] for r in subset)
            return demand == certificate.violation["demand"] and len(hood) < demand
        if certificate.verdict != "coherent":
            return False
        if not presentation.relators:
            return not certificate.matching and not certificate.weights
        gen_index = {name: g for g, name in enumerate(presentation.generators)}
        edges = set()
        right_used = set()
        left_count = {i: 0 for i in range(len(presentation.relators))}
        for r, gname in certificate.matching:
            g = gen_index.get(gname)
            if g is None or (r, g) not in graph.edges:
                return False
            if g in right_used:
                return False
            right_used.add(g)
            left_count[r] += 1
            edges.add((r, g))
        if left_count != certificate.multiplicities:
            return False
        # weights: one unit per matching edge at a position reading the
        # matched generator, positions distinct per relator
        by_relator: dict[int, list[int]] = {}
        if any(w != 1 for _, _, w in certificate.weights):
            return False
        for r, j, _ in certificate.weights:
            word = presentation.relators[r]
            if not 0 <= j < len(word):
                return False
            by_relator.setdefault(r, []).append(j)
        matched_gens = {r: set() for r in left_count}
        for r, g in edges:
            matched_gens[r].add(g)
        for r, positions in by_relator.items():
            if len(set(positions)) != len(positions):
                return False
            read = {letter_gen(presentation.relators[r][j]) for j in positions}
            if read != matched_gens[r]:
                return False
        if {r: len(js) for r, js in by_relator.items()} != {
            r: c for r, c in left_count.items() if c
        }:
            return False
        # star totals at most one, face weights equal the multiplicities
        complex_ = presentation_complex(presentation)
        wf = certificate.weight_function()
        for e in range(complex_.num_edges):
            if wf.star_weight(complex_, e) > 1:
                return False
        for i in range(len(presentation.relators)):
            if wf.face_weight(complex_, i) != certificate.multiplicities[i]:
                return False
            if certificate.multiplicities[i] < 1:
                return False
        return True
    except (KeyError, ValueError, TypeError, PrerequisiteError):
        return False
