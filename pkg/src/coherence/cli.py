"""Command-line surface.

Exit codes: 0 success (coherent / trivial / matching found), 2 for
negative-but-valid outcomes (inconclusive, violation, stuck), 1 for input
errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction
from pathlib import Path

from .certify import Certificate, PrerequisiteError, certify, verify_certificate
from .complexes import missing_weight_edge
from .formats import (
    ParseError,
    format_presentation,
    parse_complex,
    parse_graph,
    parse_map,
    parse_presentation,
)
from .matching import HallViolation, m_matching
from .smallcancel import (
    c_value,
    dehn_solve,
    metric_gate,
    pieces,
    property_p,
    star_graph_cycle_rank,
    t_value,
)
from .subgroup import SubgroupInstance, present_subgroup
from .words import exponent_decompose


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _load_presentation(path: str):
    return parse_presentation(_read(path))


def _analysis(presentation) -> dict:
    report = pieces(presentation)
    gate = metric_gate(presentation, report)
    out = {
        "generators": presentation.num_generators,
        "relators": len(presentation.relators),
        "relator_details": [],
        "max_piece_length": report.max_piece_length,
        "piece_factorizations": list(report.factorization_lengths),
        "c_value": c_value(presentation, report),
        "t_value": t_value(presentation),
        "star_graph_cycle_rank": star_graph_cycle_rank(presentation),
        "property_p": property_p(presentation, report),
        "certified_dehn": gate.certified_dehn,
        "metric_ratio": str(gate.ratio) if gate.ratio is not None else None,
    }
    for i, r in enumerate(presentation.relators):
        d = exponent_decompose(r)
        out["relator_details"].append(
            {
                "relator": i,
                "length": len(r),
                "root_length": len(d.root),
                "exponent": d.exponent,
                "word": presentation.word_str(r),
            }
        )
    return out


def _print_analysis(data: dict) -> None:
    print(f"generators {data['generators']}")
    print(f"relators {data['relators']}")
    for detail in data["relator_details"]:
        print(
            f"relator {detail['relator']} length {detail['length']} "
            f"root {detail['root_length']} exponent {detail['exponent']}"
        )
    print(f"max-piece-length {data['max_piece_length']}")
    fac = " ".join(
        str(v) if v is not None else "none" for v in data["piece_factorizations"]
    )
    print(f"piece-factorizations {fac if fac else 'none'}")
    c = data["c_value"]
    print(f"c-value {c if c is not None else 'unbounded'}")
    t = data["t_value"]
    print(f"t-value {t if t is not None else 'unbounded'}")
    print(f"star-graph-cycle-rank {data['star_graph_cycle_rank']}")
    print(f"property-p {'true' if data['property_p'] else 'false'}")
    print(f"certified-dehn {'true' if data['certified_dehn'] else 'false'}")
    print(f"metric-ratio {data['metric_ratio'] if data['metric_ratio'] else 'none'}")


def cmd_analyze(args) -> int:
    presentation = _load_presentation(args.file)
    data = _analysis(presentation)
    if args.json:
        print(json.dumps(data, indent=2, sort_keys=True))
    else:
        _print_analysis(data)
    return 0


def cmd_certify(args) -> int:
    presentation = _load_presentation(args.file)
    lam = Fraction(args.lam) if args.lam else None
    cert = certify(
        presentation, args.class_name, lam=lam, assert_dehn=args.assert_dehn
    )
    print(cert.to_json())
    return 0 if cert.verdict == "coherent" else 2


def cmd_verify(args) -> int:
    presentation = _load_presentation(args.file)
    cert = Certificate.from_json(_read(args.certificate))
    ok = verify_certificate(presentation, cert)
    print("valid" if ok else "invalid")
    return 0 if ok else 1


def cmd_matching(args) -> int:
    named = parse_graph(_read(args.file))
    outcome = m_matching(named.graph, named.multiplicity)
    if isinstance(outcome, HallViolation):
        print("violation " + " ".join(named.left_names[u] for u in outcome.subset))
        print("neighborhood " + " ".join(named.right_names[v] for v in outcome.neighborhood))
        print(f"demand {outcome.demand}")
        return 2
    for u, v in sorted(outcome.edges):
        print(f"match {named.left_names[u]} {named.right_names[v]}")
    return 0


def cmd_missing_weight(args) -> int:
    named = parse_complex(_read(args.file))
    phi = parse_map(_read(args.map), named.complex)
    total = 0
    for e in range(phi.source.num_edges):
        mw = missing_weight_edge(phi, named.weights, e)
        total += mw
        print(f"edge\t{phi.source.edge_names[e]}\t{mw}")
    print(f"total\t{total}")
    return 0


def cmd_word(args) -> int:
    presentation = _load_presentation(args.file)
    gen_index = {name: i for i, name in enumerate(presentation.generators)}
    from .formats import parse_word

    word = parse_word(args.tokens, gen_index, 0)
    result = dehn_solve(presentation, word)
    print(f"verdict {result.verdict}")
    for move in result.trace:
        if move.kind == "tighten":
            print("move tighten")
        else:
            print(
                f"move replace relator {move.relator} "
                f"{'inverted ' if move.inverted else ''}rotation {move.rotation} "
                f"start {move.start} length {move.length}"
            )
    print(f"terminal {presentation.word_str(result.terminal)}")
    return 0 if result.verdict == "trivial" else 2


def _run_subgroup(presentation, args):
    cert = certify(
        presentation, "dehn", assert_dehn=args.assert_dehn
    )
    if cert.verdict != "coherent":
        return None, cert
    from .formats import parse_word

    gen_index = {name: i for i, name in enumerate(presentation.generators)}
    words = tuple(parse_word(token.split("."), gen_index, 0) for token in args.gens)
    instance = SubgroupInstance(
        presentation=presentation,
        certificate=cert,
        generator_words=words,
        bound=args.bound,
        max_iterations=args.max_iter,
    )
    return present_subgroup(instance), cert


def _subgroup_log(result) -> dict:
    return {
        "status": result.status,
        "initial_missing_weight": result.initial_missing_weight,
        "final_missing_weight": result.final_missing_weight,
        "trajectory": list(result.trajectory),
        "complete_reductions": result.complete_total,
        "iterations": [
            {
                "kernel_word": rec.kernel_word,
                "trace_length": rec.trace_length,
                "missing_before": rec.missing_before,
                "missing_after": rec.missing_after,
                "complete_reductions": rec.complete_reductions,
                "productive": rec.productive,
            }
            for rec in result.iterations
        ],
    }


def cmd_subgroup(args) -> int:
    presentation = _load_presentation(args.file)
    result, cert = _run_subgroup(presentation, args)
    if result is None:
        print(cert.to_json())
        return 2
    sys.stdout.write(format_presentation(result.presentation))
    print("---")
    print(json.dumps(_subgroup_log(result), indent=2, sort_keys=True))
    return 0


def cmd_report(args) -> int:
    from .plotting import (
        incidence_figure,
        save_figure,
        star_graph_figure,
        trajectory_figure,
    )

    presentation = _load_presentation(args.file)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    data = _analysis(presentation)
    with open(out_dir / "analysis.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["metric", "value"])
        for key in (
            "generators",
            "relators",
            "max_piece_length",
            "c_value",
            "t_value",
            "star_graph_cycle_rank",
            "property_p",
            "certified_dehn",
            "metric_ratio",
        ):
            writer.writerow([key, data[key]])
    with open(out_dir / "relators.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["relator", "length", "root_length", "exponent", "word"])
        for detail in data["relator_details"]:
            writer.writerow(
                [
                    detail["relator"],
                    detail["length"],
                    detail["root_length"],
                    detail["exponent"],
                    detail["word"],
                ]
            )
    matching = None
    if args.class_name:
        lam = Fraction(args.lam) if args.lam else None
        cert = certify(presentation, args.class_name, lam=lam, assert_dehn=args.assert_dehn)
        (out_dir / "certificate.json").write_text(cert.to_json() + "\n", encoding="utf-8")
        if cert.verdict == "coherent":
            matching = cert.matching
    save_figure(star_graph_figure(presentation), out_dir / "star_graph.png")
    save_figure(incidence_figure(presentation, matching), out_dir / "incidence_graph.png")
    if args.gens:
        result, cert = _run_subgroup(presentation, args)
        if result is None:
            (out_dir / "certificate.json").write_text(cert.to_json() + "\n", encoding="utf-8")
            return 2
        (out_dir / "subgroup.pres").write_text(
            format_presentation(result.presentation), encoding="utf-8"
        )
        (out_dir / "run_log.json").write_text(
            json.dumps(_subgroup_log(result), indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )
        save_figure(trajectory_figure(result.trajectory), out_dir / "trajectory.png")
    print(f"report written to {out_dir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coherence",
        description="coherence certificates for finitely presented groups",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="piece, overlap, and gap analysis")
    p.add_argument("file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("certify", help="emit a coherence certificate")
    p.add_argument("file")
    p.add_argument("--class", dest="class_name", required=True,
                   choices=("dehn", "c6p", "c4t4p", "lambda", "power"))
    p.add_argument("--lambda", dest="lam", default=None, metavar="P/Q")
    p.add_argument("--assert-dehn", action="store_true",
                   help="accept the majority-subword class without the metric gate")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("verify", help="re-check a certificate")
    p.add_argument("file")
    p.add_argument("certificate")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("matching", help="matching with multiplicities, or a witness")
    p.add_argument("file")
    p.set_defaults(func=cmd_matching)

    p = sub.add_parser("missing-weight", help="per-edge and total missing weight of a map")
    p.add_argument("file", help="target complex file")
    p.add_argument("--map", required=True, help="source complex and map file")
    p.set_defaults(func=cmd_missing_weight)

    p = sub.add_parser("subgroup", help="present a finitely generated subgroup")
    p.add_argument("file")
    p.add_argument("--gens", nargs="+", required=True,
                   help="generator words, letters joined by dots (e.g. a.b-.a)")
    p.add_argument("--bound", type=int, default=6)
    p.add_argument("--max-iter", type=int, default=50)
    p.add_argument("--assert-dehn", action="store_true")
    p.set_defaults(func=cmd_subgroup)

    p = sub.add_parser("word", help="run majority-subword rewriting on a word")
    p.add_argument("file")
    p.add_argument("tokens", nargs="+")
    p.set_defaults(func=cmd_word)

    p = sub.add_parser("report", help="figures and delimited analysis to a directory")
    p.add_argument("file")
    p.add_argument("--out", required=True)
    p.add_argument("--class", dest="class_name", default=None,
                   choices=("dehn", "c6p", "c4t4p", "lambda", "power"))
    p.add_argument("--lambda", dest="lam", default=None, metavar="P/Q")
    p.add_argument("--assert-dehn", action="store_true")
    p.add_argument("--gens", nargs="*", default=None)
    p.add_argument("--bound", type=int, default=6)
    p.add_argument("--max-iter", type=int, default=50)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, PrerequisiteError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
