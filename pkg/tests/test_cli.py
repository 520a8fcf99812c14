import json

import pytest

from coherence.cli import main
from coherence.formats import parse_presentation

GENUS2 = "gens a b c d\nrel a b a- b- c d c- d-\n"
POWER4 = "gens x\nrel x^4\n"
P1 = """\
gens a b c d r s
rel a b a- r
rel r- b- c s
rel s- d c- d-
"""
K14_M5 = """\
left r 5
right w
right x
right y
right z
edge r w
edge r x
edge r y
edge r z
"""
TORUS = """\
weights standard
vertex P
edge a P P
edge b P P
face f a b a- b-
"""
EDGE_MAP = """\
source-vertex Q
source-edge x Q Q
map-vertex Q P
map-edge x a
"""

P1_ANALYZE = """\
generators 6
relators 3
relator 0 length 4 root 4 exponent 1
relator 1 length 4 root 4 exponent 1
relator 2 length 4 root 4 exponent 1
max-piece-length 1
piece-factorizations 4 4 4
c-value 4
t-value 12
star-graph-cycle-rank 1
property-p true
certified-dehn false
metric-ratio 1/4
"""


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


class TestAnalyze:
    def test_p1_golden(self, tmp_path, capsys):
        code = main(["analyze", write(tmp_path, "p1.pres", P1)])
        assert code == 0
        assert capsys.readouterr().out == P1_ANALYZE

    def test_json_mode(self, tmp_path, capsys):
        code = main(["analyze", write(tmp_path, "g.pres", GENUS2), "--json"])
        assert code == 0
        data = json.loads(capsys.readouterr().out)
        assert data["c_value"] == 8
        assert data["t_value"] == 8
        assert data["certified_dehn"] is True

    def test_parse_error_exit_code(self, tmp_path, capsys):
        code = main(["analyze", write(tmp_path, "bad.pres", "rel a\n")])
        assert code == 1
        assert "error" in capsys.readouterr().err


class TestCertify:
    def test_genus2_dehn(self, tmp_path, capsys):
        code = main(["certify", write(tmp_path, "g.pres", GENUS2), "--class", "dehn"])
        assert code == 0
        data = json.loads(capsys.readouterr().out)
        assert data["verdict"] == "coherent"
        assert data["multiplicities"] == {"0": 3}

    def test_inconclusive_exit_2(self, tmp_path, capsys):
        pres = "gens x y\nrel x y x x y y x y y x y x x y y x y y\n"
        code = main(["certify", write(tmp_path, "w.pres", pres), "--class", "power"])
        assert code == 2
        data = json.loads(capsys.readouterr().out)
        assert data["verdict"] == "inconclusive"
        assert data["violation"]["relators"] == [0]

    def test_prerequisite_error_exit_1(self, tmp_path, capsys):
        code = main(["certify", write(tmp_path, "p1.pres", P1), "--class", "dehn"])
        assert code == 1

    def test_asserted_dehn(self, tmp_path, capsys):
        code = main(
            ["certify", write(tmp_path, "p1.pres", P1), "--class", "dehn", "--assert-dehn"]
        )
        assert code == 0


class TestVerify:
    def test_round_trip_across_processes(self, tmp_path, capsys):
        pres = write(tmp_path, "g.pres", GENUS2)
        main(["certify", pres, "--class", "dehn"])
        cert_text = capsys.readouterr().out
        cert_file = write(tmp_path, "cert.json", cert_text)
        assert main(["verify", pres, cert_file]) == 0

    def test_tampered_certificate(self, tmp_path, capsys):
        pres = write(tmp_path, "g.pres", GENUS2)
        main(["certify", pres, "--class", "dehn"])
        data = json.loads(capsys.readouterr().out)
        data["matching"] = data["matching"][:-1]
        cert_file = write(tmp_path, "cert.json", json.dumps(data))
        assert main(["verify", pres, cert_file]) == 1


class TestMatching:
    def test_violation_exit_2(self, tmp_path, capsys):
        code = main(["matching", write(tmp_path, "k.graph", K14_M5)])
        assert code == 2
        out = capsys.readouterr().out
        assert "violation r" in out
        assert "demand 5" in out

    def test_matching_found(self, tmp_path, capsys):
        text = K14_M5.replace("left r 5", "left r 3")
        code = main(["matching", write(tmp_path, "k.graph", text)])
        assert code == 0
        out = capsys.readouterr().out.splitlines()
        assert len(out) == 3
        assert all(line.startswith("match r ") for line in out)


class TestMissingWeight:
    def test_torus_edge(self, tmp_path, capsys):
        code = main(
            [
                "missing-weight",
                write(tmp_path, "torus.cx", TORUS),
                "--map",
                write(tmp_path, "edge.map", EDGE_MAP),
            ]
        )
        assert code == 0
        out = capsys.readouterr().out
        assert "edge\tx\t2" in out
        assert "total\t2" in out


class TestWord:
    def test_relator_trivial(self, tmp_path, capsys):
        code = main(["word", write(tmp_path, "g.pres", GENUS2), "a", "b", "a-", "b-", "c", "d", "c-", "d-"])
        assert code == 0
        out = capsys.readouterr().out
        assert "verdict trivial" in out
        assert "terminal 1" in out

    def test_single_generator_stuck(self, tmp_path, capsys):
        code = main(["word", write(tmp_path, "g.pres", GENUS2), "a"])
        assert code == 2
        assert "verdict stuck" in capsys.readouterr().out


class TestSubgroup:
    def test_x_in_x4(self, tmp_path, capsys):
        code = main(
            ["subgroup", write(tmp_path, "p.pres", POWER4), "--gens", "x", "--bound", "6"]
        )
        assert code == 0
        out = capsys.readouterr().out
        pres_text, log_text = out.split("---\n")
        emitted = parse_presentation(pres_text)
        assert emitted.generators == ("t0",)
        assert emitted.relators in (((1, 1, 1, 1),), ((-1, -1, -1, -1),))
        log = json.loads(log_text)
        assert log["status"] == "stable-at-bound"
        assert log["trajectory"][0] > log["trajectory"][-1]

    def test_emitted_presentation_reparses(self, tmp_path, capsys):
        code = main(
            ["subgroup", write(tmp_path, "g.pres", GENUS2), "--gens", "a", "b", "--bound", "4"]
        )
        assert code == 0
        pres_text, _ = capsys.readouterr().out.split("---\n")
        emitted = parse_presentation(pres_text)
        assert len(emitted.generators) == 2
        assert emitted.relators == ()


class TestReport:
    def test_writes_figures_and_csv(self, tmp_path, capsys):
        out_dir = tmp_path / "report"
        code = main(
            [
                "report",
                write(tmp_path, "g.pres", GENUS2),
                "--out",
                str(out_dir),
                "--class",
                "dehn",
            ]
        )
        assert code == 0
        for name in (
            "analysis.csv",
            "relators.csv",
            "star_graph.png",
            "incidence_graph.png",
            "certificate.json",
        ):
            assert (out_dir / name).exists(), name
        rows = (out_dir / "analysis.csv").read_text().splitlines()
        assert rows[0] == "metric,value"
        assert "c_value,8" in rows

    def test_subgroup_artifacts(self, tmp_path):
        out_dir = tmp_path / "report"
        code = main(
            [
                "report",
                write(tmp_path, "p.pres", POWER4),
                "--out",
                str(out_dir),
                "--gens",
                "x",
                "--bound",
                "6",
            ]
        )
        assert code == 0
        for name in ("subgroup.pres", "run_log.json", "trajectory.png"):
            assert (out_dir / name).exists(), name
