import random

import pytest

from coherence.certify import certify
from coherence.complexes import is_immersion_on_edges, is_packed, missing_weight
from coherence.smallcancel import dehn_solve
from coherence.subgroup import (
    LoopBasis,
    SubgroupInstance,
    build_immersion,
    find_kernel_loop,
    present_subgroup,
    rewrite_in_basis,
)
from coherence.words import Presentation, free_reduce, invert

from helpers import canonical_graph, stallings_core_oracle


def power_presentation(n):
    return Presentation(("x",), ((1,) * n,))


def genus2():
    return Presentation(("a", "b", "c", "d"), ((1, 2, -1, -2, 3, 4, -3, -4),))


class TestBuildImmersion:
    def test_single_loop(self):
        phi, base = build_immersion(Presentation(("a", "b"), ()), ((1,),))
        assert phi.source.num_edges == 1
        assert phi.source.num_vertices == 1
        assert base == 0

    def test_duplicates_collapse(self):
        phi, _ = build_immersion(Presentation(("a", "b"), ()), ((1, 2), (1, 2)))
        assert phi.source.num_edges == 2  # one a-edge, one b-edge on a bigon path

    def test_matches_core_oracle(self):
        rng = random.Random(13)
        p = Presentation(("a", "b"), ())
        for _ in range(40):
            words = []
            for _ in range(rng.randint(1, 3)):
                w = free_reduce(
                    tuple(rng.choice([1, -1, 2, -2]) for _ in range(rng.randint(1, 6)))
                )
                if w:
                    words.append(w)
            if not words:
                continue
            phi, base = build_immersion(p, tuple(words))
            assert is_immersion_on_edges(phi)
            assert canonical_graph(phi, base) == stallings_core_oracle(words)

    def test_rejects_trivial_word(self):
        with pytest.raises(ValueError):
            build_immersion(Presentation(("a",), ()), ((1, -1),))


class TestFindKernelLoop:
    def test_relator_word_found(self):
        p = certify_presentation = power_presentation(4)
        cert = certify(certify_presentation, "dehn")
        assert cert.verdict == "coherent"
        phi, base = build_immersion(p, ((1,),))
        found = find_kernel_loop(phi, base, p, bound=6)
        assert found is not None
        assert found.image_word == (1, 1, 1, 1)

    def test_injective_generators_find_nothing(self):
        p = genus2()
        phi, base = build_immersion(p, ((1,), (2,)))
        assert find_kernel_loop(phi, base, p, bound=6) is None

    def test_skip_set_respected(self):
        p = power_presentation(4)
        phi, base = build_immersion(p, ((1,),))
        skip = {(1, 1, 1, 1), (-1, -1, -1, -1)}
        found = find_kernel_loop(phi, base, p, bound=4, skip=skip)
        assert found is None


class TestPresentSubgroup:
    def test_full_group_of_x4(self):
        p = power_presentation(4)
        cert = certify(p, "dehn")
        instance = SubgroupInstance(p, cert, ((1,),), bound=6)
        out = present_subgroup(instance)
        assert out.status == "stable-at-bound"
        assert out.presentation.generators == ("t0",)
        assert [abs(x) for r in out.presentation.relators for x in r] == [1, 1, 1, 1]
        assert out.trajectory[0] > out.trajectory[-1]
        assert list(out.trajectory) == sorted(out.trajectory, reverse=True)
        assert len(set(out.trajectory)) == len(out.trajectory)  # strictly decreasing
        assert out.final_missing_weight == 0

    def test_free_subgroup_of_free_group(self):
        p = Presentation(("a", "b"), ())
        cert = certify(p, "dehn")
        instance = SubgroupInstance(p, cert, ((1, 2), (2, 1)), bound=5)
        out = present_subgroup(instance)
        assert out.status == "stable-at-bound"
        assert out.presentation.relators == ()
        assert len(out.presentation.generators) == 2
        assert not out.iterations

    def test_genus2_free_rank_two(self):
        p = genus2()
        cert = certify(p, "dehn")
        instance = SubgroupInstance(p, cert, ((1,), (2,)), bound=8)
        out = present_subgroup(instance)
        assert out.status == "stable-at-bound"
        assert len(out.presentation.generators) == 2
        assert out.presentation.relators == ()

    def test_emitted_relators_rewrite_trivially(self):
        p = power_presentation(4)
        cert = certify(p, "dehn")
        out = present_subgroup(SubgroupInstance(p, cert, ((1,),), bound=6))
        basis = LoopBasis(out.phi.source, out.basepoint)
        for g in range(out.phi.source.num_faces):
            image = out.phi.map_path(out.phi.source.faces[g])
            assert dehn_solve(p, image).verdict == "trivial"
        assert basis.edges  # sanity: the loop basis survived

    def test_inputs_expressible_in_basis(self):
        p = genus2()
        cert = certify(p, "dehn")
        words = ((1, 2), (3,))
        out = present_subgroup(SubgroupInstance(p, cert, words, bound=4))
        for w in words:
            assert rewrite_in_basis(out.phi, out.basepoint, w) is not None

    def test_invariants_after_run(self):
        p = power_presentation(3)
        cert = certify(p, "dehn")
        out = present_subgroup(SubgroupInstance(p, cert, ((1,),), bound=5))
        assert is_immersion_on_edges(out.phi)
        assert is_packed(out.phi)[0]
        assert out.complete_total <= out.initial_missing_weight
        assert out.final_missing_weight >= 0

    def test_iteration_cap(self):
        p = power_presentation(4)
        cert = certify(p, "dehn")
        instance = SubgroupInstance(p, cert, ((1,),), bound=6, max_iterations=0)
        out = present_subgroup(instance)
        assert out.status == "iteration-capped"

    def test_rejects_inconclusive_certificate(self):
        w = (1, 2, 1, 1, 2, 2, 1, 2, 2)
        p = Presentation(("x", "y"), (w * 2,))
        cert = certify(p, "power")
        assert cert.verdict == "inconclusive"
        with pytest.raises(ValueError):
            present_subgroup(SubgroupInstance(p, cert, ((1,),), bound=3))

    def test_rejects_non_replay_class(self):
        p = Presentation(("a", "b"), ((1, 2),))
        cert = certify(p, "power")
        assert cert.verdict == "coherent"
        with pytest.raises(ValueError):
            present_subgroup(SubgroupInstance(p, cert, ((1,),), bound=3))


class TestFuzzTermination:
    def test_complete_reductions_bounded_by_initial_weight(self):
        rng = random.Random(99)
        presentations = [
            (power_presentation(2), 2),
            (power_presentation(3), 2),
            (power_presentation(4), 2),
            (genus2(), 2),
            (Presentation(("a", "b"), ((1, 2) * 3,)), 2),
        ]
        certs = {id(p): certify(p, "dehn") for p, _ in presentations}
        runs = 0
        for _ in range(100):
            p, num_words = presentations[rng.randrange(len(presentations))]
            k = p.num_generators
            words = []
            for _ in range(rng.randint(1, num_words)):
                w = free_reduce(
                    tuple(
                        rng.choice([s * (g + 1) for g in range(k) for s in (1, -1)])
                        for _ in range(rng.randint(1, 4))
                    )
                )
                if w:
                    words.append(w)
            if not words:
                continue
            out = present_subgroup(
                SubgroupInstance(p, certs[id(p)], tuple(words), bound=4, max_iterations=8)
            )
            assert out.complete_total <= out.initial_missing_weight
            assert all(m >= 0 for m in out.trajectory)
            runs += 1
        assert runs >= 80
