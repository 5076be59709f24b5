import json

import pytest

from gridgroups.abelian import AbelianInvariants
from gridgroups.classify import (ClassificationRecord, classify,
                                 classify_matrix, family_pairing, family_record,
                                 forces_a_eq_b, record_to_json,
                                 torsion_quotient_report)
from gridgroups.enumerate import enumerate_pairings
from gridgroups.grid import (GridDims, GridError, format_matrix,
                             orbit_canonical_form, parse_matrix)
from gridgroups.present import Presentation, parse_word, presentation_from_matrix
from gridgroups.wordprob import Budgets, GroupToolbox

from reference_tables import (NON_AMENABLE_5x5, RANK_3x3, RANK_3x5,
                              RANK_3x7_INFINITE)

QUICK = Budgets(max_cosets=20_000, kb_max_rules=1500)


class TestClassify:
    def test_order_four_class(self):
        rec = classify_matrix(parse_matrix(RANK_3x3[1][0]), QUICK)
        assert rec.verdict.kind == "finite"
        assert rec.verdict.order == 4
        assert rec.verdict.name == "Z4"
        assert rec.dfc.ab_is_one and rec.dfc.ba_is_one

    def test_infinite_nonabelian_class(self):
        rec = classify_matrix(parse_matrix(RANK_3x7_INFINITE[0][0]), QUICK,
                              assume_canonical=False)
        assert rec.verdict.kind == "infinite"
        assert rec.verdict.abelian is False
        assert (rec.abelian_invariants.free_rank,
                rec.abelian_invariants.torsion) == RANK_3x7_INFINITE[0][1]

    def test_degenerate_class_carries_witness(self):
        # the first 3x5 canonical class is degenerate: check the witness names
        mats = list(enumerate_pairings(GridDims(3, 5)))
        recs = [classify_matrix(m, QUICK) for m in mats]
        degs = [r for r in recs if r.verdict.kind == "degenerate"]
        assert len(degs) == 67
        for rec in degs[:5]:
            g1, g2, how = rec.verdict.witness
            assert g1 != g2
            assert how

    def test_degenerate_witness_is_checkable(self):
        # re-validate a witness by an independent high-budget prover pass
        rec = None
        for m in enumerate_pairings(GridDims(3, 5)):
            rec = classify_matrix(m, QUICK)
            if rec.verdict.kind == "degenerate":
                break
        pres = presentation_from_matrix(rec.matrix)
        g1, g2, _ = rec.verdict.witness
        tb = GroupToolbox(pres, Budgets(max_cosets=100_000))
        w1 = parse_word(g1, pres.names) if g1 != "1" else ()
        w2 = parse_word(g2, pres.names) if g2 != "1" else ()
        assert tb.word_equal(w1, w2).outcome == "equal"

    def test_classify_accepts_pairing_view(self):
        rec = classify(parse_matrix(RANK_3x3[2][0]).pairing(), QUICK)
        assert rec.verdict.order == 5

    def test_flags_on_the_3x3_classes(self):
        # the first class pins b1 = a1 and b2 = a2 outright, so it forces the
        # support sums equal; the two cyclic classes have distinct supports
        expected_forces = [True, False, False]
        for (text, _, _), forces in zip(RANK_3x3, expected_forces):
            rec = classify_matrix(parse_matrix(text), QUICK, assume_canonical=False)
            assert rec.row_connected and rec.column_connected
            assert rec.no_proper_invariant_subgrid
            assert rec.forces_a_eq_b is forces

class TestForces:
    def test_mirror_form_forces(self):
        mat = parse_matrix(
            "x 1 2 3 4\n1 5 6 7 8\n2 6 5 8 7\n3 9 10 11 12\n4 10 9 12 11")
        assert forces_a_eq_b(mat, QUICK) is True

    def test_mirror_form_detected_after_row_renumbering(self):
        # first-row labels pair into the first column but not index-matched
        from gridgroups.classify import _forces_syntactic
        from gridgroups.grid import GridSymmetry, apply_symmetry, consecutive_renumbering
        mat = parse_matrix(
            "x 1 2 3 4\n1 5 6 7 8\n2 6 5 8 7\n3 9 10 11 12\n4 10 9 12 11")
        moved = consecutive_renumbering(apply_symmetry(
            mat, GridSymmetry((0, 2, 1, 4, 3), (0, 1, 2, 3, 4))))
        assert _forces_syntactic(moved)
        assert forces_a_eq_b(moved, QUICK) is True

    def test_small_cyclic_class_does_not_force(self):
        assert forces_a_eq_b(parse_matrix(RANK_3x3[2][0]), QUICK) is False

    def test_non_square_rejected(self):
        with pytest.raises(GridError):
            forces_a_eq_b(parse_matrix(RANK_3x5[0][0]), QUICK)


class TestTorsionQuotient:
    def test_finite_group_trivial_quotient(self):
        pres = presentation_from_matrix(parse_matrix(RANK_3x3[1][0]))
        rep = torsion_quotient_report(pres, GridDims(3, 3), QUICK)
        assert rep.quotient_abelian is True
        assert rep.collision is not None

    def test_first_infinite_class_collapses_to_free_part(self):
        mat = parse_matrix(RANK_3x3[0][0])
        rep = torsion_quotient_report(presentation_from_matrix(mat),
                                      GridDims(3, 3), QUICK)
        assert rep.quotient_abelian is True
        assert rep.collision is not None
        assert rep.torsion_words  # some torsion was found and adjoined

    def test_infinite_nonabelian_3x7_class(self):
        mat = parse_matrix(RANK_3x7_INFINITE[0][0])
        rep = torsion_quotient_report(presentation_from_matrix(mat),
                                      GridDims(3, 7), QUICK)
        assert rep.quotient_abelian is True
        assert rep.collision is not None

    def test_family_quotient_collapses_the_first_generator(self):
        # the square family's torsion-free core is free; its map kills a1,
        # so a1 must collide with the identity among the tracked images
        mat = family_pairing(2)
        rep = torsion_quotient_report(presentation_from_matrix(mat),
                                      GridDims(5, 5),
                                      Budgets(max_cosets=4000, kb_max_rules=2500))
        assert rep.quotient_abelian is True
        assert rep.collision is not None
        fam, g1, g2 = rep.collision
        assert fam in ("a", "b")


class TestFamily:
    def test_smallest_family_member(self):
        mat = family_pairing(2)
        assert mat.dims == (5, 5)
        rec = classify_matrix(mat, QUICK, assume_canonical=False)
        assert rec.abelian_invariants == AbelianInvariants(1, (2,))
        assert rec.row_connected and rec.column_connected

    @pytest.mark.parametrize("n,rank", [(2, 1), (3, 2), (4, 3)])
    def test_family_abelianisation(self, n, rank):
        mat = family_pairing(n)
        pres = presentation_from_matrix(mat)
        from gridgroups.abelian import abelian_invariants
        assert abelian_invariants(pres) == AbelianInvariants(rank, (2,))

    def test_relabelling_relations_hold_for_smallest_member(self):
        mat = family_pairing(2)
        pres = presentation_from_matrix(mat)
        tb = GroupToolbox(pres, Budgets(max_cosets=4000, kb_max_rules=2500))
        names = pres.names
        b1 = parse_word("b1", names)
        a1 = parse_word("a1", names)
        assert tb.word_equal(b1, a1).outcome == "equal"
        assert tb.word_equal(parse_word("b2", names),
                             parse_word("a2", names)).outcome == "equal"
        # b4 = t b3 with t = a3^-1 a4
        lhs = parse_word("b4", names)
        rhs = parse_word("a3^-1*a4*b3", names)
        assert tb.word_equal(lhs, rhs).outcome == "equal"

    def test_reduced_generating_relations_hold_for_smallest_member(self):
        # under s = a1^-1 a2 and t = a3^-1 a4, the reduced relation set of
        # the family (involutions, centrality, twisted conjugation) holds
        mat = family_pairing(2)
        pres = presentation_from_matrix(mat)
        tb = GroupToolbox(pres, Budgets(max_cosets=4000, kb_max_rules=2500))
        w = lambda text: parse_word(text, pres.names)
        one = ()
        for lhs, rhs in [
            ("a1^-1*a2*a1^-1*a2", "1"),            # s^2 = 1
            ("a3^-1*a4*a3^-1*a4", "1"),            # t^2 = 1
            ("a1*a1^-1*a2*a1^-1*a2^-1*a1", "1"),   # [a1, s] = 1
            ("a3^-1*a1^-1*a2*a3", "a1"),           # a3^-1 s a3 = a1
            ("a3^-1*a1*a3", "a1*a1^-1*a2"),        # a3^-1 a1 a3 = a1 s = a2
        ]:
            v = tb.word_equal(w(lhs), w(rhs))
            assert v.outcome == "equal", (lhs, rhs, v)

    def test_family_annotation_from_size_three_up(self):
        assert family_record(2, QUICK).record.annotations == ()
        fr = family_record(3, QUICK)
        assert any("non-amenable" in a for a in fr.record.annotations)

    def test_too_small_rejected(self):
        with pytest.raises(GridError):
            family_pairing(1)


class TestFilterFlags:
    def test_recomputation_matches_classify(self):
        from gridgroups.classify import filter_flags
        for m in enumerate_pairings(GridDims(3, 5)):
            rec = classify_matrix(m, QUICK)
            redone = filter_flags(rec)
            assert redone.row_connected == rec.row_connected
            assert redone.column_connected == rec.column_connected
            assert redone.no_proper_invariant_subgrid == rec.no_proper_invariant_subgrid

    def test_family_pairing_fully_connected(self):
        from gridgroups.classify import filter_flags
        rec = classify_matrix(family_pairing(3), QUICK, assume_canonical=False)
        rec = filter_flags(rec)
        assert rec.row_connected and rec.column_connected

    def test_quotient_abelian_records_carry_a_collision(self):
        for dims in [(3, 3), (3, 7)]:
            for m in enumerate_pairings(GridDims(*dims)):
                rec = classify_matrix(m, QUICK)
                if rec.ic is not None and rec.ic.quotient_abelian:
                    assert rec.ic.collision is not None, rec.matrix


class TestAnnotations:
    def test_curated_non_amenable_classes(self):
        for text in NON_AMENABLE_5x5:
            canon = orbit_canonical_form(parse_matrix(text))
            rec = classify_matrix(canon, QUICK)
            assert any("non-amenable" in a for a in rec.annotations)


class TestRecordSerialisation:
    def test_json_round_trips_key_fields(self):
        rec = classify_matrix(parse_matrix(RANK_3x3[1][0]), QUICK)
        doc = json.loads(record_to_json(rec))
        assert doc["dims"] == [3, 3]
        assert doc["verdict"]["order"] == 4
        assert doc["flags"]["forces_a_eq_b"] is False
        assert doc["dfc"] == {"ab_is_one": True, "ba_is_one": True}
        assert parse_matrix(doc["matrix"]).flat == rec.matrix.flat

    def test_byte_determinism(self):
        a = record_to_json(classify_matrix(parse_matrix(RANK_3x3[0][0]), QUICK))
        b = record_to_json(classify_matrix(parse_matrix(RANK_3x3[0][0]), QUICK))
        assert a == b


class TestBudgetMonotonicity:
    def test_doubling_budgets_never_flips_small_rank_verdicts(self):
        low = Budgets(max_cosets=4000, kb_max_rules=600)
        high = Budgets(max_cosets=8000, kb_max_rules=1200)
        for dims in [(3, 3), (3, 5)]:
            for m in enumerate_pairings(GridDims(*dims)):
                a = classify_matrix(m, low).verdict
                b = classify_matrix(m, high).verdict
                if a.kind != "undecided":
                    assert a.kind == b.kind
                    if a.kind == "finite":
                        assert a.order == b.order
