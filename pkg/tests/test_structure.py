import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gradedposets.poset import Poset, contains_3plus1, is_strongly_graded, rank_function
from gradedposets.structure import (
    BType,
    LegalityMode,
    Quark,
    QuarkRole,
    TrimmedPoset,
    avoidance_with_trim,
    avoids_via_word,
    compose_height_two,
    compose_quarks,
    decompose_ordinal,
    height_two_decompose,
    is_legal,
    is_sum_indecomposable,
    ordinal_sum,
    quark_decompose,
    quark_roles,
    quark_type,
    trim,
    word_of,
    Word,
)

IDENTITY2 = Quark.from_matrix([[1, 0], [0, 1]])
# bottom vertex 0 sees both tops (it becomes a placeholder), bottom vertex 1 is isolated
BOTTOM_WITH_ISOLATED = Quark.from_matrix([[1, 1], [0, 0]])
# top vertex 0 sees both bottoms (placeholder), top vertex 1 is isolated
TOP_WITH_ISOLATED = Quark.from_matrix([[1, 0], [1, 0]])


def trimmed(n, pairs):
    return trim(rank_function(Poset.from_relations(n, pairs)))


def all_quarks(max_side):
    for m in range(1, max_side + 1):
        for n in range(1, max_side + 1):
            for adj in itertools.product(range(1 << n), repeat=m):
                q = Quark(m, n, adj)
                if q.is_valid():
                    yield q


class TestTrim:
    def test_two_chain_becomes_two_placeholders(self):
        T = trimmed(2, [(1, 2)])
        assert T.labels == (0, 0)
        assert T.n_labeled == 0

    def test_antichain_collapses_to_one_placeholder(self):
        T = trimmed(5, [])
        assert T.size == 1 and T.labels == (0,)

    def test_v_poset(self):
        T = trimmed(3, [(1, 2), (1, 3)])
        assert T.size == 2 and T.n_labeled == 0 and T.height == 2

    def test_requires_vigilance(self):
        with pytest.raises(ValueError):
            trimmed(6, [(1, 3), (2, 4), (3, 5), (4, 6)])

    def test_avoidance_pair(self):
        assert avoidance_with_trim(rank_function(Poset.chain(3))) == (True, True)
        R = rank_function(Poset.from_relations(4, [(1, 2), (2, 3)]))
        assert avoidance_with_trim(R) == (False, False)

    def test_trimmed_posets_are_valid(self):
        T = trimmed(5, [(1, 3), (2, 3), (1, 4), (3, 5), (4, 5)])
        assert T.is_valid()


class TestOrdinal:
    def test_two_points(self):
        one = TrimmedPoset(rank_function(Poset.antichain(1)), (1,))
        S = ordinal_sum(one, one)
        assert S.labels == (1, 2)
        assert S.poset.less(0, 1)
        assert S.rank == (0, 1)

    def test_empty_is_identity(self):
        T = trimmed(4, [(1, 3), (2, 4)])
        assert ordinal_sum(T, TrimmedPoset.empty()) == T
        assert ordinal_sum(TrimmedPoset.empty(), T) == T

    def test_single_placeholder_is_indecomposable(self):
        assert is_sum_indecomposable(trimmed(1, []))

    def test_placeholder_chain_is_not(self):
        T = trimmed(2, [(1, 2)])
        assert not is_sum_indecomposable(T)
        parts = decompose_ordinal(T)
        assert len(parts) == 2 and all(p.size == 1 for p in parts)

    def test_indecomposable_is_its_own_decomposition(self):
        T = compose_quarks(IDENTITY2, ["S"], [IDENTITY2])
        assert is_sum_indecomposable(T)
        assert decompose_ordinal(T) == [T]

    def test_sum_of_two_indecomposables_splits_back(self):
        A = compose_height_two(IDENTITY2, False, False)
        B = compose_quarks(IDENTITY2, ["G"], [IDENTITY2])
        S = ordinal_sum(A, B)
        assert S.is_valid()
        assert decompose_ordinal(S) == [A, B]
        assert S.n_labeled == A.n_labeled + B.n_labeled


class TestQuarkType:
    def test_empty_1x1(self):
        assert quark_type(Quark.from_matrix([[0]])) is BType.OO

    def test_two_by_one_single_edge(self):
        # the adjacent bottom vertex sees the only top vertex and is stripped,
        # leaving an empty 1x1 quark
        q = Quark.from_matrix([[1], [0]])
        assert q.bottom_all_seeing() == [0]
        assert quark_type(q) is BType.OO

    def test_identity_2x2(self):
        assert quark_type(IDENTITY2) is BType.XX

    def test_mixed_types(self):
        assert quark_type(Quark.from_matrix([[1, 0], [0, 0]])) is BType.OO
        assert quark_type(Quark.from_matrix([[1, 0, 0], [0, 1, 0]])) is BType.OX
        assert quark_type(Quark.from_matrix([[1, 0], [0, 1], [0, 0]])) is BType.XO

    def test_invalid_quark_rejected(self):
        with pytest.raises(ValueError):
            quark_type(Quark.from_matrix([[1]]))

    def test_btype_strings(self):
        assert [str(b) for b in BType] == ["B∘∘", "B∘⊗", "B⊗∘", "B⊗⊗"]

    def test_roles(self):
        assert quark_roles(IDENTITY2) == {QuarkRole.BOTTOM, QuarkRole.MIDDLE, QuarkRole.TOP}
        assert quark_roles(BOTTOM_WITH_ISOLATED) == {QuarkRole.BOTTOM}
        assert quark_roles(TOP_WITH_ISOLATED) == {QuarkRole.TOP}


class TestCompose:
    def test_single_edge_1x1_quarks_are_not_quarks(self):
        e = Quark.from_matrix([[1]])
        with pytest.raises(ValueError):
            compose_quarks(e, ["S"], [e])

    def test_relations_follow_the_bullets(self):
        T = compose_quarks(IDENTITY2, ["S"], [IDENTITY2])
        # elements: Q0 bottoms 0,1 tops 2,3; Q1 bottoms 4,5 tops 6,7
        lt = T.poset.less
        assert lt(0, 2) and not lt(0, 3)          # quark edge only
        assert lt(0, 4) and lt(0, 5)              # Q0 bottoms under Q1 bottoms
        assert lt(2, 6) and lt(3, 7) and lt(2, 7)  # Q0 tops under Q1 tops
        assert lt(4, 6) and not lt(4, 7)
        assert T.rank == (0, 0, 1, 1, 1, 1, 2, 2)
        assert T.labels == tuple(range(1, 9))

    def test_height_four_stick_then_glue(self):
        middle = Quark.from_matrix([[1, 0], [0, 0]])
        T = compose_quarks(IDENTITY2, ["S", "G"], [middle, IDENTITY2])
        assert T.height == 4 and T.is_valid() and T.n_unlabeled == 1
        assert is_sum_indecomposable(T)
        quarks, alphas = quark_decompose(T)
        assert alphas == ("S", "G")
        assert quarks == [IDENTITY2, middle, IDENTITY2]
        assert str(word_of(T)) == "S B⊗⊗ S B∘∘ G B⊗⊗ S"
        assert avoids_via_word(T) and not contains_3plus1(T.poset)

    def test_sticking_isolated_vertices_creates_3plus1(self):
        stuck = compose_quarks(BOTTOM_WITH_ISOLATED, ["S"], [TOP_WITH_ISOLATED])
        glued = compose_quarks(BOTTOM_WITH_ISOLATED, ["G"], [TOP_WITH_ISOLATED])
        assert contains_3plus1(stuck.poset) and not avoids_via_word(stuck)
        assert not contains_3plus1(glued.poset) and avoids_via_word(glued)
        assert is_sum_indecomposable(glued)
        assert str(word_of(glued)) == "G B∘∘ G B∘∘ G"

    def test_small_exhaustive_round_trip(self):
        quarks = list(all_quarks(2))
        bottoms = [q for q in quarks if q.is_bottom()]
        tops = [q for q in quarks if q.is_top()]
        count = 0
        for q0, q1 in itertools.product(bottoms, tops):
            for a in "SG":
                T = compose_quarks(q0, [a], [q1])
                assert T.is_valid()
                assert is_strongly_graded(T.ranked)
                got, alphas = quark_decompose(T)
                assert alphas == (a,)
                assert got == [q0.canonical(), q1.canonical()]
                count += 1
        assert count == 2 * 6 * 6

    def test_height_two(self):
        T = compose_height_two(IDENTITY2, True, True)
        assert str(word_of(T)) == "G B⊗⊗ G"
        assert height_two_decompose(T) == (IDENTITY2, True, True)


_QUARKS3 = list(all_quarks(3))
_BOTTOMS = [q for q in _QUARKS3 if q.is_bottom()]
_MIDDLES = [q for q in _QUARKS3 if q.is_middle()]
_TOPS = [q for q in _QUARKS3 if q.is_top()]


@st.composite
def quark_chains(draw):
    k = draw(st.integers(1, 3))
    qs = [draw(st.sampled_from(_BOTTOMS))]
    qs += [draw(st.sampled_from(_MIDDLES)) for _ in range(k - 1)]
    qs.append(draw(st.sampled_from(_TOPS)))
    alphas = [draw(st.sampled_from("SG")) for _ in range(k)]
    return qs, alphas


@settings(max_examples=200, deadline=None)
@given(quark_chains())
def test_composition_preserves_seeing_and_round_trips(chain):
    qs, alphas = chain
    T = compose_quarks(qs[0], alphas, qs[1:])
    assert T.is_valid()
    R = T.ranked
    offset = 0
    for i, q in enumerate(qs):
        for a in range(q.m):
            v = offset + a
            if i > 0:
                assert R.down_seeing[v]
                assert R.up_seeing[v] == (q.adj[a] == q.full_top)
        for b in range(q.n):
            v = offset + q.m + b
            if i < len(qs) - 1:
                assert R.up_seeing[v]
                assert R.down_seeing[v] == (q.column(b) == (1 << q.m) - 1)
        offset += q.m + q.n
    got, got_alphas = quark_decompose(T)
    assert got_alphas == tuple(alphas)
    assert got == [q.canonical() for q in qs]
    assert avoids_via_word(T) == (not contains_3plus1(T.poset))


class TestWords:
    def test_legal_examples(self):
        assert is_legal(Word.parse("G B⊗⊗ G"))
        w = Word.parse("S B∘∘ G")
        assert not is_legal(w, LegalityMode.STRONG)
        assert is_legal(w, LegalityMode.WEAK_BOTTOM)
        bad = Word.parse("G B∘∘ S B∘∘ G")
        assert not any(is_legal(bad, m) for m in LegalityMode)

    def test_end_condition(self):
        w = Word.parse("G B∘∘ S")
        assert not is_legal(w)
        assert is_legal(w, LegalityMode.WEAK_TOP)
        assert not is_legal(w, LegalityMode.WEAK_BOTTOM)

    def test_interior_mode_matches_strong(self):
        for k in (1, 2):
            for types in itertools.product(BType, repeat=k):
                for alphas in itertools.product("SG", repeat=k + 1):
                    w = Word(alphas, types)
                    assert is_legal(w, LegalityMode.WEAK_INTERIOR) == is_legal(w)

    def test_parse_round_trip(self):
        w = Word(("G", "S", "S"), (BType.OX, BType.XO))
        assert Word.parse(str(w)) == w
        assert len(w) == 5

    def test_malformed_word(self):
        with pytest.raises(ValueError):
            Word(("S",), (BType.OO,))
        with pytest.raises(ValueError):
            Word(("S", "X"), (BType.OO,))

    def test_summand_modes(self):
        assert LegalityMode.for_summand(0, 1) is LegalityMode.WEAK_BOTH
        assert LegalityMode.for_summand(0, 3) is LegalityMode.WEAK_BOTTOM
        assert LegalityMode.for_summand(1, 3) is LegalityMode.WEAK_INTERIOR
        assert LegalityMode.for_summand(2, 3) is LegalityMode.WEAK_TOP


def test_weak_summand_needs_relaxed_mode():
    # a < b plus an isolated c: one summand, legal only with both ends relaxed
    T = trimmed(3, [(1, 2)])
    assert str(word_of(T)) == "G B∘∘ S"
    assert avoids_via_word(T, LegalityMode.WEAK_BOTH)
    assert not avoids_via_word(T, LegalityMode.STRONG)
