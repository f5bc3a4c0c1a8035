import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gradedposets.poset import (
    Poset,
    RankedPoset,
    SeeingClass,
    components,
    contains_2plus2,
    contains_3plus1,
    covers,
    dump_exchange,
    far_comparability_check,
    height,
    is_strongly_graded,
    is_valid_ranking,
    is_vigilant,
    load_exchange,
    local_avoidance_check,
    rank_function,
    seeing_class,
    to_dot,
    validate,
)

THREE_PLUS_ONE = Poset.from_relations(4, [(1, 2), (2, 3)])
TWO_PLUS_TWO = Poset.from_relations(4, [(1, 2), (3, 4)])


@st.composite
def random_posets(draw, max_n=6):
    """Random strict orders: a random DAG on a shuffled linear extension, closed."""
    n = draw(st.integers(0, max_n))
    perm = draw(st.permutations(range(n)))
    pairs = []
    for a, b in itertools.combinations(range(n), 2):
        if draw(st.booleans()):
            pairs.append((perm[a] + 1, perm[b] + 1))
    return Poset.from_relations(n, pairs)


def brute_3plus1(P):
    lt = P.lt
    comp = lt | lt.T
    for x, y, z, w in itertools.permutations(range(P.n), 4):
        if lt[x, y] and lt[y, z] and not (comp[w, x] or comp[w, y] or comp[w, z]):
            return True
    return False


class TestValidate:
    def test_antichain(self):
        assert validate(np.zeros((3, 3), bool))

    def test_transitivity_violation(self):
        m = np.zeros((3, 3), bool)
        m[0, 1] = m[1, 2] = True
        assert not validate(m)

    def test_antisymmetry_violation(self):
        m = np.zeros((2, 2), bool)
        m[0, 1] = m[1, 0] = True
        assert not validate(m)

    def test_non_square(self):
        assert not validate(np.zeros((2, 3), bool))

    def test_from_relations_rejects_cycle(self):
        with pytest.raises(ValueError):
            Poset.from_relations(3, [(1, 2), (2, 3), (3, 1)])

    def test_from_relations_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            Poset.from_relations(2, [(1, 3)])


class TestCovers:
    def test_chain(self):
        c = covers(Poset.chain(3))
        assert {tuple(map(int, x)) for x in np.argwhere(c)} == {(0, 1), (1, 2)}

    def test_antichain(self):
        assert not covers(Poset.antichain(4)).any()

    def test_implied_relation_is_not_a_cover(self):
        P = Poset.from_relations(3, [(1, 2), (2, 3), (1, 3)])
        assert {tuple(map(int, x)) for x in np.argwhere(covers(P))} == {(0, 1), (1, 2)}


class TestPatterns:
    def test_3plus1_itself(self):
        assert contains_3plus1(THREE_PLUS_ONE)

    def test_small_posets_never_contain_patterns(self):
        for n in range(4):
            for pairs in itertools.product([0, 1], repeat=n * (n - 1) // 2):
                rel = [p for p, keep in zip(itertools.combinations(range(1, n + 1), 2), pairs) if keep]
                P = Poset.from_relations(n, rel)
                assert not contains_3plus1(P)
                assert not contains_2plus2(P)

    def test_2plus2_avoids_3plus1(self):
        assert not contains_3plus1(TWO_PLUS_TWO)
        assert contains_2plus2(TWO_PLUS_TWO)

    def test_chain_of_four_has_no_2plus2(self):
        assert not contains_2plus2(Poset.chain(4))

    @settings(max_examples=150, deadline=None)
    @given(random_posets())
    def test_3plus1_matches_quadruple_search(self, P):
        assert contains_3plus1(P) == brute_3plus1(P)


class TestRanks:
    def test_chain_ranks(self):
        assert rank_function(Poset.chain(3)).rank == (0, 1, 2)

    def test_minimal_element_of_positive_rank(self):
        # a<b<c and d<c with d incomparable to a, b
        P = Poset.from_relations(4, [(1, 2), (2, 3), (4, 3)])
        assert rank_function(P).rank == (0, 1, 2, 1)

    def test_conflicting_cover_lengths(self):
        # x<y<w and x<z1<z2<w
        P = Poset.from_relations(5, [(1, 2), (1, 3), (3, 4), (2, 5), (4, 5)])
        assert rank_function(P) is None

    def test_components_start_at_zero(self):
        P = Poset.from_relations(5, [(1, 2), (3, 4), (4, 5)])
        R = rank_function(P)
        assert R.rank == (0, 1, 0, 1, 2)
        assert is_valid_ranking(R)
        assert len(components(P)) == 2

    @settings(max_examples=150, deadline=None)
    @given(random_posets())
    def test_rank_function_is_valid_when_present(self, P):
        R = rank_function(P)
        if R is not None:
            assert is_valid_ranking(R)

    def test_strongly_graded_examples(self):
        assert is_strongly_graded(rank_function(Poset.chain(3)))
        assert is_strongly_graded(rank_function(Poset.antichain(4)))
        assert not is_strongly_graded(rank_function(Poset.from_relations(3, [(1, 2)])))

    def test_height(self):
        assert height(rank_function(Poset.antichain(0))) == 0
        assert height(rank_function(Poset.antichain(5))) == 1
        assert height(rank_function(Poset.chain(3))) == 3


class TestSeeing:
    def test_top_of_chain_is_all_seeing(self):
        R = rank_function(Poset.chain(3))
        assert seeing_class(R, 2) is SeeingClass.ALL

    def test_two_below_one(self):
        # a, b at rank 0, c at rank 1, only a < c
        R = RankedPoset(Poset.from_relations(3, [(1, 3)]), (0, 0, 1))
        assert seeing_class(R, 0) is SeeingClass.ALL
        assert seeing_class(R, 1) is SeeingClass.DOWN
        assert seeing_class(R, 2) is SeeingClass.UP

    def test_antichain_all_seeing(self):
        R = rank_function(Poset.antichain(4))
        assert all(seeing_class(R, v) is SeeingClass.ALL for v in range(4))
        assert is_vigilant(R)

    def test_3plus1_vigilant_but_fails_local_check(self):
        R = rank_function(THREE_PLUS_ONE)
        assert R.rank == (0, 1, 2, 0)
        assert is_vigilant(R)
        assert not local_avoidance_check(R)
        assert not far_comparability_check(R)

    def test_none_seeing_vertices(self):
        # two disjoint 3-chains: each middle vertex misses one neighbour per side
        R = rank_function(Poset.from_relations(6, [(1, 3), (2, 4), (3, 5), (4, 6)]))
        assert seeing_class(R, 2) is SeeingClass.NONE
        assert seeing_class(R, 3) is SeeingClass.NONE
        assert not is_vigilant(R)

    def test_chain_passes_local_check(self):
        assert local_avoidance_check(rank_function(Poset.chain(4)))


class TestExchange:
    def test_round_trip(self):
        P = Poset.from_relations(4, [(1, 2), (2, 3), (1, 3)])
        Q = load_exchange(dump_exchange(P))
        assert Q == P

    def test_closure_on_load(self):
        P = load_exchange('{"n": 3, "relations": [[1, 2], [2, 3]]}')
        assert P.less(0, 2)

    @pytest.mark.parametrize("text", [
        "not json",
        '{"relations": []}',
        '{"n": -1}',
        '{"n": 2, "relations": [[1]]}',
        '{"n": 2, "relations": [[1, 2], [2, 1]]}',
        '{"n": 2, "relations": [[1, 5]]}',
    ])
    def test_malformed(self, text):
        with pytest.raises(ValueError):
            load_exchange(text)


def test_dot_groups_ranks_and_draws_covers_only():
    P = Poset.from_relations(3, [(1, 2), (2, 3)])
    dot = to_dot(rank_function(P))
    assert dot.count("->") == 2
    assert dot.count("rank=same") == 3
    assert "v0 -> v2" not in dot


def test_dot_placeholder_is_unlabeled_box():
    R = rank_function(Poset.chain(2))
    dot = to_dot(R, labels=[0, 1])
    assert 'v0 [label="", shape=box]' in dot
