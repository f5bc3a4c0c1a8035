import itertools
import os
import subprocess
import sys
import json

import numpy as np
import pytest

from gradedposets import _kernels as K
from gradedposets.genfun import Flag, QuarkFamilyFlags, supported_families, quark_family_count
from gradedposets.oracle import (
    SweepFailure,
    SweepReport,
    brute_counts,
    check_poset,
    classify,
    decomposition_sweep,
    duplicate_free,
    enumerate_bipartite,
    enumerate_posets,
    poset_from_down,
    poset_table,
)
from gradedposets.poset import (
    Poset,
    contains_2plus2,
    contains_3plus1,
    far_comparability_check,
    height,
    is_strongly_graded,
    is_vigilant,
    local_avoidance_check,
    rank_function,
    validate,
)

POSET_COUNTS = [1, 1, 3, 19, 219, 4231, 130023]


def brute_posets(n):
    """Every strict order as a frozenset of pairs, by filtering all relations."""
    off = [(a, b) for a in range(n) for b in range(n) if a != b]
    out = set()
    for bits in itertools.product([False, True], repeat=len(off)):
        m = np.zeros((n, n), bool)
        for (a, b), on in zip(off, bits):
            m[a, b] = on
        if validate(m):
            out.add(frozenset((a, b) for (a, b), on in zip(off, bits) if on))
    return out


def test_enumeration_counts():
    assert [enumerate_posets(n) for n in range(7)] == POSET_COUNTS


@pytest.mark.parametrize("n", range(5))
def test_enumeration_matches_filtered_relations(n):
    seen = set()
    enumerate_posets(n, lambda P: seen.add(frozenset(P.relations())))
    assert seen == brute_posets(n)
    assert duplicate_free(n)


def test_table_bounds():
    with pytest.raises(ValueError):
        poset_table(8)


@pytest.mark.parametrize("n", range(6))
def test_kernel_flags_match_python_predicates(n):
    flags, heights = classify(n)
    for row, f, h in zip(poset_table(n), flags, heights):
        P = poset_from_down(row)
        R = rank_function(P)
        assert bool(f & K.GRADED) == (R is not None)
        if R is None:
            assert h == -1
            continue
        assert h == height(R)
        assert bool(f & K.STRONG) == is_strongly_graded(R)
        assert bool(f & K.HAS_3P1) == contains_3plus1(P)
        assert bool(f & K.HAS_2P2) == contains_2plus2(P)
        assert bool(f & K.VIGILANT) == is_vigilant(R)
        if f & K.VIGILANT:
            assert bool(f & K.FAR_COMPARABLE) == far_comparability_check(R)
            assert bool(f & K.NEAR_COMPARABLE) == local_avoidance_check(R)


def test_brute_counts_small():
    r = brute_counts(3)
    assert r.total_posets == 19
    assert r.weak_total == 19
    assert r.strong_total == 13
    assert r.strong_avoiding == {1: 1, 2: 6, 3: 6}
    assert r.theorem_disagreements == 0


def test_brute_counts_five():
    r = brute_counts(5)
    assert r.weak_total == 2551 and r.strong_total == 1381
    assert r.weak_avoiding == {1: 1, 2: 840, 3: 1110, 4: 480, 5: 120}
    assert r.theorem_disagreements == 0


def test_oracle_json_is_lossless():
    obj = json.loads(brute_counts(4).to_json())
    assert obj["source"] == "oracle"
    tables = {t["kind"]: t for t in obj["tables"]}
    assert {r["k"]: int(r["count"]) for r in tables["strong_by_height"]["counts"]} == {1: 1, 2: 50, 3: 36, 4: 24}
    assert tables["semiorder"]["counts"][0]["count"] == "99"


def test_bipartite_histogram_total():
    for m, n in [(1, 1), (2, 3), (3, 3)]:
        assert int(K.bipartite_histogram(m, n).sum()) == 2 ** (m * n)


def test_enumerate_bipartite_matches_closed_forms():
    for flags in supported_families():
        for m in range(1, 5):
            for n in range(1, 5):
                assert enumerate_bipartite(m, n, flags) == quark_family_count(m, n, flags)


def test_enumerate_bipartite_size_limit():
    with pytest.raises(ValueError):
        enumerate_bipartite(5, 5, QuarkFamilyFlags())


def test_bipartite_flags_semantics():
    iso_bottom = QuarkFamilyFlags(bottom_isolated=Flag.REQUIRED)
    # 1x1: the empty graph is the only one with an isolated bottom vertex
    assert enumerate_bipartite(1, 1, iso_bottom) == 1


@pytest.mark.parametrize("n", range(6))
def test_sweep_has_no_failures(n):
    rep = decomposition_sweep(n)
    assert rep.failures == 0
    assert rep.checked == [1, 1, 3, 19, 195, 2551][n]


def test_sweep_counts_at_five():
    rep = decomposition_sweep(5)
    assert rep.strong_checked == 1381
    assert rep.rejected_containing > 0
    assert rep.words_checked > rep.checked // 2


def test_sweep_rejects_large_n():
    with pytest.raises(ValueError):
        decomposition_sweep(7)


def test_check_poset_on_3plus1():
    rep = SweepReport(4)
    check_poset(Poset.from_relations(4, [(1, 2), (2, 3)]), rep)
    assert rep.rejected_containing == 1 and rep.checked == 0


def test_sweep_failure_names_the_poset():
    err = SweepFailure("boom", Poset.from_relations(2, [(1, 2)]))
    assert "relations=[(1, 2)]" in str(err)


FALLBACK = """
import numpy as np
from gradedposets import _kernels as K
from gradedposets._jit import JIT_ENABLED
assert not JIT_ENABLED
t = np.zeros((1, 0), np.uint8)
for _ in range(5):
    t = K.extend_level(t)
f, h = K.classify_all(t)
print(len(t), int(f.astype(np.int64).sum()), int(h.astype(np.int64).sum()),
      list(map(int, K.bipartite_histogram(2, 3))))
"""


def test_python_fallback_matches_jit():
    env = dict(os.environ, GRADEDPOSETS_DISABLE_JIT="1")
    res = subprocess.run([sys.executable, "-c", FALLBACK], env=env, capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    f, h = classify(5)
    want = (f"{len(poset_table(5))} {int(f.astype(np.int64).sum())} {int(h.astype(np.int64).sum())} "
            f"{list(map(int, K.bipartite_histogram(2, 3)))}")
    assert res.stdout.strip() == want
