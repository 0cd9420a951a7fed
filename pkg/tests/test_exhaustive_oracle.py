"""Validation of the exhaustive truth-profile oracle itself.

The acceptance run trusts this oracle for tens of thousands of formulas,
so before that it is checked three independent ways at desk scale: node
decoders against the one-position evaluator, whole-space satisfiability
against the literal brute-force search, and the index maps against direct
trace surgery.
"""

import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from caretkit.semantics import eval_ltl
from caretkit.syntax import FALSE, TRUE, And, Not, Prop, Until, WeakNext, parse_formula
from caretkit.tableau import brute_force_sat
from exhaustive_oracle import (
    FORMULA_COUNTS,
    ExhaustiveOracle,
    FiniteSpace,
    LassoSpace,
    enumerate_formulas,
)

P, Q = Prop("p"), Prop("q")


@pytest.fixture(scope="module")
def oracle4():
    return ExhaustiveOracle(4)


def test_space_sizes():
    o = ExhaustiveOracle(4)
    assert o.fin.total == 4 + 16 + 64 + 256 == 340
    assert o.lasso.total == 4 * 4**4 == 1024
    assert ExhaustiveOracle(2).fin.total == 20
    assert ExhaustiveOracle(2).lasso.total == 2 * 16


def test_formula_enumeration_counts():
    by_size = enumerate_formulas(7)
    assert {n: len(fs) for n, fs in by_size.items()} == FORMULA_COUNTS
    assert sum(FORMULA_COUNTS.values()) == 25275
    # recurrence: two unary images plus two binary ops over all splits
    for n in range(2, 8):
        expect = 2 * FORMULA_COUNTS[n - 1] + 2 * sum(
            FORMULA_COUNTS[k] * FORMULA_COUNTS[n - 1 - k] for k in range(1, n - 1)
        )
        assert len(by_size[n]) == expect
    # no duplicates at any size
    for fs in by_size.values():
        assert len(set(fs)) == len(fs)


def test_finite_node_decoder_roundtrip():
    sp = FiniteSpace(3)
    seen = set()
    for idx in range(sp.total):
        t = sp.node_trace(idx)
        seen.add(t)
        assert sp.char[idx] == sum(
            1 << j for j, x in enumerate(sp.letters) if x in t.props_at(0)
        )
    assert len(seen) == sp.total  # decoder is injective, so layout is a bijection


def test_finite_tail_is_suffix():
    sp = FiniteSpace(4)
    for idx in random.Random(7).sample(range(sp.total), 60):
        t = sp.node_trace(idx)
        if sp.tail[idx] < 0:
            assert len(t.states) == 1
        else:
            assert sp.node_trace(sp.tail[idx]).states == t.states[1:]


def test_lasso_nodes_are_reduced_and_denote_distinct_indexing():
    sp = LassoSpace(3)
    for idx in range(sp.total):
        w, v = sp.node_parts(idx)
        assert 1 <= len(v) <= 3 and len(w) + len(v) <= 3
        if w:
            assert w[-1] != v[-1]
        assert sp.char[idx] == (w[0] if w else v[0])


def test_lasso_tail_shifts_denoted_word():
    sp = LassoSpace(4)

    def letter(idx, i):
        w, v = sp.node_parts(idx)
        return (w + v * 20)[i]

    for idx in random.Random(11).sample(range(sp.total), 80):
        for i in range(12):
            assert letter(sp.tail[idx], i) == letter(idx, i + 1)


def test_every_bounded_lasso_is_denoted():
    # reduce an arbitrary (prefix, loop) pair and find its node by scanning
    sp = LassoSpace(3)
    denoted = set()
    for idx in range(sp.total):
        w, v = sp.node_parts(idx)
        denoted.add(tuple((w + v * 12)[:12]))
    rng = random.Random(3)
    for _ in range(200):
        lv = rng.randrange(1, 4)
        lw = rng.randrange(0, 4 - lv)
        w = [rng.randrange(4) for _ in range(lw)]
        v = [rng.randrange(4) for _ in range(lv)]
        assert tuple((w + v * 12)[:12]) in denoted


FORMULA_POOL = [
    TRUE,
    FALSE,
    P,
    Q,
    Not(P),
    WeakNext(P),
    WeakNext(FALSE),
    Not(WeakNext(Not(P))),
    And(P, Not(Q)),
    Until(P, Q),
    Until(TRUE, And(P, WeakNext(Q))),
    Not(Until(TRUE, Not(P))),
    Until(Not(Q), And(P, P)),
    WeakNext(WeakNext(Until(P, Q))),
    And(Until(TRUE, P), Not(Until(TRUE, And(P, Q)))),
    parse_formula("G (p -> F q)"),
    parse_formula("(p U q) & G !q"),
    parse_formula("N p"),
    parse_formula("X X X X false"),
]


@pytest.mark.parametrize("f", FORMULA_POOL, ids=str)
def test_profiles_match_pointwise_evaluation(f, oracle4):
    rng = random.Random(hash(str(f)) & 0xFFFF)
    for sp in (oracle4.fin, oracle4.lasso):
        pf = sp.profile(f)
        for idx in rng.sample(range(sp.total), 50):
            assert pf[idx] == eval_ltl(sp.node_trace(idx), 0, f), (f, idx)


def test_weak_next_true_at_final_states():
    sp = FiniteSpace(3)
    pf = sp.profile(WeakNext(FALSE))
    for idx in range(sp.total):
        assert pf[idx] == (len(sp.node_trace(idx).states) == 1)


def test_sat_agrees_with_brute_exhaustively_to_size_4(oracle4):
    by_size = enumerate_formulas(4)
    for fs in by_size.values():
        for f in fs:
            for cls in ("fin", "inf", "gen"):
                got = oracle4.sat(f, cls)
                want = brute_force_sat(f, cls, 4) == "satisfiable"
                assert got == want, (f, cls)


_pq_formulas = st.recursive(
    st.one_of(st.just(TRUE), st.sampled_from(["p", "q"]).map(Prop)),
    lambda inner: st.one_of(
        inner.map(Not),
        inner.map(WeakNext),
        st.tuples(inner, inner).map(lambda ab: And(*ab)),
        st.tuples(inner, inner).map(lambda ab: Until(*ab)),
    ),
    max_leaves=8,
)


@settings(max_examples=60, deadline=None)
@given(_pq_formulas)
def test_sat_agrees_with_brute_on_random_formulas(f):
    o = ExhaustiveOracle(3)
    for cls in ("fin", "inf", "gen"):
        assert o.sat(f, cls) == (brute_force_sat(f, cls, 3) == "satisfiable")


def test_cache_does_not_change_profiles():
    plain = FiniteSpace(3, cache_max_size=None)
    capped = FiniteSpace(3, cache_max_size=2)
    f = parse_formula("(p U q) & X !p")
    a = plain.profile(f)
    assert np.array_equal(capped.profile(f), a)
    assert np.array_equal(capped.profile(f), a)  # second call hits subcaches
    assert f not in capped._cache and Prop("q") in capped._cache


def test_gen_class_is_union(oracle4):
    f = WeakNext(FALSE)  # single-state finite traces only
    assert oracle4.sat(f, "fin") and not oracle4.sat(f, "inf")
    assert oracle4.sat(f, "gen")
    g = Not(WeakNext(FALSE))
    assert oracle4.sat(g, "inf") and oracle4.sat(g, "gen")
