"""Generators and fuzz campaigns: determinism, validity, negative controls."""

from __future__ import annotations

import pytest

from caretkit.fuzz import (
    CampaignReport,
    GenConfig,
    cross_check_campaign,
    gen_formula,
    gen_trace,
    soundness_campaign,
)
from caretkit.syntax import Prop, TrueConst, formula_size, is_ltl
from caretkit.trace import FiniteTrace, LassoTrace, StateTag, StructuredLassoTrace


# ---------------------------------------------------------------------------
# Config and report plumbing

def test_config_validation():
    with pytest.raises(ValueError):
        GenConfig(alphabet=())
    with pytest.raises(ValueError):
        GenConfig(max_formula_size=0)
    with pytest.raises(ValueError):
        GenConfig(mode="both")
    with pytest.raises(ValueError):
        GenConfig(max_lasso_total=0)


def test_report_invariant():
    CampaignReport(counts=(("T1", 5),), failures=0)
    with pytest.raises(ValueError):
        CampaignReport(counts=(), failures=1)
    with pytest.raises(ValueError):
        CampaignReport(counts=(), failures=0, first_failure=("x",))


# ---------------------------------------------------------------------------
# Generators

def test_formula_generator_deterministic_and_bounded():
    for seed in range(40):
        cfg = GenConfig(seed=seed, max_formula_size=5)
        f1, f2 = gen_formula(cfg), gen_formula(cfg)
        assert f1 == f2
        assert 1 <= formula_size(f1) <= 5
        assert is_ltl(f1)


def test_formula_generator_caret_mode_reaches_abstract_operators():
    seen_abstract = False
    for seed in range(60):
        f = gen_formula(GenConfig(seed=seed, mode="caret", max_formula_size=6))
        seen_abstract = seen_abstract or not is_ltl(f)
    assert seen_abstract


def test_size_one_formulas_are_atoms():
    for seed in range(20):
        f = gen_formula(GenConfig(seed=seed, max_formula_size=1))
        assert isinstance(f, (Prop, TrueConst))


def test_trace_generator_bounds_and_kinds():
    kinds = set()
    for seed in range(60):
        t = gen_trace(GenConfig(seed=seed))
        kinds.add(type(t))
        if isinstance(t, FiniteTrace):
            assert 1 <= t.length <= 8
        else:
            assert isinstance(t, LassoTrace)
            assert 1 <= t.loop_len and t.prefix_len + t.loop_len <= 8
    assert kinds == {FiniteTrace, LassoTrace}


def test_structured_generator_tags_and_labels():
    for seed in range(40):
        t = gen_trace(GenConfig(seed=seed, mode="caret"))
        assert isinstance(t, StructuredLassoTrace)
        for props, tag in t.prefix + t.loop:
            assert isinstance(tag, StateTag)
            # tag truth comes from the tag field, never from labels
            assert props.isdisjoint({"call", "ret", "int"})


def test_different_seeds_vary():
    outs = {gen_formula(GenConfig(seed=s)) for s in range(30)}
    assert len(outs) > 10


# ---------------------------------------------------------------------------
# Soundness campaigns

def test_campaign_deterministic():
    cfg = GenConfig(seed=7)
    a = soundness_campaign("ax-gen", 40, cfg)
    b = soundness_campaign("ax-gen", 40, cfg)
    assert a == b


def test_small_campaigns_all_systems_clean():
    cfg = GenConfig(seed=3)
    for system in ("ax", "ax-gen", "ax-inf", "ax-fin", "ax-cr"):
        report = soundness_campaign(system, 60, cfg)
        assert report.failures == 0, (system, report.first_failure)
        assert all(n == 60 for _, n in report.counts)


def test_campaign_counts_name_every_schema():
    report = soundness_campaign("ax-inf", 5, GenConfig(seed=1))
    names = [s for s, _ in report.counts]
    assert names == ["T1", "T2'", "T3'", "Inf"]


def test_negative_control_weak_unfolding_on_finite_traces():
    # the weak-next unfolding is unsound on finite traces; the campaign
    # must catch it when pointed there
    report = soundness_campaign(
        "ax", 300, GenConfig(seed=0), trace_class="finite", schemas=("T2",)
    )
    assert report.failures > 0
    assert report.first_failure is not None
    formula, trace, pos = report.first_failure
    assert isinstance(trace, FiniteTrace)
    from caretkit.semantics import eval_ltl

    assert eval_ltl(trace, pos, formula) is False


def test_negative_control_next_distribution_on_finite_traces():
    report = soundness_campaign(
        "ax", 120, GenConfig(seed=5), trace_class="finite", schemas=("T3",)
    )
    assert report.failures > 0


def test_campaign_rejects_unknown_system():
    with pytest.raises(ValueError):
        soundness_campaign("ax-zzz", 1, GenConfig())


# ---------------------------------------------------------------------------
# Cross-check campaign

def test_cross_check_clean_and_deterministic():
    cfg = GenConfig(seed=11, max_formula_size=6, alphabet=("p", "q"))
    a = cross_check_campaign(60, cfg)
    b = cross_check_campaign(60, cfg)
    assert a == b
    assert a.failures == 0
    assert a.counts == (("cross-check", 60),)


def test_cross_check_preconditions():
    with pytest.raises(ValueError):
        cross_check_campaign(5, GenConfig(alphabet=("p", "q", "r")))
    with pytest.raises(ValueError):
        cross_check_campaign(5, GenConfig(max_formula_size=9))
