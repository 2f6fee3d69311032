"""
Tests for the randomized property suite: configuration, determinism and mutation detection
"""

from functools import partial

import pytest
from pydantic import ValidationError

from src.bitree import GLUE_RULES, diamond
from src.suite_runner import (
    DEFAULT_OPS,
    PROPERTIES,
    SuiteConfig,
    TrialSkipped,
    register,
    run_property,
    run_suite,
    trials_for,
)

CONFIDENT = ["relabel_laws", "interval_roundtrip", "json_roundtrip"]


@pytest.fixture
def temporary_property():
    """Register properties for one test and remove them afterwards"""
    added = []

    def add(name, fn):
        register(name)(fn)
        added.append(name)
        return name

    yield add
    for name in added:
        PROPERTIES.pop(name, None)


@pytest.mark.property
class TestSuiteConfig:
    """Test suite parameters"""

    def test_defaults_from_settings(self):
        """Test defaults come from the global settings"""
        from src.config import config
        cfg = SuiteConfig()
        assert cfg.seed == config.suite.suite_seed
        assert cfg.trials == config.suite.suite_trials

    @pytest.mark.parametrize("kwargs", [
        {"trials": 0},
        {"max_cuts": -1},
        {"psd_tol": 0.0},
        {"only": ["no_such_property"]},
    ])
    def test_invalid(self, kwargs):
        """Test counts, tolerances and property names are validated"""
        with pytest.raises(ValidationError):
            SuiteConfig(**kwargs)

    def test_weights(self):
        """Test weights scale the number of trials but never below one"""
        cfg = SuiteConfig(trials=10)
        assert trials_for("group_laws", cfg) == 20
        assert trials_for("interval_roundtrip", cfg) == 20
        assert trials_for("diamond_generic_product", cfg) == 10
        assert trials_for("region_membership", cfg) == 5
        assert trials_for("block_rank", cfg) == 2
        assert trials_for("thompson_order3", cfg) == 1

    def test_default_counts(self):
        """Test one hundred trials give the documented number of checks per property"""
        cfg = SuiteConfig(trials=100)
        assert trials_for("group_laws", cfg) == 200
        assert trials_for("diamond_associativity", cfg) == 100
        assert trials_for("realize_roundtrip", cfg) == 100
        assert trials_for("region_membership", cfg) == 50
        assert trials_for("block_rank", cfg) == 20

    def test_registry(self):
        """Test every area of the library has properties"""
        for name in ["group_laws", "diamond_associativity", "diamond_coset_invariance",
                     "interval_roundtrip", "gram_psd", "json_roundtrip"]:
            assert name in PROPERTIES


@pytest.mark.property
class TestRunSuite:
    """Test running selected properties"""

    def test_subset_passes(self):
        """Test a small run of well-understood properties"""
        report = run_suite(SuiteConfig(seed=3, trials=3, only=CONFIDENT), show_progress=False)
        assert [r.name for r in report.results] == [n for n in PROPERTIES if n in CONFIDENT]
        assert report.ok
        assert report.failures() == []

    def test_deterministic(self):
        """Test the same seed gives the same report"""
        cfg = SuiteConfig(seed=11, trials=2, only=["group_laws", "relabel_laws"])
        first = run_suite(cfg, show_progress=False)
        second = run_suite(cfg, show_progress=False)
        assert first.model_dump() == second.model_dump()

    def test_seed_independent_of_selection(self):
        """Test a property sees the same inputs alone or with others"""
        alone = run_suite(SuiteConfig(seed=5, trials=2, only=["relabel_laws"]), show_progress=False)
        both = run_suite(SuiteConfig(seed=5, trials=2, only=["group_laws", "relabel_laws"]), show_progress=False)
        assert alone.results[0] == both.results[-1]

    def test_group_laws(self):
        """Test the group laws on a few random elements"""
        result = run_property("group_laws", SuiteConfig(trials=3), 7, DEFAULT_OPS)
        assert result.ok
        assert result.passed == 6
        assert result.skipped == 0

    @pytest.mark.slow
    def test_coset_invariance_and_realize(self):
        """Test the diamond coset property and the realize round trip on a few random inputs"""
        report = run_suite(
            SuiteConfig(seed=2, trials=5, only=["diamond_coset_invariance", "realize_roundtrip"]),
            show_progress=False,
        )
        assert report.ok
        assert [r.passed for r in report.results] == [5, 5]


@pytest.mark.property
class TestSkippedTrials:
    """Test trials that do not apply are counted apart from passes"""

    def test_skips_are_not_passes(self, temporary_property):
        """Test every other trial skipped leaves half the trials passed"""
        calls = []

        def every_other(rng, cfg, ops):
            calls.append(None)
            if len(calls) % 2:
                raise TrialSkipped("odd trial")
            return None

        name = temporary_property("every_other_trial", every_other)
        result = run_property(name, SuiteConfig(trials=4), 0, DEFAULT_OPS)
        assert result.ok
        assert result.trials == 4
        assert result.skipped == 2
        assert result.passed == 2

    def test_failure_after_skip(self, temporary_property):
        """Test a counterexample after a skipped trial reports both counts"""
        calls = []

        def skip_then_fail(rng, cfg, ops):
            calls.append(None)
            if len(calls) == 1:
                raise TrialSkipped("first trial")
            return {"why": "second trial"}

        name = temporary_property("skip_then_fail", skip_then_fail)
        result = run_property(name, SuiteConfig(trials=5), 0, DEFAULT_OPS)
        assert not result.ok
        assert result.trials == 2
        assert result.skipped == 1
        assert result.passed == 0
        assert result.counterexample == {"trial": 1, "why": "second trial"}


@pytest.mark.property
class TestMutation:
    """Test the suite notices broken operations"""

    def test_broken_compose(self):
        """Test a compose that ignores its second argument is caught"""
        report = run_suite(
            SuiteConfig(seed=1, trials=5, only=["group_laws"]),
            mutate={"compose": lambda g, h: g},
            show_progress=False,
        )
        assert not report.ok
        failure = report.failures()[0]
        assert failure.name == "group_laws"
        assert failure.counterexample is not None
        assert "trial" in failure.counterexample

    @pytest.mark.slow
    def test_wrong_diamond_glue_rule(self):
        """Test a diamond that keeps blue-red pairs on J2 as black edges fails the product property"""
        wrong = partial(diamond, glue={**GLUE_RULES, ("blue", "red"): "black"})
        report = run_suite(
            SuiteConfig(seed=1, trials=60, only=["diamond_generic_product"]),
            mutate={"diamond": wrong},
            show_progress=False,
        )
        assert not report.ok
        failure = report.failures()[0]
        assert failure.name == "diamond_generic_product"
        assert {"J2", "g1", "g2", "h"} <= set(failure.counterexample)

    def test_exception_is_a_counterexample(self):
        """Test an operation that raises is reported, not propagated"""
        def broken(u, v):
            raise RuntimeError("boom")

        report = run_suite(
            SuiteConfig(seed=1, trials=2, only=["interval_roundtrip"]),
            mutate={"interval_to_region": broken},
            show_progress=False,
        )
        cex = report.failures()[0].counterexample
        assert cex["error"] == "RuntimeError: boom"
        assert cex["trial"] == 0
