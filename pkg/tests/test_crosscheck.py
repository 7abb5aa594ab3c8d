import numpy as np
import pytest

from holonoise.config import InputKind
from holonoise.crosscheck import (
    DEFAULT_SEED,
    run_crosscheck,
    sample_guardrail_config,
)


def test_small_crosscheck_passes_and_aggregates():
    report = run_crosscheck(n_configs=6, seed=DEFAULT_SEED, threads=2)
    assert report.ok
    assert report.coincidence_ok
    assert report.n_failed == 0
    assert len(report.checks) == 6
    assert report.max_relative < report.rtol
    assert report.field_worst
    assert all(len(lines) > 0 for lines in [report.summary_lines()])
    # indices preserved in order despite the thread pool
    assert [check.index for check in report.checks] == list(range(6))


def test_broken_convention_is_caught():
    report = run_crosscheck(n_configs=2, seed=DEFAULT_SEED, convention="real-symmetric")
    assert not report.ok
    assert not report.coincidence_ok
    assert report.coincidence == pytest.approx(0.5, abs=1e-9)
    assert report.n_failed == len(report.checks)


def test_sampled_configs_stay_inside_the_guardrail_domain():
    rng = np.random.default_rng(123)
    kinds = set()
    for _ in range(200):
        config = sample_guardrail_config(rng)
        kinds.add(config.input_kind)
        assert 0.0 < config.mu <= 4.0
        assert 0.0 <= config.lam <= 1.0
        assert config.phi0_1 == config.phi0_2
        assert 0.0 < config.tau_1 <= 1.0
        assert 0.0 < config.eta <= 1.0
        assert 0.0 <= config.psi < 2.0 * np.pi
        if config.input_kind is InputKind.COHERENT_ONLY:
            assert config.lam == 0.0
        else:
            assert config.lam > 0.0
    assert kinds == {InputKind.TWB, InputKind.TWO_SQUEEZED, InputKind.COHERENT_ONLY}


def test_run_crosscheck_argument_guards():
    with pytest.raises(ValueError):
        run_crosscheck(n_configs=0)
    with pytest.raises(ValueError):
        run_crosscheck(n_configs=2, threads=0)
