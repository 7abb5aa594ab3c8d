import math

import pytest

from holonoise.moments import (
    CENTERED_KEYS,
    QuadratureMoments,
    ReadoutMoments,
    compare_moments,
    comparison_entries,
)


def full_table(overrides=None):
    table = {key: 0.0 for key in CENTERED_KEYS}
    table[(2, 0)] = 2.0
    table[(0, 2)] = 2.0
    table[(1, 1)] = 1.0
    table[(4, 0)] = 12.0
    table[(0, 4)] = 12.0
    table[(2, 2)] = 5.0
    table.update(overrides or {})
    return table


def make(cov=1.0, centered=None):
    return ReadoutMoments(mean_1=3.0, mean_2=3.0, var_1=2.0, var_2=2.0, cov=cov,
                          centered=centered)


def test_centered_keys_cover_orders_two_to_four():
    assert all(2 <= p + q <= 4 for p, q in CENTERED_KEYS)
    assert len(CENTERED_KEYS) == 3 + 4 + 5


def test_rejects_negative_means_and_variances():
    with pytest.raises(ValueError):
        ReadoutMoments(-1.0, 1.0, 1.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        ReadoutMoments(1.0, 1.0, -1.0, 1.0, 0.0)


def test_rejects_cauchy_schwarz_violation():
    with pytest.raises(ValueError):
        make(cov=2.5)


def test_rejects_incomplete_table():
    table = full_table()
    del table[(3, 1)]
    with pytest.raises(ValueError):
        make(centered=table)


def test_second_order_accessors_without_table():
    moments = make()
    assert moments.total_mean == 6.0
    assert moments.centered_moment(0, 0) == 1.0
    assert moments.centered_moment(1, 0) == 0.0
    assert moments.centered_moment(2, 0) == 2.0
    assert moments.centered_moment(1, 1) == 1.0
    with pytest.raises(ValueError):
        moments.centered_moment(3, 1)
    with pytest.raises(ValueError):
        moments.centered_moment(-1, 2)


def test_signed_sum_moment_expands_binomially():
    moments = make(centered=full_table())
    assert moments.signed_sum_moment(-1, 2) == pytest.approx(2.0 + 2.0 - 2.0)
    assert moments.signed_sum_moment(+1, 2) == pytest.approx(2.0 + 2.0 + 2.0)
    # order 4: 12 + 6*5 + 12 with vanishing odd entries
    assert moments.signed_sum_moment(+1, 4) == pytest.approx(12.0 + 30.0 + 12.0)
    assert moments.difference_variance() == pytest.approx(2.0)
    assert moments.sum_variance() == pytest.approx(6.0)
    with pytest.raises(ValueError):
        moments.signed_sum_moment(2, 2)


def test_variance_helpers_match_signed_sums():
    moments = make(centered=full_table())
    assert moments.difference_variance() == moments.signed_sum_moment(-1, 2)
    assert moments.sum_variance() == moments.signed_sum_moment(+1, 2)


def test_quadrature_moments_allow_negative_means():
    quads = QuadratureMoments(-1.0, 2.0, 0.5, 0.5, 0.1)
    assert quads.centered is None
    with pytest.raises(ValueError):
        QuadratureMoments(0.0, 0.0, 0.5, 0.5, 0.9)


def test_compare_equal_moments_passes():
    a = make(centered=full_table())
    result = compare_moments(a, a)
    assert result.ok
    assert result.max_relative == 0.0


def test_compare_flags_large_relative_deviation():
    a = make(centered=full_table())
    b = make(cov=1.0 + 1e-5, centered=full_table({(1, 1): 1.0 + 1e-5}))
    result = compare_moments(a, b, rtol=1e-8)
    assert not result.ok
    assert result.worst_field in ("cov", "centered[1,1]")
    assert result.max_relative == pytest.approx(1e-5, rel=1e-3)


def test_compare_tolerates_tiny_absolute_residue_on_zero_entries():
    # a zero fourth-order entry with a truncation-sized residue must not fail
    a = make(centered=full_table({(3, 1): 0.0}))
    b = make(centered=full_table({(3, 1): 5e-12}))
    assert compare_moments(a, b).ok


def test_comparison_entries_cover_table_when_present():
    a = make(centered=full_table())
    names = [name for name, *_ in comparison_entries(a, a)]
    assert names[:5] == ["mean_1", "mean_2", "var_1", "var_2", "cov"]
    assert len(names) == 5 + len(CENTERED_KEYS)
    short = make()
    assert len(comparison_entries(short, short)) == 5


def test_fourth_order_alias():
    table = full_table()
    assert make(centered=table).fourth_order[(2, 2)] == 5.0
    assert make().fourth_order is None


def test_table_is_read_only():
    moments = make(centered=full_table())
    with pytest.raises(TypeError):
        moments.centered[(2, 0)] = 9.0
