"""Shared carrier for joint photon-number moments of the two readout modes.

Both computation routes (the Gaussian engine and the truncated-Fock
oracle) produce this structure, so results can be compared field by
field without either route importing the other's numerics.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

__all__ = [
    "ReadoutMoments",
    "QuadratureMoments",
    "MomentComparison",
    "compare_moments",
    "comparison_entries",
    "CENTERED_KEYS",
]

# all centered joint orders (p, q) the engine and oracle must report
CENTERED_KEYS: tuple[tuple[int, int], ...] = tuple(
    (p, q) for total in (2, 3, 4) for p in range(total + 1) for q in [total - p]
)

_CS_SLACK = 1e-10  # Cauchy-Schwarz slack, relative


@dataclass(frozen=True)
class ReadoutMoments:
    """Joint centered photon-number moments of the two readout modes.

    ``centered`` maps (p, q) -> <dN1^p dN2^q> for 2 <= p+q <= 4 and is
    ``None`` when only second-order information was computed (the
    closed-form route).  Second-order entries duplicate var_1/var_2/cov
    so the table can be consumed uniformly.
    """

    mean_1: float
    mean_2: float
    var_1: float
    var_2: float
    cov: float
    centered: Mapping[tuple[int, int], float] | None = None

    def __post_init__(self) -> None:
        scale = 1.0 + abs(self.mean_1) + abs(self.mean_2)
        if self.mean_1 < -1e-10 * scale or self.mean_2 < -1e-10 * scale:
            raise ValueError(f"negative mean photon number: {self.mean_1}, {self.mean_2}")
        vscale = 1.0 + abs(self.var_1) + abs(self.var_2)
        if self.var_1 < -1e-10 * vscale or self.var_2 < -1e-10 * vscale:
            raise ValueError(f"negative photon-number variance: {self.var_1}, {self.var_2}")
        bound = math.sqrt(max(self.var_1, 0.0) * max(self.var_2, 0.0))
        if abs(self.cov) > bound * (1.0 + _CS_SLACK) + 1e-12 * vscale:
            raise ValueError(
                f"covariance {self.cov} violates |cov| <= sqrt(var_1 var_2) = {bound}"
            )
        if self.centered is not None:
            table = dict(self.centered)
            missing = [k for k in CENTERED_KEYS if k not in table]
            if missing:
                raise ValueError(f"centered moment table missing orders {missing}")
            object.__setattr__(self, "centered", MappingProxyType(table))

    # -- simple accessors -------------------------------------------------

    @property
    def total_mean(self) -> float:
        return self.mean_1 + self.mean_2

    @property
    def fourth_order(self) -> Mapping[tuple[int, int], float] | None:
        """Alias for the centered table under its order-4 reach."""
        return self.centered

    def centered_moment(self, p: int, q: int) -> float:
        """<dN1^p dN2^q>.  Orders 0 and 1 are trivial; order 2 falls back
        to the dedicated fields when no table is present."""
        if p < 0 or q < 0:
            raise ValueError("moment orders must be non-negative")
        if p + q == 0:
            return 1.0
        if p + q == 1:
            return 0.0
        if self.centered is not None:
            try:
                return self.centered[(p, q)]
            except KeyError:
                raise ValueError(f"moment order ({p}, {q}) not available") from None
        if (p, q) == (2, 0):
            return self.var_1
        if (p, q) == (0, 2):
            return self.var_2
        if (p, q) == (1, 1):
            return self.cov
        raise ValueError("orders above 2 require the full centered table")

    def signed_sum_moment(self, sign: int, order: int) -> float:
        """<(dN1 + sign*dN2)^order> for order <= 4, sign in {+1, -1}."""
        if sign not in (+1, -1):
            raise ValueError("sign must be +1 or -1")
        return sum(
            math.comb(order, j) * sign ** (order - j) * self.centered_moment(j, order - j)
            for j in range(order + 1)
        )

    def difference_variance(self) -> float:
        return self.var_1 + self.var_2 - 2.0 * self.cov

    def sum_variance(self) -> float:
        return self.var_1 + self.var_2 + 2.0 * self.cov


@dataclass(frozen=True)
class QuadratureMoments:
    """First and second moments of one selected quadrature per readout
    mode.  Means may be negative, unlike photon counts.  ``centered`` is
    always None; the field exists so the comparison helper can treat
    both carriers uniformly."""

    mean_1: float
    mean_2: float
    var_1: float
    var_2: float
    cov: float
    centered: None = field(default=None, init=False)

    def __post_init__(self) -> None:
        vscale = 1.0 + abs(self.var_1) + abs(self.var_2)
        if self.var_1 < -1e-10 * vscale or self.var_2 < -1e-10 * vscale:
            raise ValueError(f"negative quadrature variance: {self.var_1}, {self.var_2}")
        bound = math.sqrt(max(self.var_1, 0.0) * max(self.var_2, 0.0))
        if abs(self.cov) > bound * (1.0 + _CS_SLACK) + 1e-12 * vscale:
            raise ValueError(
                f"covariance {self.cov} violates |cov| <= sqrt(var_1 var_2) = {bound}"
            )


@dataclass(frozen=True)
class MomentComparison:
    """Result of a field-by-field comparison of two ReadoutMoments."""

    ok: bool
    worst_margin: float  # |a-b| / allowance, max over fields; <= 1 means ok
    worst_field: str
    max_relative: float  # plain |a-b| / max(|a|,|b|) over fields above floor


def comparison_entries(
    a: "ReadoutMoments | QuadratureMoments",
    b: "ReadoutMoments | QuadratureMoments",
    abs_floor: float = 1e-13,
) -> list[tuple[str, float, float, float]]:
    """(field name, value in a, value in b, absolute floor) for every
    moment the two carriers share, including the centered table when
    both sides have one.  The floors follow the rule documented on
    :func:`compare_moments`."""
    sd1 = math.sqrt(max(a.var_1, b.var_1, 0.0))
    sd2 = math.sqrt(max(a.var_2, b.var_2, 0.0))
    entries: list[tuple[str, float, float, float]] = [
        ("mean_1", a.mean_1, b.mean_1, abs_floor),
        ("mean_2", a.mean_2, b.mean_2, abs_floor),
        ("var_1", a.var_1, b.var_1, abs_floor),
        ("var_2", a.var_2, b.var_2, abs_floor),
        ("cov", a.cov, b.cov, abs_floor + 1e-11 * sd1 * sd2),
    ]
    if a.centered is not None and b.centered is not None:
        for p, q in CENTERED_KEYS:
            floor = abs_floor + 1e-11 * sd1**p * sd2**q
            entries.append((f"centered[{p},{q}]", a.centered[(p, q)], b.centered[(p, q)], floor))
    return entries


def compare_moments(
    a: "ReadoutMoments | QuadratureMoments",
    b: "ReadoutMoments | QuadratureMoments",
    rtol: float = 1e-8,
    abs_floor: float = 1e-13,
) -> MomentComparison:
    """Compare two moment sets at a relative tolerance with a scale-aware
    absolute floor.

    For the order-(p, q) centered entry the floor is
    ``abs_floor + 1e-11 * sd1^p * sd2^q``.  The coefficient is set by the
    truncated-Fock route: its weighted-tail rule leaves residues up to a
    few 1e-13 on entries whose exact value is zero (measured across the
    oracle envelope), while a real convention bug sits ten or more
    decades higher.
    """
    entries = comparison_entries(a, b, abs_floor)

    worst_margin = 0.0
    worst_field = "none"
    max_rel = 0.0
    for name, x, y, floor in entries:
        allowance = rtol * max(abs(x), abs(y)) + floor
        margin = abs(x - y) / allowance
        if margin > worst_margin:
            worst_margin = margin
            worst_field = name
        denom = max(abs(x), abs(y))
        if denom > floor:
            max_rel = max(max_rel, abs(x - y) / denom)
    return MomentComparison(worst_margin <= 1.0, worst_margin, worst_field, max_rel)
