"""Blind cross-validation of the Gaussian engine against the
truncated-Fock oracle.

The two routes share nothing but the configuration dataclass and the
moment carrier: the engine works in phase space via Wick contractions,
the oracle in a truncated photon-number basis.  Agreement of every
joint moment up to fourth order over randomly drawn configurations is
therefore a strong check on both.  A deliberately broken beam-splitter
convention is wired in as a negative control so the check itself can be
shown to have teeth.
"""
from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .config import HolometerConfig, InputKind
from .fock_oracle import (
    MAX_MEAN_COHERENT,
    MAX_MEAN_QUANTUM,
    oracle_moments,
    two_photon_coincidence,
)
from .holometer import readout_moments
from .moments import MomentComparison, compare_moments, comparison_entries

__all__ = [
    "ConfigCheck",
    "CrosscheckReport",
    "sample_guardrail_config",
    "run_crosscheck",
    "DEFAULT_SEED",
]

DEFAULT_SEED = 20240816
_COINCIDENCE_NULL_TOL = 1e-12

# how often each input kind is drawn; pair correlation gets the most
# weight because it exercises the largest moment set
_KIND_WEIGHTS: tuple[tuple[InputKind, float], ...] = (
    (InputKind.TWB, 0.60),
    (InputKind.TWO_SQUEEZED, 0.25),
    (InputKind.COHERENT_ONLY, 0.15),
)


def sample_guardrail_config(rng: np.random.Generator) -> HolometerConfig:
    """One random configuration inside the oracle's tractable envelope:
    mean coherent occupancy at most 4, mean quantum occupancy at most 1,
    transmissivity and efficiency in (0, 1], free phases over the full
    circle."""
    kinds = [kind for kind, _ in _KIND_WEIGHTS]
    weights = [w for _, w in _KIND_WEIGHTS]
    kind = kinds[int(rng.choice(len(kinds), p=weights))]
    tau = rng.uniform(0.01, 1.0)
    phi0 = 2.0 * math.acos(math.sqrt(tau))
    return HolometerConfig(
        mu=rng.uniform(0.05, MAX_MEAN_COHERENT),
        psi=rng.uniform(0.0, 2.0 * math.pi),
        lam=0.0 if kind is InputKind.COHERENT_ONLY else rng.uniform(0.02, MAX_MEAN_QUANTUM),
        eta=rng.uniform(0.05, 1.0),
        phi0_1=phi0,
        phi0_2=phi0,
        input_kind=kind,
        theta=rng.uniform(0.0, 2.0 * math.pi) if kind is InputKind.TWB else 0.0,
        theta_xi=rng.uniform(0.0, 2.0 * math.pi) if kind is InputKind.TWO_SQUEEZED else None,
    )


@dataclass(frozen=True)
class ConfigCheck:
    """Engine-versus-oracle comparison for one drawn configuration."""

    index: int
    config: HolometerConfig
    comparison: MomentComparison

    @property
    def ok(self) -> bool:
        return self.comparison.ok


@dataclass(frozen=True)
class CrosscheckReport:
    """Outcome of the full validation run."""

    coincidence: float  # two-photon coincidence under the active convention
    coincidence_ok: bool
    checks: tuple[ConfigCheck, ...]
    field_worst: Mapping[str, float]  # per-moment max relative deviation
    rtol: float
    convention: str
    runtime_seconds: float

    @property
    def n_failed(self) -> int:
        return sum(1 for check in self.checks if not check.ok)

    @property
    def ok(self) -> bool:
        return self.coincidence_ok and self.n_failed == 0

    @property
    def max_relative(self) -> float:
        return max((check.comparison.max_relative for check in self.checks), default=0.0)

    def summary_lines(self) -> list[str]:
        lines = [
            f"beam-splitter convention: {self.convention}",
            "two-photon coincidence at balanced splitter: "
            f"{self.coincidence:.3e} ({'null ok' if self.coincidence_ok else 'NULL VIOLATED'})",
            f"configurations checked: {len(self.checks)}, failed: {self.n_failed} "
            f"(relative tolerance {self.rtol:g})",
        ]
        for name, rel in self.field_worst.items():
            verdict = "ok" if rel <= self.rtol else "FAIL"
            lines.append(f"  {name:<16} max relative deviation {rel:.3e}  {verdict}")
        lines.append(f"worst relative deviation overall: {self.max_relative:.3e}")
        lines.append(f"runtime: {self.runtime_seconds:.1f} s")
        lines.append("RESULT: " + ("PASS" if self.ok else "FAIL"))
        return lines


def _check_one(
    index: int, config: HolometerConfig, rtol: float, convention: str
) -> tuple[ConfigCheck, dict[str, float]]:
    engine = readout_moments(config)
    oracle = oracle_moments(config, convention=convention)
    comparison = compare_moments(engine, oracle, rtol=rtol)
    per_field: dict[str, float] = {}
    for name, x, y, floor in comparison_entries(engine, oracle):
        denom = max(abs(x), abs(y))
        per_field[name] = abs(x - y) / denom if denom > floor else 0.0
    return ConfigCheck(index, config, comparison), per_field


def run_crosscheck(
    n_configs: int = 100,
    seed: int = DEFAULT_SEED,
    rtol: float = 1e-8,
    threads: int = 1,
    convention: str = "i",
) -> CrosscheckReport:
    """Draw ``n_configs`` random configurations and compare every joint
    photon-number moment up to fourth order between the two routes.

    ``convention`` selects the oracle's beam-splitter phase convention;
    passing the deliberately broken "real-symmetric" one makes both the
    coincidence null and the moment comparison fail, which is the
    intended negative control.
    """
    if n_configs < 1:
        raise ValueError("need at least one configuration")
    if threads < 1:
        raise ValueError("threads must be at least 1")
    start = time.perf_counter()
    coincidence = two_photon_coincidence(convention)
    coincidence_ok = coincidence < _COINCIDENCE_NULL_TOL

    rng = np.random.default_rng(seed)
    configs = [sample_guardrail_config(rng) for _ in range(n_configs)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(
                pool.map(
                    lambda pair: _check_one(pair[0], pair[1], rtol, convention),
                    enumerate(configs),
                )
            )
    else:
        results = [_check_one(i, cfg, rtol, convention) for i, cfg in enumerate(configs)]

    field_worst: dict[str, float] = {}
    for _, per_field in results:
        for name, rel in per_field.items():
            field_worst[name] = max(field_worst.get(name, 0.0), rel)

    return CrosscheckReport(
        coincidence=coincidence,
        coincidence_ok=coincidence_ok,
        checks=tuple(check for check, _ in results),
        field_worst=field_worst,
        rtol=rtol,
        convention=convention,
        runtime_seconds=time.perf_counter() - start,
    )
