"""Monte-Carlo validation of the covariance-recovery chain.

Correlated phase fluctuations (delta_phi_1, delta_phi_2) are drawn from
a bivariate normal with equal marginal variance sigma2 in both detector
configurations and covariance epsilon only in the "parallel" one, so
the two configurations are indistinguishable by any single-detector
statistic.  Estimator expectations are evaluated analytically at the
shifted phases (photon shot noise is not resampled, isolating the
recovery algebra from detection statistics), averaged over the phase
distribution, and the injected covariance is recovered from the
parallel/perpendicular mean difference divided by the estimator's mixed
phase derivative.

The module also evaluates the second-order expansion of the total
estimator variance under phase noise,

    Var_x[C] = Var[C]_0 + sum_k A_kk E[delta_phi_k^2]
               + A_12 E[delta_phi_1 delta_phi_2],

with A_kk = q_kk/2 - h_0 h_kk and A_12 = q_12 - 2 h_0 h_12, where h and
q are the <C> and <C^2> surfaces and subscripts denote phase
derivatives at the working point; the law of total variance
Var_x = E_x[q] - (E_x[h])^2 expanded to second order gives exactly
these coefficients.  Direct numerical integration (Gauss-Hermite on the
45-degree decorrelated axes, or Monte Carlo) cross-checks the
prediction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import estimation, observables
from .config import HolometerConfig
from .estimation import EstimatorKind, EstimatorSpec

__all__ = [
    "Configuration",
    "PhaseNoiseModel",
    "VarianceExpansion",
    "sample_phase_offsets",
    "mc_expectation",
    "recover_covariance",
    "variance_expansion",
    "direct_variance",
]

MIN_MC_SAMPLES = 1_000
MAX_EXPANSION_SIGMA2 = 1e-4


class Configuration(str, Enum):
    """Relative orientation of the two interferometers."""

    PARALLEL = "parallel"
    PERPENDICULAR = "perpendicular"


@dataclass(frozen=True)
class PhaseNoiseModel:
    """Bivariate-normal phase-fluctuation model for one configuration.

    ``sigma2`` is the marginal variance of each phase offset (rad^2) and
    is identical in both configurations by construction; ``epsilon`` is
    their covariance and must vanish in the perpendicular configuration,
    where the fluctuations are uncorrelated.
    """

    sigma2: float
    epsilon: float
    configuration: Configuration
    sampler_seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "configuration", Configuration(self.configuration))
        if not (math.isfinite(self.sigma2) and self.sigma2 >= 0.0):
            raise ValueError(f"sigma2 must be finite and non-negative, got {self.sigma2!r}")
        if not math.isfinite(self.epsilon) or abs(self.epsilon) > self.sigma2:
            raise ValueError(
                f"|epsilon| = {abs(self.epsilon)!r} exceeds the marginal variance "
                f"sigma2 = {self.sigma2!r}; the covariance matrix would not be positive"
            )
        if self.configuration is Configuration.PERPENDICULAR and self.epsilon != 0.0:
            raise ValueError(
                "the perpendicular configuration has uncorrelated fluctuations; "
                "epsilon must be 0"
            )

    @property
    def covariance_matrix(self) -> np.ndarray:
        return np.array([[self.sigma2, self.epsilon], [self.epsilon, self.sigma2]])


def sample_phase_offsets(
    model: PhaseNoiseModel,
    n_samples: int,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """(n_samples, 2) phase offsets; identical seeds give identical streams."""
    if rng is None:
        rng = np.random.default_rng(model.sampler_seed)
    return rng.multivariate_normal(
        np.zeros(2), model.covariance_matrix, size=int(n_samples), method="svd"
    )


def mc_expectation(
    config: HolometerConfig,
    spec: EstimatorSpec,
    noise: PhaseNoiseModel,
    n_samples: int,
) -> tuple[float, float]:
    """Sample mean and standard error of E_x[<C>] under the noise model.

    Per-sample expectations come from the closed-form mean surface with
    centering constants frozen at the working point.  Accumulation uses
    numpy's pairwise mean, so the result is independent of any batch
    split of the same stream.
    """
    if n_samples < MIN_MC_SAMPLES:
        raise ValueError(f"n_samples must be at least {MIN_MC_SAMPLES}")
    phi0 = config.phi0_1
    if config.phi0_2 != phi0:
        raise ValueError("the noise model shifts a symmetric working point; phases must match")
    center = estimation.estimator_center(config, spec)
    offsets = sample_phase_offsets(noise, n_samples)
    values = estimation.estimator_mean_curve(
        config, spec, phi0 + offsets[:, 0], phi0 + offsets[:, 1], center=center
    )
    mean = float(np.mean(values))
    std_error = float(np.std(values, ddof=1) / math.sqrt(n_samples))
    return mean, std_error


def recover_covariance(
    config: HolometerConfig,
    spec: EstimatorSpec,
    noise_par: PhaseNoiseModel,
    noise_perp: PhaseNoiseModel,
    n_samples: int,
) -> tuple[float, float]:
    """Recovered phase covariance and its Monte-Carlo standard error.

    epsilon_hat = (E_par[C] - E_perp[C]) / (d^2<C>/dphi_1 dphi_2); the
    standard error combines the two run errors as independent.
    """
    if noise_par.configuration is not Configuration.PARALLEL:
        raise ValueError("noise_par must use the parallel configuration")
    if noise_perp.configuration is not Configuration.PERPENDICULAR:
        raise ValueError("noise_perp must use the perpendicular configuration")
    if not math.isclose(noise_par.sigma2, noise_perp.sigma2, rel_tol=1e-12, abs_tol=0.0):
        raise ValueError(
            "mismatched marginal variances would leak single-detector differences into "
            f"the recovery: {noise_par.sigma2!r} vs {noise_perp.sigma2!r}"
        )
    mean_par, se_par = mc_expectation(config, spec, noise_par, n_samples)
    mean_perp, se_perp = mc_expectation(config, spec, noise_perp, n_samples)
    denominator = estimation.estimator_mixed_derivative(config, spec)
    epsilon_hat = estimation.estimate_phase_covariance(mean_par, mean_perp, denominator)
    std_error = math.hypot(se_par, se_perp) / abs(denominator)
    return epsilon_hat, std_error


# ---------------------------------------------------------------------------
# second-order variance expansion
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VarianceExpansion:
    """Second-order expansion of the total estimator variance.

    ``predict(sigma2, epsilon)`` evaluates var_zero + (a_11 + a_22) *
    sigma2 + a_12 * epsilon.
    """

    a_11: float
    a_22: float
    a_12: float
    var_zero: float

    def predict(self, sigma2: float, epsilon: float) -> float:
        return self.var_zero + (self.a_11 + self.a_22) * sigma2 + self.a_12 * epsilon


def _surfaces(config: HolometerConfig, spec: EstimatorSpec):
    center = estimation.estimator_center(config, spec)

    def surface(phi_1: float, phi_2: float) -> tuple[float, float]:
        return estimation.estimator_mean_and_square(config, spec, phi_1, phi_2, center=center)

    return surface


def _second_partials(surface, phi0: float, policy) -> dict[str, tuple[float, float]]:
    """Richardson-extrapolated (h, q) second partials at (phi0, phi0)."""
    h_large, h_small = policy.steps_for(phi0)
    base = surface(phi0, phi0)

    def axis(step: float, which: int) -> tuple[float, float]:
        if which == 0:
            plus, minus = surface(phi0 + step, phi0), surface(phi0 - step, phi0)
        else:
            plus, minus = surface(phi0, phi0 + step), surface(phi0, phi0 - step)
        return tuple(
            (plus[i] - 2.0 * base[i] + minus[i]) / (step * step) for i in range(2)
        )

    def cross(step: float) -> tuple[float, float]:
        pp = surface(phi0 + step, phi0 + step)
        pm = surface(phi0 + step, phi0 - step)
        mp = surface(phi0 - step, phi0 + step)
        mm = surface(phi0 - step, phi0 - step)
        return tuple(
            (pp[i] - pm[i] - mp[i] + mm[i]) / (4.0 * step * step) for i in range(2)
        )

    rho2 = (h_large / h_small) ** 2

    def richardson(f) -> tuple[float, float]:
        d_large, d_small = f(h_large), f(h_small)
        return tuple(
            (rho2 * d_small[i] - d_large[i]) / (rho2 - 1.0) for i in range(2)
        )

    return {
        "base": base,
        "d11": richardson(lambda h: axis(h, 0)),
        "d22": richardson(lambda h: axis(h, 1)),
        "d12": richardson(cross),
    }


def variance_expansion(
    config: HolometerConfig,
    spec: EstimatorSpec,
    sigma2: float = 0.0,
    epsilon: float = 0.0,
) -> VarianceExpansion:
    """Expansion coefficients of Var_x[C] around the working point.

    ``sigma2``/``epsilon`` are validated against the small-noise domain
    of the expansion (sigma2 <= 1e-4) but the returned coefficients are
    noise-independent; use ``predict`` to evaluate the expansion.
    """
    if sigma2 < 0.0 or sigma2 > MAX_EXPANSION_SIGMA2:
        raise ValueError(
            f"the second-order expansion is valid for 0 <= sigma2 <= {MAX_EXPANSION_SIGMA2}"
        )
    if abs(epsilon) > max(sigma2, 0.0):
        raise ValueError("|epsilon| must not exceed sigma2")
    phi0 = config.phi0_1
    if config.phi0_2 != phi0:
        raise ValueError("the variance expansion assumes a symmetric working point")
    surface = _surfaces(config, spec)
    parts = _second_partials(surface, phi0, spec.derivative_step)
    h0, q0 = parts["base"]
    h11, q11 = parts["d11"]
    h22, q22 = parts["d22"]
    h12, q12 = parts["d12"]
    return VarianceExpansion(
        a_11=0.5 * q11 - h0 * h11,
        a_22=0.5 * q22 - h0 * h22,
        a_12=q12 - 2.0 * h0 * h12,
        var_zero=q0 - h0 * h0,
    )


def direct_variance(
    config: HolometerConfig,
    spec: EstimatorSpec,
    noise: PhaseNoiseModel,
    *,
    method: str = "gauss_hermite",
    n_samples: int | None = None,
    gh_order: int = 9,
) -> tuple[float, float]:
    """Total estimator variance under phase noise, without expansion.

    Var_x[C] = E_x[<C^2>] - (E_x[<C>])^2.  ``gauss_hermite`` integrates
    on the 45-degree decorrelated axes (variances sigma2 +- epsilon) and
    returns standard error 0; ``mc`` samples phases and reports a
    delta-method standard error.  The quadrature-product kind evaluates
    its surfaces in vectorized closed form; the squared photocurrent
    kinds walk the engine per node or sample.
    """
    phi0 = config.phi0_1
    if config.phi0_2 != phi0:
        raise ValueError("the noise model shifts a symmetric working point; phases must match")
    center = estimation.estimator_center(config, spec)

    if spec.kind is EstimatorKind.QUADRATURE_PRODUCT:

        def batch(d1: np.ndarray, d2: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
            q = observables.closed_form_quadrature(config, phi0 + d1, phi0 + d2)
            o1 = q["mean_1"] - center[0]
            o2 = q["mean_2"] - center[1]
            mean = q["cov"] + o1 * o2
            square = (
                (q["var_1"] + o1 * o1) * (q["var_2"] + o2 * o2)
                + 2.0 * q["cov"] * q["cov"]
                + 4.0 * q["cov"] * o1 * o2
            )
            return np.asarray(mean, float), np.asarray(square, float)

    else:

        def batch(d1: np.ndarray, d2: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
            means = np.empty(d1.shape, float)
            squares = np.empty(d1.shape, float)
            for idx in np.ndindex(d1.shape):
                means[idx], squares[idx] = estimation.estimator_mean_and_square(
                    config, spec, phi0 + float(d1[idx]), phi0 + float(d2[idx]), center=center
                )
            return means, squares

    if method == "gauss_hermite":
        nodes, weights = np.polynomial.hermite_e.hermegauss(gh_order)
        weights = weights / math.sqrt(2.0 * math.pi)
        scale_u = math.sqrt(max(noise.sigma2 + noise.epsilon, 0.0))
        scale_v = math.sqrt(max(noise.sigma2 - noise.epsilon, 0.0))
        u = scale_u * nodes[:, None] * np.ones_like(nodes)[None, :]
        v = scale_v * np.ones_like(nodes)[:, None] * nodes[None, :]
        d1 = (u + v) / math.sqrt(2.0)
        d2 = (u - v) / math.sqrt(2.0)
        w = weights[:, None] * weights[None, :]
        means, squares = batch(d1, d2)
        e_h = float(np.sum(w * means))
        e_q = float(np.sum(w * squares))
        return e_q - e_h * e_h, 0.0
    if method == "mc":
        if n_samples is None or n_samples < MIN_MC_SAMPLES:
            raise ValueError(f"mc direct variance needs n_samples >= {MIN_MC_SAMPLES}")
        offsets = sample_phase_offsets(noise, n_samples)
        means, squares = batch(offsets[:, 0], offsets[:, 1])
        e_h = float(np.mean(means))
        variance = float(np.mean(squares)) - e_h * e_h
        influence = squares - 2.0 * e_h * means
        std_error = float(np.std(influence, ddof=1) / math.sqrt(n_samples))
        return variance, std_error
    raise ValueError(f"unknown method {method!r}; expected 'gauss_hermite' or 'mc'")
