"""Photon-noise-limited uncertainty of the phase-covariance estimator.

The holometer infers the covariance of correlated phase fluctuations
from the mean of a quadratic readout estimator C measured at a fixed
working point (phi_0, phi_0).  Three estimator kinds are supported:

* ``TwbDifferenceSquared``: C = (N1 - N2)^2 on twin-beam light; pairs
  with psi = pi/2 where the photon-number cross covariance is most
  negative.
* ``TwbSumSquared``: C = (N1 + N2 - s0)^2, centered on the working-point
  mean s0; pairs with psi = 0.
* ``QuadratureProduct``: C = (Y1 - y1)(Y2 - y2) on the signal
  quadratures, centered on the working-point quadrature means; the
  canonical readout for independently squeezed inputs.

The photon-noise-only (zero-order) uncertainty of the recovered
covariance is

    U0 = sqrt(2 Var[C]) / |d^2 <C> / dphi_1 dphi_2|,

with the variance taken at the working point and the mixed derivative
evaluated by central finite differences with Richardson extrapolation.
All statistical inputs come from the Gaussian engine in centered form,
which survives coherent energies of mu ~ 1e12 in double precision.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable

import numpy as np

from . import holometer, observables
from .config import HolometerConfig, InputKind
from .observables import UndefinedResultError, regime_parameter

__all__ = [
    "SingularConfigurationError",
    "StepUnderflowError",
    "PsiPairingWarning",
    "EstimatorKind",
    "StepPolicy",
    "EstimatorSpec",
    "UncertaintyResult",
    "classical_benchmark",
    "mixed_derivative",
    "estimator_mixed_derivative",
    "estimator_center",
    "estimator_mean_curve",
    "estimator_mean_and_square",
    "u0",
    "u0_asymptotic",
    "U0_ASYMPTOTIC_BRANCHES",
    "estimate_phase_covariance",
]


class SingularConfigurationError(RuntimeError):
    """The estimator has no usable phase response at this working point."""


class StepUnderflowError(ValueError):
    """The finite-difference step is unresolvable next to the base phase."""


class PsiPairingWarning(UserWarning):
    """Estimator kind and coherent phase psi are not the canonical pairing."""


class EstimatorKind(str, Enum):
    TWB_DIFFERENCE_SQUARED = "TwbDifferenceSquared"
    TWB_SUM_SQUARED = "TwbSumSquared"
    QUADRATURE_PRODUCT = "QuadratureProduct"


# requests for an uncentered linear readout are rejected with an
# explanation rather than silently mapped to a squared kind
_LINEAR_READOUT_ALIASES = {
    "difference",
    "plaindifference",
    "lineardifference",
    "twbdifference",
    "m1",
    "sum",
    "plainsum",
}


@dataclass(frozen=True)
class StepPolicy:
    """Finite-difference step selection for the mixed phase derivative.

    Two central-difference estimates are formed with steps
    ``relative_steps[i] * max(|phi_0|, phase_floor)`` and combined by
    Richardson extrapolation, cancelling the leading quadratic
    truncation term.
    """

    relative_steps: tuple[float, float] = (1e-3, 1e-4)
    phase_floor: float = 1e-3

    def __post_init__(self) -> None:
        large, small = self.relative_steps
        if not (0.0 < small < large):
            raise ValueError("relative_steps must be (large, small) with 0 < small < large")
        if self.phase_floor <= 0.0:
            raise ValueError("phase_floor must be positive")

    def steps_for(self, phi0: float) -> tuple[float, float]:
        scale = max(abs(phi0), self.phase_floor)
        return self.relative_steps[0] * scale, self.relative_steps[1] * scale


@dataclass(frozen=True)
class EstimatorSpec:
    """Choice of readout estimator plus derivative step policy.

    ``allow_psi_mismatch`` downgrades the canonical psi-pairing check
    (difference <-> psi=pi/2, sum <-> psi=0, for twin-beam input) from
    an error to a PsiPairingWarning.
    """

    kind: EstimatorKind
    derivative_step: StepPolicy = field(default_factory=StepPolicy)
    allow_psi_mismatch: bool = False

    def __post_init__(self) -> None:
        if not isinstance(self.kind, EstimatorKind):
            label = str(self.kind)
            if label.strip().lower() in _LINEAR_READOUT_ALIASES:
                raise ValueError(
                    f"estimator kind {label!r} denotes an uncentered linear readout, whose "
                    "mean has no mixed phase derivative at the working point; use one of "
                    f"{[k.value for k in EstimatorKind]}"
                )
            try:
                object.__setattr__(self, "kind", EstimatorKind(label))
            except ValueError:
                raise ValueError(
                    f"unknown estimator kind {label!r}; expected one of "
                    f"{[k.value for k in EstimatorKind]}"
                ) from None


@dataclass(frozen=True)
class UncertaintyResult:
    """Zero-order uncertainty of the phase-covariance estimate.

    ``u0`` is the photon-noise-limited uncertainty, ``u_cl`` the
    coherent-light benchmark at the same working point, ``ratio`` their
    quotient, and ``regime_k`` the readout-port dominance parameter.
    """

    u0: float
    u_cl: float
    ratio: float
    numerator_var: float
    denominator: float
    regime_k: float


# ---------------------------------------------------------------------------
# validation helpers
# ---------------------------------------------------------------------------


def _require_symmetric(config: HolometerConfig, what: str) -> float:
    if not config.is_symmetric() or config.phi0_1 != config.phi0_2:
        raise ValueError(f"{what} requires a symmetric working point (equal phases and efficiencies)")
    return config.phi0_1


def _check_psi_pairing(config: HolometerConfig, spec: EstimatorSpec) -> None:
    if config.input_kind is not InputKind.TWB:
        return
    targets = {
        EstimatorKind.TWB_DIFFERENCE_SQUARED: -1.0,
        EstimatorKind.TWB_SUM_SQUARED: +1.0,
    }
    target = targets.get(spec.kind)
    if target is None:
        return
    if abs(math.cos(2.0 * config.psi) - target) <= 1e-6:
        return
    message = (
        f"{spec.kind.value} pairs with cos(2 psi) = {target:+.0f} "
        f"(psi = {'pi/2' if target < 0 else '0'}); got psi = {config.psi!r}. "
        "The photon cross covariance then has the wrong sign for this readout."
    )
    if spec.allow_psi_mismatch:
        warnings.warn(message, PsiPairingWarning, stacklevel=3)
    else:
        raise ValueError(message + " Pass allow_psi_mismatch=True to proceed anyway.")


# ---------------------------------------------------------------------------
# classical benchmark
# ---------------------------------------------------------------------------


def classical_benchmark(config: HolometerConfig) -> float:
    """Coherent-light uncertainty sqrt(2)/(eta mu cos^2(phi_0/2)).

    This is the photon-noise floor of the same covariance estimation
    performed with coherent light alone at equal detected energy.
    """
    phi0 = _require_symmetric(config, "the classical benchmark")
    if config.mu <= 0.0 or config.eta <= 0.0:
        raise ValueError("the classical benchmark requires mu > 0 and eta > 0")
    transmitted = math.cos(phi0 / 2.0) ** 2
    # cos(pi/2) never rounds to exactly zero in floats, so catch the dark
    # fringe within a few ulps of it rather than by equality
    if transmitted <= (4.0 * math.ulp(1.0)) ** 2:
        raise OverflowError(
            "phi_0 = pi sends no coherent light to the detector; the classical "
            "benchmark diverges"
        )
    return math.sqrt(2.0) / (config.eta * config.mu * transmitted)


# ---------------------------------------------------------------------------
# mixed derivative (finite differences + Richardson)
# ---------------------------------------------------------------------------


def _cross_moment_function(config: HolometerConfig, spec: EstimatorSpec) -> Callable[[float, float], float]:
    """<N1 N2> or <Y1 Y2> as a function of the two phases.

    The quadrature angles stay pinned to the working-point signal
    quadrature while the phases vary.
    """
    if spec.kind is EstimatorKind.QUADRATURE_PRODUCT:
        chi = config.signal_quadrature_angle

        def f(phi_1: float, phi_2: float) -> float:
            qm = holometer.quadrature_readout(config, phi_1, phi_2, chi_1=chi, chi_2=chi)
            return qm.cov + qm.mean_1 * qm.mean_2

    else:

        def f(phi_1: float, phi_2: float) -> float:
            m = holometer.readout_moments(config, phi_1, phi_2, max_order=2)
            return m.cov + m.mean_1 * m.mean_2

    return f


def _mixed_derivative_detail(config: HolometerConfig, spec: EstimatorSpec) -> tuple[float, float]:
    """Richardson-extrapolated mixed derivative and its roundoff floor."""
    phi0 = _require_symmetric(config, "the mixed derivative")
    f = _cross_moment_function(config, spec)
    h_large, h_small = spec.derivative_step.steps_for(phi0)
    eps = np.finfo(float).eps
    if abs(phi0) > 0.0 and h_small <= 8.0 * eps * abs(phi0):
        raise StepUnderflowError(
            f"finite-difference step {h_small:.3e} is below the resolution of "
            f"phi_0 = {phi0!r}; increase the relative steps"
        )

    def cross(h: float) -> tuple[float, float]:
        values = (
            f(phi0 + h, phi0 + h),
            f(phi0 + h, phi0 - h),
            f(phi0 - h, phi0 + h),
            f(phi0 - h, phi0 - h),
        )
        stencil_scale = max(abs(v) for v in values)
        return (values[0] - values[1] - values[2] + values[3]) / (4.0 * h * h), stencil_scale

    d_large, scale_large = cross(h_large)
    d_small, scale_small = cross(h_small)
    rho2 = (h_large / h_small) ** 2
    derivative = (rho2 * d_small - d_large) / (rho2 - 1.0)
    # roundoff on the small-step estimate dominates after extrapolation
    noise_floor = 500.0 * eps * max(scale_large, scale_small) / (4.0 * h_small * h_small)
    return derivative, noise_floor


def mixed_derivative(config: HolometerConfig, spec: EstimatorSpec) -> float:
    """d^2 <N1 N2> / dphi_1 dphi_2 (or <Y1 Y2> for the quadrature kind).

    Central finite differences at two step sizes combined by Richardson
    extrapolation, evaluated on engine moments at the working point.
    """
    return _mixed_derivative_detail(config, spec)[0]


_ESTIMATOR_DERIVATIVE_FACTOR = {
    EstimatorKind.TWB_DIFFERENCE_SQUARED: -2.0,
    EstimatorKind.TWB_SUM_SQUARED: +2.0,
    EstimatorKind.QUADRATURE_PRODUCT: 1.0,
}


def estimator_mixed_derivative(config: HolometerConfig, spec: EstimatorSpec) -> float:
    """Mixed phase derivative of the estimator mean <C>.

    The squared readouts contribute their cross term only: the mixed
    derivative of <N_i^2> terms vanishes, leaving -+2 d^2<N1 N2> for the
    difference/sum kinds and d^2<Y1 Y2> for the quadrature product
    (centering constants are held fixed, so they drop out).
    """
    return _ESTIMATOR_DERIVATIVE_FACTOR[spec.kind] * mixed_derivative(config, spec)


# ---------------------------------------------------------------------------
# estimator mean / second-moment surfaces
# ---------------------------------------------------------------------------


def estimator_center(config: HolometerConfig, spec: EstimatorSpec) -> tuple[float, ...]:
    """Working-point centering constants of the estimator.

    Empty for the difference kind (the symmetric working point centers
    it automatically), (s0,) for the sum kind, and the two quadrature
    means for the product kind.  Centers are frozen at the working point
    and do not follow the phases during derivative or noise averaging.
    """
    if spec.kind is EstimatorKind.TWB_DIFFERENCE_SQUARED:
        return ()
    if spec.kind is EstimatorKind.TWB_SUM_SQUARED:
        vals = observables.closed_form_moments(config)
        return (float(vals["mean_1"] + vals["mean_2"]),)
    qvals = observables.closed_form_quadrature(config)
    return (float(qvals["mean_1"]), float(qvals["mean_2"]))


def estimator_mean_curve(
    config: HolometerConfig,
    spec: EstimatorSpec,
    phi_1: Any,
    phi_2: Any,
    center: tuple[float, ...] | None = None,
) -> np.ndarray:
    """Vectorized closed-form <C(phi_1, phi_2)> surface.

    Exact for all kinds (Gaussian statistics); the engine reproduces it
    pointwise, which the test-suite checks.  ``center`` defaults to the
    working-point centering constants of ``config``.
    """
    if center is None:
        center = estimator_center(config, spec)
    if spec.kind is EstimatorKind.QUADRATURE_PRODUCT:
        q = observables.closed_form_quadrature(config, phi_1, phi_2)
        d1 = q["mean_1"] - center[0]
        d2 = q["mean_2"] - center[1]
        return np.asarray(q["cov"] + d1 * d2)
    sign = -1.0 if spec.kind is EstimatorKind.TWB_DIFFERENCE_SQUARED else +1.0
    c0 = 0.0 if not center else center[0]
    vals = observables.closed_form_moments(config, phi_1, phi_2)
    var_t = vals["var_1"] + vals["var_2"] + 2.0 * sign * vals["cov"]
    offset = vals["mean_1"] + sign * vals["mean_2"] - c0
    return np.asarray(var_t + offset * offset)


def estimator_mean_and_square(
    config: HolometerConfig,
    spec: EstimatorSpec,
    phi_1: float,
    phi_2: float,
    center: tuple[float, ...] | None = None,
) -> tuple[float, float]:
    """Engine-exact (<C>, <C^2>) at one phase pair.

    For the squared photocurrent kinds the fourth-order centered table
    supplies <C^2> = mu4 + 4 d mu3 + 6 d^2 mu2 + d^4 with d the offset
    of the (un)centered combination from its frozen center; for the
    quadrature product the Gaussian identity
    E[(Y1-c1)^2 (Y2-c2)^2] = (V1+d1^2)(V2+d2^2) + 2 Cov^2 + 4 Cov d1 d2
    closes at second order.
    """
    if center is None:
        center = estimator_center(config, spec)
    if spec.kind is EstimatorKind.QUADRATURE_PRODUCT:
        q = holometer.quadrature_readout(
            config, phi_1, phi_2,
            chi_1=config.signal_quadrature_angle, chi_2=config.signal_quadrature_angle,
        )
        d1, d2 = q.mean_1 - center[0], q.mean_2 - center[1]
        mean = q.cov + d1 * d2
        square = (
            (q.var_1 + d1 * d1) * (q.var_2 + d2 * d2)
            + 2.0 * q.cov * q.cov
            + 4.0 * q.cov * d1 * d2
        )
        return float(mean), float(square)
    sign = -1.0 if spec.kind is EstimatorKind.TWB_DIFFERENCE_SQUARED else +1.0
    c0 = 0.0 if not center else center[0]
    m = holometer.readout_moments(config, phi_1, phi_2, max_order=4)
    s = int(sign)
    mu2 = m.signed_sum_moment(s, 2)
    mu3 = m.signed_sum_moment(s, 3)
    mu4 = m.signed_sum_moment(s, 4)
    d = m.mean_1 + sign * m.mean_2 - c0
    mean = mu2 + d * d
    square = mu4 + 4.0 * d * mu3 + 6.0 * d * d * mu2 + d ** 4
    return float(mean), float(square)


# ---------------------------------------------------------------------------
# zero-order uncertainty
# ---------------------------------------------------------------------------


def u0(config: HolometerConfig, spec: EstimatorSpec) -> UncertaintyResult:
    """Photon-noise-limited uncertainty of the covariance estimate.

    Numerator: Var[C] at the working point from engine moments
    (fourth-order photon table for the squared kinds, second-order
    quadrature moments for the product kind).  Denominator: the
    finite-difference mixed derivative of <C>.
    """
    phi0 = _require_symmetric(config, "the zero-order uncertainty")
    _check_psi_pairing(config, spec)

    if spec.kind is EstimatorKind.QUADRATURE_PRODUCT:
        q = holometer.quadrature_readout(config)
        numerator_var = q.var_1 * q.var_2 + q.cov * q.cov
    else:
        m = holometer.readout_moments(config, max_order=4)
        s = -1 if spec.kind is EstimatorKind.TWB_DIFFERENCE_SQUARED else +1
        mu2 = m.signed_sum_moment(s, 2)
        mu4 = m.signed_sum_moment(s, 4)
        numerator_var = mu4 - mu2 * mu2

    raw, noise_floor = _mixed_derivative_detail(config, spec)
    factor = _ESTIMATOR_DERIVATIVE_FACTOR[spec.kind]
    denominator = abs(factor * raw)
    if denominator <= abs(factor) * noise_floor:
        raise SingularConfigurationError(
            f"the estimator mean has no resolvable mixed phase response at phi_0 = {phi0!r} "
            f"(|derivative| = {denominator:.3e} <= roundoff floor {abs(factor) * noise_floor:.3e})"
        )
    value = math.sqrt(2.0 * max(numerator_var, 0.0)) / denominator
    u_cl = classical_benchmark(config)
    return UncertaintyResult(
        u0=value,
        u_cl=u_cl,
        ratio=value / u_cl,
        numerator_var=numerator_var,
        denominator=denominator,
        regime_k=regime_parameter(config),
    )


# ---------------------------------------------------------------------------
# asymptotic limit forms (ratios to the classical benchmark)
# ---------------------------------------------------------------------------

U0_ASYMPTOTIC_BRANCHES = (
    "SQ_large_lambda",
    "SQ_small_lambda",
    "TWB_A_large_lambda",
    "TWB_A_small_lambda",
    "TWB_B",
)


def u0_asymptotic(config: HolometerConfig, branch: str) -> float:
    """Limit forms of u0 / u_cl, taken verbatim with no interpolation.

    SQ branches describe the quadrature-product readout on squeezed
    inputs; TWB branches the difference-squared readout on twin beams.
    ``TWB_A_*`` hold deep in the quantum-dominated regime (phi_0 -> 0),
    ``*_large_lambda`` for lam >> 1, ``*_small_lambda`` for lam << 1,
    and ``TWB_B`` is sqrt(2) times the SQ plateau in the
    coherent-dominated regime.
    """
    if branch not in U0_ASYMPTOTIC_BRANCHES:
        raise ValueError(f"unknown branch {branch!r}; expected one of {U0_ASYMPTOTIC_BRANCHES}")
    phi0 = _require_symmetric(config, "the asymptotic uncertainty")
    eta, lam = config.eta, config.lam
    if branch in ("SQ_large_lambda", "TWB_B") and lam <= 0.0:
        raise UndefinedResultError("the large-lam plateau requires lam > 0")
    if branch == "TWB_A_small_lambda" and eta <= 0.0:
        raise UndefinedResultError("the small-lam quantum-regime limit requires eta > 0")
    if branch == "SQ_large_lambda":
        return 1.0 - eta * (1.0 + math.cos(phi0)) / 2.0 + eta * math.cos(phi0 / 2.0) ** 2 / (4.0 * lam)
    if branch == "SQ_small_lambda":
        root = math.sqrt(lam)
        return 1.0 - eta * (1.0 + math.cos(phi0)) * root * (1.0 - root)
    if branch == "TWB_A_large_lambda":
        return 2.0 * math.sqrt(5.0) * (1.0 - eta)
    if branch == "TWB_A_small_lambda":
        return math.sqrt(2.0 * (1.0 - eta) / eta)
    return math.sqrt(2.0) * u0_asymptotic(config, "SQ_large_lambda")


def estimate_phase_covariance(mean_parallel: float, mean_perp: float, denominator: float) -> float:
    """Recovered phase covariance (E_par[C] - E_perp[C]) / denominator.

    ``denominator`` is the mixed phase derivative of <C> at the working
    point (see estimator_mixed_derivative).
    """
    if denominator == 0.0 or not math.isfinite(denominator):
        raise SingularConfigurationError(
            "covariance recovery needs a finite nonzero estimator phase response"
        )
    return (mean_parallel - mean_perp) / denominator
