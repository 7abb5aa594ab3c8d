"""Closed-form photon statistics and noise-reduction factors.

Each interferometer is equivalent to a beam splitter of transmissivity
tau = cos^2(phi/2) mixing its quantum port into the coherent port; the
detected mode is

    d_i = cos(phi_i/2) * b_i + i sin(phi_i/2) * a_i,

with ``b_i`` the quantum input (twin-beam arm, squeezed vacuum, or
vacuum) and ``a_i`` the coherent input of amplitude sqrt(mu) e^{i psi}.
Every first/second-order photon observable then follows from four
Gaussian correlators of the detected mode: the displacement m_i, the
thermal occupancy n_i = <dd_i^+ dd_i>, the self-anomalous term
S_i = <dd_i^2>, and the cross-anomalous term G = <dd_1 dd_2> (the only
nonzero cross correlator for the inputs modeled here):

    <N_i>       = |m_i|^2 + n_i
    Var(N_i)    = |m_i|^2 (1 + 2 n_i) + 2 Re(conj(m_i)^2 S_i)
                  + n_i (1 + n_i) + |S_i|^2
    Cov(N1,N2)  = 2 Re(conj(m_1) conj(m_2) G) + |G|^2

Detection loss eta maps mean -> eta*mean, Var -> eta^2*Var +
eta(1-eta)*mean, Cov -> eta_1*eta_2*Cov.  These identities hold exactly
for displaced Gaussian states; the test-suite checks them against the
numerical engine at 1e-10 relative and against the truncated-Fock
oracle at 1e-8.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from .config import HolometerConfig, InputKind
from .moments import ReadoutMoments

__all__ = [
    "UndefinedResultError",
    "NrfResult",
    "detected_correlators",
    "closed_form_moments",
    "closed_form_quadrature",
    "analytic_moments",
    "nrf",
    "nrf_asymptotic",
    "regime_parameter",
    "regime_label",
    "REGIME_A_MAX_K",
    "REGIME_B_MIN_K",
]

# readout-port dominance thresholds on k = mu(1-tau)/(tau*lambda):
# below the first the quantum light dominates the detected port ("A"),
# above the second the coherent leak dominates ("B").
REGIME_A_MAX_K = 1e-2
REGIME_B_MIN_K = 1e2


class UndefinedResultError(ValueError):
    """A requested quantity has no defined value at this operating point."""


# ---------------------------------------------------------------------------
# correlator primitives
# ---------------------------------------------------------------------------


def detected_correlators(
    config: HolometerConfig,
    phi_1: Any = None,
    phi_2: Any = None,
) -> dict[str, Any]:
    """Pre-loss Gaussian correlators of the two detected modes.

    ``phi_1``/``phi_2`` override the configured operating phases and may
    be numpy arrays (broadcast together), which the Monte-Carlo layer
    uses to evaluate whole phase-sample batches at once.

    Returns a dict with keys ``m1, m2`` (complex displacement), ``n1,
    n2`` (thermal occupancy), ``s1, s2`` (self-anomalous ``<dd^2>``) and
    ``g`` (cross-anomalous ``<dd1 dd2>``).
    """
    phi_1 = config.phi0_1 if phi_1 is None else phi_1
    phi_2 = config.phi0_2 if phi_2 is None else phi_2
    phi_1, phi_2 = np.broadcast_arrays(np.asarray(phi_1, float), np.asarray(phi_2, float))

    c1, s1 = np.cos(phi_1 / 2.0), np.sin(phi_1 / 2.0)
    c2, s2 = np.cos(phi_2 / 2.0), np.sin(phi_2 / 2.0)
    alpha = config.coherent_amplitude  # sqrt(mu) e^{i psi}
    m1 = 1j * s1 * alpha
    m2 = 1j * s2 * alpha

    lam = config.lam
    zeros = np.zeros_like(c1, dtype=complex)
    n1 = np.zeros_like(c1)
    n2 = np.zeros_like(c2)
    s_anom_1 = zeros.copy()
    s_anom_2 = zeros.copy()
    g_anom = zeros.copy()
    if config.input_kind is InputKind.TWB:
        n1 = c1 * c1 * lam
        n2 = c2 * c2 * lam
        g_anom = c1 * c2 * math.sqrt(lam * (1.0 + lam)) * np.exp(1j * config.theta)
    elif config.input_kind is InputKind.TWO_SQUEEZED:
        n1 = c1 * c1 * lam
        n2 = c2 * c2 * lam
        chi = config.squeezed_quadrature_angle
        b_sq = -math.sqrt(lam * (1.0 + lam)) * np.exp(2j * chi)
        s_anom_1 = c1 * c1 * b_sq
        s_anom_2 = c2 * c2 * b_sq
    return {"m1": m1, "m2": m2, "n1": n1, "n2": n2, "s1": s_anom_1, "s2": s_anom_2, "g": g_anom}


def closed_form_moments(
    config: HolometerConfig,
    phi_1: Any = None,
    phi_2: Any = None,
) -> dict[str, Any]:
    """Vectorized first/second photon-number moments after detection loss.

    Returns a dict with keys ``mean_1, mean_2, var_1, var_2, cov`` whose
    values broadcast like the phase inputs (scalars in, 0-d arrays out).
    """
    cor = detected_correlators(config, phi_1, phi_2)
    eta_1, eta_2 = config.eta_pair

    def port(m: Any, n: Any, s: Any, eta: float) -> tuple[Any, Any]:
        amp2 = np.abs(m) ** 2
        mean = amp2 + n
        var = amp2 * (1.0 + 2.0 * n) + 2.0 * np.real(np.conj(m) ** 2 * s) + n * (1.0 + n) + np.abs(s) ** 2
        return eta * mean, eta * eta * var + eta * (1.0 - eta) * mean

    mean_1, var_1 = port(cor["m1"], cor["n1"], cor["s1"], eta_1)
    mean_2, var_2 = port(cor["m2"], cor["n2"], cor["s2"], eta_2)
    cov = eta_1 * eta_2 * (
        2.0 * np.real(np.conj(cor["m1"]) * np.conj(cor["m2"]) * cor["g"]) + np.abs(cor["g"]) ** 2
    )
    return {"mean_1": mean_1, "mean_2": mean_2, "var_1": var_1, "var_2": var_2, "cov": cov}


def closed_form_quadrature(
    config: HolometerConfig,
    phi_1: Any = None,
    phi_2: Any = None,
    chi_1: float | None = None,
    chi_2: float | None = None,
) -> dict[str, Any]:
    """Vectorized closed-form quadrature readout after detection loss.

    ``chi_1``/``chi_2`` pick the measured quadrature angle per detector
    and default to the signal angle psi + pi/2 where the coherent leak
    carries the phase information.  Returns ``mean_1, mean_2, var_1,
    var_2, cov`` for Y_chi = (a e^{-i chi} + a^+ e^{i chi})/sqrt(2).
    """
    chi_1 = config.signal_quadrature_angle if chi_1 is None else chi_1
    chi_2 = config.signal_quadrature_angle if chi_2 is None else chi_2
    cor = detected_correlators(config, phi_1, phi_2)
    eta_1, eta_2 = config.eta_pair

    def port(m: Any, n: Any, s: Any, chi: float, eta: float) -> tuple[Any, Any]:
        mean = math.sqrt(2.0) * np.real(m * np.exp(-1j * chi))
        var = 0.5 + n + np.real(s * np.exp(-2j * chi))
        return math.sqrt(eta) * mean, eta * var + (1.0 - eta) / 2.0

    mean_1, var_1 = port(cor["m1"], cor["n1"], cor["s1"], chi_1, eta_1)
    mean_2, var_2 = port(cor["m2"], cor["n2"], cor["s2"], chi_2, eta_2)
    cov = math.sqrt(eta_1 * eta_2) * np.real(cor["g"] * np.exp(-1j * (chi_1 + chi_2)))
    return {"mean_1": mean_1, "mean_2": mean_2, "var_1": var_1, "var_2": var_2, "cov": cov}


def analytic_moments(config: HolometerConfig) -> ReadoutMoments:
    """Closed-form second-order readout moments at the operating phases.

    Exact for all three input kinds and for unequal interferometer
    phases; the returned carrier holds no third/fourth-order table.
    """
    vals = closed_form_moments(config)
    return ReadoutMoments(
        mean_1=float(vals["mean_1"]),
        mean_2=float(vals["mean_2"]),
        var_1=float(vals["var_1"]),
        var_2=float(vals["var_2"]),
        cov=float(vals["cov"]),
    )


# ---------------------------------------------------------------------------
# noise reduction factor
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NrfResult:
    """Noise reduction factors of the difference and sum photocurrents.

    ``nrf_minus``/``nrf_plus`` are Var(N1 -+ N2) / <N1 + N2>; values
    below 1 certify nonclassical correlation.  ``regime_k`` is the
    readout-port dominance parameter mu(1-tau)/(tau*lambda) and
    ``regime_label`` its classification ("A", "transition", "B").
    """

    nrf_minus: float
    nrf_plus: float
    regime_k: float
    regime_label: str


def regime_parameter(config: HolometerConfig) -> float:
    """Coherent-to-quantum photon ratio k at the detected port.

    k = mu(1-tau)/(tau*lambda); 0 when no coherent light reaches the
    detector, +inf when no quantum light does.  1-tau is evaluated as
    sin^2(phi/2), which stays accurate for phases far below the double
    rounding step of cos^2.
    """
    half = 0.5 * config.phi0_1
    coherent = config.mu * math.sin(half) ** 2
    quantum = math.cos(half) ** 2 * config.lam
    if config.input_kind is InputKind.COHERENT_ONLY:
        return math.inf if coherent > 0.0 else 0.0
    if quantum == 0.0:
        return math.inf if coherent > 0.0 else 0.0
    return coherent / quantum


def regime_label(k: float) -> str:
    if k < REGIME_A_MAX_K:
        return "A"
    if k > REGIME_B_MIN_K:
        return "B"
    return "transition"


def nrf(config: HolometerConfig) -> NrfResult:
    """Noise reduction factors at the configured operating point.

    Requires equal interferometer phases and efficiencies (the
    difference/sum photocurrents are only balanced then).  Raises
    UndefinedResultError when no light reaches the detectors.
    """
    if not config.is_symmetric() or config.phi0_1 != config.phi0_2:
        raise UndefinedResultError(
            "noise reduction factors are defined for equal phases and efficiencies"
        )
    moments = analytic_moments(config)
    total = moments.total_mean
    if total <= 0.0:
        raise UndefinedResultError(
            "no photons reach the detectors; the noise reduction factor is undefined"
        )
    k = regime_parameter(config)
    # Var(N1 - N2) vanishes identically for lossless fully transmitted twin
    # beams, so the subtraction var_1 + var_2 - 2 cov can leave pure
    # cancellation noise; clamp only that, never a genuinely negative value.
    cancellation = 64.0 * math.ulp(1.0) * (
        moments.var_1 + moments.var_2 + 2.0 * abs(moments.cov)
    )

    def ratio(variance: float) -> float:
        if variance < 0.0 and -variance <= cancellation:
            return 0.0
        return variance / total

    return NrfResult(
        nrf_minus=ratio(moments.difference_variance()),
        nrf_plus=ratio(moments.sum_variance()),
        regime_k=k,
        regime_label=regime_label(k),
    )


def nrf_asymptotic(config: HolometerConfig, regime: str, sign: str) -> float:
    """Limit forms of the noise reduction factor in the two dominance regimes.

    regime "A" (quantum light dominates the readout):
        sign "-":  (1 - eta*tau) + eta*tau*(1 + 2*lam - 2*sqrt(lam(1+lam))) * k
        sign "+":  1 + eta*tau*(2*lam + 1)
    regime "B" (coherent light dominates, lam >> 1):
        both signs:  1 - eta*tau + eta*tau/(4*lam)
    taken verbatim from the limit expressions; no interpolation between
    regimes is attempted.
    """
    regime_key = str(regime).strip().upper()
    if regime_key not in ("A", "B"):
        raise ValueError(f"regime must be 'A' or 'B', got {regime!r}")
    sign_key = {"+": "+", "-": "-", "plus": "+", "minus": "-", "1": "+", "-1": "-"}.get(
        str(sign).strip().lower()
    )
    if sign_key is None:
        raise ValueError(f"sign must be '+' or '-', got {sign!r}")
    if not config.is_symmetric() or config.phi0_1 != config.phi0_2:
        raise UndefinedResultError("asymptotic forms assume equal phases and efficiencies")
    if config.lam <= 0.0:
        raise UndefinedResultError(
            "asymptotic noise-reduction forms assume quantum light present (lambda > 0)"
        )
    eta, tau, lam = config.eta, config.tau_1, config.lam
    if regime_key == "A":
        if sign_key == "+":
            return 1.0 + eta * tau * (2.0 * lam + 1.0)
        k = regime_parameter(config)
        squeeze_factor = 1.0 + 2.0 * lam - 2.0 * math.sqrt(lam * (1.0 + lam))
        return (1.0 - eta * tau) + eta * tau * squeeze_factor * k
    return 1.0 - tau * eta + eta * tau / (4.0 * lam)
