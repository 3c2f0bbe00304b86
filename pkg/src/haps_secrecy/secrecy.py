"""Secrecy outage probability (SOP) and probability of positive secrecy
capacity (PPSC) for the decode-and-forward satellite -> HAPS -> ground link.

Two routes are provided: the Meijer-G closed form and direct quadrature of the
defining integrals over the eavesdropper SNR density.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy import integrate

from .channels import (
    FsoLink,
    ShadowedRicianLink,
    clamp_probability,
    gg_cdf,
    sr_cdf,
    sr_pdf,
)
from .special_functions import g11_reduced, meijer_g


@dataclass(frozen=True)
class SecrecySystem:
    fso: FsoLink
    main_rf: ShadowedRicianLink
    eve_rf: ShadowedRicianLink
    rs: float = 0.01

    def __post_init__(self):
        if self.rs < 0:
            raise ValueError("threshold rate rs must be non-negative")

    @property
    def gamma_th(self) -> float:
        """``2^(2 rs)``; ``rs`` is used verbatim as given."""
        return 2.0 ** (2.0 * self.rs)

    def with_rs(self, rs: float) -> "SecrecySystem":
        return replace(self, rs=rs)


def e2e_cdf(gamma, sys: SecrecySystem):
    """CDF of ``min(gamma_SR, gamma_RD)``."""
    g = np.asarray(gamma, dtype=float)
    fso = np.asarray(gg_cdf(g, sys.fso), dtype=float)
    rf = np.asarray(sr_cdf(g, sys.main_rf), dtype=float)
    out = 1.0 - (1.0 - fso) * (1.0 - rf)
    return float(out) if out.ndim == 0 else out


def _positive_secrecy_sum(sys: SecrecySystem, gamma_th: float, d_scale: float = 1.0) -> float:
    """The triple sum shared by SOP (as ``1 - sum``) and PPSC (as ``sum``).

    The ``(p, t)`` double sum of the main-link CCDF is pre-collapsed onto the
    power ``t``, and both bracketed terms depend only on ``n = q + t``, so one
    Meijer G evaluation per distinct ``n`` suffices.
    """
    main, eve, fso = sys.main_rf, sys.eve_rf, sys.fso
    lam_rd, lam_re = main.lambda_z, eve.lambda_z
    big_lambda = lam_re + lam_rd * gamma_th
    z11 = lam_re / (lam_rd * gamma_th)
    d = fso.D * d_scale
    w = d * gamma_th / big_lambda
    log_b = math.log(fso.B)

    @lru_cache(maxsize=None)
    def bracket(n: int) -> float:
        # (lam_rd*gth)^-(n+1) G11(z11 | -n; 0) rescaled by Lambda^(n+1); the
        # ratio (Lambda / (lam_rd*gth))^(n+1) is (1 + z11)^(n+1).
        first = g11_reduced(-n, z11) * math.exp((n + 1) * math.log1p(z11))
        second = math.exp(log_b) * meijer_g(fso.cdf_spec(w, (-float(n),)))
        return first - second

    log_lam = math.log(big_lambda)
    terms = []
    for t, c_t in enumerate(main.ccdf_coeffs):
        for q, e_q in enumerate(eve.pdf_coeffs):
            if c_t == 0.0 or e_q == 0.0:
                continue
            n = q + t
            log_pref = (
                math.log(abs(c_t)) + math.log(abs(e_q)) + t * math.log(gamma_th) - (n + 1) * log_lam
            )
            sign = math.copysign(1.0, c_t) * math.copysign(1.0, e_q)
            terms.append(sign * math.exp(log_pref) * bracket(n))
    return math.fsum(terms)


def sop_closed(sys: SecrecySystem, *, d_scale: float = 1.0) -> float:
    """Closed-form SOP under the ``gamma_0 < gamma_th * gamma_E`` approximation.

    ``d_scale`` multiplies the FSO constant ``D``; it exists only so
    verification runs can inject a known error.
    """
    raw = 1.0 - _positive_secrecy_sum(sys, sys.gamma_th, d_scale)
    return clamp_probability(raw, "SOP")


def ppsc_closed(sys: SecrecySystem, *, d_scale: float = 1.0) -> float:
    """Closed-form PPSC; the threshold is fixed at ``gamma_th = 1`` (``C_s > 0``)."""
    raw = _positive_secrecy_sum(sys, 1.0, d_scale)
    return clamp_probability(raw, "PPSC")


def _eve_breaks(sys: SecrecySystem) -> list[float]:
    scale = 1.0 / sys.eve_rf.lambda_z
    m = sys.eve_rf.m
    return [0.0, scale, (m + 4) * scale, (m + 12) * scale, (3 * m + 40) * scale]


def _integrate_over_eve(fn, sys: SecrecySystem, *, epsabs: float, epsrel: float) -> float:
    breaks = _eve_breaks(sys)
    total = 0.0
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        v, _ = integrate.quad(fn, lo, hi, epsabs=epsabs / 8, epsrel=epsrel, limit=200)
        total += v
    tail, _ = integrate.quad(fn, breaks[-1], np.inf, epsabs=epsabs / 8, epsrel=epsrel, limit=200)
    return total + tail


def sop_quadrature(
    sys: SecrecySystem, exact: bool = False, *, epsabs: float = 1e-12, epsrel: float = 1e-10
) -> float:
    """SOP by integrating the end-to-end CDF against the eavesdropper density.

    ``exact=True`` uses the argument ``gamma*gamma_th + gamma_th - 1``;
    otherwise ``gamma*gamma_th``.
    """
    gth = sys.gamma_th
    shift = gth - 1.0 if exact else 0.0

    def integrand(g: float) -> float:
        return e2e_cdf(g * gth + shift, sys) * sr_pdf(g, sys.eve_rf)

    return clamp_probability(_integrate_over_eve(integrand, sys, epsabs=epsabs, epsrel=epsrel), "SOP")


def ppsc_quadrature(sys: SecrecySystem, *, epsabs: float = 1e-12, epsrel: float = 1e-10) -> float:
    def integrand(g: float) -> float:
        return e2e_cdf(g, sys) * sr_pdf(g, sys.eve_rf)

    raw = 1.0 - _integrate_over_eve(integrand, sys, epsabs=epsabs, epsrel=epsrel)
    return clamp_probability(raw, "PPSC")
