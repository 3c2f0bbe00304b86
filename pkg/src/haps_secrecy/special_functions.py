"""Gamma-family helpers and a real-argument Meijer G-function evaluator.

The Meijer G-function is evaluated either from its residue (Slater) series or
by quadrature of the Mellin-Barnes integral along a vertical line

    G(z) = 1/(2*pi) * integral of Phi(c + i t) dt,

    Phi(s) = prod_{j<=m} Gamma(b_j - s) prod_{j<=n} Gamma(1 - a_j + s)
             / (prod_{j>m} Gamma(1 - b_j + s) prod_{j>n} Gamma(a_j - s)) * z**s

with ``c`` placed at the minimum of ``|Phi|`` on the real axis inside the strip
separating the two pole families. At that point the integrand is peaked and
nearly phase-stationary around ``t = 0``, which keeps cancellation small even
when ``G`` is many orders of magnitude below the Gamma products.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import optimize, special

from .quadrature import QuadratureError, integrate

POLE_EPS = 1e-9
PERTURBATION_EPS = 1e-6

# Series of ln Gamma(1 + e) = -euler*e + sum_{k>=2} (-1)^k zeta(k) e^k / k, |e| <= 0.25
_ROOT_WINDOW = 0.25
_ZETA_TERMS = np.array([(-1.0) ** k * special.zeta(k) / k for k in range(2, 40)])


class PoleError(ValueError):
    """Argument sits on a pole of the Gamma function."""


class MeijerGError(ArithmeticError):
    """Base class for Meijer G evaluation failures."""


class SeparabilityError(MeijerGError):
    """a_i - b_j is a positive integer for some i <= n, j <= m."""


class MeijerGConvergenceError(MeijerGError):
    """Evaluation did not reach the target accuracy.

    ``diagnostics`` records the strategy tried, the contour abscissa, the
    truncation point and the number of series terms or quadrature panels.
    """

    def __init__(self, message: str, diagnostics: dict):
        super().__init__(f"{message}: {diagnostics}")
        self.diagnostics = diagnostics


def _is_nonpositive_integer(x: float) -> bool:
    return x <= 0 and x == math.floor(x)


def ln_gamma(x: float) -> tuple[float, int]:
    """Return ``(log|Gamma(x)|, sign(Gamma(x)))``.

    Near the zeros of ``log Gamma`` at 1 and 2 a Taylor series is used so the
    result keeps full relative accuracy.
    """
    x = float(x)
    if _is_nonpositive_integer(x):
        raise PoleError(f"Gamma has a pole at {x}")
    if abs(x - 1.0) <= _ROOT_WINDOW:
        return _lgamma1p(x - 1.0), 1
    if abs(x - 2.0) <= _ROOT_WINDOW:
        e = x - 2.0
        return _lgamma1p(e) + math.log1p(e), 1
    value = math.lgamma(x)
    if x > 0:
        return value, 1
    return value, 1 if math.floor(x) % 2 == 0 else -1


def _lgamma1p(e: float) -> float:
    powers = e ** np.arange(2, 2 + _ZETA_TERMS.size)
    return -np.euler_gamma * e + math.fsum(_ZETA_TERMS * powers)


def pochhammer(a: float, k: int) -> float:
    """Rising factorial ``a (a+1) ... (a+k-1)``; 1 for ``k == 0``."""
    if k < 0:
        raise ValueError("pochhammer requires k >= 0")
    out = 1.0
    for i in range(k):
        out *= a + i
    return out


def delta_list(k: int, a: float) -> list[float]:
    """``[a/k, (a+1)/k, ..., (a+k-1)/k]``."""
    if k < 1:
        raise ValueError("delta_list requires k >= 1")
    return [(a + i) / k for i in range(k)]


def g11_reduced(a: float, z: float) -> float:
    """Closed form of ``G^{1,1}_{1,1}(z | a; 0) = Gamma(1-a) (1+z)^(a-1)``."""
    lg, sign = ln_gamma(1.0 - a)
    return sign * math.exp(lg + (a - 1.0) * math.log1p(z))


@dataclass(frozen=True)
class MeijerGSpec:
    """One instance ``G^{m,n}_{p,q}(z | a_list; b_list)`` with real parameters."""

    m: int
    n: int
    a_list: tuple[float, ...]
    b_list: tuple[float, ...]
    z: float
    p: int = field(init=False)
    q: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "a_list", tuple(float(v) for v in self.a_list))
        object.__setattr__(self, "b_list", tuple(float(v) for v in self.b_list))
        object.__setattr__(self, "p", len(self.a_list))
        object.__setattr__(self, "q", len(self.b_list))
        if not (0 <= self.m <= self.q and 0 <= self.n <= self.p):
            raise ValueError(
                f"invalid orders m={self.m}, n={self.n} for p={self.p}, q={self.q}"
            )
        if not self.z > 0:
            raise ValueError("Meijer G argument z must be positive")

    @classmethod
    def from_lists(
        cls,
        m: int,
        n: int,
        a_list: Sequence[float],
        b_list: Sequence[float],
        z: float,
    ) -> "MeijerGSpec":
        return cls(m, n, tuple(a_list), tuple(b_list), z)

    @property
    def convergence_margin(self) -> float:
        """``m + n - (p + q)/2``; vertical contours converge when positive."""
        return self.m + self.n - 0.5 * (self.p + self.q)

    def with_b(self, b_list: Sequence[float]) -> "MeijerGSpec":
        return MeijerGSpec(self.m, self.n, self.a_list, tuple(b_list), self.z)


def _check_separable(spec: MeijerGSpec) -> None:
    for a in spec.a_list[: spec.n]:
        for b in spec.b_list[: spec.m]:
            d = a - b
            k = round(d)
            if k >= 1 and abs(d - k) < POLE_EPS:
                raise SeparabilityError(
                    f"a - b = {d!r} is (within {POLE_EPS}) a positive integer; "
                    "the pole sequences of the Mellin-Barnes integrand overlap"
                )


def _collision_groups(values: Sequence[float]) -> list[list[int]]:
    """Indices of parameters that coincide modulo integers within POLE_EPS."""
    groups: list[list[int]] = []
    seen: set[int] = set()
    for i in range(len(values)):
        if i in seen:
            continue
        group = [i]
        for j in range(i + 1, len(values)):
            d = values[i] - values[j]
            if abs(d - round(d)) < POLE_EPS:
                group.append(j)
                seen.add(j)
        if len(group) > 1:
            groups.append(group)
    return groups


# ---------------------------------------------------------------------------
# residue series
# ---------------------------------------------------------------------------

def _lgamma_terms(args: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return special.gammaln(args), special.gammasgn(args)


def _slater_series(spec: MeijerGSpec, *, max_terms: int = 4096, chunk: int = 64):
    """Sum residues at the poles ``b_h + k`` of ``Gamma(b_h - s)``, h <= m.

    Returns ``(value, largest_term, terms)`` or ``None`` if the series fails to
    settle within ``max_terms`` per pole family.
    """
    m, n = spec.m, spec.n
    a, b = spec.a_list, spec.b_list
    log_z = math.log(spec.z)
    logs: list[np.ndarray] = []
    signs: list[np.ndarray] = []
    total_terms = 0
    for h in range(m):
        start = 0
        peak = -np.inf
        while True:
            if start >= max_terms:
                return None
            k = np.arange(start, start + chunk, dtype=float)
            s = b[h] + k
            logmag = s * log_z - special.gammaln(k + 1.0)
            sign = np.where(k % 2 == 0, 1.0, -1.0)
            zero = np.zeros(k.shape, dtype=bool)
            for j in range(m):
                if j != h:
                    lg, sg = _lgamma_terms(b[j] - s)
                    logmag += lg
                    sign *= sg
            for j in range(n):
                lg, sg = _lgamma_terms(1.0 - a[j] + s)
                logmag += lg
                sign *= sg
            for arg in [1.0 - b[j] + s for j in range(m, spec.q)] + [
                a[j] - s for j in range(n, spec.p)
            ]:
                pole = (arg <= 0) & (arg == np.floor(arg))
                zero |= pole
                lg, sg = _lgamma_terms(np.where(pole, 0.5, arg))
                logmag -= lg
                sign *= sg
            sign = np.where(zero, 0.0, sign)
            logmag = np.where(zero, -np.inf, logmag)
            logs.append(logmag)
            signs.append(sign)
            total_terms += chunk
            peak = max(peak, float(np.max(logmag)))
            tail = logmag[-8:]
            finite_tail = tail[np.isfinite(tail)]
            settled = finite_tail.size == 0 or (
                np.all(np.diff(finite_tail) < 0) and finite_tail[-1] < peak - 41.0
            )
            if settled and start + chunk > 2:
                break
            start += chunk
    logmag = np.concatenate(logs)
    sign = np.concatenate(signs)
    top = float(np.max(logmag))
    if not np.isfinite(top):
        return 0.0, 0.0, total_terms
    scaled = sign * np.exp(logmag - top)
    value = math.fsum(scaled.tolist()) * math.exp(top)
    return value, math.exp(top), total_terms


# ---------------------------------------------------------------------------
# Mellin-Barnes contour
# ---------------------------------------------------------------------------

def _log_integrand(spec: MeijerGSpec, s: np.ndarray) -> np.ndarray:
    a, b, m, n = spec.a_list, spec.b_list, spec.m, spec.n
    out = s * math.log(spec.z)
    for j in range(m):
        out = out + special.loggamma(b[j] - s)
    for j in range(n):
        out = out + special.loggamma(1.0 - a[j] + s)
    for j in range(m, spec.q):
        out = out - special.loggamma(1.0 - b[j] + s)
    for j in range(n, spec.p):
        out = out - special.loggamma(a[j] - s)
    return out


def _log_term_scale(spec: MeijerGSpec, c: float) -> float:
    """Sum of the magnitudes of the terms making up log|integrand| at ``c``."""
    a, b, m, n = spec.a_list, spec.b_list, spec.m, spec.n
    args = [b[j] - c for j in range(m)] + [1.0 - a[j] + c for j in range(n)]
    args += [1.0 - b[j] + c for j in range(m, spec.q)] + [a[j] - c for j in range(n, spec.p)]
    return abs(c * math.log(spec.z)) + sum(abs(float(special.gammaln(x))) for x in args)


def _log_abs_real(spec: MeijerGSpec, c: float) -> float:
    a, b, m, n = spec.a_list, spec.b_list, spec.m, spec.n
    out = c * math.log(spec.z)
    for j in range(m):
        out += special.gammaln(b[j] - c)
    for j in range(n):
        out += special.gammaln(1.0 - a[j] + c)
    for j in range(m, spec.q):
        out -= special.gammaln(1.0 - b[j] + c)
    for j in range(n, spec.p):
        out -= special.gammaln(a[j] - c)
    return float(out)


def contour_strip(spec: MeijerGSpec) -> tuple[float, float]:
    """Open interval of real ``c`` separating left and right pole families."""
    lo = max((a - 1.0 for a in spec.a_list[: spec.n]), default=-math.inf)
    hi = min(spec.b_list[: spec.m], default=math.inf)
    return lo, hi


def _choose_abscissa(spec: MeijerGSpec, lo: float, hi: float) -> float:
    if math.isfinite(lo) and math.isfinite(hi):
        pad = 1e-6 * (hi - lo)
        res = optimize.minimize_scalar(
            lambda c: _log_abs_real(spec, c),
            bounds=(lo + pad, hi - pad),
            method="bounded",
            options={"xatol": 1e-10 * max(1.0, hi - lo)},
        )
        return float(res.x)
    # half-infinite strip: grow the search window until the minimum is interior
    span = 2.0
    for _ in range(40):
        if math.isfinite(hi):
            left, right = hi - span, hi - 1e-6 * min(span, 1.0)
        else:
            left, right = lo + 1e-6 * min(span, 1.0), lo + span
        res = optimize.minimize_scalar(
            lambda c: _log_abs_real(spec, c),
            bounds=(left, right),
            method="bounded",
            options={"xatol": 1e-10 * span},
        )
        c = float(res.x)
        at_edge = (c - left < 1e-3 * span) if math.isfinite(hi) else (right - c < 1e-3 * span)
        if not at_edge:
            return c
        span *= 2.0
    raise MeijerGConvergenceError(
        "could not place the contour", {"strategy": "contour", "strip": (lo, hi)}
    )


def _contour_quadrature(spec: MeijerGSpec, *, rtol: float = 1e-13) -> float:
    lo, hi = contour_strip(spec)
    c = _choose_abscissa(spec, lo, hi)
    ref = _log_abs_real(spec, c)
    # exp() turns absolute rounding in the log terms into relative noise
    rtol = max(rtol, 32.0 * np.finfo(float).eps * _log_term_scale(spec, c))

    def log_mod(t: float) -> float:
        return float(np.real(_log_integrand(spec, np.array([c + 1j * t]))[0])) - ref

    # Truncate where the integrand is below 1e-16 of its peak and still falling.
    drop = math.log(1e-16) - 1.0
    peak = 0.0
    prev = 0.0
    t_max = 0.25
    for _ in range(60):
        cur = log_mod(t_max)
        peak = max(peak, cur)
        if cur < peak + drop and cur < prev:
            break
        prev = cur
        t_max *= 2.0
    else:
        raise MeijerGConvergenceError(
            "integrand does not decay along the contour",
            {"strategy": "contour", "c": c, "t_max": t_max},
        )

    def integrand(t: np.ndarray) -> np.ndarray:
        return np.real(np.exp(_log_integrand(spec, c + 1j * t) - ref))

    try:
        res = integrate(integrand, 0.0, t_max, rtol=rtol, initial_panels=32)
    except QuadratureError as exc:
        raise MeijerGConvergenceError(
            "contour quadrature did not converge",
            {"strategy": "contour", "c": c, "t_max": t_max, "panels": exc.panels},
        ) from exc
    return res.value / math.pi * math.exp(ref)


# ---------------------------------------------------------------------------
# public evaluator
# ---------------------------------------------------------------------------

_SERIES_MAX_LOSS = 1e3


def meijer_g(spec: MeijerGSpec) -> float:
    """Evaluate ``G^{m,n}_{p,q}(z | a; b)`` for real parameters and ``z > 0``.

    Strategy: the residue series is used for ``z <= 1`` when the poles of the
    ``b_j (j <= m)`` are simple and the sum loses fewer than three digits to
    cancellation. Otherwise the Mellin-Barnes integral is integrated along a
    vertical contour. If neither applies and the ``b`` parameters collide
    modulo integers, colliding entries are shifted by ``+-PERTURBATION_EPS``
    and the two series evaluations averaged.

    Raises:
        SeparabilityError: some ``a_i - b_j`` (i <= n, j <= m) is a positive
            integer, so no contour separates the two pole families.
        MeijerGConvergenceError: no strategy met the accuracy target.
    """
    _check_separable(spec)
    collisions = _collision_groups(spec.b_list[: spec.m])
    series_converges = spec.p < spec.q or (spec.p == spec.q and spec.z < 1.0)
    lo, hi = contour_strip(spec)
    contour_ok = spec.convergence_margin > 0 and lo < hi
    diagnostics: dict = {"m": spec.m, "n": spec.n, "p": spec.p, "q": spec.q, "z": spec.z}

    if not collisions and series_converges and (spec.z <= 1.0 or not contour_ok):
        out = _slater_series(spec)
        if out is not None:
            value, largest, terms = out
            diagnostics.update(strategy="series", terms=terms)
            if largest <= _SERIES_MAX_LOSS * abs(value) or largest == 0.0:
                return value
            if not contour_ok:
                raise MeijerGConvergenceError("series cancellation too severe", diagnostics)
    if contour_ok:
        return _contour_quadrature(spec)
    if collisions and series_converges:
        return _perturbed_series(spec, collisions)
    diagnostics["strategy"] = "none"
    raise MeijerGConvergenceError("no applicable evaluation strategy", diagnostics)


def _perturbed_series(spec: MeijerGSpec, groups: list[list[int]]) -> float:
    offsets = [0.0] * spec.q
    for group in groups:
        centre = 0.5 * (len(group) - 1)
        for rank, idx in enumerate(group):
            offsets[idx] = PERTURBATION_EPS * (rank - centre if len(group) > 2 else (1 - 2 * rank))
    values = []
    for direction in (1.0, -1.0):
        b = [bj + direction * off for bj, off in zip(spec.b_list, offsets)]
        out = _slater_series(spec.with_b(b))
        if out is None:
            raise MeijerGConvergenceError(
                "perturbed series did not converge", {"strategy": "perturbed-series"}
            )
        values.append(out[0])
    return 0.5 * (values[0] + values[1])
