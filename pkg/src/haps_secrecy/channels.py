"""SNR distributions of the RF (shadowed-Rician) and FSO (Gamma-Gamma with
pointing error) hops, with physical-model samplers for Monte Carlo checks."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .special_functions import MeijerGSpec, delta_list, ln_gamma, meijer_g, pochhammer

# (m, b, Omega) for frequent heavy, average and infrequent light shadowing.
REGIMES: dict[str, tuple[int, float, float]] = {
    "FHS": (1, 0.063, 8.94e-4),
    "AS": (10, 0.126, 0.835),
    "ILS": (19, 0.158, 1.29),
}

CDF_NOISE = 1e-8


class ProbabilityAccuracyError(ArithmeticError):
    """A computed probability fell outside [0, 1] by more than the noise band."""


def clamp_probability(raw: float, what: str = "probability") -> float:
    if -CDF_NOISE <= raw <= 1.0 + CDF_NOISE:
        return min(1.0, max(0.0, raw))
    raise ProbabilityAccuracyError(f"{what} evaluated to {raw!r}, outside [0, 1]")


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


@dataclass(frozen=True)
class ShadowedRicianLink:
    """One RF hop. ``2*b`` is the multipath power, ``omega`` the LoS power and
    ``gamma_bar`` the SNR scale, so the mean SNR is ``gamma_bar*(2b + omega)``."""

    m: int
    b: float
    omega: float
    gamma_bar: float

    def __post_init__(self):
        if float(self.m) != int(self.m) or int(self.m) < 1:
            raise ValueError(f"shadowing parameter m must be an integer >= 1, got {self.m!r}")
        object.__setattr__(self, "m", int(self.m))
        if not self.b > 0:
            raise ValueError("b must be positive")
        if self.omega < 0:
            raise ValueError("omega must be non-negative")
        if not self.gamma_bar > 0:
            raise ValueError("gamma_bar must be positive")
        if not self.delta_z < self.beta_z:
            raise ValueError("delta_z must be below beta_z")

    @classmethod
    def from_regime(cls, name: str, gamma_bar: float) -> "ShadowedRicianLink":
        try:
            m, b, omega = REGIMES[name.upper()]
        except KeyError:
            raise ValueError(f"unknown shadowing regime {name!r}; expected one of {sorted(REGIMES)}") from None
        return cls(m, b, omega, gamma_bar)

    @property
    def alpha_z(self) -> float:
        two_b = 2.0 * self.b
        return (two_b * self.m / (two_b * self.m + self.omega)) ** self.m / two_b

    @property
    def beta_z(self) -> float:
        return 1.0 / (2.0 * self.b)

    @property
    def delta_z(self) -> float:
        two_b = 2.0 * self.b
        return self.omega / (two_b * (two_b * self.m + self.omega))

    @property
    def lambda_z(self) -> float:
        return (self.beta_z - self.delta_z) / self.gamma_bar

    @cached_property
    def pdf_coeffs(self) -> np.ndarray:
        """``e_k`` with ``pdf(g) = sum_k e_k g^k exp(-lambda_z g)``."""
        a, d, gb = self.alpha_z, self.delta_z, self.gamma_bar
        return np.array([
            a * pochhammer(1 - self.m, k) * (-d) ** k / (gb ** (k + 1) * math.factorial(k) ** 2)
            for k in range(self.m)
        ])

    @cached_property
    def ccdf_coeffs(self) -> np.ndarray:
        """``c_i`` with ``1 - cdf(g) = sum_i c_i g^i exp(-lambda_z g)``.

        Entry ``i`` collects every ``(k, i)`` term of the double sum, k >= i.
        """
        a, d, gb, lam = self.alpha_z, self.delta_z, self.gamma_bar, self.lambda_z
        out = np.zeros(self.m)
        for k in range(self.m):
            head = a * pochhammer(1 - self.m, k) * (-d) ** k / (gb ** (k + 1) * math.factorial(k))
            for i in range(k + 1):
                out[i] += head / (math.factorial(i) * lam ** (k - i + 1))
        return out


def _poly_exp(coeffs: np.ndarray, lam: float, gamma) -> np.ndarray:
    g = np.asarray(gamma, dtype=float)
    return np.polynomial.polynomial.polyval(g, coeffs) * np.exp(-lam * g)


def sr_pdf(gamma, link: ShadowedRicianLink):
    g = np.asarray(gamma, dtype=float)
    if np.any(g < 0):
        raise ValueError("SNR must be non-negative")
    with np.errstate(invalid="ignore"):
        out = np.where(np.isinf(g), 0.0, _poly_exp(link.pdf_coeffs, link.lambda_z, g))
    return float(out) if out.ndim == 0 else out


def sr_ccdf(gamma, link: ShadowedRicianLink):
    g = np.asarray(gamma, dtype=float)
    # the constant coefficient sums to 1 only up to rounding; pin the endpoint
    with np.errstate(invalid="ignore"):
        tail = _poly_exp(link.ccdf_coeffs, link.lambda_z, g)
    out = np.where(g == 0.0, 1.0, np.where(np.isinf(g), 0.0, tail))
    return float(out) if out.ndim == 0 else out


def sr_cdf(gamma, link: ShadowedRicianLink):
    g = np.asarray(gamma, dtype=float)
    if np.any(g < 0):
        raise ValueError("SNR must be non-negative")
    out = np.clip(1.0 - sr_ccdf(g, link), 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class FsoLink:
    """Gamma-Gamma turbulence with pointing error; ``r`` is 1 (heterodyne) or
    2 (IM/DD) and ``mu_r`` the average electrical SNR."""

    alpha: float
    beta: float
    xi: float
    r: int
    mu_r: float

    def __post_init__(self):
        if self.r not in (1, 2):
            raise ValueError(f"detection type r must be 1 or 2, got {self.r!r}")
        for name in ("alpha", "beta", "xi", "mu_r"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @property
    def h(self) -> float:
        xi2 = self.xi ** 2
        return xi2 / (xi2 + 1.0)

    @property
    def log_gamma_ab(self) -> float:
        return ln_gamma(self.alpha)[0] + ln_gamma(self.beta)[0]

    @property
    def B(self) -> float:
        r = self.r
        return math.exp(
            2.0 * math.log(self.xi)
            + (self.alpha + self.beta - 2.0) * math.log(r)
            - (r - 1) * math.log(2.0 * math.pi)
            - self.log_gamma_ab
        )

    @property
    def D(self) -> float:
        r = self.r
        return (self.h * self.alpha * self.beta) ** r / (self.mu_r * r ** (2 * r))

    @property
    def k1(self) -> list[float]:
        return delta_list(self.r, self.xi ** 2 + 1.0)

    @property
    def k2(self) -> list[float]:
        r = self.r
        return delta_list(r, self.xi ** 2) + delta_list(r, self.alpha) + delta_list(r, self.beta)

    def cdf_spec(self, z: float, extra_upper: tuple[float, ...] = ()) -> MeijerGSpec:
        """``G^{3r, 1+len(extra)}_{r+1+len(extra), 3r+1}(z | 1, extra, k1; k2, 0)``."""
        a = (1.0, *extra_upper, *self.k1)
        return MeijerGSpec(3 * self.r, 1 + len(extra_upper), a, (*self.k2, 0.0), z)


def _scalar_or_map(fn, gamma):
    g = np.asarray(gamma, dtype=float)
    if g.ndim == 0:
        return fn(float(g))
    return np.array([fn(float(v)) for v in g.ravel()]).reshape(g.shape)


def gg_pdf(gamma, link: FsoLink):
    def one(g: float) -> float:
        if not g > 0:
            raise ValueError("gg_pdf requires gamma > 0")
        xi2 = link.xi ** 2
        z = link.h * link.alpha * link.beta * (g / link.mu_r) ** (1.0 / link.r)
        G = meijer_g(MeijerGSpec(3, 0, (xi2 + 1.0,), (xi2, link.alpha, link.beta), z))
        return xi2 / (link.r * g) * math.exp(-link.log_gamma_ab) * G

    return _scalar_or_map(one, gamma)


def gg_cdf(gamma, link: FsoLink):
    def one(g: float) -> float:
        if g < 0:
            raise ValueError("SNR must be non-negative")
        if g == 0.0:
            return 0.0
        if math.isinf(g):
            return 1.0
        raw = link.B * meijer_g(link.cdf_spec(link.D * g))
        return clamp_probability(raw, "Gamma-Gamma CDF")

    return _scalar_or_map(one, gamma)


def sample_sr(link: ShadowedRicianLink, seed, n: int) -> np.ndarray:
    """Draw ``n`` SNRs from the physical shadowed-Rician model.

    Draw order: LoS power ``A^2 ~ Gamma(m, Omega/m)``, LoS phase, then the real
    and imaginary scatter components (variance ``b`` each).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = _rng(seed)
    los_power = rng.gamma(link.m, link.omega / link.m, size=n) if link.omega > 0 else np.zeros(n)
    phase = rng.uniform(0.0, 2.0 * np.pi, size=n)
    scale = math.sqrt(link.b)
    re = np.sqrt(los_power) * np.cos(phase) + scale * rng.standard_normal(n)
    im = np.sqrt(los_power) * np.sin(phase) + scale * rng.standard_normal(n)
    return link.gamma_bar * (re * re + im * im)


def sample_gg(link: FsoLink, seed, n: int) -> np.ndarray:
    """Draw ``n`` SNRs: ``mu_r * (X*Y*U / h)^r`` with unit-mean Gamma factors
    ``X``, ``Y`` and pointing loss ``U`` of density ``xi^2 u^(xi^2 - 1)`` on (0, 1].
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = _rng(seed)
    x = rng.gamma(link.alpha, 1.0 / link.alpha, size=n)
    y = rng.gamma(link.beta, 1.0 / link.beta, size=n)
    # 1 - uniform lies in (0, 1], so the power transform never returns 0.
    u = (1.0 - rng.random(n)) ** (1.0 / link.xi ** 2)
    irradiance = x * y * u
    return link.mu_r * (irradiance / link.h) ** link.r
