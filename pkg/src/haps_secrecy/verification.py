"""Acceptance checks shared by ``haps-secrecy verify`` and the test suite.

Each check returns a ``CriterionResult``; a wall-clock limit, where one
applies, is part of the pass condition.
"""
from __future__ import annotations

import math
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np
from scipy import integrate, stats

from .channels import REGIMES, FsoLink, ShadowedRicianLink, gg_cdf, gg_pdf, sample_gg, sample_sr, sr_cdf, sr_pdf
from .monte_carlo import MCConfig, ppsc_mc, sop_mc
from .secrecy import SecrecySystem, ppsc_closed, sop_closed, sop_quadrature
from .special_functions import MeijerGSpec, meijer_g
from .turbulence import GeometryConfig, rytov_from_alpha, turbulence_params

REFERENCE_ALPHA = 8.9033
REFERENCE_BETA = 7.3955
FIG_SEED = 20240601
FULL_MC_SAMPLES = 10_000_000


def db(x: float) -> float:
    return 10.0 ** (x / 10.0)


def reference_system(gamma_db: float, eve_db: float, *, main="FHS", eve="FHS", xi=6.7, rs=0.01, r=1):
    g = db(gamma_db)
    return SecrecySystem(
        FsoLink(REFERENCE_ALPHA, REFERENCE_BETA, xi, r, g),
        ShadowedRicianLink.from_regime(main, g),
        ShadowedRicianLink.from_regime(eve, db(eve_db)),
        rs,
    )


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number:>2}. {self.name} ({self.seconds:.1f}s): {self.detail}"


def ks_distance(samples: np.ndarray, cdf: Callable) -> float:
    return float(stats.kstest(samples, cdf).statistic)


def ks_distance_bound(samples: np.ndarray, cdf: Callable[[float], float], stride: int = 25) -> float:
    """Upper bound on the KS statistic from the CDF at every ``stride``-th order
    statistic; monotonicity of both CDFs bounds the gap between grid points."""
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    idx = np.unique(np.concatenate([np.arange(0, n, stride), [n - 1]]))
    f = np.array([cdf(float(v)) for v in x[idx]])
    bound = max(f[0], 1.0 - f[-1])
    # on [x_(i), x_(j)): empirical CDF in [(i+1)/n, j/n], model CDF in [f_i, f_j]
    emp_lo = (idx[:-1] + 1) / n
    emp_hi = idx[1:] / n
    gaps = np.maximum(emp_hi - f[:-1], f[1:] - emp_lo)
    bound = max(bound, float(np.max(gaps)))
    # the order statistics themselves
    at = np.maximum(np.abs((idx + 1) / n - f), np.abs(idx / n - f))
    return max(bound, float(np.max(at)))


# ---------------------------------------------------------------------------
# criteria
# ---------------------------------------------------------------------------

def c1_reference_turbulence() -> CriterionResult:
    t0 = time.perf_counter()
    tp = turbulence_params(GeometryConfig())
    dt = time.perf_counter() - t0
    ea = abs(tp.alpha / REFERENCE_ALPHA - 1.0)
    eb = abs(tp.beta / REFERENCE_BETA - 1.0)
    implied = rytov_from_alpha(REFERENCE_ALPHA)
    ok = ea <= 5e-3 and eb <= 5e-3 and dt < 1.0
    detail = (
        f"sigma_R2={tp.rytov_var:.6g} -> alpha={tp.alpha:.6g} (rel err {ea:.3g}), "
        f"beta={tp.beta:.6g} (rel err {eb:.3g}); tabulated values imply sigma_R2={implied:.6g}"
    )
    return CriterionResult(1, "Reference turbulence severities", ok, detail, dt)


def c2_exponential_identity() -> CriterionResult:
    t0 = time.perf_counter()
    worst = 0.0
    for x in (1e-3, 0.1, 1.0, 5.0, 20.0):
        g = meijer_g(MeijerGSpec(1, 0, (), (0.0,), x))
        worst = max(worst, abs(g - math.exp(-x)) / math.exp(-x))
    dt = time.perf_counter() - t0
    return CriterionResult(
        2, "Meijer-G exponential identity", worst <= 1e-10 and dt < 1.0, f"max rel err {worst:.3g}", dt
    )


def c3_closed_vs_quadrature(d_scale: float = 1.0) -> CriterionResult:
    t0 = time.perf_counter()
    worst = 0.0
    for g in (5.0, 10.0, 15.0):
        for e in (4.0, 12.0):
            sys = reference_system(g, e)
            quad = sop_quadrature(sys, exact=False)
            worst = max(worst, abs(sop_closed(sys, d_scale=d_scale) - quad) / quad)
    dt = time.perf_counter() - t0
    return CriterionResult(
        3, "Closed-form/quadrature SOP", worst <= 1e-6 and dt < 60.0, f"max rel diff {worst:.3g}", dt
    )


FIG2_GRID = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)


def c4_sop_monte_carlo(samples: int = FULL_MC_SAMPLES) -> CriterionResult:
    t0 = time.perf_counter()
    cfg = MCConfig(samples, FIG_SEED, 1_000_000, "approximate")
    worst = 0.0
    checked = 0
    gap = 0.0
    for e in (4.0, 8.0, 12.0):
        for g in FIG2_GRID:
            sys = reference_system(g, e)
            closed = sop_closed(sys)
            if closed < 1e-4:
                continue
            est = sop_mc(sys, cfg)
            worst = max(worst, abs(closed - est.value) / est.std_error)
            checked += 1
            if g in (0.0, 30.0):
                gap = max(gap, sop_quadrature(sys, exact=True) - closed)
    dt = time.perf_counter() - t0
    detail = (
        f"{checked} points, max |closed-mc|/se = {worst:.3g} at n={samples}; "
        f"exact-minus-approximate SOP gap up to {gap:.3g}"
    )
    return CriterionResult(4, "Closed-form/Monte Carlo SOP (fig2)", worst <= 3.0 and dt < 300.0, detail, dt)


def c5_ppsc_monte_carlo(samples: int = FULL_MC_SAMPLES) -> CriterionResult:
    t0 = time.perf_counter()
    cfg = MCConfig(samples, FIG_SEED, 1_000_000, "approximate")
    worst = 0.0
    checked = 0
    for e in (0.0, 4.0):
        for g in FIG2_GRID:
            sys = reference_system(g, e)
            est = ppsc_mc(sys, cfg)
            worst = max(worst, abs(ppsc_closed(sys) - est.value) / est.std_error)
            checked += 1
    dt = time.perf_counter() - t0
    detail = f"{checked} points, max |closed-mc|/se = {worst:.3g} at n={samples}"
    return CriterionResult(5, "Closed-form/Monte Carlo PPSC (fig5)", worst <= 3.0 and dt < 300.0, detail, dt)


def random_systems(count: int = 20, seed: int = 7) -> list[SecrecySystem]:
    """Random valid systems over regimes, SNRs, pointing error and detection type."""
    rng = np.random.default_rng(seed)
    names = sorted(REGIMES)
    out = []
    for _ in range(count):
        g = db(rng.uniform(0.0, 30.0))
        r = int(rng.integers(1, 3))
        fso = FsoLink(
            rng.uniform(2.0, 12.0), rng.uniform(1.5, 10.0), rng.uniform(0.8, 7.0), r, db(rng.uniform(0.0, 30.0))
        )
        main = ShadowedRicianLink.from_regime(names[rng.integers(3)], g)
        eve = ShadowedRicianLink.from_regime(names[rng.integers(3)], db(rng.uniform(-5.0, 15.0)))
        out.append(SecrecySystem(fso, main, eve, rng.uniform(0.0, 0.5)))
    return out


def c6_complementarity() -> CriterionResult:
    t0 = time.perf_counter()
    worst = 0.0
    for sys in random_systems():
        worst = max(worst, abs(ppsc_closed(sys) + sop_closed(sys.with_rs(0.0)) - 1.0))
    dt = time.perf_counter() - t0
    return CriterionResult(6, "PPSC/SOP complementarity", worst <= 1e-9, f"max |sum-1| = {worst:.3g}", dt)


def c7_figure_ordering() -> CriterionResult:
    t0 = time.perf_counter()
    grid = np.arange(0.0, 31.0, 2.0)
    problems = []
    # (a) non-decreasing in the eavesdropper SNR
    for g in grid:
        vals = [sop_closed(reference_system(g, e)) for e in np.arange(0.0, 21.0, 2.0)]
        if any(b < a - 1e-12 for a, b in zip(vals, vals[1:])):
            problems.append(f"(a) fails at gamma_bar={g} dB")
    # (b) shadowing ordering with eve under FHS
    for g in grid:
        ils, as_, fhs = (sop_closed(reference_system(g, 4.0, main=m)) for m in ("ILS", "AS", "FHS"))
        if not (ils <= as_ <= fhs):
            problems.append(f"(b) fails at gamma_bar={g} dB")
    # (c) pointing-error crossover at 30 dB
    gaps = {
        xi: sop_closed(reference_system(30.0, 12.0, xi=xi)) - sop_closed(reference_system(30.0, 12.0, main="AS", xi=xi))
        for xi in (0.8, 1.1)
    }
    if not gaps[0.8] < gaps[1.1]:
        problems.append(f"(c) gap(0.8)={gaps[0.8]:.6g} >= gap(1.1)={gaps[1.1]:.6g}")
    dt = time.perf_counter() - t0
    detail = "; ".join(problems) if problems else (
        f"(a),(b) hold on {grid.size}-point grid; (c) gap 0.8: {gaps[0.8]:.5g} < 1.1: {gaps[1.1]:.5g}"
    )
    return CriterionResult(7, "Figure-ordering properties", not problems, detail, dt)


def c8_sampler_fidelity(n: int = 100_000) -> CriterionResult:
    t0 = time.perf_counter()
    parts = []
    ok = True
    for i, name in enumerate(sorted(REGIMES)):
        link = ShadowedRicianLink.from_regime(name, 2.0)
        d = ks_distance(sample_sr(link, 1000 + i, n), lambda x, link=link: sr_cdf(x, link))
        ok &= d <= 0.005
        parts.append(f"SR {name} {d:.4f}")
    for j, xi in enumerate((0.8, 6.7)):
        link = FsoLink(REFERENCE_ALPHA, REFERENCE_BETA, xi, 1, 10.0)
        d = ks_distance_bound(sample_gg(link, 2000 + j, n), lambda x, link=link: gg_cdf(x, link))
        ok &= d <= 0.01
        parts.append(f"GG xi={xi} <= {d:.4f}")
    dt = time.perf_counter() - t0
    return CriterionResult(8, "Sampler fidelity (KS)", bool(ok), ", ".join(parts), dt)


def c9_normalization() -> CriterionResult:
    t0 = time.perf_counter()
    parts = []
    ok = True
    for name in sorted(REGIMES):
        link = ShadowedRicianLink.from_regime(name, 2.0)
        mass = integrate.quad(lambda g: sr_pdf(g, link), 0.0, np.inf, epsabs=1e-13, epsrel=1e-13, limit=200)[0]
        ok &= abs(mass - 1.0) <= 1e-9
        parts.append(f"SR {name} {abs(mass - 1):.2g}")
    for xi in (0.8, 6.7):
        link = FsoLink(REFERENCE_ALPHA, REFERENCE_BETA, xi, 1, 10.0)
        mass = gg_normalization(link)
        ok &= abs(mass - 1.0) <= 1e-6
        parts.append(f"GG xi={xi} {abs(mass - 1):.2g}")
    dt = time.perf_counter() - t0
    return CriterionResult(9, "PDF normalization", bool(ok), ", ".join(parts), dt)


def gg_normalization(link: FsoLink) -> float:
    """Integral of the Gamma-Gamma SNR density over (0, inf), in log-SNR."""
    f = lambda u: gg_pdf(math.exp(u), link) * math.exp(u)
    centre = math.log(link.mu_r)
    total = 0.0
    edges = [centre - 60 * link.r, centre - 10 * link.r, centre - 2, centre + 2, centre + 6 * link.r, centre + 40 * link.r]
    for lo, hi in zip(edges[:-1], edges[1:]):
        total += integrate.quad(f, lo, hi, epsabs=1e-12, epsrel=1e-11, limit=200)[0]
    return total


def c10_determinism() -> CriterionResult:
    from .cli import main

    t0 = time.perf_counter()
    outputs = []
    with tempfile.TemporaryDirectory() as tmp:
        for run in ("a", "b"):
            out = Path(tmp) / run / "det.csv"
            out.parent.mkdir()
            code = main([
                "sweep", "--preset", "fig2", "--samples", "20000", "--seed", "99",
                "--set", "sweep.gamma_bar_db=[0.0, 10.0, 20.0]",
                "--set", 'sweep.methods=["closed", "quadrature", "mc"]',
                "--output", str(out),
            ])
            if code != 0:
                return CriterionResult(10, "Sweep determinism", False, f"sweep exited {code}", 0.0)
            outputs.append(sorted((p.name, p.read_bytes()) for p in out.parent.glob("det*.csv")))
    dt = time.perf_counter() - t0
    same = outputs[0] == outputs[1] and len(outputs[0]) == 3
    return CriterionResult(
        10, "Sweep determinism", same, f"{len(outputs[0])} CSV files byte-identical: {same}", dt
    )


CRITERIA = {
    1: c1_reference_turbulence,
    2: c2_exponential_identity,
    3: c3_closed_vs_quadrature,
    4: c4_sop_monte_carlo,
    5: c5_ppsc_monte_carlo,
    6: c6_complementarity,
    7: c7_figure_ordering,
    8: c8_sampler_fidelity,
    9: c9_normalization,
    10: c10_determinism,
}


def run_criteria(
    only: list[int] | None = None, *, mc_samples: int = FULL_MC_SAMPLES, d_scale: float = 1.0
) -> list[CriterionResult]:
    results = []
    for number, fn in CRITERIA.items():
        if only and number not in only:
            continue
        if number == 3:
            results.append(fn(d_scale=d_scale))
        elif number in (4, 5):
            results.append(fn(samples=mc_samples))
        else:
            results.append(fn())
    return results
