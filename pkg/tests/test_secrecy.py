import itertools

import numpy as np
import pytest

from haps_secrecy.channels import FsoLink, ShadowedRicianLink, gg_cdf, sr_cdf
from haps_secrecy.secrecy import (
    SecrecySystem,
    e2e_cdf,
    ppsc_closed,
    ppsc_quadrature,
    sop_closed,
    sop_quadrature,
)
from haps_secrecy.special_functions import MeijerGSpec, g11_reduced, meijer_g
from haps_secrecy.verification import reference_system


def test_gamma_th():
    sys = reference_system(10, 4)
    assert sys.gamma_th == pytest.approx(2 ** 0.02)
    assert sys.with_rs(0.0).gamma_th == 1.0
    with pytest.raises(ValueError):
        sys.with_rs(-0.1)


def test_e2e_cdf_endpoints_and_bound():
    sys = reference_system(10, 4)
    assert e2e_cdf(0.0, sys) == 0.0
    assert e2e_cdf(np.inf, sys) == 1.0
    for g in (0.1, 1.0, 10.0, 50.0):
        e2e = e2e_cdf(g, sys)
        assert e2e >= max(gg_cdf(g, sys.fso), sr_cdf(g, sys.main_rf)) - 1e-15


@pytest.mark.parametrize("n", [0, 1, 5, 20])
@pytest.mark.parametrize("z", [0.01, 1.0, 40.0])
def test_g11_reduction_matches_general_evaluator(n, z):
    assert g11_reduced(-n, z) == pytest.approx(meijer_g(MeijerGSpec(1, 1, (-float(n),), (0.0,), z)), rel=1e-9)


@pytest.mark.parametrize("gamma_db, eve_db", [(5, 4), (10, 12), (15, 4), (25, 8)])
def test_closed_matches_quadrature(gamma_db, eve_db):
    sys = reference_system(gamma_db, eve_db)
    closed = sop_closed(sys)
    assert abs(closed - sop_quadrature(sys)) <= 1e-6 * closed


@pytest.mark.parametrize("main, eve, xi, r", [("AS", "ILS", 1.1, 1), ("ILS", "AS", 0.8, 2), ("FHS", "AS", 6.7, 2)])
def test_closed_matches_quadrature_other_links(main, eve, xi, r):
    sys = reference_system(12, 6, main=main, eve=eve, xi=xi, r=r)
    closed = sop_closed(sys)
    assert abs(closed - sop_quadrature(sys)) <= 1e-6 * closed
    ppsc = ppsc_closed(sys)
    assert abs(ppsc - ppsc_quadrature(sys)) <= 1e-6


def test_exact_at_least_approximate():
    for gamma_db, eve_db in itertools.product((0, 10, 20), (0, 8)):
        sys = reference_system(gamma_db, eve_db, rs=0.5)
        assert sop_quadrature(sys, exact=True) >= sop_quadrature(sys) - 1e-8


def test_exact_and_approximate_coincide_at_zero_rate():
    sys = reference_system(10, 4, rs=0.0)
    assert sop_quadrature(sys, exact=True) == sop_quadrature(sys)


def test_complementarity():
    sys = reference_system(18, 8)
    assert ppsc_closed(sys) + sop_closed(sys.with_rs(0.0)) == pytest.approx(1.0, abs=1e-9)


def test_sop_monotone_grid():
    grid = np.arange(0.0, 31.0, 10.0 / 3.0)
    table = np.array([[sop_closed(reference_system(g, e)) for e in grid[:10]] for g in grid[:10]])
    # non-increasing along main gamma_bar, non-decreasing along eavesdropper gamma_bar
    assert np.all(np.diff(table, axis=0) <= 1e-12)
    assert np.all(np.diff(table, axis=1) >= -1e-12)


def test_sop_monotone_in_rate():
    values = [sop_closed(reference_system(15, 4, rs=rs)) for rs in (0.0, 0.01, 0.1, 0.5, 1.0, 2.0)]
    assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))


def test_sop_vanishes_with_weak_eavesdropper():
    values = [sop_closed(reference_system(20, e)) for e in (10, 0, -10, -20, -30)]
    assert all(b < a for a, b in zip(values, values[1:]))
    assert values[-1] < 1e-2


def test_ppsc_weak_eavesdropper():
    assert ppsc_closed(reference_system(20, -40)) == pytest.approx(1.0, abs=1e-6)
    assert ppsc_quadrature(reference_system(20, -40)) == pytest.approx(1.0, abs=1e-6)


def test_ppsc_symmetric_links():
    rf = ShadowedRicianLink.from_regime("AS", 10.0)
    sys = SecrecySystem(FsoLink(8.9033, 7.3955, 6.7, 1, 1e7), rf, rf)
    assert ppsc_quadrature(sys) == pytest.approx(0.5, abs=2e-3)
    assert ppsc_closed(sys) == pytest.approx(0.5, abs=2e-3)


def test_probabilities_in_range():
    for gamma_db, eve_db in itertools.product((-10, 0, 15, 30), (-10, 5, 20)):
        sys = reference_system(gamma_db, eve_db)
        assert 0.0 <= sop_closed(sys) <= 1.0
        assert 0.0 <= ppsc_closed(sys) <= 1.0


def test_d_scale_hook_changes_result():
    sys = reference_system(10, 4)
    base = sop_closed(sys)
    assert abs(sop_closed(sys, d_scale=1.01) - base) > 1e-6 * base
