import pytest

from haps_secrecy.monte_carlo import MCConfig, MCEstimate, ppsc_mc, secrecy_mc, sop_mc
from haps_secrecy.secrecy import ppsc_closed, sop_closed
from haps_secrecy.verification import reference_system

SMALL = MCConfig(n_samples=200_000, seed=42, batch_size=50_000)


def test_reproducible():
    sys = reference_system(10, 4)
    assert sop_mc(sys, SMALL) == sop_mc(sys, SMALL)
    assert ppsc_mc(sys, SMALL) == ppsc_mc(sys, SMALL)


def test_seed_matters():
    sys = reference_system(10, 4)
    other = MCConfig(n_samples=200_000, seed=43, batch_size=50_000)
    assert sop_mc(sys, SMALL).value != sop_mc(sys, other).value


def test_workers_do_not_change_result():
    sys = reference_system(10, 4)
    assert sop_mc(sys, SMALL, workers=1) == sop_mc(sys, SMALL, workers=4)


def test_shared_stream_matches_separate_runs():
    sys = reference_system(10, 4)
    sop, ppsc = secrecy_mc(sys, SMALL)
    assert sop == sop_mc(sys, SMALL)
    assert ppsc == ppsc_mc(sys, SMALL)


def test_exact_zero_rate_complements_ppsc():
    sys = reference_system(10, 4, rs=0.0)
    cfg = MCConfig(n_samples=200_000, seed=42, batch_size=50_000, definition="exact")
    sop, ppsc = secrecy_mc(sys, cfg)
    assert sop.value + ppsc.value == 1.0


def test_weak_eavesdropper():
    est = sop_mc(reference_system(20, -60), SMALL)
    assert est.value <= 3 * max(est.std_error, 1.0 / SMALL.n_samples)


def test_unreachable_threshold():
    assert sop_mc(reference_system(20, 4, rs=50.0), SMALL).value == 1.0


def test_symmetric_ppsc():
    sys = reference_system(60, 10, main="AS", eve="AS")
    rf = sys.eve_rf
    sys = type(sys)(sys.fso, rf, rf, sys.rs)
    est = ppsc_mc(sys, SMALL)
    assert abs(est.value - 0.5) <= 3 * est.std_error


def test_standard_error():
    est = MCEstimate.from_count(250, 1000, 0)
    assert est.std_error == pytest.approx((0.25 * 0.75 / 1000) ** 0.5)


@pytest.mark.parametrize("gamma_db, eve_db", [(5, 4), (15, 12)])
def test_matches_closed_form(gamma_db, eve_db):
    sys = reference_system(gamma_db, eve_db)
    cfg = MCConfig(n_samples=1_000_000, seed=7)
    sop, ppsc = secrecy_mc(sys, cfg)
    assert abs(sop.value - sop_closed(sys)) <= 3 * sop.std_error
    assert abs(ppsc.value - ppsc_closed(sys)) <= 3 * ppsc.std_error


def test_coverage_calibration():
    sys = reference_system(10, 4)
    truth = sop_closed(sys)
    hits = 0
    for seed in range(100):
        est = sop_mc(sys, MCConfig(n_samples=100_000, seed=seed))
        hits += abs(est.value - truth) <= 1.96 * est.std_error
    assert hits >= 90


@pytest.mark.parametrize(
    "kwargs",
    [dict(n_samples=9_999), dict(batch_size=0), dict(definition="loose"), dict(seed=-1), dict(seed=2 ** 64)],
)
def test_invalid_config(kwargs):
    with pytest.raises(ValueError):
        MCConfig(**kwargs)


def test_batch_sizes():
    assert MCConfig(n_samples=25_000, batch_size=10_000).batch_sizes == [10_000, 10_000, 5_000]
