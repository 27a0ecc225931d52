"""Diagnostics-layer tests: diff sweeps, error maps, rate fits, determinism."""

import numpy as np
import pytest

from beamhom import (
    PAIR_CONTINUUM,
    PAIR_KM,
    SweepConfig,
    convergence_study,
    diff_index,
    err_maps,
    fit_loglog,
    max_diff_sweep,
    theory_suite,
)
from beamhom.experiments import _fmt, inv3_adjugate, make_loads
from beamhom.symbols import TRIANGULAR


def test_diff_index_identical_symbols_is_zero():
    # at a fixed mode the discrete symbol approaches the continuum one
    vals = [diff_index((1, 0), 1.0 / n, 1.0) for n in (8, 32, 128)]
    assert vals[0] > vals[1] > vals[2]
    assert vals[2] < 1e-4


def test_diff_index_rejects_zero_mode():
    with pytest.raises(ValueError, match="zero mode"):
        diff_index((0, 0), 1.0 / 8, 1.0)


def test_diff_index_two_inverse_routines_agree():
    rng = np.random.default_rng(3)
    for pair in (PAIR_CONTINUUM, PAIR_KM):
        for _ in range(10):
            n = int(rng.choice([8, 16, 32]))
            ip = int(rng.integers(-n // 2, n // 2))
            jp = int(rng.integers(-n // 2, n // 2))
            if (ip, jp) == (0, 0):
                continue
            a = diff_index((ip, jp), 1.0 / n, 1.0, pair, routine="lu")
            b = diff_index((ip, jp), 1.0 / n, 1.0, pair, routine="adjugate")
            assert a == pytest.approx(b, rel=1e-10)


def test_inv3_adjugate_matches_lu():
    rng = np.random.default_rng(4)
    m = rng.standard_normal((6, 3, 3)) + 1j * rng.standard_normal((6, 3, 3))
    m = m + np.swapaxes(m.conj(), -1, -2) + 6 * np.eye(3)
    assert np.abs(inv3_adjugate(m) - np.linalg.inv(m)).max() < 1e-12


def test_sweep_full_range_equals_lowfreq_when_cutoff_covers_grid():
    cfg = SweepConfig(n_list=(8,), rho_star_list=(1.0,), low_freq_cutoff=8,
                      model_pair=PAIR_CONTINUUM)
    report = max_diff_sweep(cfg)
    row = report.rows[0]
    assert row.max_full == row.max_lowfreq


def test_sweep_row_layout_and_series():
    cfg = SweepConfig(n_list=(4, 8), rho_star_list=(0.01, 1.0), low_freq_cutoff=10)
    report = max_diff_sweep(cfg)
    assert len(report.rows) == 4
    eps, vals = report.series(1.0)
    assert eps.tolist() == [0.25, 0.125]
    assert (vals > 0).all()


def test_sweep_config_validation():
    with pytest.raises(ValueError, match="nonempty"):
        SweepConfig(n_list=())
    with pytest.raises(ValueError, match="sorted"):
        SweepConfig(n_list=(8, 4))
    with pytest.raises(ValueError, match="cutoff"):
        SweepConfig(n_list=(4,), low_freq_cutoff=0)
    with pytest.raises(ValueError, match="pair"):
        SweepConfig(n_list=(4,), model_pair="d-vs-d")


def test_err_maps_zero_mode_fill_and_shapes():
    report = err_maps([17], [1.0])
    maps = report.maps[(17, 1.0)]
    for name in ("err0", "err1", "err2"):
        arr = maps[name]
        assert arr.shape == (17, 17)
        fill = 0.25 * (arr[0, 1] + arr[1, 0] + arr[0, -1] + arr[-1, 0])
        assert arr[0, 0] == pytest.approx(fill)
        assert np.isfinite(arr).all() and (arr >= 0).all()
    lo, hi = report.summaries[(17, 1.0)]["err0"]
    assert 0 < lo < hi


def test_err_maps_negation_symmetry():
    # all three indexes are invariant under (i', j') -> (-i', -j')
    report = err_maps([9], [0.7])
    for name in ("err0", "err1", "err2"):
        arr = report.maps[(9, 0.7)][name]
        flipped = arr[::-1, ::-1]
        flipped = np.roll(np.roll(flipped, 1, axis=0), 1, axis=1)  # re-center FFT layout
        assert np.abs(arr - flipped).max() <= 1e-10 * arr.max()


def test_fit_loglog_recovers_exact_power():
    eps = np.array([1 / 8, 1 / 16, 1 / 32, 1 / 64])
    slope, resid = fit_loglog(eps, 3.0 * eps**2)
    assert slope == pytest.approx(2.0)
    assert resid < 1e-12
    with pytest.raises(ValueError, match=">= 4"):
        fit_loglog(eps[:3], eps[:3])
    with pytest.raises(ValueError, match="positive"):
        fit_loglog(eps, np.array([1.0, 0.0, 1.0, 1.0]))


def test_convergence_zero_loads_reports_exact():
    report = convergence_study(lambda n: make_loads("single-mode-force", n).__class__.zero(n),
                               n_list=(8, 16, 32, 64))
    assert report.exact and report.slopes == {}


def test_convergence_single_mode_force_slope_two():
    report = convergence_study("single-mode-force", n_list=(8, 16, 32, 64))
    slope, resid = report.slopes["u_l2"]
    assert 1.9 <= slope <= 2.1
    assert resid < 0.05


def test_convergence_hk_variant_slope_two():
    # H^1 error of u under a fixed smooth load also follows eps^2
    report = convergence_study("generic-smooth", n_list=(8, 16, 32, 64))
    slope, resid = report.slopes["u_h1"]
    assert 1.85 <= slope <= 2.1
    assert resid < 0.05


def test_load_family_norms_are_eps_independent():
    from beamhom.fourier import GridFunction, hs_seminorm, l2_norm

    vals = {}
    for n in (16, 32):
        loads = make_loads("generic-smooth", n)
        f = GridFunction(loads.f_hat, "frequency")
        t = GridFunction(loads.tau_hat, "frequency")
        vals[n] = (l2_norm(f), hs_seminorm(f, 1.0), hs_seminorm(t, 2.0))
    assert vals[16] == pytest.approx(vals[32], rel=1e-12)
    # the top-mode family keeps ||f||_0 = 1 while exciting frequency n/4
    for n in (16, 32):
        loads = make_loads("force-top-mode", n)
        assert l2_norm(GridFunction(loads.f_hat, "frequency")) == pytest.approx(1.0)
        assert np.abs(loads.f_hat[n // 4, 0]).max() > 0


def test_make_loads_unknown_family():
    with pytest.raises(ValueError, match="unknown load family"):
        make_loads("bending-wave", 8)


def test_theory_suite_passes_and_strict_mode():
    report = theory_suite(strict=False)
    assert report.all_passed
    names = [c.name for c in report.checks]
    assert names == [
        "decoupling-identity",
        "schur-coercivity",
        "sincos-defect-bound",
        "rotation-transfer-bound",
        "inverse-difference-band",
    ]
    lines = list(report.lines())
    assert all(line.startswith("PASS") for line in lines)


def test_csv_rows_deterministic():
    cfg = SweepConfig(n_list=(4, 8), rho_star_list=(1.0,))
    a = list(max_diff_sweep(cfg).csv_rows())
    b = list(max_diff_sweep(cfg).csv_rows())
    assert a == b


def test_fmt_is_round_trippable():
    for x in (0.1, 1.0 / 3.0, 1e-17, 123456.789):
        assert float(_fmt(x)) == x


def test_threaded_sweep_matches_serial(monkeypatch):
    cfg = SweepConfig(n_list=(4, 8, 16), rho_star_list=(0.01, 1.0))
    serial = max_diff_sweep(cfg)
    monkeypatch.setenv("BEAMHOM_THREADS", "4")
    threaded = max_diff_sweep(cfg)
    assert serial.rows == threaded.rows
