"""Transform-convention tests: weights, round trips, Parseval, seminorms."""

import numpy as np
import pytest

from beamhom import (
    FREQUENCY,
    SPATIAL,
    GridFunction,
    dft,
    dft_direct,
    freq_values,
    hs_seminorm,
    idft,
    idft_direct,
    in_freq_set,
    l2_norm,
    parseval_gap,
)
from beamhom.fourier import as_real


def spatial(values):
    return GridFunction(values, SPATIAL)


def freq(values):
    return GridFunction(values, FREQUENCY)


def test_freq_values_even_and_odd():
    assert freq_values(4).tolist() == [0, 1, -2, -1]
    assert freq_values(5).tolist() == [0, 1, 2, -2, -1]
    assert in_freq_set(4, -2, 1) and not in_freq_set(4, 2, 0)
    assert in_freq_set(5, -2, 2) and not in_freq_set(5, 3, 0)


def test_constant_field_is_pure_zero_mode():
    f = spatial(np.full((6, 6), 2.5 + 0.0j))
    fh = dft(f).values
    assert fh[0, 0] == pytest.approx(2.5)
    fh = fh.copy()
    fh[0, 0] = 0.0
    assert np.abs(fh).max() < 1e-15


def test_single_exponential_hits_single_mode():
    n = 8
    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    f = spatial(np.exp(2j * np.pi * (i * 1 + j * 0) / n))
    fh = dft(f).values
    assert fh[1, 0] == pytest.approx(1.0, abs=1e-14)
    total = np.abs(fh).sum()
    assert total == pytest.approx(1.0, abs=1e-13)


def test_forward_weight_is_one_over_n_squared():
    # a spike at the origin spreads to 1/N^2 on every mode
    n = 4
    vals = np.zeros((n, n), dtype=complex)
    vals[0, 0] = 1.0
    fh = dft(spatial(vals)).values
    assert np.allclose(fh, 1.0 / n**2)


def test_inverse_weight_is_one():
    n = 4
    vals = np.zeros((n, n), dtype=complex)
    vals[0, 0] = 1.0  # zero mode only
    f = idft(freq(vals)).values
    assert np.allclose(f, 1.0)


def test_zero_coefficients_give_zero_field():
    f = idft(freq(np.zeros((5, 5), dtype=complex)))
    assert np.abs(f.values).max() == 0.0


@pytest.mark.parametrize("n", [3, 4, 5, 8, 16])
def test_round_trips(n):
    rng = np.random.default_rng(n)
    f = spatial(rng.standard_normal((n, n, 2)))
    back = idft(dft(f)).values
    assert np.abs(back - f.values).max() < 1e-13 * max(1.0, np.abs(f.values).max())
    gh = freq(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    back = dft(idft(gh)).values
    assert np.abs(back - gh.values).max() < 1e-13 * np.abs(gh.values).max()


@pytest.mark.parametrize("n", [3, 4, 8, 16])
def test_fft_path_matches_direct_summation_oracle(n):
    rng = np.random.default_rng(100 + n)
    f = spatial(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    a = dft(f).values
    b = dft_direct(f).values
    assert np.abs(a - b).max() < 1e-13 * np.abs(a).max()
    gh = freq(rng.standard_normal((n, n, 3)) + 1j * rng.standard_normal((n, n, 3)))
    a = idft(gh).values
    b = idft_direct(gh).values
    assert np.abs(a - b).max() < 1e-13 * np.abs(a).max()


def test_direct_oracle_size_cap():
    f = spatial(np.zeros((64, 64)))
    with pytest.raises(ValueError, match="capped"):
        dft_direct(f)


def test_parseval_trivial_cases():
    ones = spatial(np.ones((4, 4)))
    assert parseval_gap(ones, ones) < 1e-15
    # single mode of amplitude a: both sides |a|^2
    n = 8
    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    a = 2.0 - 1.5j
    f = spatial(a * np.exp(2j * np.pi * (2 * i + 3 * j) / n))
    assert parseval_gap(f, f) < 1e-12 * abs(a) ** 2


def test_parseval_random_pairs():
    rng = np.random.default_rng(42)
    for _ in range(100):
        n = int(rng.integers(3, 9))
        f = spatial(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
        g = spatial(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
        scale = np.linalg.norm(f.values) * np.linalg.norm(g.values)
        assert parseval_gap(f, g) <= 1e-12 * max(scale, 1.0)


def test_parseval_size_mismatch():
    with pytest.raises(ValueError, match="mismatch"):
        parseval_gap(spatial(np.ones((4, 4))), spatial(np.ones((5, 5))))


def test_shift_diagonalization():
    # shifting by one node multiplies mode (i', j') by exp(2*pi*1j*i'/N)
    n = 8
    rng = np.random.default_rng(1)
    f = rng.standard_normal((n, n))
    fh = dft(spatial(f)).values
    ip, jp = np.meshgrid(freq_values(n), freq_values(n), indexing="ij")
    for axis, phase_idx in ((0, ip), (1, jp), (None, ip + jp)):
        if axis is None:
            shifted = np.roll(np.roll(f, -1, axis=0), -1, axis=1)
        else:
            shifted = np.roll(f, -1, axis=axis)
        sh = dft(spatial(shifted)).values
        expected = np.exp(2j * np.pi * phase_idx / n) * fh
        assert np.abs(sh - expected).max() < 1e-12 * max(1.0, np.abs(fh).max())


def test_hs_seminorm_single_modes():
    n = 16
    vals = np.zeros((n, n), dtype=complex)
    vals[1, 0] = 1.0
    assert hs_seminorm(freq(vals), 1.0) == pytest.approx(1.0)
    vals = np.zeros((n, n), dtype=complex)
    vals[3, 4] = 2.0
    # weight |3|^4 + |4|^4 = 337 at order s=2
    assert hs_seminorm(freq(vals), 2.0) == pytest.approx(2.0 * np.sqrt(337.0))
    assert hs_seminorm(freq(np.zeros((n, n))), 3.0) == 0.0


def test_hs_seminorm_s0_weight_is_two_not_l2():
    vals = np.zeros((4, 4), dtype=complex)
    vals[1, 2] = 3.0
    g = freq(vals)
    assert hs_seminorm(g, 0.0) == pytest.approx(np.sqrt(2.0) * 3.0)
    assert l2_norm(g) == pytest.approx(3.0)


def test_hs_seminorm_bounded_by_max_weight_times_l2():
    rng = np.random.default_rng(9)
    for n in (5, 8):
        g = freq(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
        for s in (0.0, 1.0, 2.5):
            ip, jp = np.meshgrid(freq_values(n), freq_values(n), indexing="ij")
            wmax = (np.abs(ip).astype(float) ** (2 * s) + np.abs(jp) ** (2 * s)).max()
            assert hs_seminorm(g, s) <= np.sqrt(wmax) * l2_norm(g) * (1 + 1e-12)


def test_hs_seminorm_rejects_negative_order():
    with pytest.raises(ValueError, match="nonnegative"):
        hs_seminorm(freq(np.zeros((4, 4))), -1.0)


def test_domain_tag_enforcement():
    f = spatial(np.ones((4, 4)))
    with pytest.raises(ValueError, match="frequency"):
        idft(f)
    g = freq(np.ones((4, 4)))
    with pytest.raises(ValueError, match="spatial"):
        dft(g)
    with pytest.raises(ValueError):
        GridFunction(np.ones((0, 0)), SPATIAL)
    with pytest.raises(ValueError):
        GridFunction(np.ones((4, 4)), "nodal")


def test_as_real_truncates_small_residue_and_rejects_large():
    vals = np.ones((3, 3)) + 1e-13j * np.ones((3, 3))
    out = as_real(vals)
    assert out.dtype == float and np.allclose(out, 1.0)
    with pytest.raises(ValueError, match="residue"):
        as_real(np.ones((3, 3)) + 0.01j)


def test_grid_values_are_immutable():
    f = spatial(np.ones((4, 4)))
    with pytest.raises(ValueError):
        f.values[0, 0] = 2.0
