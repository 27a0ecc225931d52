"""Mode/field solver tests, including the dense real-space cross-check."""

import numpy as np
import pytest

from beamhom import (
    CONTINUUM,
    DISCRETE,
    KUMAR_MCDOWELL,
    BeamParams,
    CompatibilityError,
    LatticeSpec,
    LoadSpec,
    SolverError,
    assemble_triangular,
    dense_solve,
    field_errors,
    solve_field,
    solve_mode,
    symbol_continuum,
    symbol_discrete,
)

TRI = LatticeSpec.triangular(1.0)


def random_compatible_loads(rng, n):
    f = rng.standard_normal((n, n, 2))
    f -= f.mean(axis=(0, 1))
    tau = rng.standard_normal((n, n))
    return f, tau


def test_solve_mode_zero_rhs():
    sym = symbol_discrete(TRI, (1, 0), 1.0 / 8)
    out = solve_mode(sym, np.zeros(3))
    assert np.abs(out).max() == 0.0


def test_solve_mode_zero_mode_torque_only():
    sym = symbol_discrete(TRI, (0, 0), 1.0 / 8)
    out = solve_mode(sym, np.array([0.0, 0.0, 36.0]))
    assert np.allclose(out, [0.0, 0.0, 1.0])


def test_solve_mode_zero_mode_rejects_force():
    sym = symbol_discrete(TRI, (0, 0), 1.0 / 8)
    with pytest.raises(CompatibilityError, match="force"):
        solve_mode(sym, np.array([1.0, 0.0, 0.0]))


def test_solve_mode_schur_equals_direct():
    rng = np.random.default_rng(0)
    n = 16
    from beamhom.fourier import freq_values

    fv = freq_values(n)
    for _ in range(25):
        mode = (int(rng.choice(fv)), int(rng.choice(fv)))
        if mode == (0, 0):
            continue
        sym = symbol_discrete(TRI, mode, 1.0 / n)
        rhs = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        a = solve_mode(sym, rhs, method="schur")
        b = solve_mode(sym, rhs, method="direct")
        assert np.abs(a - b).max() <= 1e-12 * np.abs(b).max()


def test_solve_mode_residual():
    rng = np.random.default_rng(5)
    sym = symbol_discrete(TRI, (3, -2), 1.0 / 16)
    rhs = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    out = solve_mode(sym, rhs)
    assert np.abs(sym.matrix() @ out - rhs).max() <= 1e-11 * np.abs(rhs).max()


def test_loadspec_validation():
    n = 4
    f_hat = np.zeros((n, n, 2), dtype=complex)
    f_hat[0, 0, 0] = 1.0
    with pytest.raises(CompatibilityError, match="zero-mode"):
        LoadSpec(f_hat, np.zeros((n, n), dtype=complex)).validate()
    with pytest.raises(ValueError, match="shape"):
        LoadSpec(np.zeros((4, 4)), np.zeros((4, 4)))
    with pytest.raises(ValueError, match="outside"):
        LoadSpec.from_modes(4, [(2, 0, 1.0, 0.0, 0.0)])


def test_solve_field_matches_per_mode_solver():
    rng = np.random.default_rng(1)
    n = 8
    f, tau = random_compatible_loads(rng, n)
    loads = LoadSpec.from_spatial(f, tau)
    sol = solve_field(TRI, n, loads, DISCRETE)
    from beamhom.fourier import freq_values

    fv = freq_values(n)
    for ip in fv:
        for jp in fv:
            sym = symbol_discrete(TRI, (int(ip), int(jp)), 1.0 / n)
            rhs = np.array([*loads.f_hat[ip % n, jp % n], loads.tau_hat[ip % n, jp % n]])
            expected = solve_mode(sym, rhs)
            got = np.array([*sol.u_hat[ip % n, jp % n], sol.theta_hat[ip % n, jp % n]])
            assert np.abs(got - expected).max() <= 1e-12 * max(np.abs(expected).max(), 1e-12)


@pytest.mark.parametrize("n", [3, 4])
@pytest.mark.parametrize("rho", [0.01, 1.0, 100.0])
def test_spectral_solve_matches_dense_frame(n, rho):
    rng = np.random.default_rng(10 * n + int(np.log10(rho)) + 3)
    spec = LatticeSpec.triangular(rho)
    system = assemble_triangular(n, BeamParams(rho_star=rho, length=1.0 / n))
    for _ in range(2):
        f, tau = random_compatible_loads(rng, n)
        dense = dense_solve(system, f, tau)
        sol = solve_field(spec, n, LoadSpec.from_spatial(f, tau), DISCRETE).spatial()
        uscale = np.abs(dense.u).max()
        tscale = np.abs(dense.theta).max()
        assert np.abs(sol.u - dense.u).max() <= 1e-9 * uscale
        assert np.abs(sol.theta - dense.theta).max() <= 1e-9 * tscale


def test_constant_torque_gives_uniform_rotation():
    n = 8
    tau_hat = np.zeros((n, n), dtype=complex)
    tau_hat[0, 0] = 2.7
    sol = solve_field(TRI, n, LoadSpec(np.zeros((n, n, 2), dtype=complex), tau_hat), DISCRETE)
    grid = sol.spatial()
    assert np.abs(grid.u).max() < 1e-14
    assert np.allclose(grid.theta, 2.7 / 36.0)
    # rectangular zero-mode stiffness is 24
    rect = solve_field(LatticeSpec.rectangular(1.0), n,
                       LoadSpec(np.zeros((n, n, 2), dtype=complex), tau_hat), DISCRETE)
    assert np.allclose(rect.spatial().theta, 2.7 / 24.0)


def test_real_loads_give_real_fields():
    rng = np.random.default_rng(2)
    for n in (5, 8):  # odd and even, exercising the unpaired -N/2 modes
        f, tau = random_compatible_loads(rng, n)
        sol = solve_field(TRI, n, LoadSpec.from_spatial(f, tau), DISCRETE)
        grid = sol.spatial()  # raises if the imaginary residue survives
        assert grid.u.dtype == float and grid.theta.dtype == float


def test_solve_field_compatibility_and_size_checks():
    n = 4
    f_hat = np.zeros((n, n, 2), dtype=complex)
    f_hat[0, 0, 1] = 1.0
    with pytest.raises(CompatibilityError):
        solve_field(TRI, n, LoadSpec(f_hat, np.zeros((n, n), dtype=complex)), DISCRETE)
    with pytest.raises(ValueError, match="size"):
        solve_field(TRI, 8, LoadSpec.zero(4), DISCRETE)
    with pytest.raises(ValueError, match="kind"):
        solve_field(TRI, 4, LoadSpec.zero(4), "lumped")


def test_km_solve_rejects_loads_on_collapsed_modes():
    n = 8
    loads = LoadSpec.from_modes(n, [(4 % n - n, 0, 1.0, 0.0, 0.0)], hermitian=False)
    # mode (-4, 0): c_KM = 36 - 8 eps^2 pi^2 * 32 < 0 at eps = 1/8
    with pytest.raises(SolverError, match="nonpositive"):
        solve_field(TRI, n, loads, KUMAR_MCDOWELL)
    # low-frequency loads are fine
    ok = solve_field(TRI, n, LoadSpec.from_modes(n, [(1, 0, 1.0, 0.0, 0.0)]), KUMAR_MCDOWELL)
    assert ok.max_rel_residual <= 1e-11


def test_single_mode_discrete_vs_continuum_eps2():
    # ||u_D - u_C|| at one excited mode shrinks like eps^2
    mode_errs = []
    for n in (16, 32, 64):
        loads = LoadSpec.from_modes(n, [(1, 0, 1.0, 0.0, 0.0)])
        ud = solve_field(TRI, n, loads, DISCRETE)
        uc = solve_field(TRI, n, loads, CONTINUUM)
        mode_errs.append(np.abs(ud.u_hat[1, 0] - uc.u_hat[1, 0]).max() * n**2)
    assert max(mode_errs) / min(mode_errs) < 1.2


def test_field_errors_basics():
    n = 8
    loads = LoadSpec.from_modes(n, [(1, 0, 1.0, 0.0, 0.5)])
    sol = solve_field(TRI, n, loads, DISCRETE)
    table = field_errors(sol, sol, orders=(1.0, 2.0))
    assert all(v == 0.0 for v in table.values())
    assert set(table) == {"u_l2", "theta_l2", "u_h1", "theta_h1", "u_h2", "theta_h2"}


def test_field_errors_single_mode_seminorm():
    n = 8
    a = solve_field(TRI, n, LoadSpec.zero(n), DISCRETE)
    u_hat = np.zeros((n, n, 2), dtype=complex)
    u_hat[1, 0, 0] = 0.25  # difference amplitude d at mode (1, 0)
    from beamhom.solvers import SolutionField

    b = SolutionField(u_hat, np.zeros((n, n), dtype=complex), DISCRETE)
    table = field_errors(a, b, orders=(1.0,))
    assert table["u_l2"] == pytest.approx(0.25)
    assert table["u_h1"] == pytest.approx(0.25)  # weight |1|^2 + |0|^2 = 1
    with pytest.raises(ValueError, match="mismatch"):
        field_errors(a, SolutionField(np.zeros((4, 4, 2), dtype=complex),
                                      np.zeros((4, 4), dtype=complex), DISCRETE))
