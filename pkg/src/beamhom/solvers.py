"""Per-mode and full-field equilibrium solvers for all three model kinds.

The balance equation per mode reads S [u_hat; theta_hat] = [f_hat; tau_hat].
Solves go through the Schur reduction by default: eliminate the rotation,
solve the 2x2 displacement block, back-substitute.  The zero mode is the one
singular block; it requires a vanishing net force and fixes the displacement
to its zero-mean representative while the rotation picks up tau_hat / c(0,0).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import CompatibilityError, FieldGrid, SolverError
from .fourier import FREQUENCY, in_freq_set
from .symbols import (
    CONTINUUM,
    DISCRETE,
    KINDS,
    KUMAR_MCDOWELL,
    LatticeSpec,
    ModeSymbol,
    schur,
    schur_fields,
    symbol_fields,
)

RESIDUAL_RTOL = 1e-11


@dataclass(frozen=True)
class LoadSpec:
    """Fourier coefficients of nodal forces (n,n,2) and torques (n,n).

    The zero-mode force must vanish; the zero-mode torque is unconstrained.
    """

    f_hat: np.ndarray
    tau_hat: np.ndarray

    def __post_init__(self):
        f_hat = np.ascontiguousarray(np.asarray(self.f_hat, dtype=complex))
        tau_hat = np.ascontiguousarray(np.asarray(self.tau_hat, dtype=complex))
        if f_hat.ndim != 3 or f_hat.shape[2] != 2 or f_hat.shape[0] != f_hat.shape[1]:
            raise ValueError(f"f_hat must have shape (n, n, 2), got {f_hat.shape}")
        if tau_hat.shape != f_hat.shape[:2]:
            raise ValueError(f"tau_hat shape {tau_hat.shape} does not match f_hat")
        f_hat.setflags(write=False)
        tau_hat.setflags(write=False)
        object.__setattr__(self, "f_hat", f_hat)
        object.__setattr__(self, "tau_hat", tau_hat)

    @property
    def n(self) -> int:
        return self.f_hat.shape[0]

    def scale(self) -> float:
        return max(float(np.abs(self.f_hat).max(initial=0.0)),
                   float(np.abs(self.tau_hat).max(initial=0.0)))

    def validate(self, tol: float = 1e-12) -> None:
        if np.abs(self.f_hat[0, 0]).max() > tol * max(self.scale(), 1e-300):
            raise CompatibilityError(
                f"zero-mode force {self.f_hat[0, 0]} must vanish (net force compatibility)"
            )

    @classmethod
    def zero(cls, n: int) -> "LoadSpec":
        return cls(np.zeros((n, n, 2), dtype=complex), np.zeros((n, n), dtype=complex))

    @classmethod
    def from_spatial(cls, f: np.ndarray, tau: np.ndarray) -> "LoadSpec":
        grid = FieldGrid(np.asarray(f, dtype=float), np.asarray(tau, dtype=float)).dft()
        return cls(grid.u, grid.theta)

    @classmethod
    def from_modes(cls, n: int, entries, hermitian: bool = True) -> "LoadSpec":
        """Build loads from (ip, jp, fx, fy, tau) tuples.

        With ``hermitian`` each entry also deposits its conjugate at the
        negated mode so the spatial loads are real.
        """
        f_hat = np.zeros((n, n, 2), dtype=complex)
        tau_hat = np.zeros((n, n), dtype=complex)
        for ip, jp, fx, fy, tau in entries:
            ip, jp = int(ip), int(jp)
            if not in_freq_set(n, ip, jp):
                raise ValueError(f"mode ({ip}, {jp}) outside the frequency set for N={n}")
            f_hat[ip % n, jp % n] += [fx, fy]
            tau_hat[ip % n, jp % n] += tau
            if hermitian and (ip % n, jp % n) != (-ip % n, -jp % n):
                f_hat[-ip % n, -jp % n] += np.conj([fx, fy])
                tau_hat[-ip % n, -jp % n] += np.conj(tau)
        return cls(f_hat, tau_hat)


@dataclass(frozen=True)
class SolutionField:
    """Solved mode coefficients plus the model kind that produced them."""

    u_hat: np.ndarray
    theta_hat: np.ndarray
    kind: str
    max_rel_residual: float = 0.0

    @property
    def n(self) -> int:
        return self.u_hat.shape[0]

    def spatial(self, real: bool = True, tol: float = 1e-10) -> FieldGrid:
        return FieldGrid(self.u_hat, self.theta_hat, FREQUENCY).idft(real=real, tol=tol)


def solve_mode(sym: ModeSymbol, rhs: np.ndarray, method: str = "schur") -> np.ndarray:
    """Solve one 3x3 mode block for rhs = (f_hat_x, f_hat_y, tau_hat).

    The zero mode demands a vanishing force component and returns
    (0, 0, tau_hat / c).  ``method='direct'`` bypasses the Schur reduction
    with a dense Hermitian solve (verification path).
    """
    rhs = np.asarray(rhs, dtype=complex)
    if rhs.shape != (3,):
        raise ValueError(f"rhs must be a complex 3-vector, got shape {rhs.shape}")
    if sym.is_zero_mode:
        if np.abs(rhs[:2]).max() > 1e-12 * max(float(np.abs(rhs).max()), 1e-300):
            raise CompatibilityError(f"zero-mode rhs {rhs} has a force component")
        return np.array([0.0, 0.0, rhs[2] / sym.c], dtype=complex)
    if method == "direct":
        return np.linalg.solve(sym.matrix(), rhs)
    if method != "schur":
        raise ValueError(f"unknown method {method!r}")
    block = schur(sym)
    u = np.linalg.solve(block.b_mat, block.reduce_rhs(rhs[:2], rhs[2]))
    theta = block.recover_theta(rhs[2], u)
    return np.array([u[0], u[1], theta], dtype=complex)


def _solve_all_modes(a, b_im, c, f_hat, tau_hat):
    """Vectorized Schur solve over the full mode grid (zero mode special-cased)."""
    bmat = schur_fields(a, b_im, c)
    rhs = f_hat - 1j * b_im * (tau_hat / c)[..., None]
    m00, m01, m11 = bmat[..., 0, 0], bmat[..., 0, 1], bmat[..., 1, 1]
    det = m00 * m11 - m01**2
    det_safe = det.copy()
    det_safe[0, 0] = 1.0
    u_hat = np.empty_like(f_hat)
    u_hat[..., 0] = (m11 * rhs[..., 0] - m01 * rhs[..., 1]) / det_safe
    u_hat[..., 1] = (-m01 * rhs[..., 0] + m00 * rhs[..., 1]) / det_safe
    u_hat[0, 0, :] = 0.0
    theta_hat = tau_hat / c + 1j * np.einsum("...k,...k->...", b_im, u_hat) / c
    return u_hat, theta_hat


def _residual(a, b_im, c, u_hat, theta_hat, f_hat, tau_hat) -> float:
    r_u = np.einsum("...kl,...l->...k", a, u_hat) + 1j * b_im * theta_hat[..., None] - f_hat
    r_t = -1j * np.einsum("...k,...k->...", b_im, u_hat) + c * theta_hat - tau_hat
    r_u[0, 0, :] = 0.0  # zero-mode force row is satisfied by compatibility
    rnorm = np.sqrt(np.sum(np.abs(r_u) ** 2, axis=-1) + np.abs(r_t) ** 2)
    rhsnorm = np.sqrt(np.sum(np.abs(f_hat) ** 2, axis=-1) + np.abs(tau_hat) ** 2)
    loaded = rhsnorm > 0
    if not loaded.any():
        return 0.0
    return float((rnorm[loaded] / rhsnorm[loaded]).max())


def solve_field(spec: LatticeSpec, n: int, loads: LoadSpec, kind: str) -> SolutionField:
    """Solve every mode of an n-by-n load grid for the given model kind."""
    if kind not in KINDS:
        raise ValueError(f"unknown model kind {kind!r}")
    if loads.n != n:
        raise ValueError(f"load grid size {loads.n} does not match n={n}")
    loads.validate()
    a, b_im, c = symbol_fields(spec, n, kind)
    if kind == KUMAR_MCDOWELL:
        bad = c <= 0
        loaded = (np.abs(loads.f_hat).sum(axis=-1) + np.abs(loads.tau_hat)) > 0
        if np.any(bad & loaded):
            ip, jp = np.nonzero(bad & loaded)
            raise SolverError(
                f"nonpositive rotation block on loaded modes, first at FFT index "
                f"({ip[0]}, {jp[0]})"
            )
    u_hat, theta_hat = _solve_all_modes(a, b_im, c, loads.f_hat, loads.tau_hat)
    rel = _residual(a, b_im, c, u_hat, theta_hat, loads.f_hat, loads.tau_hat)
    if rel > RESIDUAL_RTOL:
        raise SolverError(f"mode residual {rel:.3e} exceeds {RESIDUAL_RTOL:.1e}")
    return SolutionField(u_hat, theta_hat, kind, rel)


def field_errors(a: SolutionField, b: SolutionField, orders=()) -> dict[str, float]:
    """Frequency-space error norms between two solutions on the same grid.

    Returns the coefficient-l2 norms of the u and theta differences plus the
    requested H^s seminorms, keyed 'u_l2', 'theta_l2', 'u_h{s}', 'theta_h{s}'.
    """
    if a.n != b.n:
        raise ValueError(f"grid mismatch: {a.n} vs {b.n}")
    from .fourier import GridFunction, hs_seminorm, l2_norm

    du = GridFunction(a.u_hat - b.u_hat, FREQUENCY)
    dth = GridFunction(a.theta_hat - b.theta_hat, FREQUENCY)
    out = {"u_l2": l2_norm(du), "theta_l2": l2_norm(dth)}
    for s in orders:
        out[f"u_h{s:g}"] = hs_seminorm(du, s)
        out[f"theta_h{s:g}"] = hs_seminorm(dth, s)
    return out
