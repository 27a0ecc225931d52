"""Euler-Bernoulli beam elements and the dense periodic frame assembly.

This module is the real-space ground truth for the spectral path: the
triangular lattice is assembled beam by beam into a dense 3N^2 x 3N^2
stiffness matrix whose action on single-mode fields must reproduce the
per-mode symbols exactly (up to the eps^2*gamma load scaling).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import CompatibilityError, FieldGrid, SingularSystemError, SolverError
from .symbols import LatticeSpec, perp

_K_TAU = np.array([[1.0, -1.0], [-1.0, 1.0]])


def _k_nu(length: float) -> np.ndarray:
    ll = length
    return np.array(
        [
            [12.0, 6 * ll, -12.0, 6 * ll],
            [6 * ll, 4 * ll**2, -6 * ll, 2 * ll**2],
            [-12.0, -6 * ll, 12.0, -6 * ll],
            [6 * ll, 2 * ll**2, -6 * ll, 4 * ll**2],
        ]
    )


@dataclass(frozen=True)
class BeamParams:
    """Scaled beam stiffnesses: axial gamma*rho_star*l, bending gamma*l^3."""

    rho_star: float
    length: float
    gamma: float = 1.0

    def __post_init__(self):
        if self.rho_star <= 0 or self.length <= 0 or self.gamma <= 0:
            raise ValueError("rho_star, length and gamma must be positive")

    @property
    def axial(self) -> float:
        return self.gamma * self.rho_star * self.length

    @property
    def bending(self) -> float:
        return self.gamma * self.length**3


@dataclass(frozen=True)
class ElementStiffness:
    """6x6 beam stiffness over (vx, vy, theta) at both end nodes.

    ``k_local`` lives in the beam frame (axial, transverse, rotation);
    ``k_global`` is the same operator expressed in global nodal coordinates
    through the direction / perpendicular pair.
    """

    k_local: np.ndarray
    k_global: np.ndarray
    direction: np.ndarray
    transform: np.ndarray


def element_stiffness(params: BeamParams, direction: np.ndarray) -> ElementStiffness:
    """Stiffness of one beam along a unit direction.

    The energy is (S/2L)(vx_l - vx_r)^2 plus the cubic-Hermite bending form
    (H/2L^3) on (vy_l, theta_l, vy_r, theta_r); the kernel is exactly the
    three rigid-body motions.
    """
    direction = np.asarray(direction, dtype=float)
    if abs(np.linalg.norm(direction) - 1.0) > 1e-12:
        raise ValueError(f"direction must be a unit vector, got {direction}")
    ll = params.length
    k_local = np.zeros((6, 6))
    ax = np.ix_([0, 3], [0, 3])
    bend = np.ix_([1, 2, 4, 5], [1, 2, 4, 5])
    k_local[ax] += (params.axial / ll) * _K_TAU
    k_local[bend] += (params.bending / ll**3) * _k_nu(ll)
    lp = perp(direction)
    rot = np.array([[direction[0], direction[1], 0.0], [lp[0], lp[1], 0.0], [0.0, 0.0, 1.0]])
    transform = np.zeros((6, 6))
    transform[:3, :3] = rot
    transform[3:, 3:] = rot
    k_global = transform.T @ k_local @ transform
    return ElementStiffness(k_local, k_global, direction, transform)


def bending_energy_identity_gap(w: np.ndarray, length: float) -> float:
    """Gap between the K_nu quadratic form and its two-square rewriting.

    w = (vy_l, theta_l, vy_r, theta_r).  The rewriting is
    L^2 (theta_l - theta_r)^2 + 3 L^2 (2 vy_l/L - 2 vy_r/L + theta_l + theta_r)^2.
    """
    w = np.asarray(w, dtype=float)
    lhs = float(w @ _k_nu(length) @ w)
    vy_l, th_l, vy_r, th_r = w
    rhs = length**2 * (th_l - th_r) ** 2
    rhs += 3 * length**2 * (2 * vy_l / length - 2 * vy_r / length + th_l + th_r) ** 2
    scale = max(abs(lhs), abs(rhs), float(w @ w))
    return abs(lhs - rhs) / scale


def energy_identities_check(params: BeamParams, trials: int = 1000, seed: int = 0) -> float:
    """Max relative gap of the bending-form rewriting over random dofs."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        w = rng.standard_normal(4)
        worst = max(worst, bending_energy_identity_gap(w, params.length))
    return worst


_TRI_STENCILS = ((1, 0), (1, 1), (0, 1))


@dataclass(frozen=True)
class AssembledSystem:
    """Dense periodic frame stiffness over 3N^2 nodal dofs (ux, uy, theta)."""

    n: int
    params: BeamParams
    matrix: np.ndarray

    def __post_init__(self):
        m = np.ascontiguousarray(self.matrix)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dof_count(self) -> int:
        return 3 * self.n**2

    @property
    def eps(self) -> float:
        return self.params.length

    @property
    def rhs_scale(self) -> float:
        return self.eps**2 * self.params.gamma


def node_dofs(n: int, i: int, j: int) -> list[int]:
    base = 3 * ((i % n) * n + (j % n))
    return [base, base + 1, base + 2]


def pack_fields(u: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """Interleave (n,n,2) displacements and (n,n) rotations into a dof vector."""
    n = u.shape[0]
    out = np.empty(3 * n * n, dtype=np.result_type(u, theta))
    flat_u = u.reshape(n * n, 2)
    out[0::3] = flat_u[:, 0]
    out[1::3] = flat_u[:, 1]
    out[2::3] = np.asarray(theta).reshape(n * n)
    return out


def unpack_vector(n: int, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    u = np.stack([v[0::3], v[1::3]], axis=-1).reshape(n, n, 2)
    theta = v[2::3].reshape(n, n)
    return u, theta


def assemble_triangular(n: int, params: BeamParams) -> AssembledSystem:
    """Assemble the three-direction triangular lattice under cyclic indexing.

    Stencil neighbors (i+1,j), (i+1,j+1), (i,j+1) carry the beam directions
    l1, l2, l3; every beam is counted exactly once per node.  Requires
    params.length == 1/n.
    """
    if n < 2:
        raise ValueError(f"grid size must be >= 2, got {n}")
    if abs(params.length - 1.0 / n) > 1e-12:
        raise ValueError(f"beam length {params.length} must equal 1/n = {1.0 / n}")
    spec = LatticeSpec.triangular(params.rho_star)
    kmat = np.zeros((3 * n * n, 3 * n * n))
    elems = [element_stiffness(params, d).k_global for d in spec.directions]
    for i in range(n):
        for j in range(n):
            here = node_dofs(n, i, j)
            for (di, dj), ke in zip(_TRI_STENCILS, elems):
                idx = here + node_dofs(n, i + di, j + dj)
                kmat[np.ix_(idx, idx)] += ke
    return AssembledSystem(n, params, kmat)


def triangular_energy(n: int, params: BeamParams, u: np.ndarray, theta: np.ndarray) -> float:
    """Total potential energy summed beam-by-beam (independent of the matrix).

    Per beam with end difference du = u_here - u_neighbor:
    S (du.l)^2 / (2 eps) + H (dtheta)^2 / (2 eps)
    + 3 H (2 du.l_perp / eps + theta_here + theta_neighbor)^2 / (2 eps).
    """
    spec = LatticeSpec.triangular(params.rho_star)
    eps = params.length
    s_ax, h_bend = params.axial, params.bending
    total = 0.0
    for (di, dj), lk in zip(_TRI_STENCILS, spec.directions):
        lp = perp(lk)
        u_nb = np.roll(np.roll(u, -di, axis=0), -dj, axis=1)
        th_nb = np.roll(np.roll(theta, -di, axis=0), -dj, axis=1)
        du = u - u_nb
        total += 0.5 * np.sum(s_ax * (du @ lk) ** 2) / eps
        total += 0.5 * np.sum(h_bend * (theta - th_nb) ** 2) / eps
        total += 0.5 * np.sum(3 * h_bend * (2 * (du @ lp) / eps + theta + th_nb) ** 2) / eps
    return float(total)


def dense_solve(system: AssembledSystem, f: np.ndarray, tau: np.ndarray) -> FieldGrid:
    """Equilibrium of the assembled frame under nodal loads (f, tau).

    Loads are scaled by eps^2*gamma internally.  The net force must vanish
    (zero-mode solvability); the returned displacement is the zero-mean
    representative orthogonal to the rigid-translation kernel.
    """
    n = system.n
    f = np.asarray(f, dtype=float)
    tau = np.asarray(tau, dtype=float)
    if f.shape != (n, n, 2) or tau.shape != (n, n):
        raise ValueError(f"expected loads shaped ({n},{n},2) and ({n},{n})")
    scale = max(float(np.abs(f).max(initial=0.0)), float(np.abs(tau).max(initial=0.0)), 1e-300)
    net_force = f.sum(axis=(0, 1))
    if np.abs(net_force).max() > 1e-9 * scale * n * n:
        raise CompatibilityError(
            f"net force {net_force} must vanish for the periodic problem to be solvable"
        )
    rhs = system.rhs_scale * pack_fields(f, tau)
    evals, evecs = np.linalg.eigh(system.matrix)
    kernel = evals < 1e-10 * evals[-1]
    kdim = int(kernel.sum())
    if kdim != 2:
        raise SingularSystemError(f"expected a 2-dimensional kernel, found {kdim}")
    coeffs = evecs.T @ rhs
    coeffs[kernel] = 0.0
    sol = evecs @ (coeffs / np.where(kernel, 1.0, evals))
    residual = np.linalg.norm(system.matrix @ sol - (rhs - evecs[:, kernel] @ (evecs[:, kernel].T @ rhs)))
    if residual > 1e-10 * max(np.linalg.norm(rhs), 1e-300):
        raise SolverError(f"dense solve residual {residual:.3e} exceeds contract")
    u, theta = unpack_vector(n, sol)
    return FieldGrid(u, theta)
