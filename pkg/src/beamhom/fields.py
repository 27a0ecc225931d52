"""Nodal displacement/rotation fields shared by the solver paths."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fourier import FREQUENCY, SPATIAL, GridFunction, as_real, dft, idft


class CompatibilityError(ValueError):
    """Loads violate the zero-mode solvability condition (nonzero net force)."""


class SingularSystemError(RuntimeError):
    """Assembled system kernel does not match the expected rigid-body space."""


class SolverError(RuntimeError):
    """A solve failed its residual contract."""


@dataclass(frozen=True)
class FieldGrid:
    """Displacement (n, n, 2) plus rotation (n, n) on a periodic grid."""

    u: np.ndarray
    theta: np.ndarray
    domain: str = SPATIAL

    def __post_init__(self):
        u = np.asarray(self.u)
        theta = np.asarray(self.theta)
        if u.ndim != 3 or u.shape[2] != 2 or u.shape[0] != u.shape[1]:
            raise ValueError(f"u must have shape (n, n, 2), got {u.shape}")
        if theta.shape != u.shape[:2]:
            raise ValueError(f"theta shape {theta.shape} does not match u {u.shape}")
        if self.domain not in (SPATIAL, FREQUENCY):
            raise ValueError(f"unknown domain tag {self.domain!r}")
        u = np.ascontiguousarray(u)
        theta = np.ascontiguousarray(theta)
        u.setflags(write=False)
        theta.setflags(write=False)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "theta", theta)

    @property
    def n(self) -> int:
        return self.u.shape[0]

    @classmethod
    def zero(cls, n: int, domain: str = SPATIAL) -> "FieldGrid":
        return cls(np.zeros((n, n, 2)), np.zeros((n, n)), domain)

    def dft(self) -> "FieldGrid":
        uh = dft(GridFunction(self.u, SPATIAL)).values
        th = dft(GridFunction(self.theta, SPATIAL)).values
        return FieldGrid(uh, th, FREQUENCY)

    def idft(self, real: bool = True, tol: float = 1e-10) -> "FieldGrid":
        u = idft(GridFunction(self.u, FREQUENCY)).values
        theta = idft(GridFunction(self.theta, FREQUENCY)).values
        if real:
            u = as_real(u, tol)
            theta = as_real(theta, tol)
        return FieldGrid(u, theta, SPATIAL)
