"""2D discrete Fourier transforms with unit-cell weights.

The transform pair used throughout the package is

    forward:  fh[i', j'] = (1/N^2) * sum_{0 <= i,j < N} f[i, j] exp(-2*pi*1j*(i*i' + j*j')/N)
    inverse:  f[i, j]    = sum_{(i',j')} fh[i', j'] exp(+2*pi*1j*(i*i' + j*j')/N)

i.e. the weight 1/N^2 sits on the forward transform and the inverse carries
weight 1.  With this normalization the coefficients of a trigonometric
polynomial sampled on the grid coincide with its Fourier-series coefficients,
and Parseval's identity reads

    sum_{(i',j')} conj(gh)*fh = (1/N^2) * sum_{(i,j)} conj(g)*f.

Frequencies live on the set {-N/2 <= i',j' < N/2} for even N and on the
symmetric set {-(N-1)/2, ..., (N-1)/2} for odd N.  Arrays are stored in FFT
layout (nonnegative frequencies first), matching ``numpy.fft.fftfreq`` times N.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SPATIAL = "spatial"
FREQUENCY = "frequency"

# Direct-summation transforms are quartic in N; cap them at oracle sizes.
DIRECT_MAX_N = 32


def freq_values(n: int) -> np.ndarray:
    """Integer frequencies in FFT layout, e.g. [0, 1, -2, -1] for n=4."""
    if n < 1:
        raise ValueError(f"grid size must be positive, got {n}")
    return np.rint(np.fft.fftfreq(n) * n).astype(int)


def freq_grids(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Meshgrid (IP, JP) of integer frequencies in FFT layout, 'ij' indexed."""
    fv = freq_values(n)
    return np.meshgrid(fv, fv, indexing="ij")


def in_freq_set(n: int, ip: int, jp: int) -> bool:
    """Whether (ip, jp) lies in the frequency set of an n-by-n grid."""
    if n % 2 == 0:
        lo, hi = -n // 2, n // 2 - 1
    else:
        lo, hi = -(n - 1) // 2, (n - 1) // 2
    return lo <= ip <= hi and lo <= jp <= hi


@dataclass(frozen=True)
class GridFunction:
    """An N-by-N periodic grid of scalar or d-vector complex values.

    ``values`` has shape (n, n) or (n, n, d) with d in {1, 2, 3}; the domain
    tag records whether entries are nodal samples or Fourier coefficients.
    Indexing is cyclic in both grid directions.
    """

    values: np.ndarray
    domain: str

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.ndim not in (2, 3):
            raise ValueError(f"expected 2D or 3D array, got ndim={vals.ndim}")
        if vals.shape[0] != vals.shape[1] or vals.shape[0] < 1:
            raise ValueError(f"expected nonempty square grid, got shape {vals.shape}")
        if vals.ndim == 3 and vals.shape[2] not in (1, 2, 3):
            raise ValueError(f"vector dimension must be 1..3, got {vals.shape[2]}")
        if self.domain not in (SPATIAL, FREQUENCY):
            raise ValueError(f"unknown domain tag {self.domain!r}")
        vals = np.ascontiguousarray(vals)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def ncomp(self) -> int:
        return 1 if self.values.ndim == 2 else self.values.shape[2]


def _require_domain(f: GridFunction, domain: str, op: str) -> None:
    if f.domain != domain:
        raise ValueError(f"{op} expects a {domain}-domain grid, got {f.domain!r}")


def dft(f: GridFunction) -> GridFunction:
    """Forward transform (FFT-backed) with the 1/N^2 weight."""
    _require_domain(f, SPATIAL, "dft")
    vals = np.fft.fft2(f.values, axes=(0, 1)) / f.n**2
    return GridFunction(vals, FREQUENCY)


def idft(fh: GridFunction) -> GridFunction:
    """Inverse transform (FFT-backed), weight 1."""
    _require_domain(fh, FREQUENCY, "idft")
    vals = np.fft.ifft2(fh.values, axes=(0, 1)) * fh.n**2
    return GridFunction(vals, SPATIAL)


def _direct_kernel(n: int, sign: float) -> np.ndarray:
    i = np.arange(n)
    return np.exp(sign * 2j * np.pi * np.outer(i, i) / n)


def dft_direct(f: GridFunction) -> GridFunction:
    """Forward transform by direct O(N^4) summation.

    Oracle path: pins the weight and sign conventions independently of the
    FFT implementation.  Restricted to n <= DIRECT_MAX_N.
    """
    _require_domain(f, SPATIAL, "dft_direct")
    if f.n > DIRECT_MAX_N:
        raise ValueError(f"direct transform capped at n <= {DIRECT_MAX_N}, got {f.n}")
    w = _direct_kernel(f.n, -1.0)
    vals = np.einsum("ik,jl,ij...->kl...", w, w, f.values) / f.n**2
    return GridFunction(vals, FREQUENCY)


def idft_direct(fh: GridFunction) -> GridFunction:
    """Inverse transform by direct summation (oracle path)."""
    _require_domain(fh, FREQUENCY, "idft_direct")
    if fh.n > DIRECT_MAX_N:
        raise ValueError(f"direct transform capped at n <= {DIRECT_MAX_N}, got {fh.n}")
    w = _direct_kernel(fh.n, +1.0)
    vals = np.einsum("ik,jl,kl...->ij...", w, w, fh.values)
    return GridFunction(vals, SPATIAL)


def parseval_gap(f: GridFunction, g: GridFunction) -> float:
    """|sum conj(gh)*fh - (1/N^2) sum conj(g)*f| for spatial grids f, g."""
    _require_domain(f, SPATIAL, "parseval_gap")
    _require_domain(g, SPATIAL, "parseval_gap")
    if f.values.shape != g.values.shape:
        raise ValueError(f"shape mismatch: {f.values.shape} vs {g.values.shape}")
    fh, gh = dft(f), dft(g)
    lhs = np.sum(np.conj(gh.values) * fh.values)
    rhs = np.sum(np.conj(g.values) * f.values) / f.n**2
    return float(abs(lhs - rhs))


def l2_norm(fh: GridFunction) -> float:
    """sqrt(sum |fh|^2) over all modes (and vector components)."""
    _require_domain(fh, FREQUENCY, "l2_norm")
    return float(np.sqrt(np.sum(np.abs(fh.values) ** 2)))


def hs_seminorm(fh: GridFunction, s: float) -> float:
    """Discrete H^s seminorm sqrt(sum (|i'|^2s + |j'|^2s) |fh|^2).

    Note the s = 0 weight is |i'|^0 + |j'|^0 = 2 on every mode (0^0 = 1), so
    this does not reduce to ``l2_norm``.
    """
    _require_domain(fh, FREQUENCY, "hs_seminorm")
    if s < 0:
        raise ValueError(f"seminorm order must be nonnegative, got {s}")
    ip, jp = freq_grids(fh.n)
    weight = np.abs(ip).astype(float) ** (2 * s) + np.abs(jp).astype(float) ** (2 * s)
    mag2 = np.abs(fh.values) ** 2
    if mag2.ndim == 3:
        mag2 = mag2.sum(axis=-1)
    return float(np.sqrt(np.sum(weight * mag2)))


def as_real(values: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Strip the imaginary part of a physically real field.

    Residue above ``tol`` relative to the field scale signals broken
    conjugate symmetry and raises instead of being silently dropped.
    """
    values = np.asarray(values)
    if not np.iscomplexobj(values):
        return values.astype(float)
    scale = max(float(np.max(np.abs(values))), 1.0)
    residue = float(np.max(np.abs(values.imag))) if values.size else 0.0
    if residue > tol * scale:
        raise ValueError(
            f"imaginary residue {residue:.3e} exceeds {tol:.1e} * scale; "
            "coefficients are not conjugate-symmetric"
        )
    return values.real.copy()
