"""Per-mode stiffness symbols for beam lattices and their Schur reductions.

Each Fourier mode (i', j') of the periodic lattice problem carries a 3-by-3
Hermitian block

    S = [[A, b], [-b^T, c]],   A real symmetric 2x2, b purely imaginary, c > 0,

acting on the stacked coefficient (u_hat, theta_hat).  Three model kinds are
supported:

* ``discrete``  -- the exact lattice symbol at cell size eps = 1/N, built from
  sin^2(pi*phi*eps)/eps^2 factors per beam direction,
* ``continuum`` -- its eps -> 0 limit, which is the Fourier symbol of the
  homogenized micropolar operator,
* ``km``        -- the Kumar-McDowell variant: continuum A and b, with the
  rotation-rotation entry keeping its quadratic-in-eps correction.

Eliminating the rotation gives the displacement Schur complement
B = A + b (x) b / c, which is real symmetric because b is imaginary:
b (x) b = -(Im b)(Im b)^T.  Coercivity of B (lambda_min >= c0 * |mode|^2)
is what the diagnostic sweeps in :mod:`beamhom.experiments` quantify.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fourier import freq_grids, in_freq_set

TRIANGULAR = "triangular"
RECTANGULAR = "rectangular"

DISCRETE = "discrete"
CONTINUUM = "continuum"
KUMAR_MCDOWELL = "km"

KINDS = (DISCRETE, CONTINUUM, KUMAR_MCDOWELL)

_SQ3 = np.sqrt(3.0)


def perp(v: np.ndarray) -> np.ndarray:
    """Rotate a 2-vector counterclockwise by pi/2."""
    return np.array([-v[1], v[0]])


@dataclass(frozen=True)
class LatticeSpec:
    """Beam directions, translation vectors and stiffness ratio of a lattice.

    ``rho_star`` is the dimensionless axial-to-bending ratio: the axial
    stiffness scales as gamma*rho_star*l and the bending stiffness as
    gamma*l^3 with beam length l.
    """

    family: str
    directions: np.ndarray  # (k, 2) unit vectors
    translations: np.ndarray  # (2, 2) rows t_x, t_y
    rho_star: float

    def __post_init__(self):
        if self.family not in (TRIANGULAR, RECTANGULAR):
            raise ValueError(f"unknown lattice family {self.family!r}")
        if self.rho_star <= 0:
            raise ValueError(f"rho_star must be positive, got {self.rho_star}")
        dirs = np.asarray(self.directions, dtype=float)
        if not np.allclose(np.linalg.norm(dirs, axis=1), 1.0, atol=1e-12):
            raise ValueError("beam directions must be unit vectors")
        dirs.setflags(write=False)
        object.__setattr__(self, "directions", dirs)

    @classmethod
    def triangular(cls, rho_star: float) -> "LatticeSpec":
        dirs = np.array([[0.5, -_SQ3 / 2], [1.0, 0.0], [0.5, _SQ3 / 2]])
        trans = np.array([[0.5, -_SQ3 / 2], [0.5, _SQ3 / 2]])
        return cls(TRIANGULAR, dirs, trans, rho_star)

    @classmethod
    def rectangular(cls, rho_star: float) -> "LatticeSpec":
        dirs = np.array([[1.0, 0.0], [0.0, 1.0]])
        trans = np.array([[1.0, 0.0], [0.0, 1.0]])
        return cls(RECTANGULAR, dirs, trans, rho_star)

    def phases(self, ip, jp) -> list:
        """Integer phase arguments per beam: (i', i'+j', j') resp. (i', j').

        These mirror the neighbor stencils (i+1,j), (i+1,j+1), (i,j+1) of the
        triangular family and (i+1,j), (i,j+1) of the rectangular one.
        """
        if self.family == TRIANGULAR:
            return [ip, ip + jp, jp]
        return [ip, jp]

    @property
    def zero_mode_rotation_stiffness(self) -> float:
        """The c entry at mode (0, 0): 12 per beam direction."""
        return 12.0 * len(self.directions)


@dataclass(frozen=True)
class ModeSymbol:
    """One 3x3 Hermitian mode block, stored as (A, Im b, c)."""

    a: np.ndarray  # (2, 2) real symmetric
    b_imag: np.ndarray  # (2,) real; actual b = 1j * b_imag
    c: float
    kind: str
    mode: tuple[int, int]
    eps: float | None = None

    @property
    def b(self) -> np.ndarray:
        return 1j * self.b_imag

    def matrix(self) -> np.ndarray:
        """Assemble the full 3x3 complex Hermitian block [[A, b], [-b^T, c]]."""
        s = np.zeros((3, 3), dtype=complex)
        s[:2, :2] = self.a
        s[:2, 2] = 1j * self.b_imag
        s[2, :2] = -1j * self.b_imag
        s[2, 2] = self.c
        return s

    @property
    def is_zero_mode(self) -> bool:
        return self.mode == (0, 0)


def _symbol_parts(spec: LatticeSpec, ip, jp, eps: float | None, kind: str):
    """A, Im b, c over arbitrary-shape integer mode arrays (broadcast)."""
    ip = np.asarray(ip, dtype=float)
    jp = np.asarray(jp, dtype=float)
    shape = np.broadcast_shapes(ip.shape, jp.shape)
    a = np.zeros(shape + (2, 2))
    b = np.zeros(shape + (2,))
    c = np.zeros(shape)
    for lk, phi in zip(spec.directions, spec.phases(ip, jp)):
        lp = perp(lk)
        m = spec.rho_star * np.outer(lk, lk) + 12.0 * np.outer(lp, lp)
        if kind == DISCRETE:
            s2 = np.sin(np.pi * phi * eps) ** 2 / eps**2
            a += 4.0 * m * s2[..., None, None]
            b += 12.0 * lp * (np.sin(2 * np.pi * phi * eps) / eps)[..., None]
            c += 12.0 - 8.0 * np.sin(np.pi * phi * eps) ** 2
        elif kind == CONTINUUM:
            a += 4.0 * m * (np.pi**2 * phi**2)[..., None, None]
            b += 24.0 * np.pi * lp * phi[..., None]
            c += 12.0
        elif kind == KUMAR_MCDOWELL:
            a += 4.0 * m * (np.pi**2 * phi**2)[..., None, None]
            b += 24.0 * np.pi * lp * phi[..., None]
            c += 12.0 - 8.0 * eps**2 * np.pi**2 * phi**2
        else:
            raise ValueError(f"unknown symbol kind {kind!r}")
    return a, b, c


def _check_mode(mode: tuple[int, int], eps: float) -> int:
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    n = round(1.0 / eps)
    if abs(1.0 / eps - n) > 1e-9 or n < 1:
        raise ValueError(f"eps must equal 1/N for integral N, got {eps}")
    if not in_freq_set(n, *mode):
        raise ValueError(f"mode {mode} outside the frequency set for N={n}")
    return n


def symbol_discrete(spec: LatticeSpec, mode: tuple[int, int], eps: float) -> ModeSymbol:
    """Exact lattice symbol at cell size eps = 1/N."""
    _check_mode(mode, eps)
    a, b, c = _symbol_parts(spec, mode[0], mode[1], eps, DISCRETE)
    return ModeSymbol(a, b, float(c), DISCRETE, tuple(mode), eps)


def symbol_continuum(spec: LatticeSpec, mode: tuple[int, int]) -> ModeSymbol:
    """eps -> 0 limit symbol (homogenized model); defined for any integer mode."""
    a, b, c = _symbol_parts(spec, mode[0], mode[1], None, CONTINUUM)
    return ModeSymbol(a, b, float(c), CONTINUUM, tuple(mode))


def symbol_km(
    spec: LatticeSpec,
    mode: tuple[int, int],
    eps: float,
    require_positive: bool = True,
) -> ModeSymbol:
    """Kumar-McDowell symbol: continuum A, b with c keeping its eps^2 terms.

    The quadratic truncation drives c negative at high modes; with
    ``require_positive`` (the default, suitable for solve paths) such modes
    raise.  Diagnostic sweeps that only need the 3x3 inverse pass False.
    """
    if spec.family != TRIANGULAR:
        raise ValueError("the Kumar-McDowell variant is defined on the triangular family")
    _check_mode(mode, eps)
    a, b, c = _symbol_parts(spec, mode[0], mode[1], eps, KUMAR_MCDOWELL)
    c = float(c)
    if require_positive and c <= 0:
        raise ValueError(f"nonpositive rotation block c={c:.6g} at mode {tuple(mode)}")
    return ModeSymbol(a, b, c, KUMAR_MCDOWELL, tuple(mode), eps)


def symbol_fields(spec: LatticeSpec, n: int, kind: str):
    """Vectorized (A, Im b, c) over the full frequency grid in FFT layout.

    Returns arrays of shape (n, n, 2, 2), (n, n, 2) and (n, n); eps = 1/n for
    the eps-dependent kinds.
    """
    if n < 1:
        raise ValueError(f"grid size must be positive, got {n}")
    ip, jp = freq_grids(n)
    eps = None if kind == CONTINUUM else 1.0 / n
    return _symbol_parts(spec, ip, jp, eps, kind)


def symbol_matrices(a: np.ndarray, b_imag: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Stack (A, Im b, c) field arrays into (..., 3, 3) complex blocks."""
    s = np.zeros(c.shape + (3, 3), dtype=complex)
    s[..., :2, :2] = a
    s[..., :2, 2] = 1j * b_imag
    s[..., 2, :2] = -1j * b_imag
    s[..., 2, 2] = c
    return s


@dataclass(frozen=True)
class SchurBlock:
    """Displacement block B = A + b (x) b / c and the elimination maps."""

    b_mat: np.ndarray  # (2, 2) real symmetric
    b_imag: np.ndarray
    c: float
    mode: tuple[int, int] = field(default=(0, 0))

    def reduce_rhs(self, f_hat: np.ndarray, tau_hat: complex) -> np.ndarray:
        """Right-hand side of the displacement equation: f - b*tau/c."""
        return np.asarray(f_hat, dtype=complex) - 1j * self.b_imag * (tau_hat / self.c)

    def recover_theta(self, tau_hat: complex, u_hat: np.ndarray) -> complex:
        """Back-substituted rotation: tau/c + b . u / c."""
        return tau_hat / self.c + 1j * np.dot(self.b_imag, u_hat) / self.c


def schur(sym: ModeSymbol) -> SchurBlock:
    """Schur complement of the rotation entry; requires c > 0.

    Computed in real arithmetic via b (x) b = -(Im b)(Im b)^T, which keeps
    B exactly real symmetric.
    """
    if sym.c <= 0:
        raise ValueError(f"Schur reduction needs c > 0, got c={sym.c:.6g} at mode {sym.mode}")
    b_mat = sym.a - np.outer(sym.b_imag, sym.b_imag) / sym.c
    return SchurBlock(b_mat, sym.b_imag, sym.c, sym.mode)


def schur_fields(a: np.ndarray, b_imag: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Vectorized Schur complement over symbol field arrays."""
    return a - b_imag[..., :, None] * b_imag[..., None, :] / c[..., None, None]


# Closed-form helpers for 2x2 real symmetric blocks (vectorized over leading axes).

def sym2_eigvals(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(lambda_min, lambda_max) of [[a, b], [b, d]] stacks."""
    a, b, d = m[..., 0, 0], m[..., 0, 1], m[..., 1, 1]
    mid = 0.5 * (a + d)
    rad = np.sqrt(0.25 * (a - d) ** 2 + b**2)
    return mid - rad, mid + rad


def sym2_spectral_norm(m: np.ndarray) -> np.ndarray:
    lo, hi = sym2_eigvals(m)
    return np.maximum(np.abs(lo), np.abs(hi))


def sym2_inv(m: np.ndarray) -> np.ndarray:
    a, b, d = m[..., 0, 0], m[..., 0, 1], m[..., 1, 1]
    det = a * d - b**2
    out = np.empty_like(m)
    out[..., 0, 0] = d
    out[..., 1, 1] = a
    out[..., 0, 1] = -b
    out[..., 1, 0] = -b
    return out / det[..., None, None]


def spectral_norm(m: np.ndarray) -> float:
    """Largest singular value of a 2x2 or 3x3 matrix.

    Hermitian inputs take the max-|eigenvalue| route; anything else falls
    back to singular values.
    """
    m = np.asarray(m)
    if m.shape not in ((2, 2), (3, 3)):
        raise ValueError(f"expected a 2x2 or 3x3 matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    if np.allclose(m, m.conj().T, atol=1e-12 * max(1.0, float(np.abs(m).max()))):
        return float(np.max(np.abs(np.linalg.eigvalsh(m))))
    return float(np.max(np.linalg.svd(m, compute_uv=False)))


def lambda_min_ratio(
    spec: LatticeSpec, mode: tuple[int, int], eps: float, kind: str
) -> float:
    """lambda_min(B[mode]) / ((i')^2 + (j')^2); positive on nonzero modes."""
    if tuple(mode) == (0, 0):
        raise ValueError("coercivity ratio is undefined at the zero mode")
    if kind == CONTINUUM:
        sym = symbol_continuum(spec, mode)
    elif kind == DISCRETE:
        sym = symbol_discrete(spec, mode, eps)
    else:
        sym = symbol_km(spec, mode, eps)
    lo, _ = sym2_eigvals(schur(sym).b_mat)
    return float(lo) / float(mode[0] ** 2 + mode[1] ** 2)


def verify_strange_identity(n_vectors: int, trials: int, seed: int = 0) -> float:
    """Max relative gap of the cosine-coupling decoupling identity.

    For vectors w_t and angles theta_t with c = sum_t (4 + 8 cos^2 theta_t),

        sum_t |w_t.v|^2 - (12/c) |sum_t cos(theta_t) w_t.v|^2
          = (4/c) (sum_t' sin^2 theta_t') sum_t |w_t.v|^2
            + (6/c) sum_t sum_{t' != t} |(cos(theta_t') w_t - cos(theta_t) w_t').v|^2.

    Both sides can cancel to zero while their terms stay O(1), so the gap is
    normalized by max(|lhs|, |rhs|, sum_t |w_t.v|^2).
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if n_vectors < 1:
        raise ValueError("n_vectors must be >= 1")
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        w = rng.standard_normal((n_vectors, 2))
        th = rng.uniform(0.0, 2 * np.pi, n_vectors)
        v = rng.standard_normal(2)
        c = np.sum(4.0 + 8.0 * np.cos(th) ** 2)
        dots = w @ v
        coupled = np.sum(np.cos(th) * dots)
        lhs = np.sum(dots**2) - (12.0 / c) * coupled**2
        # cross[t, t'] = cos(theta_t') w_t - cos(theta_t) w_t'
        cross = np.cos(th)[None, :, None] * w[:, None, :] - np.cos(th)[:, None, None] * w[None, :, :]
        cross_dots = cross @ v
        np.fill_diagonal(cross_dots, 0.0)
        rhs = (4.0 / c) * np.sum(np.sin(th) ** 2) * np.sum(dots**2)
        rhs += (6.0 / c) * np.sum(cross_dots**2)
        scale = max(abs(lhs), abs(rhs), float(np.sum(dots**2)))
        worst = max(worst, abs(lhs - rhs) / scale)
    return worst


@dataclass(frozen=True)
class SinCosBoundReport:
    """Smallest admissible constants for the sin/cos Taylor-defect bound."""

    exponents: tuple[int, int, int, int]
    n_list: tuple[int, ...]
    constants: tuple[float, ...]

    @property
    def constant(self) -> float:
        return max(self.constants)

    @property
    def spread(self) -> float:
        return max(self.constants) / min(self.constants)


def sincos_bound_check(
    m: int, n: int, m_circ: int, n_circ: int, n_list: tuple[int, ...] = (16, 32, 64, 128, 256)
) -> SinCosBoundReport:
    """Measure C in |sin^m sin^n / eps^(m+n) * cos^m° cos^n° - (pi i')^m (pi j')^n| <= C eps^2 R.

    R is (j')^(n+2) when m = m° = 0 and n >= 1, (i')^(m+2) when m >= 1 and
    n = n° = 0, and (i')^(m+2)(j')^n + (i')^m(j')^(n+2) otherwise.  The sweep
    runs over i', j' >= 0 with i' + j' >= 1; where R vanishes the defect must
    vanish too.
    """
    for e in (m, n, m_circ, n_circ):
        if e < 0 or e > 4:
            raise ValueError("exponents must lie in 0..4")
    constants = []
    for nn in n_list:
        eps = 1.0 / nn
        top = (nn - 1) // 2 if nn % 2 else nn // 2 - 1
        vals = np.arange(0, top + 1)
        ip, jp = np.meshgrid(vals, vals, indexing="ij")
        mask = (ip + jp) >= 1
        fi = ip.astype(float)
        fj = jp.astype(float)
        lhs = np.abs(
            np.sin(np.pi * fi * eps) ** m
            * np.sin(np.pi * fj * eps) ** n
            / eps ** (m + n)
            * np.cos(np.pi * fi * eps) ** m_circ
            * np.cos(np.pi * fj * eps) ** n_circ
            - (np.pi * fi) ** m * (np.pi * fj) ** n
        )
        if m == 0 and m_circ == 0 and n >= 1:
            rhs = fj ** (n + 2)
        elif m >= 1 and n == 0 and n_circ == 0:
            rhs = fi ** (m + 2)
        else:
            rhs = fi ** (m + 2) * fj**n + fi**m * fj ** (n + 2)
        rhs = eps**2 * rhs
        active = mask & (rhs > 0)
        degenerate = mask & (rhs == 0)
        if np.any(lhs[degenerate] > 1e-12):
            raise AssertionError(
                f"defect does not vanish where the bound does, exponents "
                f"({m},{n},{m_circ},{n_circ}), N={nn}"
            )
        constants.append(float((lhs[active] / rhs[active]).max()))
    return SinCosBoundReport((m, n, m_circ, n_circ), tuple(n_list), tuple(constants))


def pde_symbol_rectangular(rho_star: float, mode: tuple[int, int]) -> np.ndarray:
    """Fourier symbol of the rectangular micropolar balance system.

    Transcribed from the divergence form of the (generally non-symmetric)
    stress together with the angular momentum balance, substituting
    d/dx -> 2*pi*1j*i' and d/dy -> 2*pi*1j*j'.  Serves as an independent
    route to the rectangular continuum symbol.
    """
    ip, jp = mode
    dx = 2j * np.pi * ip
    dy = 2j * np.pi * jp
    s = np.zeros((3, 3), dtype=complex)
    # -d/dx(rho* du^x/dx) - d/dy(12 du^x/dy + 12 theta) = f^x
    s[0, 0] = -dx * rho_star * dx - dy * 12.0 * dy
    s[0, 2] = -dy * 12.0
    # -d/dx(12 du^y/dx - 12 theta) - d/dy(rho* du^y/dy) = f^y
    s[1, 1] = -dx * 12.0 * dx - dy * rho_star * dy
    s[1, 2] = dx * 12.0
    # -(12 du^y/dx - 12 du^x/dy - 24 theta) = tau
    s[2, 0] = 12.0 * dy
    s[2, 1] = -12.0 * dx
    s[2, 2] = 24.0
    return s


def pde_symbol_triangular(rho_star: float, mode: tuple[int, int]) -> np.ndarray:
    """Fourier symbol of the homogenized triangular operator.

    Built from the differential-operator coefficients (second-order block
    -M_k (p_a d_a + p_b d_b)^2, first-order block 12 l_k^perp (p_a d_a + p_b d_b),
    constant rotation block 12 per beam), substituting d_a -> 2*pi*1j*i',
    d_b -> 2*pi*1j*j'.
    """
    spec = LatticeSpec.triangular(rho_star)
    ip, jp = mode
    da = 2j * np.pi * ip
    db = 2j * np.pi * jp
    coeffs = [(1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
    s = np.zeros((3, 3), dtype=complex)
    for lk, (pa, pb) in zip(spec.directions, coeffs):
        lp = perp(lk)
        m = rho_star * np.outer(lk, lk) + 12.0 * np.outer(lp, lp)
        d = pa * da + pb * db
        s[:2, :2] += -m * d * d
        s[:2, 2] += 12.0 * lp * d
        s[2, :2] += -12.0 * lp * d
        s[2, 2] += 12.0
    return s


def stress_symbol_rectangular(
    rho_star: float, mode: tuple[int, int], u_hat: np.ndarray, theta_hat: complex
) -> np.ndarray:
    """Per-mode stress of the rectangular continuum model.

    The rotation enters the off-diagonal entries with opposite signs, so the
    stress is non-symmetric whenever theta_hat != 0.
    """
    ip, jp = mode
    dx = 2j * np.pi * ip
    dy = 2j * np.pi * jp
    ux, uy = np.asarray(u_hat, dtype=complex)
    return np.array(
        [
            [rho_star * dx * ux, 12.0 * dx * uy - 12.0 * theta_hat],
            [12.0 * dy * ux + 12.0 * theta_hat, rho_star * dy * uy],
        ]
    )
