"""Nonlocal diffusion coefficients by zero-padded spectral convolution.

The scalar kernel 1/(4 pi |v|) yields the Newtonian potential a[f] and the
matrix kernel Pi(v)/(8 pi |v|), Pi(v) = Id - v v^T/|v|^2, yields the
diffusion matrix A[f].  Kernels are tabulated once per grid on the doubled
(zero-padding) grid; the singular cell is replaced by the analytic average
of the kernel over that cell, which keeps the quadrature second order and
preserves tr A[f] = a[f] exactly at the table level.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import fft as sp_fft
from scipy.integrate import dblquad

from . import _accel
from .errors import ConfigError
from .grid_field import (
    ScalarField,
    SymMatrixField,
    VectorField,
    VelocityGrid,
    gradient_values,
    weight_field,
)
from .inequalities import InequalityReport

_FOUR_PI = 4.0 * np.pi
_EIGHT_PI = 8.0 * np.pi

_SCALAR_COMPONENT = "scalar"
_MATRIX_COMPONENTS = ("xx", "yy", "zz", "xy", "xz", "yz")


def fft_workers() -> int:
    """Worker count for the FFT pool; LANDAU_THREADS caps it."""
    raw = os.environ.get("LANDAU_THREADS", "").strip()
    if raw:
        try:
            workers = int(raw)
        except ValueError as exc:
            raise ConfigError("LANDAU_THREADS must be an integer") from exc
        return max(1, workers)
    return -1


@lru_cache(maxsize=1)
def _unit_cell_kernel_average() -> float:
    """Average of 1/(4 pi |v|) over the unit cube centered at the origin.

    Gnomonic projection onto the six faces turns the weakly singular
    integral into a smooth 2-D one:
    integral over [-1,1]^3 of 1/|v| = 3 Q with
    Q = integral over [-1,1]^2 of (1 + x^2 + y^2)^(-1/2).
    """
    q, _ = dblquad(
        lambda y, x: 1.0 / np.sqrt(1.0 + x * x + y * y),
        -1.0,
        1.0,
        -1.0,
        1.0,
        epsabs=1e-13,
        epsrel=1e-13,
    )
    return 3.0 * q / (16.0 * np.pi)


# Midpoint sums of the point-sampled kernel against a smooth f undershoot
# the continuum convolution by h^2 f(x) times a lattice constant.  Two
# pieces: the per-cell kernel deficits (cell average minus center value)
# sum to D = -0.00528220 over the unit lattice, each O(|j|^-5) since 1/r
# is harmonic; and the kernel-moment couplings to grad f and Hess f give
# exactly 1/12 - 1/24 through the identity Delta(K * f) = -f.  Loading
# D + 1/24 onto the origin slot cancels the whole h^2 term.  A third of
# it per diagonal entry does the same for the matrix kernel (the trace-
# free part of its Hessian coupling is all that survives) and keeps the
# trace identity exact.
_MIDPOINT_DEFICIT = 0.03638447


@dataclass(frozen=True)
class KernelTable:
    """Kernel values on the doubled grid, wrap-ordered for circular FFT use.

    Offsets run over -(n-1)..(n-1) cells per axis; the unused slot at
    offset n never multiplies retained output cells.  ``matrix`` holds the
    six symmetric components in the order xx, yy, zz, xy, xz, yz, and its
    trace equals the scalar table nodewise (tr Pi/(8 pi r) = 1/(4 pi r)).
    """

    grid: VelocityGrid
    scalar: np.ndarray
    matrix: np.ndarray
    scalar_hat: np.ndarray
    matrix_hat: np.ndarray


@dataclass(frozen=True)
class CoefficientSet:
    a: ScalarField
    grad_a: VectorField
    A: SymMatrixField
    c0_hat: float
    sup_A: float


def build_kernel_table(grid: VelocityGrid) -> KernelTable:
    n = grid.n
    h = grid.h
    m = 2 * n
    j = np.arange(m)
    # wrap order: index j holds cell offset j for j <= n, j - 2n beyond
    off = np.where(j <= n, j, j - m).astype(float) * h
    ox = off[:, None, None]
    oy = off[None, :, None]
    oz = off[None, None, :]
    r2 = ox * ox + oy * oy + oz * oz
    r2[0, 0, 0] = 1.0  # placeholder, origin cell overwritten below
    r = np.sqrt(r2)

    scalar = 1.0 / (_FOUR_PI * r)
    s0 = (_unit_cell_kernel_average() + _MIDPOINT_DEFICIT) / h
    scalar[0, 0, 0] = s0

    pref = 1.0 / (_EIGHT_PI * r)
    matrix = np.empty((6,) + r.shape)
    matrix[0] = pref * (1.0 - ox * ox / r2)
    matrix[1] = pref * (1.0 - oy * oy / r2)
    matrix[2] = pref * (1.0 - oz * oz / r2)
    matrix[3] = pref * (-ox * oy / r2)
    matrix[4] = pref * (-ox * oz / r2)
    matrix[5] = pref * (-oy * oz / r2)
    # origin slot of the matrix kernel: cubic symmetry kills the
    # off-diagonal averages and splits the scalar slot evenly
    matrix[0, 0, 0, 0] = matrix[1, 0, 0, 0] = matrix[2, 0, 0, 0] = s0 / 3.0
    matrix[3, 0, 0, 0] = matrix[4, 0, 0, 0] = matrix[5, 0, 0, 0] = 0.0

    workers = fft_workers()
    scalar_hat = sp_fft.rfftn(scalar, workers=workers)
    matrix_hat = sp_fft.rfftn(matrix, axes=(1, 2, 3), workers=workers)
    return KernelTable(
        grid=grid,
        scalar=scalar,
        matrix=matrix,
        scalar_hat=scalar_hat,
        matrix_hat=matrix_hat,
    )


_TABLE_CACHE: dict[tuple[int, float], KernelTable] = {}


def kernel_table_for(grid: VelocityGrid) -> KernelTable:
    key = (grid.n, grid.l)
    table = _TABLE_CACHE.get(key)
    if table is None:
        table = build_kernel_table(grid)
        if len(_TABLE_CACHE) >= 4:
            _TABLE_CACHE.pop(next(iter(_TABLE_CACHE)))
        _TABLE_CACHE[key] = table
    return table


def _padded_hat(f: ScalarField) -> np.ndarray:
    n = f.grid.n
    m = 2 * n
    padded = np.zeros((m, m, m))
    padded[:n, :n, :n] = f.values
    return sp_fft.rfftn(padded, workers=fft_workers())


def convolve_free_space(
    f: ScalarField, table: KernelTable, component: str = _SCALAR_COMPONENT
) -> ScalarField:
    """Linear free-space convolution of f against one kernel component.

    Equals the direct sum h^3 sum_w K(v - w) f(w) to round-off: the zero
    padding guarantees no periodic image reaches a retained output cell.
    """
    if table.grid is not f.grid and (table.grid.n, table.grid.l) != (f.grid.n, f.grid.l):
        raise ValueError("kernel table grid does not match field grid")
    if component == _SCALAR_COMPONENT:
        khat = table.scalar_hat
    else:
        try:
            khat = table.matrix_hat[_MATRIX_COMPONENTS.index(component)]
        except ValueError:
            raise ValueError(f"unknown kernel component {component!r}") from None
    n = f.grid.n
    m = 2 * n
    fhat = _padded_hat(f)
    full = sp_fft.irfftn(fhat * khat, s=(m, m, m), workers=fft_workers())
    vals = full[:n, :n, :n] * f.grid.cell_volume()
    return ScalarField(f.grid, np.ascontiguousarray(vals))


def direct_convolve(
    f: ScalarField, table: KernelTable, component: str = _SCALAR_COMPONENT
) -> ScalarField:
    """Reference convolution by explicit summation over all cell pairs.

    Same kernel table as the spectral path, no transforms anywhere; cost
    grows with n^6, so keep n small.  Kept as an independent route for
    verifying the spectral result.
    """
    if table.grid is not f.grid and (table.grid.n, table.grid.l) != (f.grid.n, f.grid.l):
        raise ValueError("kernel table grid does not match field grid")
    if component == _SCALAR_COMPONENT:
        ker = table.scalar
    else:
        try:
            ker = table.matrix[_MATRIX_COMPONENTS.index(component)]
        except ValueError:
            raise ValueError(f"unknown kernel component {component!r}") from None
    n = f.grid.n
    m = 2 * n
    idx = np.indices((n, n, n)).reshape(3, -1).T
    flat = f.values.reshape(-1)
    total = flat.size
    out = np.empty(total)
    chunk = max(1, (1 << 22) // total)
    for start in range(0, total, chunk):
        stop = min(start + chunk, total)
        d = idx[start:stop, None, :] - idx[None, :, :]
        kv = ker[d[..., 0] % m, d[..., 1] % m, d[..., 2] % m]
        out[start:stop] = kv @ flat
    out *= f.grid.cell_volume()
    return ScalarField(f.grid, out.reshape(n, n, n))


def compute_coefficients(f: ScalarField, table: KernelTable | None = None) -> CoefficientSet:
    """Potential a[f], its gradient, diffusion matrix A[f], and spectral range.

    One forward transform of the padded f is shared by all seven kernel
    components; grad a is obtained by differencing the potential so the
    flux scheme sees the exact discrete identity grad_a = gradient(a).
    """
    grid = f.grid
    mass = grid.cell_volume() * float(np.sum(f.values))
    if not mass > 0.0:
        raise ValueError("f has nonpositive total mass; ellipticity undefined")
    if table is None:
        table = kernel_table_for(grid)
    n = grid.n
    m = 2 * n
    workers = fft_workers()
    fhat = _padded_hat(f)
    scale = grid.cell_volume()

    a_full = sp_fft.irfftn(fhat * table.scalar_hat, s=(m, m, m), workers=workers)
    a_vals = np.ascontiguousarray(a_full[:n, :n, :n]) * scale

    mat_full = sp_fft.irfftn(
        fhat[None, ...] * table.matrix_hat, s=(m, m, m), axes=(1, 2, 3), workers=workers
    )
    a6 = np.ascontiguousarray(mat_full[:, :n, :n, :n]) * scale

    grad_a = gradient_values(grid, a_vals)
    lmin, lmax = _accel.eig_range(a6)
    w3 = weight_field(grid, 3.0).values
    c0_hat = float(np.min(w3 * lmin))
    sup_a = float(np.max(lmax))
    return CoefficientSet(
        a=ScalarField(grid, a_vals),
        grad_a=VectorField(grid, grad_a),
        A=SymMatrixField(grid, a6),
        c0_hat=c0_hat,
        sup_A=sup_a,
    )


def verify_coefficient_bounds(
    f: ScalarField, coeffs: CoefficientSet | None = None
) -> InequalityReport:
    """Empirical ratios for the five coefficient upper bounds.

    Each ratio is LHS / (RHS without its unknown constant), at fixed
    interpolation parameters: (1) |A| vs L1^(1/3) L2^(2/3), (2) |A| vs
    L1^(2/3) Linf^(1/3), (3) |grad a| vs L1^(1/3) Linf^(2/3), (4) |grad a|
    vs L2^(2/3) Linf^(1/3), (5) pointwise <v>^2 (|grad a| + |grad A|) vs
    the L4 norm with weight 10.
    """
    grid = f.grid
    vol = grid.cell_volume()
    fv = np.maximum(f.values, 0.0)
    linf = float(np.max(fv))
    if linf <= 0.0:
        return InequalityReport(
            name="coefficient_bounds",
            corpus_size=0,
            ratios=(),
            max_ratio=float("nan"),
            halves_spread=float("nan"),
            passed=False,
            notes="degenerate: zero field",
        )
    if coeffs is None:
        coeffs = compute_coefficients(f)
    m1 = vol * float(np.sum(fv))
    l2 = float(np.sqrt(vol * np.sum(fv * fv)))
    w10 = weight_field(grid, 10.0).values
    l4_10 = float((vol * np.sum(w10 * fv ** 4)) ** 0.25)

    ga = coeffs.grad_a.values
    grad_a_mag = np.sqrt(ga[0] ** 2 + ga[1] ** 2 + ga[2] ** 2)
    grad_a_max = float(np.max(grad_a_mag))

    # Frobenius norm of grad A, off-diagonal components doubled
    acc = np.zeros_like(fv)
    for comp in range(6):
        g = gradient_values(grid, coeffs.A.values[comp])
        sq = g[0] ** 2 + g[1] ** 2 + g[2] ** 2
        acc += sq if comp < 3 else 2.0 * sq
    grad_a_mat = np.sqrt(acc)

    w2 = grid.bracket2
    pointwise = float(np.max(w2 * (grad_a_mag + grad_a_mat)))

    ratios = (
        coeffs.sup_A / (m1 ** (1.0 / 3.0) * l2 ** (2.0 / 3.0)),
        coeffs.sup_A / (m1 ** (2.0 / 3.0) * linf ** (1.0 / 3.0)),
        grad_a_max / (m1 ** (1.0 / 3.0) * linf ** (2.0 / 3.0)),
        grad_a_max / (l2 ** (2.0 / 3.0) * linf ** (1.0 / 3.0)),
        pointwise / l4_10,
    )
    finite = all(np.isfinite(r) and r > 0.0 for r in ratios)
    return InequalityReport(
        name="coefficient_bounds",
        corpus_size=1,
        ratios=ratios,
        max_ratio=max(ratios),
        halves_spread=0.0,
        passed=finite,
        notes="parameters: (q=2), (p=1), (q=inf), (p=2), (p=4, m=10)",
    )
