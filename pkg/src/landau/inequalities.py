"""Numerical verification toolkit for the functional inequalities.

Unknown absolute constants are estimated, never asserted: a check passes
when the empirical constant is finite and stable across independent corpus
halves.  Corpora are seeded and recorded so reports are reproducible.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import HypothesisError
from .grid_field import (
    ScalarField,
    SymMatrixField,
    VelocityGrid,
    gradient_values,
    weight_field,
)

# sharp constant in (integral u^6)^(1/3) <= C integral |grad u|^2 on R^3
SOBOLEV_CONSTANT = (2.0 / math.pi) ** (4.0 / 3.0) / 3.0

CRITICAL = "critical"
SUBCRITICAL = "subcritical"


@dataclass(frozen=True)
class InequalityReport:
    name: str
    corpus_size: int
    ratios: tuple
    max_ratio: float
    halves_spread: float
    passed: bool
    notes: str = ""
    seed: int | None = None


def _halves_spread(ratios) -> float:
    """Relative gap between the max over even- and odd-indexed samples."""
    finite = [r for r in ratios if np.isfinite(r) and r > 0.0]
    if len(finite) < 4:
        return 0.0
    a = max(finite[0::2])
    b = max(finite[1::2])
    top = max(a, b)
    return abs(a - b) / top if top > 0.0 else 0.0


def report_from_ratios(name, ratios, seed, notes="", extra_pass=True) -> InequalityReport:
    finite = [r for r in ratios if np.isfinite(r)]
    spread = _halves_spread(ratios)
    ok = (
        len(finite) > 0
        and all(np.isfinite(r) for r in ratios)
        and max(finite) > 0.0
        and spread <= 0.2
        and extra_pass
    )
    return InequalityReport(
        name=name,
        corpus_size=len(ratios),
        ratios=tuple(float(r) for r in ratios),
        max_ratio=float(max(finite)) if finite else float("nan"),
        halves_spread=float(spread),
        passed=bool(ok),
        notes=notes,
        seed=seed,
    )


# ---------------------------------------------------------------------------
# corpora


def make_corpus(grid: VelocityGrid, size: int, seed: int) -> list[ScalarField]:
    """Seeded corpus of smooth decaying fields: Gaussians, mixtures, tails."""
    rng = np.random.default_rng(seed)
    coords = grid.coords
    fields = []
    for i in range(size):
        kind = i % 3
        amp = 10.0 ** rng.uniform(-1.0, 1.0)
        if kind == 0:
            center = rng.uniform(-1.5, 1.5, size=3)
            width = rng.uniform(0.4, 1.6)
            r2 = sum((coords[d] - center[d]) ** 2 for d in range(3))
            vals = amp * np.exp(-0.5 * r2 / width ** 2)
        elif kind == 1:
            vals = np.zeros_like(coords[0])
            for _ in range(int(rng.integers(2, 4))):
                center = rng.uniform(-1.5, 1.5, size=3)
                width = rng.uniform(0.4, 1.2)
                w = rng.uniform(0.2, 1.0)
                r2 = sum((coords[d] - center[d]) ** 2 for d in range(3))
                vals = vals + amp * w * np.exp(-0.5 * r2 / width ** 2)
        else:
            center = rng.uniform(-1.0, 1.0, size=3)
            k_tail = rng.uniform(6.0, 12.0)
            r2 = sum((coords[d] - center[d]) ** 2 for d in range(3))
            vals = amp * (1.0 + r2) ** (-0.5 * k_tail)
        fields.append(ScalarField(grid, vals))
    return fields


def make_poincare_corpus(
    grid: VelocityGrid, size: int, seed: int
) -> list[tuple[ScalarField, ScalarField]]:
    """Seeded (g, phi) pairs with amplitudes stratified over six decades.

    The stratification makes the corpus envelope trace the epsilon power
    law of the split instead of a single sample's linear cutoff.
    """
    rng = np.random.default_rng(seed)
    coords = grid.coords
    amps = np.logspace(-3.0, 3.0, size) * rng.uniform(0.95, 1.05, size=size)
    cutoff = build_cutoff(0.3 * grid.l)
    radius = np.sqrt(grid.radius2)
    phi_cut = ScalarField(grid, cutoff.evaluate(radius))
    phi_one = ScalarField(grid, np.ones_like(radius))
    pairs = []
    for i in range(size):
        center = rng.normal(0.0, 0.1, size=3)
        width = rng.uniform(0.9, 1.1)
        r2 = sum((coords[d] - center[d]) ** 2 for d in range(3))
        g = ScalarField(grid, amps[i] * np.exp(-0.5 * r2 / width ** 2))
        pairs.append((g, phi_cut if i % 2 else phi_one))
    return pairs


# ---------------------------------------------------------------------------
# inequality checks


def check_weighted_sobolev(
    corpus: list[ScalarField], k: float, seed: int | None = None
) -> InequalityReport:
    """Empirical constant for the weighted Sobolev bound at weight index k.

    Ratio per sample: [(int <v>^(3k-9) f^6)^(1/3) + C1 int <v>^(k-5) f^2]
    over int <v>^(k-3) |grad f|^2, with C1 = (k-3)(k-1)/4 relative to the
    Sobolev constant.
    """
    if k < 3.0:
        raise ValueError("k must be at least 3")
    c1 = SOBOLEV_CONSTANT * (k - 3.0) * (k - 1.0) / 4.0
    ratios = []
    for f in corpus:
        grid = f.grid
        vol = grid.cell_volume()
        fv = f.values
        w_top = weight_field(grid, 3.0 * k - 9.0).values
        w_mid = weight_field(grid, k - 5.0).values
        w_grad = weight_field(grid, k - 3.0).values
        g = gradient_values(grid, fv)
        rhs = vol * float(np.sum(w_grad * (g[0] ** 2 + g[1] ** 2 + g[2] ** 2)))
        if rhs <= 0.0:
            continue  # constant sample, degenerate
        lhs1 = (vol * float(np.sum(w_top * fv ** 6))) ** (1.0 / 3.0)
        lhs2 = c1 * vol * float(np.sum(w_mid * fv * fv))
        ratios.append((lhs1 + lhs2) / rhs)
    return report_from_ratios(
        f"weighted_sobolev_k{k:g}",
        ratios,
        seed,
        notes=f"c1={c1:.6g} (relative Sobolev constant {SOBOLEV_CONSTANT:.6g})",
    )


def interpolation_weight(p: float, q: float, k: float) -> float:
    """The forced moment index m for the L^q interpolation bound."""
    if not (1.0 < p < q < 3.0 * p):
        raise ValueError("need 1 < p < q < 3p")
    return (2.0 * k * p - (k - 3.0) * (3.0 * q - 3.0 * p)) / (3.0 * p - q)


def check_interpolation(
    corpus: list[ScalarField], p: float, q: float, k: float, seed: int | None = None
) -> InequalityReport:
    """Empirical constant for int <v>^k f^q against mass and gradient terms."""
    m = interpolation_weight(p, q, k)
    expo_mass = (3.0 * p - q) / (2.0 * p)
    expo_grad = 3.0 * (q - p) / (2.0 * p)
    ratios = []
    for f in corpus:
        grid = f.grid
        vol = grid.cell_volume()
        fv = np.maximum(f.values, 0.0)
        w_k = weight_field(grid, k).values
        w_m = weight_field(grid, m).values
        w_g = weight_field(grid, k - 3.0).values
        num = vol * float(np.sum(w_k * fv ** q))
        mass = vol * float(np.sum(w_m * fv ** p))
        g = gradient_values(grid, fv ** (0.5 * p))
        grad = vol * float(np.sum(w_g * (g[0] ** 2 + g[1] ** 2 + g[2] ** 2)))
        if mass <= 0.0 or grad <= 0.0:
            continue
        ratios.append(num / (mass ** expo_mass * grad ** expo_grad))
    return report_from_ratios(
        f"interpolation_p{p:g}_q{q:g}_k{k:g}",
        ratios,
        seed,
        notes=f"m={m:.6g}",
    )


def check_eps_poincare(
    pairs: list[tuple[ScalarField, ScalarField]],
    q: float,
    eps_grid,
    p: float = 2.0,
    seed: int | None = None,
) -> InequalityReport:
    """Two-term epsilon split of the weighted mass of g^(p+1).

    For each epsilon the fitted constant is the max over samples of
    LHS / [eps G + eps^(-3/(2q-3)) N M]; the envelope of the second-term
    coefficient over the stratified corpus must follow the predicted
    eps^(-3/(2q-3)) power law.
    """
    if q <= 1.5:
        raise ValueError("q must exceed 3/2")
    eps_grid = np.asarray(sorted(float(e) for e in eps_grid))
    if eps_grid.size < 2 or np.any(eps_grid <= 0.0):
        raise ValueError("eps grid must hold at least two positive values")
    theta = 3.0 / (2.0 * q - 3.0)

    samples = []
    for g, phi in pairs:
        grid = g.grid
        vol = grid.cell_volume()
        gv = np.maximum(g.values, 0.0)
        pv = phi.values
        w92 = weight_field(grid, 4.5).values
        w32 = weight_field(grid, 1.5).values
        lhs = vol * float(np.sum(w92 * pv * pv * gv ** (p + 1.0)))
        grad = gradient_values(grid, pv * gv ** (0.5 * p))
        gterm = vol * float(np.sum(w32 * (grad[0] ** 2 + grad[1] ** 2 + grad[2] ** 2)))
        mterm = vol * float(np.sum(w92 * pv * pv * gv ** p))
        nq = vol * float(np.sum(w92 * gv ** q))
        if mterm <= 0.0 or nq <= 0.0:
            continue  # degenerate sample, skipped
        nfac = nq ** (2.0 / (2.0 * q - 3.0))
        samples.append((lhs, gterm, mterm, nfac))

    c_of_eps = []
    d_of_eps = []
    mid_ratios = None
    for idx, eps in enumerate(eps_grid):
        ratios = []
        dvals = []
        for lhs, gterm, mterm, nfac in samples:
            rhs = eps * gterm + eps ** (-theta) * nfac * mterm
            ratios.append(lhs / rhs)
            dvals.append(max(lhs - eps * gterm, 0.0) / (nfac * mterm))
        c_of_eps.append(max(ratios))
        d_of_eps.append(max(dvals))
        if idx == eps_grid.size // 2:
            mid_ratios = ratios
    d_of_eps = np.asarray(d_of_eps)
    usable = d_of_eps > 0.0
    if np.count_nonzero(usable) >= 2:
        slope = float(
            np.polyfit(np.log(eps_grid[usable]), np.log(d_of_eps[usable]), 1)[0]
        )
    else:
        slope = float("nan")
    predicted = -theta
    slope_ok = np.isfinite(slope) and abs(slope - predicted) <= 0.1
    notes = (
        f"second-term slope {slope:.4f} vs predicted {predicted:.4f}; "
        f"fitted C per eps: "
        + ", ".join(f"{e:g}:{c:.4g}" for e, c in zip(eps_grid, c_of_eps))
    )
    return report_from_ratios(
        f"eps_poincare_q{q:g}_p{p:g}",
        mid_ratios or [],
        seed,
        notes=notes,
        extra_pass=slope_ok,
    )


# ---------------------------------------------------------------------------
# smooth cutoff


def _bump(x: np.ndarray) -> np.ndarray:
    safe = np.where(x > 0.0, x, 1.0)
    return np.where(x > 0.0, np.exp(-1.0 / safe), 0.0)


def _bump_prime(x: np.ndarray) -> np.ndarray:
    safe = np.where(x > 0.0, x, 1.0)
    return np.where(x > 0.0, np.exp(-1.0 / safe) / (safe * safe), 0.0)


def _phi(x: np.ndarray) -> np.ndarray:
    u = _bump(2.0 - x)
    w = _bump(x - 1.0)
    rho = u / (u + w)
    return rho * rho


def _phi_prime(x: np.ndarray) -> np.ndarray:
    u = _bump(2.0 - x)
    w = _bump(x - 1.0)
    du = -_bump_prime(2.0 - x)
    dw = _bump_prime(x - 1.0)
    denom = (u + w) ** 2
    rho = u / (u + w)
    drho = (du * w - u * dw) / denom
    return 2.0 * rho * drho


@dataclass(frozen=True)
class CutoffProfile:
    """Radial cutoff equal to 1 on [0, R] and 0 beyond 2R.

    ``c_hat`` is the mesh maximum of R |grad eta| / min(sqrt(eta),
    sqrt(1 - eta)), so it certifies both square-root gradient bounds at
    once; the construction depends on r/R only, making c_hat exactly
    scale-invariant.
    """

    R: float
    r: np.ndarray
    eta: np.ndarray
    grad_eta: np.ndarray
    c_hat: float

    def evaluate(self, radius: np.ndarray) -> np.ndarray:
        return _phi(np.asarray(radius, dtype=float) / self.R)

    def gradient_magnitude(self, radius: np.ndarray) -> np.ndarray:
        return np.abs(_phi_prime(np.asarray(radius, dtype=float) / self.R)) / self.R


def build_cutoff(R: float, mesh_points: int = 22001) -> CutoffProfile:
    if not R > 0.0:
        raise ValueError("R must be positive")
    if mesh_points < 11000:
        raise ValueError("mesh must resolve the transition annulus")
    x = np.linspace(0.0, 2.2, mesh_points)
    eta = _phi(x)
    dphi = np.abs(_phi_prime(x))
    denom = np.minimum(np.sqrt(eta), np.sqrt(np.maximum(1.0 - eta, 0.0)))
    mask = (denom > 0.0) & (dphi > 0.0)
    c_hat = float(np.max(dphi[mask] / denom[mask]))
    return CutoffProfile(
        R=float(R),
        r=x * R,
        eta=eta,
        grad_eta=dphi / R,
        c_hat=c_hat,
    )


# ---------------------------------------------------------------------------
# barriers


def critical_weight_constant(n: float, k: float) -> float:
    """Coefficient of the transport terms in the critical barrier estimate.

    Collects the Young split of the drift against the weighted gradient for
    weight exponents (n, k): 3 (n + k)^2 + (9/2) k - 3 n.
    """
    return 3.0 * (n + k) ** 2 + 4.5 * k - 3.0 * n


def barrier_sufficient_rate(
    regime: str,
    k: float,
    *,
    n_weight: float = -6.0,
    m_bound: float | None = None,
    trace_bound: float | None = None,
    ellipticity: float | None = None,
) -> float:
    """Sufficient barrier decay rate for the given coefficient bounds.

    Critical regime (exp(-eta t^(2/3)) barrier): eta = (3/2) C(n,k) M with
    M = sup_t t^(1/3) |A[f]|_inf.  Subcritical regime (exp(-eta t)
    barrier, k > 5): with C1 = k * trace bound and C2 = k (k+2) *
    ellipticity floor, delta = min(C2/C1, 5/2) and
    eta = C1 (5/(2 delta))^(10/3); the clamp keeps eta >= C1, which is
    pointwise sufficient on its own.
    """
    if regime == CRITICAL:
        if m_bound is None or not m_bound > 0.0:
            raise ValueError("critical regime needs the bound M > 0")
        return 1.5 * critical_weight_constant(n_weight, k) * m_bound
    if regime == SUBCRITICAL:
        if k <= 5.0:
            raise HypothesisError("hypothesis: k > 5 required")
        if trace_bound is None or not trace_bound > 0.0:
            raise ValueError("subcritical regime needs a positive trace bound")
        if ellipticity is None or not ellipticity > 0.0:
            raise ValueError("subcritical regime needs a positive ellipticity floor")
        c1 = k * trace_bound
        c2 = k * (k + 2.0) * ellipticity
        delta = min(c2 / c1, 2.5)
        return c1 * (5.0 / (2.0 * delta)) ** (10.0 / 3.0)
    raise ValueError(f"unknown regime {regime!r}")


@dataclass(frozen=True)
class BarrierParams:
    """Pointwise barrier a exp(-eta t^(2/3)) <v>^-k or a exp(-eta t) <v>^-k."""

    a: float
    k: float
    eta_rate: float
    regime: str
    n_weight: float = -6.0
    m_bound: float | None = None
    trace_bound: float | None = None
    ellipticity: float | None = None

    def __post_init__(self) -> None:
        if not self.a > 0.0:
            raise ValueError("barrier amplitude a must be positive")
        if not self.k > 0.0:
            raise ValueError("barrier exponent k must be positive")
        if self.regime not in (CRITICAL, SUBCRITICAL):
            raise ValueError(f"unknown regime {self.regime!r}")
        has_bounds = (
            self.m_bound is not None
            if self.regime == CRITICAL
            else self.trace_bound is not None and self.ellipticity is not None
        )
        if has_bounds:
            needed = barrier_sufficient_rate(
                self.regime,
                self.k,
                n_weight=self.n_weight,
                m_bound=self.m_bound,
                trace_bound=self.trace_bound,
                ellipticity=self.ellipticity,
            )
            if self.eta_rate < needed * (1.0 - 1e-12):
                raise ValueError("eta_rate below the sufficient value for the bounds")

    def level(self, t: float) -> float:
        if self.regime == CRITICAL:
            return self.a * math.exp(-self.eta_rate * t ** (2.0 / 3.0))
        return self.a * math.exp(-self.eta_rate * t)


def make_barrier(
    regime: str,
    a: float,
    k: float,
    *,
    n_weight: float = -6.0,
    m_bound: float | None = None,
    trace_bound: float | None = None,
    ellipticity: float | None = None,
) -> BarrierParams:
    eta = barrier_sufficient_rate(
        regime,
        k,
        n_weight=n_weight,
        m_bound=m_bound,
        trace_bound=trace_bound,
        ellipticity=ellipticity,
    )
    return BarrierParams(
        a=a,
        k=k,
        eta_rate=eta,
        regime=regime,
        n_weight=n_weight,
        m_bound=m_bound,
        trace_bound=trace_bound,
        ellipticity=ellipticity,
    )


@dataclass(frozen=True)
class MonitorSeries:
    times: np.ndarray
    values: np.ndarray
    hypothesis_ok: bool
    max_increase: float


def minimum_principle_monitor(
    trajectory, params: BarrierParams, n_weight: float = -6.0
) -> MonitorSeries:
    """Weighted level-set mass of the barrier excess along a trajectory.

    Tracks int <v>^n (level(t) - f <v>^k)_+^(3/2) per snapshot; for data
    that starts above the barrier it should be identically zero at t = 0
    and nonincreasing afterwards.
    """
    if n_weight >= -3.0:
        raise ValueError("n_weight must be below -3")
    states = trajectory.states
    if not states:
        raise ValueError("trajectory has no snapshots")
    grid = states[0].f.grid
    vol = grid.cell_volume()
    wn = weight_field(grid, n_weight).values
    wk = weight_field(grid, params.k).values
    times = np.array([s.t for s in states])
    values = np.empty_like(times)
    for i, snap in enumerate(states):
        excess = np.maximum(params.level(snap.t) - snap.f.values * wk, 0.0)
        values[i] = vol * np.sum(wn * excess ** 1.5)
    increases = np.diff(values)
    max_increase = float(np.max(increases)) if increases.size else 0.0
    return MonitorSeries(
        times=times,
        values=values,
        hypothesis_ok=bool(values[0] == 0.0),
        max_increase=max_increase,
    )


def lower_bound_ratio(f: ScalarField, t: float, params: BarrierParams) -> float:
    """min over nodes of f <v>^k / barrier level at time t."""
    wk = weight_field(f.grid, params.k).values
    return float(np.min(f.values * wk) / params.level(t))


def subcritical_barrier_residual(
    f: ScalarField, A: SymMatrixField, params: BarrierParams, t: float
) -> float:
    """Max over nodes of d_t psi - A[f]:Hess psi - f psi for the barrier psi.

    Nonpositive everywhere means psi is a subsolution at this state.
    """
    if params.regime != SUBCRITICAL:
        raise ValueError("residual check applies to the subcritical barrier")
    grid = f.grid
    k = params.k
    c = grid.coords
    b2 = grid.bracket2
    a6 = A.values
    vav = (
        c[0] * c[0] * a6[0]
        + c[1] * c[1] * a6[1]
        + c[2] * c[2] * a6[2]
        + 2.0 * (c[0] * c[1] * a6[3] + c[0] * c[2] * a6[4] + c[1] * c[2] * a6[5])
    )
    tr = a6[0] + a6[1] + a6[2]
    psi = params.level(t) * weight_field(grid, -k).values
    normalized = (
        -params.eta_rate
        - k * (k + 2.0) * vav / (b2 * b2)
        + k * tr / b2
        - f.values
    )
    return float(np.max(normalized * psi))
