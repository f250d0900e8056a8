"""Scalar functionals tracked along runs.

Conserved quantities, entropy, Fisher information (both the |grad f|^2/f
form with the {f = 0} convention and the 4|grad sqrt(f)|^2 cross-check),
weighted norms, level-set energies over time windows, smoothing-rate fits,
and distance to the normalized equilibrium.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid_field import (
    ScalarField,
    gradient_values,
    integrate,
    level_set_split,
    weight_field,
    weighted_lp_norm,
)
from .inequalities import InequalityReport, lower_bound_ratio, report_from_ratios


@dataclass(frozen=True)
class DiagnosticsRecord:
    t: float
    mass: float
    momentum: tuple
    energy: float
    entropy: float
    fisher: float
    fisher_sqrt_form: float
    linf: float
    lp_norms: dict
    c0_hat: float
    sup_A: float
    min_f_ratio: float = math.nan
    degenerate: bool = False


def record(
    state, p_list=(1.5,), m_list=(4.5,), f_floor: float = 1e-14, barrier=None
) -> DiagnosticsRecord:
    """All tracked functionals of one state by midpoint quadrature."""
    f = state.f
    grid = f.grid
    vol = grid.cell_volume()
    fv = f.values
    t = float(state.t)
    if not np.any(fv):
        return DiagnosticsRecord(
            t=t, mass=0.0, momentum=(0.0, 0.0, 0.0), energy=0.0, entropy=0.0,
            fisher=0.0, fisher_sqrt_form=0.0, linf=0.0,
            lp_norms={(p, m): 0.0 for p in p_list for m in m_list},
            c0_hat=state.coeffs.c0_hat, sup_A=state.coeffs.sup_A,
            degenerate=True,
        )

    mass = vol * float(np.sum(fv))
    c = grid.coords
    momentum = tuple(vol * float(np.sum(c[d] * fv)) for d in range(3))
    energy = vol * float(np.sum(grid.radius2 * fv))

    pos = fv > 0.0
    entropy = vol * float(np.sum(fv[pos] * np.log(fv[pos])))

    g = gradient_values(grid, fv)
    grad2 = g[0] ** 2 + g[1] ** 2 + g[2] ** 2
    live = fv > f_floor
    fisher = vol * float(np.sum(grad2[live] / fv[live]))
    gs = gradient_values(grid, np.sqrt(np.maximum(fv, 0.0)))
    fisher_sqrt = 4.0 * vol * float(np.sum(gs[0] ** 2 + gs[1] ** 2 + gs[2] ** 2))

    lp = {(p, m): weighted_lp_norm(f, p, m) for p in p_list for m in m_list}
    ratio = math.nan
    if barrier is not None:
        ratio = lower_bound_ratio(f, t, barrier)
    return DiagnosticsRecord(
        t=t, mass=mass, momentum=momentum, energy=energy, entropy=entropy,
        fisher=fisher, fisher_sqrt_form=fisher_sqrt, linf=float(np.max(fv)),
        lp_norms=lp, c0_hat=state.coeffs.c0_hat, sup_A=state.coeffs.sup_A,
        min_f_ratio=ratio,
    )


@dataclass(frozen=True)
class LevelSetWindow:
    level: float
    p: float
    m: float
    t1: float
    t2: float
    a_sup: float
    b_int: float
    e: float
    n_snapshots: int


def _excess_integrals(snap, level: float, p: float, m: float):
    grid = snap.f.grid
    vol = grid.cell_volume()
    excess = np.maximum(snap.f.values - level, 0.0)
    wm = weight_field(grid, m).values
    a_val = vol * float(np.sum(wm * excess ** p))
    ge = gradient_values(grid, excess ** (0.5 * p))
    wg = weight_field(grid, m - 3.0).values
    b_val = vol * float(np.sum(wg * (ge[0] ** 2 + ge[1] ** 2 + ge[2] ** 2)))
    return a_val, b_val


def level_set_energy(
    trajectory, level: float, p: float = 1.5, m: float = 4.5, window=None
) -> LevelSetWindow:
    """Windowed level-set energy: A = sup_t of the weighted p-mass of the
    excess, B = time integral (trapezoid over snapshots) of the weighted
    gradient term, E = A + B."""
    if level < 0.0:
        raise ValueError("level must be nonnegative")
    states = trajectory.states
    if window is None:
        window = (states[0].t, states[-1].t)
    t1, t2 = float(window[0]), float(window[1])
    span = max(abs(t1), abs(t2), 1.0)
    snaps = [s for s in states if t1 - 1e-12 * span <= s.t <= t2 + 1e-12 * span]
    if not snaps:
        raise ValueError("empty window: no snapshots in [t1, t2]")
    a_vals = []
    b_vals = []
    times = []
    for s in snaps:
        a_val, b_val = _excess_integrals(s, level, p, m)
        a_vals.append(a_val)
        b_vals.append(b_val)
        times.append(s.t)
    a_sup = max(a_vals)
    if len(snaps) > 1:
        bv = np.asarray(b_vals)
        b_int = float(np.sum(0.5 * (bv[1:] + bv[:-1]) * np.diff(times)))
    else:
        b_int = 0.0
    return LevelSetWindow(
        level=float(level), p=float(p), m=float(m), t1=t1, t2=t2,
        a_sup=a_sup, b_int=b_int, e=a_sup + b_int, n_snapshots=len(snaps),
    )


def eps_regularity(trajectory, K: float, window=None) -> float:
    """The smallness quantity: level-set energy at (K, p=3/2, m=9/2)."""
    return level_set_energy(trajectory, K, 1.5, 4.5, window).e


def smoothing_rate_fit(trajectory, p: float):
    """(log-log slope of |f|_inf vs t, sup of t^(3/2p) |f|_inf).

    The slope fit drops the first and last 5% of the time window; the sup
    runs over every positive-time snapshot.
    """
    snaps = [s for s in trajectory.states if s.t > 0.0]
    if len(snaps) < 5:
        raise ValueError("fewer than 5 usable snapshots in (0, T]")
    times = np.array([s.t for s in snaps])
    linf = np.array([float(np.max(s.f.values)) for s in snaps])
    expo = 3.0 / (2.0 * p)
    sup_const = float(np.max(times ** expo * linf))
    t_lo = times[0] + 0.05 * (times[-1] - times[0])
    t_hi = times[-1] - 0.05 * (times[-1] - times[0])
    keep = (times >= t_lo) & (times <= t_hi) & (linf > 0.0)
    if np.count_nonzero(keep) < 2:
        keep = linf > 0.0
    slope = float(np.polyfit(np.log(times[keep]), np.log(linf[keep]), 1)[0])
    return slope, sup_const


def moment_growth_check(trajectory, k: float) -> InequalityReport:
    """Ratio of the k-th weighted mass to (1 + t) along the trajectory."""
    if not k > 2.0:
        raise ValueError("k must exceed 2")
    ratios = []
    for s in trajectory.states:
        wk = weight_field(s.f.grid, k)
        moment = integrate(ScalarField(s.f.grid, wk.values * s.f.values))
        ratios.append(moment / (1.0 + s.t))
    return report_from_ratios(f"moment_growth_k{k:g}", ratios, None)


def maxwellian(grid) -> ScalarField:
    """The normalized equilibrium (mass 1, momentum 0, energy 3) sampled
    on the grid."""
    vals = (2.0 * math.pi) ** -1.5 * np.exp(-0.5 * grid.radius2)
    return ScalarField(grid, vals)


def equilibrium_distance(state, m: float = 4.5):
    """(L1, weighted L2_m, Linf) distance of f to the equilibrium.

    Requires the state to satisfy the normalization (mass 1, zero
    momentum, energy 3) within loose tolerances; anything else is a
    caller error since the fixed equilibrium would be the wrong target.
    """
    f = getattr(state, "f", state)
    grid = f.grid
    vol = grid.cell_volume()
    fv = f.values
    mass = vol * float(np.sum(fv))
    mom = [vol * float(np.sum(grid.coords[d] * fv)) for d in range(3)]
    energy = vol * float(np.sum(grid.radius2 * fv))
    if abs(mass - 1.0) > 0.05:
        raise ValueError(f"state is not normalized: mass {mass:.4g} != 1")
    if max(abs(q) for q in mom) > 0.05:
        raise ValueError("state is not normalized: nonzero momentum")
    if abs(energy - 3.0) > 0.3:
        raise ValueError(f"state is not normalized: energy {energy:.4g} != 3")
    diff = fv - maxwellian(grid).values
    l1 = vol * float(np.sum(np.abs(diff)))
    wm = weight_field(grid, m).values
    l2m = math.sqrt(vol * float(np.sum(wm * diff * diff)))
    return l1, l2m, float(np.max(np.abs(diff)))


def bulk_quantities(snap, K: float, m: float = 4.5):
    """(y, F, z, G) for one snapshot: excess and capped-bulk weighted
    3/2-masses and their gradient terms, at threshold K and cap 2K."""
    grid = snap.f.grid
    vol = grid.cell_volume()
    excess, _ = level_set_split(snap.f, K)
    _, bulk2 = level_set_split(snap.f, 2.0 * K)
    wm = weight_field(grid, m).values
    wg = weight_field(grid, m - 3.0).values
    ev = excess.values
    bv = np.maximum(bulk2.values, 0.0)
    y = vol * float(np.sum(wm * ev ** 1.5))
    ge = gradient_values(grid, ev ** 0.75)
    f_term = vol * float(np.sum(wg * (ge[0] ** 2 + ge[1] ** 2 + ge[2] ** 2)))
    z = vol * float(np.sum(wm * bv ** 1.5))
    gb = gradient_values(grid, bv ** 0.75)
    g_term = vol * float(np.sum(wg * (gb[0] ** 2 + gb[1] ** 2 + gb[2] ** 2)))
    return y, f_term, z, g_term
