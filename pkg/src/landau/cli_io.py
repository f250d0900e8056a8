"""Configuration, experiment orchestration, persistence, and plots.

INI-style config text maps onto nested dataclasses; initial-data families
are sampled and discretely renormalized to mass 1, momentum 0, energy 3;
results land on disk as CSV (repr-formatted cells so reruns are
byte-identical), raw LCF1 snapshots, hand-rolled SVG polylines, and a
summary text block.  The argparse front end maps error classes onto exit
codes: config 2, numeric 3, failed hypothesis 4, failed checks 1.
"""
from __future__ import annotations

import argparse
import configparser
import math
import os
import struct
import sys
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import degiorgi, diagnostics, solver
from .coefficients import convolve_free_space, direct_convolve, kernel_table_for
from .errors import ConfigError, HypothesisError, LandauError, exit_code_for
from .grid_field import ScalarField, VelocityGrid, make_grid
from .inequalities import (
    CRITICAL,
    SUBCRITICAL,
    BarrierParams,
    barrier_sufficient_rate,
    build_cutoff,
    check_eps_poincare,
    check_interpolation,
    check_weighted_sobolev,
    lower_bound_ratio,
    make_corpus,
    make_poincare_corpus,
    minimum_principle_monitor,
)

_FAMILIES = ("maxwellian", "bimaxwellian", "narrow_gaussian", "polytail", "mixture")

LCF_MAGIC = b"LCF1"
_LCF_HEADER = struct.Struct("<4sIdd")

CSV_SCHEMA_LINE = "# schema=1"


# ---------------------------------------------------------------------------
# configuration


@dataclass
class GridConfig:
    n: int = 64
    l: float = 8.0


@dataclass
class InitialDataConfig:
    family: str = "maxwellian"
    sigma: float | None = None
    separation: float = 1.2
    k: float = 10.0
    R: float = 1.0
    seed: int = 2026
    modes: int = 3


@dataclass
class RunControlConfig:
    T: float = 1.0
    cfl: float = 0.5
    dt_min: float = 1e-9
    dt_max: float = 0.02
    snapshot_cadence: int = 50
    positivity_clip: bool = False


@dataclass
class DiagnosticsConfig:
    p_list: tuple = (1.5,)
    m_list: tuple = (4.5,)
    f_floor: float = 1e-14


@dataclass
class EpsRegularityConfig:
    enabled: bool = False
    K: float | None = None


@dataclass
class LadderConfig:
    enabled: bool = False
    regime: str = CRITICAL
    K: float | None = None
    amplitude: float | None = None
    N_levels: int = 8
    p: float = 2.0
    t: float | None = None


@dataclass
class BarrierConfig:
    enabled: bool = False
    regime: str = CRITICAL
    a: float | None = None
    k: float = 10.0
    n_weight: float = -6.0


@dataclass
class InequalitiesConfig:
    enabled: bool = False
    corpus_seed: int = 2026
    corpus_size: int = 50


@dataclass
class ExperimentConfig:
    grid: GridConfig = field(default_factory=GridConfig)
    initial_data: InitialDataConfig = field(default_factory=InitialDataConfig)
    run: RunControlConfig = field(default_factory=RunControlConfig)
    diagnostics: DiagnosticsConfig = field(default_factory=DiagnosticsConfig)
    eps_regularity: EpsRegularityConfig = field(default_factory=EpsRegularityConfig)
    ladder: LadderConfig = field(default_factory=LadderConfig)
    barrier: BarrierConfig = field(default_factory=BarrierConfig)
    inequalities: InequalitiesConfig = field(default_factory=InequalitiesConfig)


_SECTION_KEYS = {
    "grid": ("n", "l"),
    "initial_data": ("family", "sigma", "separation", "k", "R", "seed", "modes"),
    "run": ("T", "cfl", "dt_min", "dt_max", "snapshot_cadence", "positivity_clip"),
    "diagnostics": ("p_list", "m_list", "f_floor"),
    "experiments.eps_regularity": ("enabled", "K"),
    "experiments.ladder": ("enabled", "regime", "K", "amplitude", "N_levels", "p", "t"),
    "experiments.barrier": ("enabled", "regime", "a", "k", "n_weight"),
    "experiments.inequalities": ("enabled", "corpus_seed", "corpus_size"),
}


def _parse_int(section: str, key: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{section}.{key} must be an integer") from None


def _parse_float(section: str, key: str, raw: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"{section}.{key} must be a number") from None


def _parse_bool(section: str, key: str, raw: str) -> bool:
    low = raw.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{section}.{key} must be a boolean")


def _parse_float_list(section: str, key: str, raw: str) -> tuple:
    parts = [p.strip() for p in raw.split(",") if p.strip()]
    try:
        values = tuple(float(p) for p in parts)
    except ValueError:
        values = ()
    if not values:
        raise ConfigError(
            f"{section}.{key} must be a comma-separated list of numbers"
        ) from None
    return values


def parse_config(text: str) -> ExperimentConfig:
    """Validated config from INI text; unset keys take the defaults."""
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"config parse error: {exc}") from None

    cfg = ExperimentConfig()
    targets = {
        "experiments.eps_regularity": cfg.eps_regularity,
        "experiments.ladder": cfg.ladder,
        "experiments.barrier": cfg.barrier,
        "experiments.inequalities": cfg.inequalities,
    }
    for section in cp.sections():
        if section not in _SECTION_KEYS:
            raise ConfigError(f"unknown section [{section}]")
        for key, raw in cp.items(section):
            if key not in _SECTION_KEYS[section]:
                raise ConfigError(f"unknown key {section}.{key}")
            if section == "grid":
                if key == "n":
                    cfg.grid.n = _parse_int(section, key, raw)
                else:
                    cfg.grid.l = _parse_float(section, key, raw)
            elif section == "initial_data":
                if key == "family":
                    cfg.initial_data.family = raw.strip()
                elif key in ("seed", "modes"):
                    setattr(cfg.initial_data, key, _parse_int(section, key, raw))
                else:
                    setattr(cfg.initial_data, key, _parse_float(section, key, raw))
            elif section == "run":
                if key == "snapshot_cadence":
                    cfg.run.snapshot_cadence = _parse_int(section, key, raw)
                elif key == "positivity_clip":
                    cfg.run.positivity_clip = _parse_bool(section, key, raw)
                else:
                    setattr(cfg.run, key, _parse_float(section, key, raw))
            elif section == "diagnostics":
                if key in ("p_list", "m_list"):
                    setattr(cfg.diagnostics, key, _parse_float_list(section, key, raw))
                else:
                    cfg.diagnostics.f_floor = _parse_float(section, key, raw)
            else:
                target = targets[section]
                if key == "enabled":
                    target.enabled = _parse_bool(section, key, raw)
                    continue
                if key == "regime":
                    target.regime = raw.strip()
                elif key in ("N_levels", "corpus_seed", "corpus_size"):
                    setattr(target, key, _parse_int(section, key, raw))
                else:
                    setattr(target, key, _parse_float(section, key, raw))
        if section in targets and not cp.has_option(section, "enabled"):
            targets[section].enabled = True

    _validate_config(cfg)
    return cfg


def _validate_config(cfg: ExperimentConfig) -> None:
    if cfg.grid.n % 2 != 0:
        raise ConfigError("grid.n must be even")
    if cfg.grid.n < 8:
        raise ConfigError("grid.n must be at least 8")
    if not cfg.grid.l > 0.0:
        raise ConfigError("grid.l must be positive")
    if cfg.initial_data.family not in _FAMILIES:
        raise ConfigError(
            "initial_data.family must be one of " + ", ".join(_FAMILIES)
        )
    if cfg.initial_data.modes < 1:
        raise ConfigError("initial_data.modes must be at least 1")
    if not cfg.run.T > 0.0:
        raise ConfigError("run.T must be positive")
    if not 0.0 < cfg.run.cfl <= 1.0:
        raise ConfigError("run.cfl must lie in (0, 1]")
    if not cfg.run.dt_min > 0.0:
        raise ConfigError("run.dt_min must be positive")
    if cfg.run.dt_max < cfg.run.dt_min:
        raise ConfigError("run.dt_max must be at least run.dt_min")
    if cfg.run.snapshot_cadence < 1:
        raise ConfigError("run.snapshot_cadence must be at least 1")
    if any(p < 1.0 for p in cfg.diagnostics.p_list):
        raise ConfigError("diagnostics.p_list entries must be at least 1")
    if not cfg.diagnostics.f_floor > 0.0:
        raise ConfigError("diagnostics.f_floor must be positive")
    if cfg.ladder.regime not in (CRITICAL, SUBCRITICAL):
        raise ConfigError("experiments.ladder.regime must be critical or subcritical")
    if not 1 <= cfg.ladder.N_levels <= 12:
        raise ConfigError("experiments.ladder.N_levels must lie in [1, 12]")
    if not cfg.ladder.p > 1.5:
        raise ConfigError("experiments.ladder.p must exceed 3/2")
    if cfg.barrier.regime not in (CRITICAL, SUBCRITICAL):
        raise ConfigError("experiments.barrier.regime must be critical or subcritical")
    if cfg.barrier.n_weight >= -3.0:
        raise ConfigError("experiments.barrier.n_weight must be below -3")
    if cfg.inequalities.corpus_size < 4:
        raise ConfigError("experiments.inequalities.corpus_size must be at least 4")


# ---------------------------------------------------------------------------
# initial data


@dataclass(frozen=True)
class InitialData:
    field: ScalarField
    residuals: tuple
    tail_fraction: float
    params: dict


def _family_profile(idc: InitialDataConfig, grid: VelocityGrid):
    """Profile evaluator u -> values; u already shifted and dilated."""
    family = idc.family
    if family == "maxwellian":
        return lambda u: np.exp(-0.5 * (u[0] ** 2 + u[1] ** 2 + u[2] ** 2))
    if family == "narrow_gaussian":
        sigma = idc.sigma if idc.sigma is not None else 4.0 * grid.h
        if not sigma > 0.0:
            raise ConfigError("initial_data.sigma must be positive")
        inv = 0.5 / sigma ** 2
        return lambda u: np.exp(-inv * (u[0] ** 2 + u[1] ** 2 + u[2] ** 2))
    if family == "bimaxwellian":
        sep = idc.separation

        def two_bumps(u):
            r2 = u[1] ** 2 + u[2] ** 2
            return 0.5 * (
                np.exp(-0.5 * ((u[0] - sep) ** 2 + r2))
                + np.exp(-0.5 * ((u[0] + sep) ** 2 + r2))
            )

        return two_bumps
    if family == "polytail":
        if idc.k <= 9.0:
            raise HypothesisError("hypothesis: polytail requires k > 9")
        if not idc.R > 0.0:
            raise ConfigError("initial_data.R must be positive")
        k, R = idc.k, idc.R
        return lambda u: 1.0 / (
            1.0 + (np.sqrt(u[0] ** 2 + u[1] ** 2 + u[2] ** 2) / R) ** k
        )
    # mixture: seeded gaussian bumps with random centers and widths
    rng = np.random.default_rng(idc.seed)
    centers = np.clip(rng.normal(0.0, 1.0, size=(idc.modes, 3)), -2.0, 2.0)
    widths = rng.uniform(0.5, 1.0, size=idc.modes)
    weights = rng.uniform(0.5, 1.5, size=idc.modes)

    def bumps(u):
        out = np.zeros_like(u[0])
        for c, w, amp in zip(centers, widths, weights):
            r2 = (u[0] - c[0]) ** 2 + (u[1] - c[1]) ** 2 + (u[2] - c[2]) ** 2
            out += amp * np.exp(-0.5 * r2 / w ** 2)
        return out

    return bumps


def make_initial_data(config: ExperimentConfig, grid: VelocityGrid) -> InitialData:
    """Sample the configured family and renormalize it discretely.

    Fixed-point loop over (amplitude, center, dilation): rescale to unit
    mass, recenter to kill momentum, dilate to energy 3.  At most 12
    updates; residuals of the final iterate are reported.
    """
    idc = config.initial_data
    profile = _family_profile(idc, grid)
    coords = grid.coords
    vol = grid.cell_volume()
    center = np.zeros(3)
    lam = 1.0
    amp = 1.0
    vals = None
    mass = mom = energy = None
    for it in range(13):
        u = tuple(lam * (coords[d] - center[d]) for d in range(3))
        vals = amp * lam ** 3 * profile(u)
        mass = vol * float(np.sum(vals))
        if not mass > 0.0:
            raise ConfigError("initial_data: sampled profile has nonpositive mass")
        mom = np.array(
            [vol * float(np.sum(coords[d] * vals)) for d in range(3)]
        ) / mass
        energy = vol * float(np.sum(grid.radius2 * vals)) / mass
        centered_energy = energy - float(mom @ mom)
        resid = max(abs(mass - 1.0), float(np.max(np.abs(mom))), abs(energy - 3.0))
        if resid < 1e-13 or it == 12:
            break
        amp /= mass
        # sampled field is profile(lam*(v - center)), so its mean sits at
        # center + m/lam; shifting center by -mom moves the mean to zero
        center -= mom
        if centered_energy > 0.0:
            lam *= math.sqrt(centered_energy / 3.0)

    residuals = (mass - 1.0, float(np.max(np.abs(mom))), energy - 3.0)
    outside = grid.radius2 > (0.5 * grid.l) ** 2
    tail = float(np.sum(vals[outside]) / np.sum(vals))
    if tail > 1e-2:
        raise ConfigError(
            f"initial_data: domain too small, {tail:.3e} of mass outside |v| <= l/2"
        )
    if tail > 1e-4:
        warnings.warn(
            f"domain too small: {tail:.3e} of mass outside |v| <= l/2",
            stacklevel=2,
        )
    params = {
        "family": idc.family,
        "center": tuple(float(c) for c in center),
        "dilation": float(lam),
        "amplitude": float(amp),
    }
    if idc.family == "polytail":
        wk = grid.bracket2 ** (0.5 * idc.k)
        params["k"] = float(idc.k)
        params["a_lower"] = float(np.min(vals * wk))
    if idc.family == "mixture":
        params["seed"] = int(idc.seed)
    return InitialData(
        field=ScalarField(grid, vals),
        residuals=residuals,
        tail_fraction=tail,
        params=params,
    )


# ---------------------------------------------------------------------------
# snapshot format


def write_snapshot(path: str, f: ScalarField, t: float) -> None:
    """Raw little-endian dump: magic, u32 n, f64 l, f64 t, then n^3 f64."""
    header = _LCF_HEADER.pack(LCF_MAGIC, f.grid.n, f.grid.l, float(t))
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(f.values, dtype="<f8").tobytes())


def read_snapshot(path: str) -> tuple[ScalarField, float]:
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < _LCF_HEADER.size or data[:4] != LCF_MAGIC:
        raise ConfigError(f"not an LCF1 snapshot: {path}")
    _, n, l, t = _LCF_HEADER.unpack_from(data)
    expected = _LCF_HEADER.size + 8 * n ** 3
    if len(data) != expected:
        raise ConfigError(f"truncated snapshot: {path}")
    vals = np.frombuffer(data, dtype="<f8", offset=_LCF_HEADER.size)
    grid = make_grid(int(n), float(l))
    return ScalarField(grid, vals.reshape(n, n, n).copy()), float(t)


# ---------------------------------------------------------------------------
# CSV emission (repr cells: byte-stable and round-trip exact)


def _fmt(x) -> str:
    return repr(float(x))


def diagnostics_columns(p_list, m_list) -> list:
    cols = [
        "t", "mass", "px", "py", "pz", "energy", "entropy", "fisher",
        "fisher_sqrt_form", "linf", "c0_hat", "sup_A",
    ]
    cols += [f"lp_{p:g}_m_{m:g}" for p in p_list for m in m_list]
    return cols


def diagnostics_row(rec, p_list, m_list) -> str:
    cells = [
        _fmt(rec.t), _fmt(rec.mass), _fmt(rec.momentum[0]), _fmt(rec.momentum[1]),
        _fmt(rec.momentum[2]), _fmt(rec.energy), _fmt(rec.entropy),
        _fmt(rec.fisher), _fmt(rec.fisher_sqrt_form), _fmt(rec.linf),
        _fmt(rec.c0_hat), _fmt(rec.sup_A),
    ]
    cells += [_fmt(rec.lp_norms[(p, m)]) for p in p_list for m in m_list]
    return ",".join(cells)


def write_diagnostics_csv(path: str, records, p_list, m_list) -> None:
    lines = [CSV_SCHEMA_LINE, ",".join(diagnostics_columns(p_list, m_list))]
    lines += [diagnostics_row(r, p_list, m_list) for r in records]
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_ladder_csv(path: str, ladder, fit) -> None:
    lines = [CSV_SCHEMA_LINE, "n,level,t_n,energy,a_sup,b_int,usable,bracket,ratio,slack"]
    per_rung = {}
    if fit is not None and fit.verdict == "fitted":
        for rung, br, ratio, slack in zip(fit.rungs, fit.brackets, fit.ratios, fit.slack):
            per_rung[rung] = (br, ratio, slack)
    for n in range(len(ladder.levels)):
        row = [
            str(n), _fmt(ladder.levels[n]), _fmt(ladder.times[n]),
            _fmt(ladder.energies[n]), _fmt(ladder.a_values[n]),
            _fmt(ladder.b_values[n]), str(int(ladder.usable[n])),
        ]
        if n in per_rung:
            row += [_fmt(v) for v in per_rung[n]]
        else:
            row += ["", "", ""]
        lines.append(",".join(row))
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_report_csv(path: str, report) -> None:
    lines = [CSV_SCHEMA_LINE, "sample,ratio"]
    lines += [f"{i},{_fmt(r)}" for i, r in enumerate(report.ratios)]
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_csv_columns(path: str) -> dict:
    """Columns of a schema-1 CSV as float lists keyed by header name."""
    with open(path, "r") as fh:
        rows = [line.rstrip("\n") for line in fh]
    rows = [r for r in rows if r and not r.startswith("#")]
    if not rows:
        raise ConfigError(f"empty csv: {path}")
    header = rows[0].split(",")
    cols = {name: [] for name in header}
    for row in rows[1:]:
        cells = row.split(",")
        if len(cells) != len(header):
            raise ConfigError(f"ragged csv row in {path}")
        for name, cell in zip(header, cells):
            cols[name].append(float(cell) if cell else math.nan)
    return cols


# ---------------------------------------------------------------------------
# SVG plots


def svg_line_plot(path: str, xs, ys, title: str, xlabel: str, ylabel: str) -> None:
    """Single-polyline chart with axes and ticks; no external renderer."""
    width, height = 640, 420
    ml, mr, mt, mb = 70, 20, 40, 50
    pts = [(float(x), float(y)) for x, y in zip(xs, ys)
           if math.isfinite(x) and math.isfinite(y)]
    if pts:
        xmin = min(p[0] for p in pts)
        xmax = max(p[0] for p in pts)
        ymin = min(p[1] for p in pts)
        ymax = max(p[1] for p in pts)
    else:
        xmin, xmax, ymin, ymax = 0.0, 1.0, 0.0, 1.0
    if xmax == xmin:
        pad = max(1e-12, abs(xmin) * 0.05 + 1e-12)
        xmin, xmax = xmin - pad, xmax + pad
    if ymax == ymin:
        pad = max(1e-12, abs(ymin) * 0.05 + 1e-12)
        ymin, ymax = ymin - pad, ymax + pad

    def sx(x):
        return ml + (x - xmin) / (xmax - xmin) * (width - ml - mr)

    def sy(y):
        return height - mb - (y - ymin) / (ymax - ymin) * (height - mt - mb)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="#ffffff"/>',
        f'<text x="{width / 2:.1f}" y="24" text-anchor="middle" '
        f'font-family="monospace" font-size="14">{title}</text>',
    ]
    axis = (
        f'<line x1="{ml}" y1="{height - mb}" x2="{width - mr}" y2="{height - mb}" '
        f'stroke="#000000" stroke-width="1"/>'
        f'<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{height - mb}" '
        f'stroke="#000000" stroke-width="1"/>'
    )
    parts.append(axis)
    for i in range(5):
        fx = xmin + (xmax - xmin) * i / 4.0
        fy = ymin + (ymax - ymin) * i / 4.0
        px = sx(fx)
        py = sy(fy)
        parts.append(
            f'<line x1="{px:.2f}" y1="{height - mb}" x2="{px:.2f}" '
            f'y2="{height - mb + 5}" stroke="#000000" stroke-width="1"/>'
            f'<text x="{px:.2f}" y="{height - mb + 18}" text-anchor="middle" '
            f'font-family="monospace" font-size="11">{fx:.4g}</text>'
        )
        parts.append(
            f'<line x1="{ml - 5}" y1="{py:.2f}" x2="{ml}" y2="{py:.2f}" '
            f'stroke="#000000" stroke-width="1"/>'
            f'<text x="{ml - 8}" y="{py + 4:.2f}" text-anchor="end" '
            f'font-family="monospace" font-size="11">{fy:.4g}</text>'
        )
    parts.append(
        f'<text x="{(ml + width - mr) / 2:.1f}" y="{height - 12}" '
        f'text-anchor="middle" font-family="monospace" font-size="12">{xlabel}</text>'
    )
    parts.append(
        f'<text x="16" y="{(mt + height - mb) / 2:.1f}" text-anchor="middle" '
        f'font-family="monospace" font-size="12" '
        f'transform="rotate(-90 16 {(mt + height - mb) / 2:.1f})">{ylabel}</text>'
    )
    if len(pts) >= 2:
        coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
        parts.append(
            f'<polyline points="{coords}" fill="none" stroke="#1f77b4" '
            f'stroke-width="1.5"/>'
        )
    parts.append("</svg>")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(parts) + "\n")


def write_run_plots(outdir: str, t, linf, fisher, entropy) -> None:
    svg_line_plot(os.path.join(outdir, "linf.svg"), t, linf,
                  "sup norm", "t", "||f||_inf")
    svg_line_plot(os.path.join(outdir, "fisher.svg"), t, fisher,
                  "fisher information", "t", "i(f)")
    svg_line_plot(os.path.join(outdir, "entropy.svg"), t, entropy,
                  "entropy", "t", "entropy")
    t_linf = [ti * li for ti, li in zip(t, linf)]
    svg_line_plot(os.path.join(outdir, "t_linf.svg"), t, t_linf,
                  "smoothing envelope", "t", "t * ||f||_inf")


# ---------------------------------------------------------------------------
# experiment driver


def _check_line(name: str, ok: bool, detail: str) -> str:
    return f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}"


def run_experiment(config: ExperimentConfig, outdir: str) -> int:
    """Run the configured experiment and write all artifacts to outdir.

    Returns 0 when every enabled check passes, 1 otherwise; hypothesis
    and config violations raise before the run starts.
    """
    os.makedirs(outdir, exist_ok=True)
    # hypothesis gates come first so bad configs fail before the long run
    if config.barrier.enabled and config.barrier.regime == SUBCRITICAL:
        if config.barrier.k <= 5.0:
            raise HypothesisError("hypothesis: k > 5 required")

    grid = make_grid(config.grid.n, config.grid.l)
    init = make_initial_data(config, grid)
    rc = config.run
    control = solver.StepControl(
        cfl=rc.cfl, dt_min=rc.dt_min, dt_max=rc.dt_max,
        positivity_clip=rc.positivity_clip,
    )
    dc = config.diagnostics
    traj = solver.run(
        init.field, rc.T, control,
        snapshot_every=rc.snapshot_cadence,
        p_list=dc.p_list, m_list=dc.m_list, f_floor=dc.f_floor,
    )
    records = traj.records

    write_diagnostics_csv(
        os.path.join(outdir, "diagnostics.csv"), records, dc.p_list, dc.m_list
    )
    for i, snap in enumerate(traj.states):
        write_snapshot(os.path.join(outdir, f"snapshot_{i:04d}.lcf"), snap.f, snap.t)
    ts = [r.t for r in records]
    write_run_plots(outdir, ts, [r.linf for r in records],
                    [r.fisher for r in records], [r.entropy for r in records])

    lines = [
        "landau experiment summary (schema=1)",
        f"grid: n={grid.n} l={_fmt(grid.l)} h={_fmt(grid.h)}",
        f"initial_data: family={init.params['family']}",
        f"renormalization residuals: mass={init.residuals[0]:.3e} "
        f"momentum={init.residuals[1]:.3e} energy={init.residuals[2]:.3e}",
        f"tail fraction outside |v|<=l/2: {init.tail_fraction:.3e}",
        f"run: T={_fmt(rc.T)} steps={traj.states[-1].step_count} "
        f"snapshots={len(traj.states)}",
    ]
    checks = []

    mass0 = records[0].mass
    mass_drift = max(abs(r.mass - mass0) for r in records) / abs(mass0)
    checks.append(("mass_conservation", mass_drift <= 1e-12,
                   f"max relative drift {mass_drift:.3e} (tol 1e-12)"))
    mom_drift = max(max(abs(c) for c in r.momentum) for r in records)
    checks.append(("momentum_drift", mom_drift <= 1e-2,
                   f"max component {mom_drift:.3e} (tol 1e-2)"))
    e0 = records[0].energy
    energy_drift = max(abs(r.energy - e0) for r in records) / abs(e0)
    checks.append(("energy_drift", energy_drift <= 1e-2,
                   f"max relative drift {energy_drift:.3e} (tol 1e-2)"))

    entropy = np.array([r.entropy for r in records])
    ds = np.diff(entropy)
    max_ds = float(np.max(ds)) if ds.size else 0.0
    checks.append(("entropy_monotone", max_ds <= 1e-8,
                   f"max per-step increase {max_ds:.3e} (tol 1e-8)"))
    fisher = np.array([r.fisher for r in records])
    if fisher.size > 11:
        rel = np.diff(fisher[10:]) / fisher[10:-1]
        max_df = float(np.max(rel))
    else:
        max_df = 0.0
    checks.append(("fisher_monotone", max_df <= 1e-3,
                   f"max relative per-step increase {max_df:.3e} after step 10 (tol 1e-3)"))

    max_linf = max(r.linf for r in records)

    if config.eps_regularity.enabled:
        K = config.eps_regularity.K
        if K is None:
            K = 0.6 * max_linf
        eps = diagnostics.eps_regularity(traj, K, window=(0.5 * rc.T, rc.T))
        lines.append(f"eps_regularity: K={_fmt(K)} window=[T/2,T] eps={_fmt(eps)}")
        checks.append(("eps_regularity_finite", math.isfinite(eps),
                       f"eps={eps:.6e} at K={K:.6e}"))

    if config.ladder.enabled:
        lc = config.ladder
        t_mid = lc.t if lc.t is not None else 0.5 * rc.T
        tail_linf = max(r.linf for r in records if r.t >= t_mid)
        K = lc.K if lc.K is not None else 0.6 * tail_linf
        if lc.regime == CRITICAL:
            amplitude = lc.amplitude
            if amplitude is None:
                # slightly overshoot the sup so the top rungs empty out
                amplitude = max(1.05 * (tail_linf - K), 1e-8)
        else:
            amplitude = lc.amplitude if lc.amplitude is not None else K
        ladder = degiorgi.measure_ladder(
            traj, lc.regime, K, amplitude, t_mid, rc.T,
            N_levels=lc.N_levels, p=lc.p,
        )
        try:
            fit = degiorgi.fit_recurrence(ladder)
        except ValueError as exc:
            fit = None
            lines.append(f"ladder fit skipped: {exc}")
        write_ladder_csv(os.path.join(outdir, "ladder.csv"), ladder, fit)
        lines.append(
            f"ladder: regime={lc.regime} K={_fmt(K)} amplitude={_fmt(amplitude)} "
            f"t={_fmt(t_mid)} E0={_fmt(ladder.energies[0])}"
        )
        if fit is not None and fit.verdict == "fitted":
            lines.append(f"ladder note: {fit.note}")
            eps0 = degiorgi.critical_eps0(fit.c_hat, fit.c_hat)
            predicted = degiorgi.predict_linf_bound(
                fit, lc.regime, ladder.energies[0], K, t_mid, lc.p
            )
            measured = tail_linf
            checks.append((
                "ladder_soundness",
                measured <= predicted * (1.0 + 1e-9),
                f"measured sup {measured:.6e} <= predicted {predicted:.6e} "
                f"(C_hat={fit.c_hat:.6e})",
            ))
            if lc.regime == CRITICAL:
                decay_ok, detail = _ladder_decay(ladder, eps0)
                checks.append(("ladder_decay", decay_ok, detail))
        elif fit is not None:
            lines.append("ladder: all levels empty (vacuous)")

    if config.barrier.enabled:
        bc = config.barrier
        k = bc.k
        wk = grid.bracket2 ** (0.5 * k)
        a = bc.a if bc.a is not None else float(np.min(init.field.values * wk))
        if bc.regime == CRITICAL:
            m_bound = max(
                (r.sup_A * r.t ** (1.0 / 3.0) for r in records if r.t > 0.0),
                default=records[-1].sup_A,
            )
            eta = barrier_sufficient_rate(CRITICAL, k, n_weight=bc.n_weight,
                                          m_bound=m_bound)
            params = BarrierParams(a=a, k=k, eta_rate=eta, regime=CRITICAL,
                                   n_weight=bc.n_weight, m_bound=m_bound)
        else:
            trace_bound = 3.0 * max(r.sup_A for r in records)
            ellipticity = min(r.c0_hat for r in records)
            eta = barrier_sufficient_rate(
                SUBCRITICAL, k, n_weight=bc.n_weight,
                trace_bound=trace_bound, ellipticity=ellipticity,
            )
            params = BarrierParams(
                a=a, k=k, eta_rate=eta, regime=SUBCRITICAL, n_weight=bc.n_weight,
                trace_bound=trace_bound, ellipticity=ellipticity,
            )
        monitor = minimum_principle_monitor(traj, params, bc.n_weight)
        ratios = [lower_bound_ratio(s.f, s.t, params) for s in traj.states]
        blines = [CSV_SCHEMA_LINE, "t,monitor,min_ratio"]
        for snap, mval, ratio in zip(traj.states, monitor.values, ratios):
            blines.append(f"{_fmt(snap.t)},{_fmt(mval)},{_fmt(ratio)}")
        with open(os.path.join(outdir, "barrier.csv"), "w", newline="\n") as fh:
            fh.write("\n".join(blines) + "\n")
        h2 = grid.h ** 2
        lines.append(
            f"barrier: regime={bc.regime} a={_fmt(a)} k={_fmt(k)} eta={_fmt(eta)}"
        )
        checks.append(("barrier_hypothesis", monitor.hypothesis_ok,
                       "initial data sits above the barrier"))
        checks.append((
            "barrier_monotone",
            monitor.max_increase <= 1e-8 + h2,
            f"max monitor increase {monitor.max_increase:.3e} (tol {1e-8 + h2:.3e})",
        ))
        min_ratio = min(ratios)
        checks.append((
            "barrier_lower_bound",
            min_ratio >= 1.0 - 10.0 * h2,
            f"min ratio {min_ratio:.6f} (tol {1.0 - 10.0 * h2:.6f})",
        ))

    if config.inequalities.enabled:
        ic = config.inequalities
        reports = run_inequality_suite(grid, ic.corpus_size, ic.corpus_seed)
        for rep in reports:
            write_report_csv(
                os.path.join(outdir, f"inequality_{rep.name}.csv"), rep
            )
            detail = (
                f"max ratio {rep.max_ratio:.6e}, halves spread "
                f"{rep.halves_spread:.3f}"
            )
            if rep.notes:
                detail += f" ({rep.notes})"
            checks.append((f"inequality_{rep.name}", rep.passed, detail))

    lines += [_check_line(name, ok, detail) for name, ok, detail in checks]
    n_fail = sum(1 for _, ok, _ in checks if not ok)
    verdict = "PASS" if n_fail == 0 else f"FAIL ({n_fail} of {len(checks)})"
    lines.append(f"verdict: {verdict}")
    with open(os.path.join(outdir, "summary.txt"), "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    for line in lines:
        print(line)
    return 0 if n_fail == 0 else 1


def _ladder_decay(ladder, eps0: float):
    """Geometric-decay verdict for rungs n <= 6, conditional on E0 <= eps0."""
    E = ladder.energies
    if E[0] > eps0:
        return True, f"vacuous: E0={E[0]:.3e} above eps0={eps0:.3e}"
    floor = 10.0 * ladder.floor
    worst = 0.0
    for n in range(min(6, len(E) - 1)):
        if E[n] <= floor:
            break
        if E[n + 1] <= floor:
            continue
        worst = max(worst, E[n + 1] / E[n])
    ok = worst <= 0.9
    return ok, f"max rung ratio {worst:.3f} for n<=6 (tol 0.9, E0 below eps0)"


def run_inequality_suite(grid: VelocityGrid, size: int, seed: int):
    """The fixed panel of inequality reports used by the CLI."""
    corpus = make_corpus(grid, size, seed)
    pairs = make_poincare_corpus(grid, size, seed)
    eps_grid = np.logspace(-2.0, 0.0, 7)
    return [
        check_weighted_sobolev(corpus, 4.5, seed),
        check_interpolation(corpus, 1.5, 2.5, 4.5, seed),
        check_interpolation(corpus, 1.5, 13.0 / 6.0, 4.5, seed),
        check_eps_poincare(pairs, 2.0, eps_grid, 2.0, seed),
    ]


# ---------------------------------------------------------------------------
# CLI


def _cmd_run(args) -> int:
    text = ""
    if args.config:
        with open(args.config, "r") as fh:
            text = fh.read()
    config = parse_config(text)
    return run_experiment(config, args.out)


def _cmd_ladder(args) -> int:
    text = ""
    if args.config:
        with open(args.config, "r") as fh:
            text = fh.read()
    config = parse_config(text)
    config.ladder.enabled = True
    config.eps_regularity.enabled = False
    config.barrier.enabled = False
    config.inequalities.enabled = False
    return run_experiment(config, args.out)


def _cmd_diagnose(args) -> int:
    p_list, m_list = (1.5,), (4.5,)
    print(CSV_SCHEMA_LINE)
    print("file," + ",".join(diagnostics_columns(p_list, m_list)))
    for path in args.snapshots:
        f, t = read_snapshot(path)
        state = solver.make_state(f, t)
        rec = diagnostics.record(state, p_list, m_list)
        print(f"{os.path.basename(path)}," + diagnostics_row(rec, p_list, m_list))
    return 0


def _cmd_verify_inequalities(args) -> int:
    if args.n % 2 != 0 or args.n < 8:
        raise ConfigError("n must be even and at least 8")
    grid = make_grid(args.n, args.l)
    os.makedirs(args.out, exist_ok=True)
    reports = run_inequality_suite(grid, args.size, args.seed)
    c1 = build_cutoff(1.0).c_hat
    c10 = build_cutoff(10.0).c_hat
    scale_ok = abs(c1 - c10) <= 1e-10
    lines = [f"inequality suite: n={args.n} l={_fmt(args.l)} size={args.size} "
             f"seed={args.seed}"]
    all_ok = scale_ok
    for rep in reports:
        write_report_csv(os.path.join(args.out, f"inequality_{rep.name}.csv"), rep)
        detail = (
            f"max ratio {rep.max_ratio:.6e}, halves spread {rep.halves_spread:.3f}"
        )
        if rep.notes:
            detail += f" ({rep.notes})"
        lines.append(_check_line(rep.name, rep.passed, detail))
        all_ok = all_ok and rep.passed
    lines.append(_check_line(
        "cutoff_scale_invariance", scale_ok,
        f"|C(R=1) - C(R=10)| = {abs(c1 - c10):.3e} (tol 1e-10)",
    ))
    lines.append(f"verdict: {'PASS' if all_ok else 'FAIL'}")
    with open(os.path.join(args.out, "summary.txt"), "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    for line in lines:
        print(line)
    return 0 if all_ok else 1


def _cmd_convolve_check(args) -> int:
    if args.n > 20:
        raise ConfigError("convolve-check: n must be at most 20")
    if args.n % 2 != 0 or args.n < 8:
        raise ConfigError("convolve-check: n must be even and at least 8")
    grid = make_grid(args.n, args.l)
    rng = np.random.default_rng(args.seed)
    f = ScalarField(grid, rng.random((args.n,) * 3))
    table = kernel_table_for(grid)
    worst = 0.0
    for component in ("scalar", "xx", "yy", "zz", "xy", "xz", "yz"):
        spectral = convolve_free_space(f, table, component)
        direct = direct_convolve(f, table, component)
        scale = float(np.max(np.abs(direct.values)))
        err = float(np.max(np.abs(spectral.values - direct.values))) / scale
        worst = max(worst, err)
        print(f"component {component}: rel err {err:.3e}")
    ok = worst <= 1e-10
    print(_check_line("convolve_check", ok, f"max rel err {worst:.3e} (tol 1e-10)"))
    return 0 if ok else 1


def _cmd_plot(args) -> int:
    cols = read_csv_columns(args.csv)
    for need in ("t", "linf", "fisher", "entropy"):
        if need not in cols:
            raise ConfigError(f"csv missing column {need}: {args.csv}")
    outdir = args.out if args.out else (os.path.dirname(args.csv) or ".")
    os.makedirs(outdir, exist_ok=True)
    write_run_plots(outdir, cols["t"], cols["linf"], cols["fisher"], cols["entropy"])
    print(f"wrote 4 plots to {outdir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="landau",
        description="velocity-space collision simulator and verification harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the configured experiment")
    p_run.add_argument("--config", default=None, help="INI config path")
    p_run.add_argument("--out", default="out", help="output directory")
    p_run.set_defaults(func=_cmd_run)

    p_diag = sub.add_parser("diagnose", help="print diagnostics for snapshots")
    p_diag.add_argument("snapshots", nargs="+", help="LCF1 snapshot paths")
    p_diag.set_defaults(func=_cmd_diagnose)

    p_ineq = sub.add_parser("verify-inequalities", help="run the inequality suite")
    p_ineq.add_argument("--seed", type=int, default=2026)
    p_ineq.add_argument("--size", type=int, default=50)
    p_ineq.add_argument("--n", type=int, default=32)
    p_ineq.add_argument("--l", type=float, default=8.0)
    p_ineq.add_argument("--out", default="ineq_out")
    p_ineq.set_defaults(func=_cmd_verify_inequalities)

    p_lad = sub.add_parser("ladder", help="run and measure the iteration ladder")
    p_lad.add_argument("--config", default=None)
    p_lad.add_argument("--out", default="out")
    p_lad.set_defaults(func=_cmd_ladder)

    p_conv = sub.add_parser("convolve-check",
                            help="spectral vs direct-sum coefficients")
    p_conv.add_argument("--n", type=int, default=12)
    p_conv.add_argument("--l", type=float, default=6.0)
    p_conv.add_argument("--seed", type=int, default=2026)
    p_conv.set_defaults(func=_cmd_convolve_check)

    p_plot = sub.add_parser("plot", help="render SVG plots from a diagnostics csv")
    p_plot.add_argument("csv")
    p_plot.add_argument("--out", default=None)
    p_plot.set_defaults(func=_cmd_plot)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except LandauError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exit_code_for(exc)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
