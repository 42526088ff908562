"""Timeseries and sweep drivers: from a validated config to output tables."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import observables
from .entanglement import asymptotic_value, concurrence_x, two_site_state
from .errors import ConfigError, ConsistencyError
from .evolve import propagate_blocks_exact, propagate_blocks_numeric
from .model import ChainSpec, mode_blocks, mode_phases, thermal_state
from .observables import ContractionSet, contraction_arrays, correlators
from .schemas import RunConfig, SweepConfig

_REVIVAL_THRESHOLD = 0.01
_PLATEAU_WINDOW_FRACTION = 0.2


def resolve_solver(cfg: RunConfig, spec: ChainSpec) -> str:
    if cfg.solver == "numeric":
        return "numeric"
    ratio = spec.ratio()
    if cfg.solver == "exact":
        if ratio is None:
            raise ConfigError("solver=exact requires a declared proportional drive")
        return "exact"
    return "exact" if ratio is not None else "numeric"


@dataclass
class TimeseriesResult:
    """Observable tables on the run's time grid."""

    t: np.ndarray            # (T,)
    separations: list[int]
    m: np.ndarray            # (T,)
    sx: np.ndarray           # (T, R)
    sy: np.ndarray
    sz: np.ndarray
    c: np.ndarray

    columns = ("t", "r", "M", "Sx", "Sy", "Sz", "C")

    def rows(self):
        out = []
        for k in range(self.t.size):
            for j, r in enumerate(self.separations):
                out.append([float(self.t[k]), float(r), float(self.m[k]),
                            float(self.sx[k, j]), float(self.sy[k, j]),
                            float(self.sz[k, j]), float(self.c[k, j])])
        return out

    def concurrence_series(self, r: int):
        j = self.separations.index(r)
        return np.column_stack([self.t, self.c[:, j]])

    def to_csv(self) -> str:
        return render_csv(self.columns, self.rows(), int_columns={"r"})


def render_csv(columns, rows, int_columns=frozenset()) -> str:
    """17-significant-digit CSV; deterministic byte-for-byte for equal inputs."""
    int_idx = {i for i, c in enumerate(columns) if c in int_columns}
    lines = [",".join(columns)]
    for row in rows:
        cells = []
        for i, v in enumerate(row):
            if v is None or (isinstance(v, float) and math.isnan(v)):
                cells.append("")
            elif i in int_idx:
                cells.append(str(int(v)))
            else:
                cells.append(f"{v:.17g}")
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _mode_series(spec: ChainSpec, t_grid, solver: str, tol: float):
    """Per-mode occupations and pairing amplitudes on the grid.

    Returns (n_p, n_mp, kappa) with shape (T, M) each.
    """
    states0 = [thermal_state(spec, m) for m in mode_blocks(spec)]
    rho0 = np.stack([s.rho[:2, :2] for s in states0])          # (M, 2, 2)
    diag0 = np.stack([[s.rho[2, 2].real, s.rho[3, 3].real] for s in states0])
    traces = np.array([s.trace for s in states0])

    if solver == "exact":
        u2, _ = propagate_blocks_exact(spec, t_grid)
        defect = _max_unitarity_defect(u2)
        if defect > max(tol, 1e-12):
            raise ConsistencyError(f"closed-form propagator defect {defect:.2e}")
    else:
        u2, _ = propagate_blocks_numeric(spec, t_grid, tol)

    rho2 = np.einsum("tmij,mjk,tmlk->tmil", u2, rho0, u2.conj())
    herm = np.abs(rho2 - np.conj(np.swapaxes(rho2, -1, -2))).max()
    if herm > 1e-9 * max(1.0, np.abs(rho2).max()):
        raise ConsistencyError(f"evolved mode states lost hermiticity ({herm:.2e})")
    tr_t = rho2[..., 0, 0].real + rho2[..., 1, 1].real + diag0[:, 0] + diag0[:, 1]
    drift = np.abs(tr_t - traces).max() / max(1.0, traces.max())
    if drift > 1e-9:
        raise ConsistencyError(f"mode trace drift {drift:.2e}")

    n_p = (rho2[..., 1, 1].real + diag0[:, 0]) / traces
    n_mp = (rho2[..., 1, 1].real + diag0[:, 1]) / traces
    kappa = observables._KAPPA_SIGN * rho2[..., 1, 0] / traces
    return n_p, n_mp, kappa


def _max_unitarity_defect(u2):
    prod = np.matmul(np.conj(np.swapaxes(u2, -1, -2)), u2)
    prod[..., 0, 0] -= 1.0
    prod[..., 1, 1] -= 1.0
    return float(np.abs(prod).max())


def run_timeseries(cfg: RunConfig) -> TimeseriesResult:
    """Evolve all modes and tabulate M, Sx, Sy, Sz and C per (t, r)."""
    spec = cfg.chain.to_core()
    solver = resolve_solver(cfg, spec)
    if cfg.t_max == 0.0:
        t_grid = np.array([0.0])
    else:
        t_grid = np.linspace(0.0, cfg.t_max, cfg.n_samples)

    n_p, n_mp, kappa = _mode_series(spec, t_grid, solver, cfg.tol)
    n = spec.n_sites
    m_t = (n_p + n_mp - 1.0).sum(axis=1) / n
    if np.abs(m_t).max() > 0.5 + 1e-9:
        raise ConsistencyError("magnetization outside [-1/2, 1/2]")

    seps = sorted(cfg.separations)
    max_sep = max(seps)
    phis = mode_phases(n)
    sep_axis, f, p, q, g = contraction_arrays(phis, n_p, n_mp, kappa, n, max_sep)

    nt = t_grid.size
    sx = np.empty((nt, len(seps)))
    sy = np.empty((nt, len(seps)))
    sz = np.empty((nt, len(seps)))
    c = np.empty((nt, len(seps)))
    for k in range(nt):
        cs = ContractionSet(n_sites=n, separations=sep_axis, f=f[k], p=p[k],
                            q=q[k], g=g[k])
        for j, r in enumerate(seps):
            vx, vy, vz = correlators(cs, r)
            if max(abs(vx), abs(vy), abs(vz)) > 0.25 + 1e-9:
                raise ConsistencyError(f"correlator bound violated at t={t_grid[k]}, r={r}")
            sx[k, j], sy[k, j], sz[k, j] = vx, vy, vz
            c[k, j] = concurrence_x(two_site_state(m_t[k], vx, vy, vz)).c
    return TimeseriesResult(t=t_grid, separations=seps, m=m_t, sx=sx, sy=sy,
                            sz=sz, c=c)


def detect_revival_time(t, c, k_rate, t_max, threshold=_REVIVAL_THRESHOLD,
                        window_fraction=_PLATEAU_WINDOW_FRACTION):
    """First time after the initial plateau where |C - plateau| > threshold.

    The plateau is the mean of C over [3/K, 3/K + window_fraction * t_max];
    the scan starts after that window.  Returns NaN when no revival is seen.
    """
    t = np.asarray(t, dtype=float)
    c = np.asarray(c, dtype=float)
    start = 3.0 / k_rate if k_rate > 0 else 0.0
    w_end = start + window_fraction * t_max
    in_window = (t >= start) & (t <= w_end)
    if in_window.sum() < 2:
        return float("nan")
    plateau = c[in_window].mean()
    hits = np.where((t > w_end) & (np.abs(c - plateau) > threshold))[0]
    return float(t[hits[0]]) if hits.size else float("nan")


def apply_sweep_value(base: RunConfig, variable: str, value) -> RunConfig:
    """A copy of the base run config with one swept variable replaced."""
    chain = base.chain
    if variable == "lambda":
        if chain.j_profile.kind == "proportional":
            chain = chain.model_copy(update={
                "j_profile": chain.j_profile.model_copy(update={"lam": float(value)})})
        elif chain.h_profile.kind == "proportional":
            chain = chain.model_copy(update={
                "h_profile": chain.h_profile.model_copy(update={"lam": 1.0 / float(value)})})
        else:
            raise ConfigError("lambda sweep requires a proportional drive")
    elif variable == "kT":
        chain = chain.model_copy(update={"kT": float(value)})
    elif variable == "K":
        upd = {"j_profile": chain.j_profile.model_copy(update={"k": float(value)})}
        if chain.h_profile.kind in ("exp", "cos", "sin", "tanh"):
            upd["h_profile"] = chain.h_profile.model_copy(update={"k": float(value)})
        chain = chain.model_copy(update=upd)
    elif variable == "N":
        n = int(round(value))
        if n % 2 or n < 4:
            raise ConfigError("N sweep values must be even integers >= 4")
        chain = chain.model_copy(update={"n_sites": n})
    else:
        raise ConfigError(f"unknown sweep variable {variable!r}")
    return base.model_copy(update={"chain": chain})


def _sweep_point(args):
    base, variable, value, variants, window_fraction, want_tc = args
    r0 = base.separations[0]
    row = [float(value)]
    curves = [None] + list(variants)
    for variant in curves:
        vcfg = base
        if variant is not None:
            chain = base.chain.model_copy(update={
                "j_profile": variant.j_profile, "h_profile": variant.h_profile})
            vcfg = base.model_copy(update={"chain": chain})
        vcfg = apply_sweep_value(vcfg, variable, value)
        res = run_timeseries(vcfg)
        series = res.concurrence_series(r0)
        row.append(asymptotic_value(series, window_fraction))
        if want_tc:
            k_rate = vcfg.chain.to_core().max_rate()
            row.append(detect_revival_time(res.t, series[:, 1], k_rate, vcfg.t_max))
    return row


@dataclass
class SweepResult:
    columns: list
    rows: list

    def to_csv(self) -> str:
        return render_csv(self.columns, self.rows)


def run_sweep(cfg: SweepConfig, threads: int = 1) -> SweepResult:
    """Asymptotic concurrence (and revival time for N sweeps) per swept value."""
    want_tc = cfg.sweep_variable == "N"
    columns = ["value"]
    for label in [""] + [v.label for v in cfg.variants]:
        suffix = f"_{label}" if label else ""
        columns.append("C_asym" + suffix)
        if want_tc:
            columns.append("t_c" + suffix)
    jobs = [(cfg.base, cfg.sweep_variable, v, cfg.variants, cfg.window_fraction, want_tc)
            for v in cfg.values]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(_sweep_point, jobs))
    else:
        rows = [_sweep_point(j) for j in jobs]
    return SweepResult(columns=columns, rows=rows)
