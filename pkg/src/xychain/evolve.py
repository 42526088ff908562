"""Mode propagators: numeric Runge-Kutta for arbitrary drives, closed form for J = lam * h.

The time evolution of each mode pair follows i dU/dt = H_p(t) U, U(0) = 1, so
that rho_p(t) = U rho_p(0) U^+ solves the Liouville equation.  Only the
2x2 sector spanned by {|0>, c_p^+ c_{-p}^+|0>} evolves nontrivially; the two
singly-occupied states pick up the exact phase
exp(2i cos(phi_p) * int_0^t J), integrated in closed form.

When the two drives are proportional, J(t) = lam * h(t), the 2x2 sector
Hamiltonian is J(t) times a constant matrix, so U is a plain matrix
exponential in the accumulated phase Theta(t) = int_0^t J and can be written
down exactly via the rotation angle theta that diagonalizes that constant
matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ConfigError, IntegrationError
from .model import ChainSpec, ModeBlock, ModeState, mode_blocks, mode_phases

_H_BASE = 0.01        # step ceiling for the fixed-step RK4
_H_RATE_FACTOR = 0.1  # step <= 0.1 / K while a drive is active
_H_NORM_FACTOR = 0.1  # step <= 0.1 / |H|
_MAX_HALVINGS = 12


@dataclass(frozen=True)
class Propagator:
    """Evolution matrix of one mode pair at time t."""

    mode: ModeBlock
    t: float
    u: np.ndarray


@dataclass(frozen=True)
class ExactAngles:
    """Diagonalizing rotation of the proportional-drive 2x2 sector.

    theta is the rotation angle in [0, pi/2]; lambda1 >= lambda2 are the
    eigenvalues of the constant matrix multiplying J(t), satisfying
    lambda1 + lambda2 = -4 cos(phi_p).
    """

    lam: float
    theta: float
    lambda1: float
    lambda2: float


def exact_angles(mode: ModeBlock, lam: float) -> ExactAngles:
    """Rotation angle and eigenvalues for the proportional case J = lam * h."""
    if lam == 0:
        raise ConfigError("exact solution requires a nonzero ratio J/h")
    c = math.cos(mode.phi_p)
    delta = abs(mode.delta_p)
    a = 2.0 * c + 2.0 / lam
    r = math.hypot(delta, a)
    if r == 0.0:
        theta = 0.0
    else:
        # Cancellation-free square roots of (r -+ a) / 2r.
        if a >= 0.0:
            sin_t = delta / math.sqrt(2.0 * r * (r + a))
            cos_t = math.sqrt((r + a) / (2.0 * r))
        else:
            sin_t = math.sqrt((r - a) / (2.0 * r))
            cos_t = delta / math.sqrt(2.0 * r * (r - a))
        theta = math.atan2(sin_t, cos_t)
    return ExactAngles(lam=lam, theta=theta, lambda1=r - 2.0 * c, lambda2=-r - 2.0 * c)


def _exact_u2(angles: ExactAngles, theta_j):
    """2x2 evolution block for accumulated drive phase(s) theta_j."""
    s = math.sin(angles.theta)
    c = math.cos(angles.theta)
    e1 = np.exp(-1j * angles.lambda1 * np.asarray(theta_j))
    e2 = np.exp(-1j * angles.lambda2 * np.asarray(theta_j))
    u11 = c * c * e1 + s * s * e2
    u12 = -1j * s * c * (e1 - e2)
    u22 = s * s * e1 + c * c * e2
    return u11, u12, u22


def propagate_exact(spec: ChainSpec, mode: ModeBlock, t: float) -> Propagator:
    """Closed-form propagator; requires the chain to declare J = lam * h."""
    lam = spec.ratio()
    if lam is None:
        raise ConfigError("exact propagator requires proportional drives (J = lam * h)")
    angles = exact_angles(mode, lam)
    theta_j = spec.coupling_integrals(t)[0]
    u11, u12, u22 = _exact_u2(angles, theta_j)
    phase = np.exp(2j * math.cos(mode.phi_p) * theta_j)
    u = np.zeros((4, 4), dtype=complex)
    u[0, 0] = u11
    u[0, 1] = u12
    u[1, 0] = -u12
    u[1, 1] = u22
    u[2, 2] = phase
    u[3, 3] = phase
    return Propagator(mode=mode, t=float(t), u=u)


def evolve_state(init: ModeState, prop: Propagator) -> ModeState:
    """rho(t) = U rho(0) U^+ for one mode pair."""
    if init.mode != prop.mode:
        raise ValueError("state and propagator refer to different modes")
    rho = prop.u @ init.rho @ prop.u.conj().T
    trace = float(np.trace(rho).real)
    if abs(trace - init.trace) > 1e-9 * max(1.0, abs(init.trace)):
        raise IntegrationError("trace not preserved by evolution", t=prop.t)
    return ModeState(mode=init.mode, t=prop.t, rho=rho, trace=init.trace)


# ---------------------------------------------------------------------------
# Batched engines (all modes at once).  These back both the public per-mode
# API and the timeseries runner.
# ---------------------------------------------------------------------------

def _norm_bound(spec, t):
    j, h = spec.coupling(t)
    return (4.0 + 2.0 * spec.gamma) * abs(j) + 2.0 * abs(h)


def _segment_plan(spec, ta, tb, scale):
    """Yield (t0, t1, h) sub-segments of [ta, tb] with local step targets.

    The step obeys h <= scale * min(0.01, 0.1/K, 0.1/|H|), with the 0.1/K
    bound applied only where a drive is actually varying; transient drives
    (exp, tanh) are flat outside their activity windows and a segmented step
    keeps fast switches (large K) affordable over long runs.
    """
    windows = spec.activity_windows()
    k = spec.max_rate()
    cuts = {ta, tb}
    if windows is not None:
        for w0, w1 in windows:
            for edge in (w0, w1):
                if ta < edge < tb:
                    cuts.add(edge)
    edges = sorted(cuts)
    for t0, t1 in zip(edges[:-1], edges[1:]):
        mid = 0.5 * (t0 + t1)
        hn = max(_norm_bound(spec, t0), _norm_bound(spec, mid), _norm_bound(spec, t1), 1e-6)
        h = min(_H_BASE, _H_NORM_FACTOR / hn)
        active = windows is None or any(t0 < w1 and t1 > w0 for w0, w1 in windows)
        if active and k > 0:
            h = min(h, _H_RATE_FACTOR / k)
        yield t0, t1, h * scale


def _build_plan(spec, t_grid, scale):
    """Flattened RK4 step plan over the whole grid.

    Returns (t_start, dt, snap) arrays; snap marks the grid index to record
    after a step (-1 otherwise).  Steps land exactly on every grid time.
    """
    ts, hs, snap = [], [], []
    for idx in range(1, len(t_grid)):
        wrote = False
        for t0, t1, h_target in _segment_plan(spec, t_grid[idx - 1], t_grid[idx], scale):
            span = t1 - t0
            if span <= 0:
                continue
            n = max(1, int(math.ceil(span / h_target)))
            h = span / n
            if h < 1e-12:
                raise IntegrationError("step size underflow", t=t0)
            ts.extend(t0 + i * h for i in range(n))
            hs.extend([h] * n)
            snap.extend([-1] * n)
            wrote = True
        if not wrote:
            raise IntegrationError("degenerate grid interval", t=float(t_grid[idx]))
        snap[-1] = idx
    return (np.asarray(ts, dtype=float), np.asarray(hs, dtype=float),
            np.asarray(snap, dtype=np.int64))


def _rk4_pass(spec, phis, deltas, t_grid, plan):
    """One fixed-step RK4 sweep; returns 2x2 blocks at the grid times."""
    m = phis.size
    u = np.zeros((len(t_grid), m, 2, 2), dtype=np.complex128)
    u[0, :, 0, 0] = 1.0
    u[0, :, 1, 1] = 1.0
    if len(t_grid) == 1:
        return u
    ts, hs, snap = plan
    ja, ha = spec.coupling(ts)
    jm, hm = spec.coupling(ts + 0.5 * hs)
    jb, hb = spec.coupling(ts + hs)
    cos_phi = np.cos(phis)
    _kernels.rk4_sweep(cos_phi, np.asarray(deltas, dtype=float),
                       np.asarray(ja, dtype=float) + np.zeros_like(ts),
                       np.asarray(jm, dtype=float) + np.zeros_like(ts),
                       np.asarray(jb, dtype=float) + np.zeros_like(ts),
                       np.asarray(ha, dtype=float) + np.zeros_like(ts),
                       np.asarray(hm, dtype=float) + np.zeros_like(ts),
                       np.asarray(hb, dtype=float) + np.zeros_like(ts),
                       hs, snap, u)
    return u


def _unitarity_defect(u2):
    prod = np.matmul(np.conj(np.swapaxes(u2, -1, -2)), u2)
    prod[..., 0, 0] -= 1.0
    prod[..., 1, 1] -= 1.0
    defects = np.abs(prod).max(axis=(-1, -2))
    return defects


def propagate_blocks_numeric(spec: ChainSpec, t_grid, tol: float = 1e-9):
    """RK4-propagated 2x2 blocks plus exact single-occupation phases.

    Returns ``(u2, phases)`` with shapes (T, M, 2, 2) and (T, M).  The fixed
    step is halved until the unitarity defect over the whole grid drops below
    tol; failure to converge raises IntegrationError with the offending time.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size < 1 or t_grid[0] != 0.0:
        raise ValueError("t_grid must be a 1-d ascending grid starting at 0")
    if np.any(np.diff(t_grid) <= 0) and t_grid.size > 1:
        raise ValueError("t_grid must be strictly ascending")
    if not tol > 0:
        raise ValueError("tol must be positive")
    phis = mode_phases(spec.n_sites)
    deltas = 2.0 * spec.gamma * np.sin(phis)

    # The unitarity defect of the sweep scales like h^5; after a trial pass
    # the step factor jumps straight to the predicted size, then keeps
    # shrinking until the defect certificate holds.  A step budget guards
    # against tolerances below the roundoff floor.
    step_budget = int(2e7) if _kernels.HAVE_NUMBA else int(2e6)
    scale = 1.0
    worst = math.inf
    t_bad = float(t_grid[-1])
    for _ in range(_MAX_HALVINGS + 1):
        plan = _build_plan(spec, t_grid, scale) if len(t_grid) > 1 else (None, None, None)
        if len(t_grid) > 1 and plan[0].size > step_budget:
            raise IntegrationError(
                f"step budget exceeded chasing tol={tol:g} "
                f"(defect stuck at {worst:.3e})", t=t_bad)
        u2 = _rk4_pass(spec, phis, deltas, t_grid, plan)
        defects = _unitarity_defect(u2)
        worst = float(defects.max())
        t_bad = float(t_grid[int(np.argmax(defects.max(axis=1)))])
        if worst < tol:
            theta_j = spec.coupling_integrals(t_grid)[0]
            phases = np.exp(2j * np.outer(theta_j, np.cos(phis)))
            return u2, phases
        shrink = 0.7 * (tol / worst) ** 0.2
        scale *= min(0.5, max(shrink, 1.0 / 64.0))
        if scale < 1e-9:
            break
    raise IntegrationError(
        f"unitarity defect {worst:.3e} does not reach tol={tol:g}", t=t_bad)


def propagate_blocks_exact(spec: ChainSpec, t_grid):
    """Closed-form 2x2 blocks and phases on a time grid (proportional drives)."""
    lam = spec.ratio()
    if lam is None:
        raise ConfigError("exact propagator requires proportional drives (J = lam * h)")
    t_grid = np.asarray(t_grid, dtype=float)
    phis = mode_phases(spec.n_sites)
    theta_j = np.atleast_1d(spec.coupling_integrals(t_grid)[0])

    blocks = [mode_blocks(spec)[i] for i in range(phis.size)]
    ang = [exact_angles(b, lam) for b in blocks]
    s = np.array([math.sin(a.theta) for a in ang])
    c = np.array([math.cos(a.theta) for a in ang])
    l1 = np.array([a.lambda1 for a in ang])
    l2 = np.array([a.lambda2 for a in ang])

    e1 = np.exp(-1j * np.outer(theta_j, l1))  # (T, M)
    e2 = np.exp(-1j * np.outer(theta_j, l2))
    u2 = np.zeros((theta_j.size, phis.size, 2, 2), dtype=complex)
    u2[:, :, 0, 0] = c * c * e1 + s * s * e2
    u2[:, :, 0, 1] = -1j * s * c * (e1 - e2)
    u2[:, :, 1, 0] = -u2[:, :, 0, 1]
    u2[:, :, 1, 1] = s * s * e1 + c * c * e2
    phases = np.exp(2j * np.outer(theta_j, np.cos(phis)))
    return u2, phases


def _assemble_full(u2, phase):
    u = np.zeros(u2.shape[:-2] + (4, 4), dtype=complex)
    u[..., :2, :2] = u2
    u[..., 2, 2] = phase
    u[..., 3, 3] = phase
    return u


def propagate_numeric(spec: ChainSpec, mode: ModeBlock, t_grid, tol: float = 1e-9):
    """Numeric propagators of one mode pair at the requested grid times."""
    u2_all, phases_all = propagate_blocks_numeric(spec, t_grid, tol)
    i = mode.p - 1
    full = _assemble_full(u2_all[:, i], phases_all[:, i])
    return [Propagator(mode=mode, t=float(t), u=full[k]) for k, t in enumerate(np.asarray(t_grid))]
