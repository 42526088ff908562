"""Chain definition: driving profiles, momentum modes, Hamiltonian blocks, thermal states.

The system is a periodic spin-1/2 XY chain with anisotropy ``gamma``, a
time-dependent nearest-neighbor coupling ``J(t)`` and a transverse field
``h(t)`` (hbar = 1).  After Jordan-Wigner and Fourier transformations the
Hamiltonian splits into independent blocks, one per momentum pair ``(p, -p)``,
each acting on the four-dimensional Fock subspace spanned by

    { |0>,  c_p^+ c_{-p}^+ |0>,  c_p^+ |0>,  c_{-p}^+ |0> }.

In that basis the block reads

    [[ 2h,          -i J d_p,           0,        0      ],
     [ i J d_p,     -4 J cos(phi) - 2h, 0,        0      ],
     [ 0,            0,                -2 J cos(phi), 0  ],
     [ 0,            0,                 0, -2 J cos(phi)]]

with ``phi = phi_p`` and ``d_p = 2 gamma sin(phi_p)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

PROFILE_KINDS = ("constant", "exp", "cos", "sin", "tanh", "proportional")

# Transient profiles are flat to better than ~1e-9 outside these windows
# (in units of 1/K); the integrator may relax its step bound there.
_EXP_TAIL = 25.0
_TANH_CENTER = 2.5
_TANH_HALF_WIDTH = 15.0

# Relative gap below which eigenvalues count as degenerate at kT = 0.
DEGENERACY_RTOL = 1e-9


def _log_cosh(x):
    """log(cosh(x)) without overflow for large |x|."""
    ax = np.abs(x)
    return ax + np.log1p(np.exp(-2.0 * ax)) - math.log(2.0)


@dataclass(frozen=True)
class DrivingProfile:
    """A tagged closed-form drive, used for both J(t) and h(t).

    Kinds and their values at time t:

    - ``constant``:      j0
    - ``exp``:           j1 + (j0 - j1) exp(-k t)
    - ``cos``:           j0 - j0 cos(k t)
    - ``sin``:           j0 - j0 sin(k t)
    - ``tanh``:          j0 + (j1 - j0)/2 [tanh(k (t - 5/2)) + 1]
    - ``proportional``:  lam * companion(t), where the companion is the other
      drive of the chain (declares J = lam * h, or h = lam * J)

    Parameter signs are not restricted; ``k`` must be positive for the
    time-dependent kinds.
    """

    kind: str
    j0: float = 0.0
    j1: float = 0.0
    k: float = 1.0
    lam: float = 1.0

    def __post_init__(self):
        if self.kind not in PROFILE_KINDS:
            raise ConfigError(f"unknown profile kind {self.kind!r}")
        if self.kind in ("exp", "cos", "sin", "tanh") and not self.k > 0:
            raise ConfigError(f"profile kind {self.kind!r} requires k > 0")
        if self.kind == "proportional" and self.lam == 0:
            raise ConfigError("proportional profile requires a nonzero factor")

    def evaluate(self, t, companion=None):
        """Drive value at time t (scalar or ndarray).

        For ``proportional`` the companion drive's value at the same time must
        be supplied.
        """
        if self.kind == "constant":
            return self.j0 * np.ones_like(np.asarray(t, dtype=float)) if np.ndim(t) else self.j0
        if self.kind == "exp":
            return self.j1 + (self.j0 - self.j1) * np.exp(-self.k * np.asarray(t, dtype=float))
        if self.kind == "cos":
            return self.j0 - self.j0 * np.cos(self.k * np.asarray(t, dtype=float))
        if self.kind == "sin":
            return self.j0 - self.j0 * np.sin(self.k * np.asarray(t, dtype=float))
        if self.kind == "tanh":
            arg = self.k * (np.asarray(t, dtype=float) - _TANH_CENTER)
            return self.j0 + 0.5 * (self.j1 - self.j0) * (np.tanh(arg) + 1.0)
        if companion is None:
            raise ConfigError("proportional profile evaluated without its companion value")
        return self.lam * companion

    def antiderivative(self, t, companion_integral=None):
        """Integral of the drive from 0 to t, in closed form."""
        tt = np.asarray(t, dtype=float)
        if self.kind == "constant":
            out = self.j0 * tt
        elif self.kind == "exp":
            out = self.j1 * tt + (self.j0 - self.j1) * (1.0 - np.exp(-self.k * tt)) / self.k
        elif self.kind == "cos":
            out = self.j0 * tt - self.j0 * np.sin(self.k * tt) / self.k
        elif self.kind == "sin":
            out = self.j0 * tt - self.j0 * (1.0 - np.cos(self.k * tt)) / self.k
        elif self.kind == "tanh":
            lc = _log_cosh(self.k * (tt - _TANH_CENTER)) - _log_cosh(self.k * _TANH_CENTER)
            out = self.j0 * tt + 0.5 * (self.j1 - self.j0) * (tt + lc / self.k)
        else:
            if companion_integral is None:
                raise ConfigError("proportional profile integrated without its companion integral")
            return self.lam * companion_integral
        return out if np.ndim(t) else float(out)

    def activity_window(self):
        """Interval outside which the drive is constant to ~1e-9.

        Returns None for drives that never settle (cos, sin), and a
        zero-length window for constant drives.
        """
        if self.kind == "constant":
            return (0.0, 0.0)
        if self.kind == "exp":
            return (0.0, _EXP_TAIL / self.k)
        if self.kind == "tanh":
            return (_TANH_CENTER - _TANH_HALF_WIDTH / self.k, _TANH_CENTER + _TANH_HALF_WIDTH / self.k)
        return None


def evaluate_profile(profile: DrivingProfile, t, companion=None):
    """Functional form of :meth:`DrivingProfile.evaluate`."""
    return profile.evaluate(t, companion)


def profile_antiderivative(profile: DrivingProfile, t, companion_integral=None):
    """Functional form of :meth:`DrivingProfile.antiderivative`."""
    return profile.antiderivative(t, companion_integral)


@dataclass(frozen=True)
class ChainSpec:
    """Definition of one simulated chain: size, anisotropy, drives, temperature."""

    n_sites: int
    gamma: float
    j_profile: DrivingProfile
    h_profile: DrivingProfile
    kT: float = 0.0

    def __post_init__(self):
        if self.n_sites < 4 or self.n_sites % 2 != 0:
            raise ConfigError("n_sites must be an even integer >= 4")
        if not 0.0 <= self.gamma <= 1.0:
            raise ConfigError("gamma must lie in [0, 1]")
        if not self.kT >= 0.0:
            raise ConfigError("kT must be non-negative")
        if self.j_profile.kind == "proportional" and self.h_profile.kind == "proportional":
            raise ConfigError("at most one of the two drives may be proportional to the other")

    def coupling(self, t):
        """(J(t), h(t)) with proportional drives resolved against their companion."""
        if self.j_profile.kind == "proportional":
            h = self.h_profile.evaluate(t)
            return self.j_profile.evaluate(t, companion=h), h
        if self.h_profile.kind == "proportional":
            j = self.j_profile.evaluate(t)
            return j, self.h_profile.evaluate(t, companion=j)
        return self.j_profile.evaluate(t), self.h_profile.evaluate(t)

    def coupling_integrals(self, t):
        """(int_0^t J, int_0^t h) using the closed-form antiderivatives."""
        if self.j_profile.kind == "proportional":
            ih = self.h_profile.antiderivative(t)
            return self.j_profile.antiderivative(t, companion_integral=ih), ih
        if self.h_profile.kind == "proportional":
            ij = self.j_profile.antiderivative(t)
            return ij, self.h_profile.antiderivative(t, companion_integral=ij)
        return self.j_profile.antiderivative(t), self.h_profile.antiderivative(t)

    def ratio(self):
        """Declared constant ratio J/h, or None when not declared proportional."""
        if self.j_profile.kind == "proportional":
            return self.j_profile.lam
        if self.h_profile.kind == "proportional":
            return 1.0 / self.h_profile.lam
        return None

    def activity_windows(self):
        """Union of drive activity windows, or None when a drive never settles."""
        windows = []
        for prof in (self.j_profile, self.h_profile):
            if prof.kind == "proportional":
                continue
            w = prof.activity_window()
            if w is None:
                return None
            if w[1] > w[0]:
                windows.append(w)
        return windows

    def max_rate(self):
        """Largest angular rate K among the time-dependent drives (0 if none)."""
        ks = [p.k for p in (self.j_profile, self.h_profile)
              if p.kind in ("exp", "cos", "sin", "tanh")]
        return max(ks) if ks else 0.0


@dataclass(frozen=True)
class ModeBlock:
    """One momentum pair (p, -p): index p, momentum phi_p and gap parameter delta_p."""

    p: int
    phi_p: float
    delta_p: float


@dataclass(frozen=True)
class ModeState:
    """Unnormalized 4x4 density matrix of one mode pair at time t."""

    mode: ModeBlock
    t: float
    rho: np.ndarray
    trace: float


def mode_phases(n_sites: int) -> np.ndarray:
    """Momenta phi_p = (2p - 1) pi / N for p = 1..N/2.

    The antiperiodic grid keeps the site-to-mode Fourier map unitary while
    arranging all N modes into (p, -p) pairs, which the four-dimensional
    block decomposition requires; an integer grid 2 pi p / N would double the
    phi = pi mode and omit phi = 0, breaking canonical anticommutation of the
    site operators.
    """
    p = np.arange(1, n_sites // 2 + 1)
    return (2.0 * p - 1.0) * np.pi / n_sites


def mode_blocks(spec: ChainSpec) -> list[ModeBlock]:
    """All momentum pairs of the chain, p = 1..N/2."""
    phis = mode_phases(spec.n_sites)
    return [ModeBlock(p=i + 1, phi_p=float(phi), delta_p=float(2.0 * spec.gamma * math.sin(phi)))
            for i, phi in enumerate(phis)]


def hamiltonian_block(spec: ChainSpec, mode: ModeBlock, t: float) -> np.ndarray:
    """4x4 Hamiltonian of one mode pair at time t (Hermitian by construction)."""
    if t < 0:
        raise ValueError("t must be non-negative")
    j, h = spec.coupling(t)
    c = math.cos(mode.phi_p)
    out = np.zeros((4, 4), dtype=complex)
    out[0, 0] = 2.0 * h
    out[0, 1] = -1j * j * mode.delta_p
    out[1, 0] = 1j * j * mode.delta_p
    out[1, 1] = -4.0 * j * c - 2.0 * h
    out[2, 2] = -2.0 * j * c
    out[3, 3] = -2.0 * j * c
    return out


def _ground_projector(evals: np.ndarray, evecs: np.ndarray) -> np.ndarray:
    """Equal-weight projector onto the (possibly degenerate) lowest eigenspace.

    Degeneracy is detected relative to the spectral scale, so the projector is
    invariant under rescaling the Hamiltonian.
    """
    e0 = evals.min()
    scale = max(float(np.abs(evals).max()), 1e-300)
    mask = evals <= e0 + DEGENERACY_RTOL * scale
    v = evecs[:, mask]
    return v @ v.conj().T


def _probe_time(spec: ChainSpec) -> float:
    return 1e-6 / max(spec.max_rate(), 1.0)


def thermal_state(spec: ChainSpec, mode: ModeBlock) -> ModeState:
    """Initial mode state: exp(-H(0)/kT), unnormalized.

    At kT = 0 this is the equal-weight projector onto the ground eigenspace of
    the t = 0 block.  When the whole block vanishes at t = 0 (both drives
    start at zero) the ground space is taken from the block direction just
    after t = 0, so that a drive switching on from zero starts from the state
    it would relax into, not from the featureless identity.
    """
    h0 = hamiltonian_block(spec, mode, 0.0)
    if spec.kT == 0.0:
        hmat = h0
        scale0 = np.abs(h0).max()
        eps = _probe_time(spec)
        hprobe = hamiltonian_block(spec, mode, eps)
        scale_probe = np.abs(hprobe).max()
        if scale0 <= 1e-12 * max(scale_probe, 1e-300):
            # Drive switching on from H(0) = 0: use the (scale-free) direction
            # of the block just after t = 0.
            hmat = hprobe / scale_probe if scale_probe > 0.0 else None
        if hmat is None:
            rho = np.eye(4, dtype=complex)
        else:
            evals, evecs = np.linalg.eigh(hmat)
            rho = _ground_projector(evals, evecs)
    else:
        beta = 1.0 / spec.kT
        evals, evecs = np.linalg.eigh(h0)
        x = -beta * evals
        if x.max() > 700.0:
            # Overflow guard: drop an (irrelevant) positive scale factor.
            x = x - x.max()
        rho = (evecs * np.exp(x)) @ evecs.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return ModeState(mode=mode, t=0.0, rho=rho, trace=float(np.trace(rho).real))
