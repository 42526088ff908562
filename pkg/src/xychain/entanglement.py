"""Two-site reduced states and Wootters concurrence.

Global phase-flip symmetry of the chain makes the reduced density matrix of
any site pair real, symmetric and X-structured in the product basis
(|uu>, |ud>, |du>, |dd>): the only nonzeros are the diagonal and the two
anti-diagonal corners.  Its entries follow from the per-site magnetization M
and the spin correlators (translation invariance gives both sites the same
M):

    rho_11 = 1/4 + M + Sz          rho_14 = Sx - Sy
    rho_22 = rho_33 = 1/4 - Sz     rho_23 = Sx + Sy
    rho_44 = 1/4 - M + Sz

which is unit trace by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError

_DIAG_CLAMP = 1e-10
_PSD_TOL = 1e-7

_SY_SY = np.array([
    [0, 0, 0, -1],
    [0, 0, 1, 0],
    [0, 1, 0, 0],
    [-1, 0, 0, 0],
], dtype=float)  # sigma_y (x) sigma_y in the product basis


@dataclass(frozen=True)
class TwoSiteState:
    """X-structured 4x4 reduced density matrix of a site pair."""

    rho: np.ndarray


@dataclass(frozen=True)
class ConcurrenceValue:
    """Concurrence with the four spin-flip roots, sorted descending."""

    c: float
    roots: tuple


def two_site_state(m: float, sx: float, sy: float, sz: float) -> TwoSiteState:
    """Assemble the two-site X state from magnetization and correlators."""
    rho = np.zeros((4, 4), dtype=float)
    rho[0, 0] = 0.25 + m + sz
    rho[1, 1] = 0.25 - sz
    rho[2, 2] = 0.25 - sz
    rho[3, 3] = 0.25 - m + sz
    rho[1, 2] = rho[2, 1] = sx + sy
    rho[0, 3] = rho[3, 0] = sx - sy
    diag = rho.diagonal().copy()
    if diag.min() < -_PSD_TOL:
        raise ConsistencyError(
            f"two-site diagonal entry {diag.min():.3e} below tolerance; "
            "upstream correlators are inconsistent")
    np.fill_diagonal(rho, np.clip(diag, 0.0, None) if diag.min() < 0 else diag)
    # PSD of an X matrix reduces to its two 2x2 blocks.
    outer_det = rho[0, 0] * rho[3, 3] - rho[0, 3] ** 2
    inner_det = rho[1, 1] * rho[2, 2] - rho[1, 2] ** 2
    if min(outer_det, inner_det) < -_PSD_TOL:
        raise ConsistencyError(
            f"two-site state not positive semidefinite (minors {outer_det:.3e}, "
            f"{inner_det:.3e})")
    return TwoSiteState(rho=rho)


def _x_roots(rho):
    d_out = max(rho[0, 0] * rho[3, 3], 0.0)
    d_in = max(rho[1, 1] * rho[2, 2], 0.0)
    s_out = np.sqrt(d_out)
    s_in = np.sqrt(d_in)
    return (s_out + abs(rho[0, 3]), s_in + abs(rho[1, 2]),
            abs(s_out - abs(rho[0, 3])), abs(s_in - abs(rho[1, 2])))


def concurrence_x(state: TwoSiteState) -> ConcurrenceValue:
    """Concurrence of an X state from the closed-form spin-flip roots."""
    rho = state.rho
    if rho[0, 0] * rho[3, 3] < -_PSD_TOL or rho[1, 1] * rho[2, 2] < -_PSD_TOL:
        raise ConsistencyError("negative diagonal products; not a valid X state")
    roots = tuple(sorted(_x_roots(rho), reverse=True))
    c = max(0.0, roots[0] - roots[1] - roots[2] - roots[3])
    if c > 1.0 + 1e-9:
        raise ConsistencyError(f"concurrence {c} outside [0, 1]")
    return ConcurrenceValue(c=min(c, 1.0), roots=roots)


def concurrence_general(rho) -> ConcurrenceValue:
    """Wootters concurrence of an arbitrary two-qubit density matrix.

    Serves as the independent oracle for the X-state closed form: the roots
    are the square roots of the eigenvalues of rho * rho_tilde with
    rho_tilde = (sy (x) sy) rho^* (sy (x) sy).
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError("two-qubit density matrix must be 4x4")
    if np.abs(rho - rho.conj().T).max() > 1e-8:
        raise ValueError("density matrix must be Hermitian")
    if abs(np.trace(rho).real - 1.0) > 1e-8:
        raise ValueError("density matrix must have unit trace")
    if np.linalg.eigvalsh(rho).min() < -1e-8:
        raise ValueError("density matrix must be positive semidefinite")
    rho_tilde = _SY_SY @ rho.conj() @ _SY_SY
    evals = np.linalg.eigvals(rho @ rho_tilde)
    evals = np.clip(evals.real, 0.0, None)
    roots = tuple(sorted(np.sqrt(evals), reverse=True))
    c = max(0.0, roots[0] - roots[1] - roots[2] - roots[3])
    return ConcurrenceValue(c=float(min(c, 1.0)), roots=roots)


def asymptotic_value(series, window_fraction: float = 0.3) -> float:
    """Late-time average of a concurrence series.

    ``series`` holds (t, C) pairs covering the post-transient evolution; the
    average is taken over the trailing ``window_fraction`` of the time span.
    """
    if not 0.0 < window_fraction < 1.0:
        raise ValueError("window_fraction must lie in (0, 1)")
    arr = np.asarray(series, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("series must be a sequence of (t, C) pairs")
    t = arr[:, 0]
    c = arr[:, 1]
    t0 = t[-1] - window_fraction * (t[-1] - t[0])
    mask = t >= t0
    if mask.sum() < 10:
        raise ValueError("series too short: need at least 10 samples in the window")
    return float(c[mask].mean())
