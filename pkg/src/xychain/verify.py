"""Oracle-equivalence verification: the master correctness gate.

Runs the correlator pipeline and the brute-force Fock oracle over a matrix of
chain sizes, anisotropies, temperatures and drive forms, and reports the
worst discrepancy per observable, together with the standalone invariant
suites (pfaffian identities, concurrence closed forms, propagator checks).
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .entanglement import concurrence_general, concurrence_x, two_site_state
from .evolve import propagate_blocks_exact, propagate_blocks_numeric
from .model import ChainSpec, DrivingProfile, mode_blocks, mode_phases, thermal_state
from .observables import (ContractionSet, contraction_arrays, correlators,
                          pfaffian, pfaffian_by_expansion)
from .oracle import FockOracle, fock_evolve, fock_expectations
from .runner import _mode_series
from .schemas import CheckResult, VerifyResult

GATE_TOL = 1e-7

_GATE_PROFILES = {
    "exp": {"kind": "exp", "j0": 0.5, "j1": 2.0, "k": 1.0},
    "cos": {"kind": "cos", "j0": 0.5, "k": 1.0},
    "sin": {"kind": "sin", "j0": 0.5, "k": 1.0},
    "tanh": {"kind": "tanh", "j0": 0.5, "j1": 2.0, "k": 1.0},
}


def _profile(d) -> DrivingProfile:
    return DrivingProfile(kind=d["kind"], j0=d.get("j0", 0.0), j1=d.get("j1", 0.0),
                          k=d.get("k", 1.0), lam=d.get("lambda", 1.0))


def pipeline_observables(spec: ChainSpec, t_grid, separations, solver="numeric",
                         tol=1e-10):
    """Per-grid-time dict of M, correlators and concurrence from the pipeline."""
    n_p, n_mp, kappa = _mode_series(spec, np.asarray(t_grid, dtype=float), solver, tol)
    n = spec.n_sites
    m_t = (n_p + n_mp - 1.0).sum(axis=1) / n
    sep_axis, f, p, q, g = contraction_arrays(mode_phases(n), n_p, n_mp, kappa,
                                              n, max(separations))
    out = []
    for k in range(len(t_grid)):
        cs = ContractionSet(n_sites=n, separations=sep_axis, f=f[k], p=p[k],
                            q=q[k], g=g[k])
        row = {"M": float(m_t[k]), "corr": {}, "C": {}}
        for r in separations:
            sx, sy, sz = correlators(cs, r)
            row["corr"][r] = (sx, sy, sz)
            row["C"][r] = concurrence_x(two_site_state(m_t[k], sx, sy, sz)).c
        out.append(row)
    return out


def _gate_combo(args):
    """Worst pipeline-vs-Fock discrepancies for one parameter combination."""
    n, gamma, kt, profile_name, t_max, n_grid, dt_sub, levels = args
    spec = ChainSpec(n_sites=n, gamma=gamma,
                     j_profile=_profile(_GATE_PROFILES[profile_name]),
                     h_profile=DrivingProfile(kind="constant", j0=1.0), kT=kt)
    t_grid = np.linspace(0.0, t_max, n_grid)
    separations = list(range(1, max(n // 2, 2)))
    pipe = pipeline_observables(spec, t_grid, separations)
    oracle = FockOracle(n)
    rhos = fock_evolve(oracle, spec, t_grid, dt_sub=dt_sub, levels=levels)
    worst = {k: 0.0 for k in ("M", "Sx", "Sy", "Sz", "C")}
    for k in range(len(t_grid)):
        res = fock_expectations(oracle, spec, rhos[k], t=float(t_grid[k]),
                                separations=separations)
        worst["M"] = max(worst["M"], abs(res["M"] - pipe[k]["M"]))
        for r in separations:
            ox, oy, oz = res["correlators"][r]
            px, py, pz = pipe[k]["corr"][r]
            worst["Sx"] = max(worst["Sx"], abs(ox - px))
            worst["Sy"] = max(worst["Sy"], abs(oy - py))
            worst["Sz"] = max(worst["Sz"], abs(oz - pz))
            worst["C"] = max(worst["C"], abs(res["C"][r] - pipe[k]["C"][r]))
    return (n, gamma, kt, profile_name), worst


def gate_combos(max_n: int):
    sizes = [n for n in (4, 6, 8) if n <= max_n]
    combos = []
    for n in sizes:
        for gamma in (0.0, 0.5, 1.0):
            for kt in (0.0, 0.5, 1.0):
                for name in _GATE_PROFILES:
                    combos.append((n, gamma, kt, name))
    # A single reduced check per extra size beyond the standard gate.
    for n in (10, 12):
        if n <= max_n:
            combos.append((n, 1.0, 0.5, "exp"))
    return combos


def run_gate(max_n: int = 8, threads: int = 1, t_max: float = 10.0, n_grid: int = 9,
             dt_sub: float = 0.1, levels: int = 3):
    """Worst-per-observable discrepancies over the whole gate matrix."""
    jobs = [(n, g, kt, name, t_max, n_grid, dt_sub, levels)
            for (n, g, kt, name) in gate_combos(max_n)]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_gate_combo, jobs, chunksize=1))
    else:
        results = [_gate_combo(j) for j in jobs]
    worst = {k: 0.0 for k in ("M", "Sx", "Sy", "Sz", "C")}
    worst_combo = {k: None for k in worst}
    for combo, w in results:
        for key, val in w.items():
            if val > worst[key]:
                worst[key] = val
                worst_combo[key] = combo
    return worst, worst_combo, len(results)


def _check_exact_vs_numeric(n=100, lams=(0.25, 0.5, 1.0, 2.0, 4.0), t_max=10.0,
                            n_grid=50, tol=1e-10):
    """Max entrywise deviation between closed-form and RK4 propagators."""
    worst = 0.0
    t_grid = np.linspace(0.0, t_max, n_grid)
    for lam in lams:
        spec = ChainSpec(n_sites=n, gamma=1.0,
                         j_profile=DrivingProfile(kind="exp", j0=0.5, j1=2.0, k=1.0),
                         h_profile=DrivingProfile(kind="proportional", lam=1.0 / lam),
                         kT=0.0)
        ue, pe = propagate_blocks_exact(spec, t_grid)
        un, pn = propagate_blocks_numeric(spec, t_grid, tol)
        worst = max(worst, float(np.abs(ue - un).max()), float(np.abs(pe - pn).max()))
    return worst


def _check_pfaffian(seed=7):
    rng = np.random.default_rng(seed)
    worst_rel = 0.0
    worst_exp = 0.0
    for n in (2, 4, 6, 8, 10, 12, 14, 16):
        for _ in range(4):
            a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
            a = a - a.T
            pf = pfaffian(a)
            det = np.linalg.det(a)
            worst_rel = max(worst_rel, abs(pf * pf - det) / abs(det))
            if n <= 8:
                worst_exp = max(worst_exp, abs(pf - pfaffian_by_expansion(a)) / abs(pf))
    return worst_rel, worst_exp


def random_x_state(rng):
    """A random valid X-structured two-qubit density matrix."""
    d = rng.dirichlet(np.ones(4))
    m14 = (rng.uniform(-1, 1)) * np.sqrt(d[0] * d[3])
    m23 = (rng.uniform(-1, 1)) * np.sqrt(d[1] * d[2])
    rho = np.diag(d).astype(float)
    rho[0, 3] = rho[3, 0] = m14
    rho[1, 2] = rho[2, 1] = m23
    return rho

def _check_concurrence(seed=11, n_states=1000):
    from .entanglement import TwoSiteState
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_states):
        rho = random_x_state(rng)
        cx = concurrence_x(TwoSiteState(rho=rho)).c
        cg = concurrence_general(rho).c
        worst = max(worst, abs(cx - cg))
    # Werner state at p = 1/2: concurrence (3p-1)/2 = 1/4
    bell = np.zeros((4, 4))
    bell[0, 0] = bell[3, 3] = bell[0, 3] = bell[3, 0] = 0.5
    werner = 0.5 * bell + 0.5 * np.eye(4) / 4
    werner_err = abs(concurrence_general(werner).c - 0.25)
    return worst, werner_err


def _check_thermal(seed=3):
    """Thermal states: hermitian, PSD, commuting with the t=0 block."""
    from .model import hamiltonian_block
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(20):
        spec = ChainSpec(n_sites=8, gamma=float(rng.uniform(0, 1)),
                         j_profile=DrivingProfile(kind="exp", j0=float(rng.uniform(-1, 1)),
                                                  j1=float(rng.uniform(-2, 2)),
                                                  k=float(rng.uniform(0.1, 10))),
                         h_profile=DrivingProfile(kind="constant", j0=float(rng.uniform(-1, 1))),
                         kT=float(rng.choice([0.0, 0.3, 1.0])))
        for mode in mode_blocks(spec):
            st = thermal_state(spec, mode)
            h0 = hamiltonian_block(spec, mode, 0.0)
            scale = max(1.0, float(np.abs(st.rho).max()) * max(1.0, float(np.abs(h0).max())))
            comm = np.abs(st.rho @ h0 - h0 @ st.rho).max() / scale
            herm = np.abs(st.rho - st.rho.conj().T).max()
            neg = max(0.0, -float(np.linalg.eigvalsh(st.rho).min()))
            worst = max(worst, float(comm), float(herm), neg)
    return worst


@dataclass
class VerificationReport:
    checks: list
    passed: bool
    text: str

    def to_schema(self) -> VerifyResult:
        return VerifyResult(passed=self.passed, checks=self.checks, report=self.text)


def run_verification(max_n: int = 8, threads: int | None = None, t_max: float = 10.0,
                     dt_sub: float = 0.1, levels: int = 3) -> VerificationReport:
    """Full verification: oracle gate plus invariant suites."""
    if threads is None:
        threads = min(4, os.cpu_count() or 1)
    checks = []

    oracle = FockOracle(min(max_n, 8))
    checks.append(CheckResult(name="mode anticommutation relations",
                              worst=float(oracle.anticommutation_defect),
                              tol=1e-12, passed=oracle.anticommutation_defect < 1e-12))

    worst, worst_combo, n_combos = run_gate(max_n=max_n, threads=threads, t_max=t_max,
                                            dt_sub=dt_sub, levels=levels)
    for key in ("M", "Sx", "Sy", "Sz", "C"):
        label = f"Fock-oracle gate {key} ({n_combos} combos)"
        if worst_combo[key] is not None:
            label += f", worst at N={worst_combo[key][0]}, gamma={worst_combo[key][1]}," \
                     f" kT={worst_combo[key][2]}, {worst_combo[key][3]}"
        checks.append(CheckResult(name=label, worst=worst[key], tol=GATE_TOL,
                                  passed=worst[key] < GATE_TOL))

    ex_worst = _check_exact_vs_numeric(n=min(max_n * 4, 32))
    checks.append(CheckResult(name="exact vs numeric propagator (proportional drives)",
                              worst=ex_worst, tol=1e-8, passed=ex_worst < 1e-8))

    pf_rel, pf_exp = _check_pfaffian()
    checks.append(CheckResult(name="pfaffian^2 = det (sizes <= 16)", worst=pf_rel,
                              tol=1e-8, passed=pf_rel < 1e-8))
    checks.append(CheckResult(name="pfaffian vs recursive expansion (sizes <= 8)",
                              worst=pf_exp, tol=1e-10, passed=pf_exp < 1e-10))

    cx_worst, werner_err = _check_concurrence()
    checks.append(CheckResult(name="concurrence closed form vs general (1000 X states)",
                              worst=cx_worst, tol=1e-10, passed=cx_worst < 1e-10))
    checks.append(CheckResult(name="Werner state concurrence at p=1/2", worst=werner_err,
                              tol=1e-10, passed=werner_err < 1e-10))

    th_worst = _check_thermal()
    checks.append(CheckResult(name="thermal states hermitian/PSD/commuting",
                              worst=th_worst, tol=1e-10, passed=th_worst < 1e-10))

    passed = all(c.passed for c in checks)
    lines = [f"verification over gate matrix (max_n={max_n}, t in [0, {t_max:g}])"]
    for c in checks:
        lines.append(f"[{'PASS' if c.passed else 'FAIL'}] {c.name}: "
                     f"worst {c.worst:.3e} (tol {c.tol:g})")
    lines.append("overall: " + ("PASS" if passed else "FAIL"))
    return VerificationReport(checks=checks, passed=passed, text="\n".join(lines))
