"""Brute-force reference implementations at small N.

Two independent cross-checks for the mode-block pipeline:

- :class:`FockOracle` realizes the same N fermionic modes concretely in the
  full 2^N Fock space (Jordan-Wigner encoding over mode qubits, with the
  strings kept explicit), builds H(t) as a sparse operator sum and evolves the
  full density matrix by midpoint piecewise-constant exponentials.  Every
  observable is then a direct trace against an explicitly constructed
  operator -- no Wick factorization, no pfaffians -- so agreement validates
  the Fourier assembly, the Wick/pfaffian reduction and the two-site state
  construction end to end.

- :class:`SpinOracle` simulates the spin-chain Hamiltonian literally with
  periodic boundaries.  It differs from the mode picture by the
  Jordan-Wigner boundary/parity term, so its comparison report is
  informational: the gap is a property of the model, shrinking with N.

Both evolve inside the two fermion-parity blocks, which the Hamiltonians
preserve exactly; the step exponentials are applied through machine-precision
Taylor summation, so each substep stays unitary to roundoff.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .entanglement import concurrence_general
from .errors import ConsistencyError, SizeLimitError
from .model import (ChainSpec, DEGENERACY_RTOL, ModeBlock, ModeState, _probe_time,
                    mode_phases)
from .observables import ContractionSet, ModeExpectations

_LOWER = sp.csr_matrix(np.array([[0.0, 1.0], [0.0, 0.0]]))
_Z2 = sp.csr_matrix(np.diag([1.0, -1.0]))
_I2 = sp.identity(2, format="csr")

_PAULI = {
    "i": np.eye(2, dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _kron_chain(factors):
    out = factors[0]
    for f in factors[1:]:
        out = sp.kron(out, f, format="csr")
    return out


def _jw_annihilator(n_qubits, k):
    return _kron_chain([_Z2] * k + [_LOWER] + [_I2] * (n_qubits - k - 1))


def _sparse_exp_val(op, rho, tr):
    """Tr(rho op) / tr for sparse op and dense rho."""
    return complex((op.multiply(rho.T)).sum()) / tr


class _ParityEvolver:
    """Midpoint piecewise-exponential propagation inside fermion-parity blocks."""

    def __init__(self, hj: sp.spmatrix, hh: sp.spmatrix, n_qubits: int):
        dim = 2 ** n_qubits
        pops = np.array([bin(i).count("1") for i in range(dim)])
        self.ix = (np.where(pops % 2 == 0)[0], np.where(pops % 2 == 1)[0])
        self.dim = dim
        self.hj = [self._block(hj, ix) for ix in self.ix]
        self.hh = [self._block(hh, ix) for ix in self.ix]
        for mat, name in ((hj, "coupling"), (hh, "field")):
            cross = mat.tocsr()[self.ix[0]][:, self.ix[1]]
            if cross.nnz and abs(cross).max() > 1e-12:
                raise ConsistencyError(f"{name} Hamiltonian mixes parity sectors")

    @staticmethod
    def _block(mat, ix):
        return np.asarray(mat.tocsr()[ix][:, ix].todense(), dtype=complex)

    def assemble(self, blocks):
        full = np.zeros((self.dim, self.dim), dtype=complex)
        for b, ix in zip(blocks, self.ix):
            full[np.ix_(ix, ix)] = b
        return full

    def _h_blocks(self, j, h):
        return [j * self.hj[b] + h * self.hh[b] for b in range(2)]

    def thermal_blocks(self, spec: ChainSpec):
        j0, h0 = spec.coupling(0.0)
        if spec.kT == 0.0:
            jp, hp = j0, h0
            jq, hq = spec.coupling(_probe_time(spec))
            if abs(j0) + abs(h0) <= 1e-12 * max(abs(jq) + abs(hq), 1e-300):
                if abs(jq) + abs(hq) > 0.0:
                    # Scale-free direction of the Hamiltonian just after t = 0.
                    s = max(abs(jq), abs(hq))
                    jp, hp = jq / s, hq / s
                else:
                    return [np.eye(len(ix), dtype=complex) for ix in self.ix]
            eigs = [np.linalg.eigh(hb) for hb in self._h_blocks(jp, hp)]
            e0 = min(e[0].min() for e in eigs)
            scale = max(max(float(np.abs(e[0]).max()) for e in eigs), 1e-300)
            cut = e0 + DEGENERACY_RTOL * scale
            out = []
            for evals, evecs in eigs:
                v = evecs[:, evals <= cut]
                out.append(v @ v.conj().T)
            return out
        beta = 1.0 / spec.kT
        eigs = [np.linalg.eigh(hb) for hb in self._h_blocks(j0, h0)]
        xs = [-beta * e[0] for e in eigs]
        top = max(x.max() for x in xs)
        shift = top - 700.0 if top > 700.0 else 0.0
        return [(evecs * np.exp(x - shift)) @ evecs.conj().T
                for (x, (_, evecs)) in zip(xs, eigs)]

    @staticmethod
    def _apply_exp(a, u, dt):
        """u <- exp(-i dt a) u by Taylor summation (scalar phase dropped)."""
        shift = a.diagonal().real.mean()
        w = u.copy()
        out = u.copy()
        ref = np.abs(u).max()
        for k in range(1, 80):
            w = (a @ w - shift * w) * (-1j * dt / k)
            out += w
            if np.abs(w).max() < 1e-16 * ref:
                return out
        raise ConsistencyError("step exponential did not converge; reduce dt_sub")

    def raw_evolve(self, spec: ChainSpec, t_grid, dt_sub, refine: int = 1):
        """One midpoint-exponential sweep.

        ``refine`` multiplies the per-interval substep counts derived from
        dt_sub, so runs at refine = 1, 2, 4 nest exactly (required for clean
        Richardson extrapolation).
        """
        t_grid = np.asarray(t_grid, dtype=float)
        rho0 = self.thermal_blocks(spec)
        u = [np.eye(b.shape[0], dtype=complex) for b in rho0]
        out = []
        if t_grid[0] == 0.0:
            out.append([b.copy() for b in rho0])
            start = 1
        else:
            start = 0
        t_prev = 0.0
        for t_next in t_grid[start:]:
            span = t_next - t_prev
            n = max(1, int(math.ceil(span / dt_sub))) * refine
            h = span / n
            for i in range(n):
                tm = t_prev + (i + 0.5) * h
                j, hf = spec.coupling(tm)
                for b in range(2):
                    a = j * self.hj[b] + hf * self.hh[b]
                    u[b] = self._apply_exp(a, u[b], h)
            out.append([u[b] @ rho0[b] @ u[b].conj().T for b in range(2)])
            t_prev = t_next
        return out


def _romberg(runs):
    """Richardson-extrapolate runs at dt, dt/2, ... (error series in dt^2)."""
    table = [runs]
    for j in range(1, len(runs)):
        w = 4.0 ** j
        prev = table[-1]
        table.append([(w * prev[i + 1] - prev[i]) / (w - 1.0) for i in range(len(prev) - 1)])
    return table[-1][0]


@dataclass
class FockOracle:
    """Dense-operator realization of the N-mode model (N <= 12)."""

    n_sites: int

    def __post_init__(self):
        n = self.n_sites
        if n % 2 != 0 or n < 4:
            raise ValueError("n_sites must be an even integer >= 4")
        if n > 12:
            raise SizeLimitError("FockOracle supports at most 12 sites")
        self.n_pairs = n // 2
        self.phis = mode_phases(n)
        # Mode qubit ordering: labels +1..+N/2 first, then -1..-N/2.  The
        # ordering is private; the Jordan-Wigner strings it induces are part
        # of what the oracle exercises.
        self._c = [_jw_annihilator(n, k) for k in range(n)]
        self._cd = [op.conj().T.tocsr() for op in self._c]
        self.anticommutation_defect = self._check_ccr()
        self._gamma_cache = {}
        self._site_cache = None
        self._op_cache = {}

    # -- fermionic algebra ------------------------------------------------

    def _check_ccr(self):
        n = self.n_sites
        eye = sp.identity(2 ** n, format="csr")
        worst = 0.0
        for i in range(n):
            for j in range(n):
                anti = self._c[i] @ self._cd[j] + self._cd[j] @ self._c[i]
                if i == j:
                    anti = anti - eye
                worst = max(worst, abs(anti).max() if anti.nnz else 0.0)
                anti2 = self._c[i] @ self._c[j] + self._c[j] @ self._c[i]
                worst = max(worst, abs(anti2).max() if anti2.nnz else 0.0)
        if worst > 1e-12:
            raise ConsistencyError(f"mode operators violate anticommutation ({worst:.2e})")
        return worst

    def _plus(self, p):
        return p - 1

    def _minus(self, p):
        return self.n_pairs + p - 1

    # -- Hamiltonian ------------------------------------------------------

    def hamiltonian_parts(self, gamma: float):
        """Sparse (H_J, H_h) with H(t) = J(t) H_J + h(t) H_h."""
        key = float(gamma)
        if key not in self._gamma_cache:
            n = self.n_sites
            dim = 2 ** n
            hj = sp.csr_matrix((dim, dim), dtype=complex)
            hh = sp.csr_matrix((dim, dim), dtype=complex)
            for p in range(1, self.n_pairs + 1):
                phi = self.phis[p - 1]
                delta = 2.0 * gamma * math.sin(phi)
                cp, cm = self._c[self._plus(p)], self._c[self._minus(p)]
                cpd, cmd = self._cd[self._plus(p)], self._cd[self._minus(p)]
                occ = cpd @ cp + cmd @ cm
                hj = hj - 2.0 * math.cos(phi) * occ + 1j * delta * (cpd @ cmd + cp @ cm)
                hh = hh - 2.0 * occ
            hh = hh + self.n_sites * sp.identity(dim, format="csr")
            for name, m in (("H_J", hj), ("H_h", hh)):
                herm_defect = abs(m - m.conj().T).max() if m.nnz else 0.0
                if herm_defect > 1e-12:
                    raise ConsistencyError(f"{name} not Hermitian ({herm_defect:.2e})")
            self._gamma_cache[key] = (hj.tocsr(), hh.tocsr(),
                                      _ParityEvolver(hj, hh, n))
        return self._gamma_cache[key]

    def evolver(self, gamma: float) -> _ParityEvolver:
        return self.hamiltonian_parts(gamma)[2]

    def hamiltonian(self, spec: ChainSpec, t: float) -> np.ndarray:
        hj, hh, _ = self.hamiltonian_parts(spec.gamma)
        j, h = spec.coupling(t)
        return np.asarray((j * hj + h * hh).todense())

    # -- site operators ---------------------------------------------------

    def _sites(self):
        """Per-site A/B operators and the parity-string spin operators."""
        if self._site_cache is None:
            n = self.n_sites
            b_ops = []
            for j in range(1, n + 1):
                acc = None
                for p in range(1, self.n_pairs + 1):
                    phi = self.phis[p - 1]
                    term = (np.exp(-1j * j * phi) / math.sqrt(n)) * self._c[self._plus(p)]
                    term = term + (np.exp(1j * j * phi) / math.sqrt(n)) * self._c[self._minus(p)]
                    acc = term if acc is None else acc + term
                b_ops.append(acc.tocsr())
            a_ops = [(b.conj().T + b).tocsr() for b in b_ops]
            bb_ops = [(b.conj().T - b).tocsr() for b in b_ops]
            # prefix parity strings: string[l] = prod_{j<l} A_j B_j  (1-based l)
            strings = [sp.identity(2 ** n, format="csr", dtype=complex)]
            for l in range(1, n):
                strings.append((strings[-1] @ (a_ops[l - 1] @ bb_ops[l - 1])).tocsr())
            sx = [(strings[l - 1] @ a_ops[l - 1]).tocsr() for l in range(1, n + 1)]
            sy = [(-1j * strings[l - 1] @ bb_ops[l - 1]).tocsr() for l in range(1, n + 1)]
            sz = [(bb_ops[l - 1] @ a_ops[l - 1]).tocsr() for l in range(1, n + 1)]
            self._site_cache = {"A": a_ops, "B": bb_ops, "sx": sx, "sy": sy, "sz": sz}
        return self._site_cache

    def _site_op(self, kind, site):
        return self._sites()[kind][site - 1]

    def _cached(self, key, builder):
        if key not in self._op_cache:
            self._op_cache[key] = builder()
        return self._op_cache[key]

    # -- expectations -----------------------------------------------------

    def mode_expectations(self, rho) -> list[ModeExpectations]:
        """(n_p, n_{-p}, kappa_p) via direct mode-operator traces."""
        tr = float(np.trace(rho).real)
        out = []
        for p in range(1, self.n_pairs + 1):
            np_op = self._cached(("n", p), lambda p=p: (self._cd[self._plus(p)] @ self._c[self._plus(p)]).tocsr())
            nm_op = self._cached(("nm", p), lambda p=p: (self._cd[self._minus(p)] @ self._c[self._minus(p)]).tocsr())
            kp_op = self._cached(("kappa", p), lambda p=p: (self._c[self._plus(p)] @ self._c[self._minus(p)]).tocsr())
            out.append(ModeExpectations(
                p=p,
                n_p=float(_sparse_exp_val(np_op, rho, tr).real),
                n_mp=float(_sparse_exp_val(nm_op, rho, tr).real),
                kappa_p=_sparse_exp_val(kp_op, rho, tr),
            ))
        return out

    def mode_reduced(self, rho, spec: ChainSpec, t: float) -> list[ModeState]:
        """Reduced 4x4 pair states in the basis {|0>, c+c+|0>, c_p+|0>, c_-p+|0>}."""
        tr = float(np.trace(rho).real)
        states = []
        phis = self.phis
        for p in range(1, self.n_pairs + 1):
            def build(p=p):
                cpd, cmd = self._cd[self._plus(p)], self._cd[self._minus(p)]
                cp, cm = self._c[self._plus(p)], self._c[self._minus(p)]
                eye = sp.identity(2 ** self.n_sites, format="csr", dtype=complex)
                p0 = (eye - cpd @ cp) @ (eye - cmd @ cm)
                s = [eye, (cpd @ cmd).tocsr(), cpd, cmd]
                return [[(s[i] @ p0 @ s[j].conj().T).tocsr() for j in range(4)] for i in range(4)]
            eops = self._cached(("pair_e", p), build)
            red = np.zeros((4, 4), dtype=complex)
            for i in range(4):
                for j in range(4):
                    red[i, j] = _sparse_exp_val(eops[j][i], rho, tr)
            mode = ModeBlock(p=p, phi_p=float(phis[p - 1]),
                             delta_p=float(2.0 * spec.gamma * math.sin(phis[p - 1])))
            states.append(ModeState(mode=mode, t=t, rho=red, trace=float(np.trace(red).real)))
        return states

    def magnetization(self, rho) -> float:
        tr = float(np.trace(rho).real)
        vals = [_sparse_exp_val(self._site_op("sz", l), rho, tr).real
                for l in range(1, self.n_sites + 1)]
        return 0.5 * float(np.mean(vals))

    def contractions(self, rho, max_sep: int | None = None) -> ContractionSet:
        """F/P/Q/G by direct traces, anchored at site 1."""
        n = self.n_sites
        if max_sep is None:
            max_sep = n - 1
        tr = float(np.trace(rho).real)
        seps = np.arange(-max_sep, max_sep + 1)
        tables = {}
        for name, first, second in (("f", "B", "A"), ("p", "A", "B"),
                                    ("q", "A", "A"), ("g", "B", "B")):
            vals = []
            for d in seps:
                l, m = (1, 1 + d) if d >= 0 else (1 - d, 1)
                op = self._cached((name, int(d)), lambda f=first, s=second, l=l, m=m:
                                  (self._site_op(f, l) @ self._site_op(s, m)).tocsr())
                vals.append(_sparse_exp_val(op, rho, tr))
            tables[name] = np.array(vals)
        return ContractionSet(n_sites=n, separations=seps, f=tables["f"],
                              p=tables["p"], q=tables["q"], g=tables["g"])

    def string_expectation(self, rho, slots) -> complex:
        """<O_1 O_2 ...> for slots like [("B", 1), ("A", 2), ...] (1-based sites)."""
        tr = float(np.trace(rho).real)
        op = self._site_op(*slots[0])
        for kind, site in slots[1:]:
            op = op @ self._site_op(kind, site)
        return _sparse_exp_val(op.tocsr(), rho, tr)

    def spin_correlators(self, rho, r: int, anchor: int = 1):
        """(Sx, Sy, Sz) at separation r from direct sigma products."""
        tr = float(np.trace(rho).real)
        out = []
        for kind in ("sx", "sy", "sz"):
            op = self._cached((kind, anchor, r), lambda k=kind:
                              (self._site_op(k, anchor) @ self._site_op(k, anchor + r)).tocsr())
            out.append(0.25 * _sparse_exp_val(op, rho, tr).real)
        return tuple(out)

    def two_site_rho(self, rho, r: int):
        """Spin-basis reduced state of sites (1, 1+r) by operator tomography.

        Returns (rho4, off_x) where off_x is the largest matrix element
        outside the X pattern, reported so violations of the expected
        structure surface instead of being silently truncated.  Note the
        X entries themselves may carry imaginary parts under driving
        (cross xy correlations); the reported concurrence convention is the
        real projection, see :meth:`concurrence`.
        """
        tr = float(np.trace(rho).real)
        labels = ("i", "x", "y", "z")
        red = np.zeros((4, 4), dtype=complex)
        for a, la in enumerate(labels):
            for b, lb in enumerate(labels):
                def build(la=la, lb=lb):
                    eye = sp.identity(2 ** self.n_sites, format="csr", dtype=complex)
                    oa = eye if la == "i" else self._site_op("s" + la, 1)
                    ob = eye if lb == "i" else self._site_op("s" + lb, 1 + r)
                    return (oa @ ob).tocsr()
                op = self._cached(("tomo", r, la, lb), build)
                val = _sparse_exp_val(op, rho, tr)
                red += 0.25 * val * np.kron(_PAULI[la], _PAULI[lb])
        mask = np.ones((4, 4), dtype=bool)
        for i, j in ((0, 0), (1, 1), (2, 2), (3, 3), (0, 3), (3, 0), (1, 2), (2, 1)):
            mask[i, j] = False
        off_x = float(np.abs(red[mask]).max())
        return red, off_x

    def concurrence(self, rho, r: int, project_real: bool = True) -> float:
        """Concurrence of the reduced pair state.

        The driven chain develops imaginary anti-diagonal coherences
        (<sx sy> cross correlations) that the real X construction from
        (M, Sx, Sy, Sz) does not carry; the reported concurrence is defined
        on the real projection (rho + rho^*)/2, which is exactly the state
        the correlator pipeline assembles.  ``project_real=False`` gives the
        concurrence of the full complex state instead.
        """
        red, _ = self.two_site_rho(rho, r)
        red = 0.5 * (red + red.conj().T)
        if project_real:
            red = red.real
        red = red / np.trace(red).real
        return concurrence_general(red).c


def fock_evolve(oracle: FockOracle, spec: ChainSpec, t_grid, dt_sub: float = 0.02,
                levels: int = 2, richardson_tol: float | None = None,
                max_halvings: int = 4):
    """Full-space density matrices on a time grid.

    Propagates with midpoint piecewise-constant exponentials at substeps
    dt_sub, dt_sub/2, ... (``levels`` runs) and Richardson-extrapolates the
    results.  With ``richardson_tol`` set, the substep keeps halving until
    two successive extrapolants agree to that tolerance (normalized by the
    state trace).
    """
    if spec.n_sites != oracle.n_sites:
        raise ValueError("oracle size does not match the chain")
    t_grid = np.asarray(t_grid, dtype=float)
    ev = oracle.evolver(spec.gamma)
    runs = [ev.raw_evolve(spec, t_grid, dt_sub, refine=2 ** i) for i in range(levels)]

    def extrapolated(runs):
        out = []
        for g in range(len(t_grid)):
            out.append([_romberg([runs[i][g][b] for i in range(len(runs))])
                        for b in range(2)])
        return out

    best = extrapolated(runs)
    if richardson_tol is not None:
        for _ in range(max_halvings):
            runs.append(ev.raw_evolve(spec, t_grid, dt_sub, refine=2 ** len(runs)))
            new = extrapolated(runs)
            tr = sum(float(np.trace(b).real) for b in new[0])
            move = max(np.abs(new[g][b] - best[g][b]).max() for g in range(len(t_grid))
                       for b in range(2)) / tr
            best = new
            if move < richardson_tol:
                break
        else:
            raise ConsistencyError(
                f"oracle stepping did not converge to {richardson_tol:g}")
    return [ev.assemble(blocks) for blocks in best]


def fock_expectations(oracle: FockOracle, spec: ChainSpec, rho, t: float = 0.0,
                      separations=None):
    """Every pipeline observable, from direct operator traces on one state."""
    n = oracle.n_sites
    if separations is None:
        separations = list(range(1, n // 2))
        if not separations:
            separations = [1]
    result = {
        "mode_expectations": oracle.mode_expectations(rho),
        "mode_states": oracle.mode_reduced(rho, spec, t),
        "M": oracle.magnetization(rho),
        "contractions": oracle.contractions(rho),
        "correlators": {r: oracle.spin_correlators(rho, r) for r in separations},
        "two_site": {},
        "off_x": {},
        "im_x": {},
        "C": {},
        "C_full": {},
    }
    for r in separations:
        red, off_x = oracle.two_site_rho(rho, r)
        result["two_site"][r] = red
        result["off_x"][r] = off_x
        result["im_x"][r] = float(np.abs(red.imag).max())
        result["C"][r] = oracle.concurrence(rho, r)
        result["C_full"][r] = oracle.concurrence(rho, r, project_real=False)
    return result


@dataclass
class SpinOracle:
    """Literal spin-chain simulation (periodic boundaries), N <= 10."""

    n_sites: int
    gamma: float

    def __post_init__(self):
        n = self.n_sites
        if n % 2 != 0 or n < 4:
            raise ValueError("n_sites must be an even integer >= 4")
        if n > 10:
            raise SizeLimitError("SpinOracle supports at most 10 sites")
        self._pauli = {}
        for name in ("x", "y", "z"):
            mat = sp.csr_matrix(_PAULI[name])
            self._pauli[name] = [
                _kron_chain([_I2] * k + [mat] + [_I2] * (n - k - 1)) for k in range(n)
            ]
        dim = 2 ** n
        hj = sp.csr_matrix((dim, dim), dtype=complex)
        for i in range(n):
            ip = (i + 1) % n
            hj = hj - 0.5 * (1.0 + self.gamma) * (self._pauli["x"][i] @ self._pauli["x"][ip])
            hj = hj - 0.5 * (1.0 - self.gamma) * (self._pauli["y"][i] @ self._pauli["y"][ip])
        hh = -sum(self._pauli["z"][i] for i in range(n))
        herm = max(abs(hj - hj.conj().T).max(), abs(hh - hh.conj().T).max())
        if herm > 1e-12:
            raise ConsistencyError(f"spin Hamiltonian not Hermitian ({herm:.2e})")
        self.evolver = _ParityEvolver(hj, hh, n)

    def evolve(self, spec: ChainSpec, t_grid, dt_sub: float = 0.02, levels: int = 2):
        if spec.n_sites != self.n_sites or spec.gamma != self.gamma:
            raise ValueError("oracle does not match the chain")
        t_grid = np.asarray(t_grid, dtype=float)
        runs = [self.evolver.raw_evolve(spec, t_grid, dt_sub, refine=2 ** i) for i in range(levels)]
        out = []
        for g in range(len(t_grid)):
            blocks = [_romberg([runs[i][g][b] for i in range(len(runs))]) for b in range(2)]
            out.append(self.evolver.assemble(blocks))
        return out

    def magnetization(self, rho) -> float:
        tr = float(np.trace(rho).real)
        vals = [_sparse_exp_val(self._pauli["z"][i], rho, tr).real for i in range(self.n_sites)]
        return 0.5 * float(np.mean(vals))

    def spin_correlators(self, rho, r: int, anchor: int = 0):
        tr = float(np.trace(rho).real)
        out = []
        for name in ("x", "y", "z"):
            op = self._pauli[name][anchor] @ self._pauli[name][(anchor + r) % self.n_sites]
            out.append(0.25 * _sparse_exp_val(op.tocsr(), rho, tr).real)
        return tuple(out)

    def two_site_rho(self, rho, r: int):
        """Partial trace of rho onto sites (0, r), normalized."""
        n = self.n_sites
        tr = float(np.trace(rho).real)
        t = rho.reshape([2] * (2 * n))
        letters = "abcdefghijklmnopqrstuvwxyz"
        bra = list(letters[:n])
        ket = list(letters[:n])
        bra[0], bra[r] = "A", "B"
        ket[0], ket[r] = "C", "D"
        sub = "".join(bra) + "".join(ket) + "->ABCD"
        red = np.einsum(sub, t).reshape(4, 4) / tr
        return red

    def concurrence(self, rho, r: int, project_real: bool = True) -> float:
        """Concurrence of the reduced pair; real projection by default (the
        convention of the correlator pipeline, see FockOracle.concurrence)."""
        red = self.two_site_rho(rho, r)
        red = 0.5 * (red + red.conj().T)
        if project_real:
            red = red.real
        return concurrence_general(red / np.trace(red).real).c


def spin_evolve_compare(oracle: SpinOracle, spec: ChainSpec, t_grid,
                        pipeline_observables, dt_sub: float = 0.02):
    """Max deviations between the literal spin chain and supplied pipeline data.

    ``pipeline_observables`` maps each grid time index to a dict with keys
    M, Sx, Sy, Sz, C (nearest neighbor).  The returned report quantifies the
    boundary-term gap of the mode picture; it shrinks as N grows and
    vanishes when J = 0.
    """
    states = oracle.evolve(spec, t_grid, dt_sub=dt_sub)
    worst = {k: 0.0 for k in ("M", "Sx", "Sy", "Sz", "C")}
    for idx, rho in enumerate(states):
        ref = pipeline_observables[idx]
        sx, sy, sz = oracle.spin_correlators(rho, 1)
        worst["M"] = max(worst["M"], abs(oracle.magnetization(rho) - ref["M"]))
        worst["Sx"] = max(worst["Sx"], abs(sx - ref["Sx"]))
        worst["Sy"] = max(worst["Sy"], abs(sy - ref["Sy"]))
        worst["Sz"] = max(worst["Sz"], abs(sz - ref["Sz"]))
        worst["C"] = max(worst["C"], abs(oracle.concurrence(rho, 1) - ref["C"]))
    return worst
