import math

import numpy as np
import pytest

from xychain.evolve import propagate_numeric, evolve_state
from xychain.model import (ChainSpec, DrivingProfile, ModeBlock, ModeState,
                           mode_blocks, thermal_state)
from xychain.observables import (contraction_set, correlators, magnetization,
                                 mode_expectations, pfaffian, pfaffian_by_expansion)

CONST_H = DrivingProfile(kind="constant", j0=1.0)


def equilibrium_states(j=0.5, h=1.0, n=8, gamma=1.0, kt=0.5):
    spec = ChainSpec(n_sites=n, gamma=gamma,
                     j_profile=DrivingProfile(kind="constant", j0=j),
                     h_profile=DrivingProfile(kind="constant", j0=h), kT=kt)
    return spec, [thermal_state(spec, m) for m in mode_blocks(spec)]


def driven_states(t, n=8, kt=0.5, k=1.0):
    spec = ChainSpec(n_sites=n, gamma=1.0,
                     j_profile=DrivingProfile(kind="exp", j0=0.5, j1=2.0, k=k),
                     h_profile=CONST_H, kT=kt)
    out = []
    for st in (thermal_state(spec, m) for m in mode_blocks(spec)):
        prop = propagate_numeric(spec, st.mode, np.array([0.0, t]), tol=1e-10)[1]
        out.append(evolve_state(st, prop))
    return spec, out


def project(idx):
    rho = np.zeros((4, 4), dtype=complex)
    rho[idx, idx] = 1.0
    return rho


class TestModeExpectations:
    def test_vacuum(self):
        mode = ModeBlock(p=1, phi_p=0.3, delta_p=0.5)
        e = mode_expectations(ModeState(mode=mode, t=0.0, rho=project(0), trace=1.0))
        assert e.n_p == e.n_mp == 0.0
        assert e.kappa_p == 0.0

    def test_doubly_occupied(self):
        mode = ModeBlock(p=1, phi_p=0.3, delta_p=0.5)
        e = mode_expectations(ModeState(mode=mode, t=0.0, rho=project(1), trace=1.0))
        assert e.n_p == e.n_mp == 1.0
        assert e.kappa_p == 0.0

    def test_pairing_bound(self):
        rng = np.random.default_rng(9)
        for _ in range(30):
            _, states = driven_states(float(rng.uniform(0, 4)), kt=float(rng.choice([0.0, 0.5])))
            for st in states:
                e = mode_expectations(st)
                assert -1e-9 <= e.n_p <= 1 + 1e-9
                assert -1e-9 <= e.n_mp <= 1 + 1e-9
                assert abs(e.kappa_p) ** 2 <= e.n_p * (1 - e.n_mp) + 1e-9


class TestMagnetization:
    def test_all_vacuum(self):
        spec, states = equilibrium_states()
        empty = [ModeState(mode=s.mode, t=0.0, rho=project(0), trace=1.0) for s in states]
        assert magnetization(empty, 8) == pytest.approx(-0.5)

    def test_all_occupied(self):
        spec, states = equilibrium_states()
        full = [ModeState(mode=s.mode, t=0.0, rho=project(1), trace=1.0) for s in states]
        assert magnetization(full, 8) == pytest.approx(0.5)

    def test_incomplete_set_rejected(self):
        _, states = equilibrium_states()
        with pytest.raises(ValueError):
            magnetization(states[:-1], 8)


class TestPfaffian:
    def test_two_by_two(self):
        assert pfaffian(np.array([[0.0, 2.5], [-2.5, 0.0]])) == pytest.approx(2.5)

    def test_four_by_four_closed_form(self):
        rng = np.random.default_rng(2)
        a, b, c, d, e, f = rng.normal(size=6)
        m = np.array([[0, a, b, c], [-a, 0, d, e], [-b, -d, 0, f], [-c, -e, -f, 0]])
        assert pfaffian(m) == pytest.approx(a * f - b * e + c * d, rel=1e-12)

    def test_square_is_determinant(self):
        rng = np.random.default_rng(3)
        for n in (4, 8, 12, 16):
            m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
            m = m - m.T
            pf = pfaffian(m)
            det = np.linalg.det(m)
            assert abs(pf * pf - det) / abs(det) < 1e-8

    def test_expansion_agreement(self):
        rng = np.random.default_rng(4)
        for n in (2, 4, 6, 8):
            m = rng.normal(size=(n, n))
            m = m - m.T
            assert abs(pfaffian(m) - pfaffian_by_expansion(m)) < 1e-10 * max(1, abs(pfaffian(m)))

    def test_singular(self):
        m = np.zeros((4, 4))
        assert pfaffian(m) == 0.0

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            pfaffian(np.zeros((3, 3)))
        with pytest.raises(ValueError):
            pfaffian(np.ones((4, 4)))


class TestContractions:
    def test_canonical_values(self):
        _, states = equilibrium_states()
        cs = contraction_set(states, 8)
        assert cs.Q(0) == pytest.approx(1.0, abs=1e-12)
        assert cs.G(0) == pytest.approx(-1.0, abs=1e-12)

    def test_transpose_relation(self):
        _, states = driven_states(2.0)
        cs = contraction_set(states, 8)
        for r in range(-7, 8):
            assert cs.P(r) == pytest.approx(-cs.F(-r), abs=1e-10)

    def test_equilibrium_anomalous_vanish(self):
        _, states = equilibrium_states(kt=0.5)
        cs = contraction_set(states, 8)
        for r in range(1, 8):
            assert abs(cs.Q(r)) < 1e-10
            assert abs(cs.G(r)) < 1e-10

    def test_f_real_q_imaginary(self):
        _, states = driven_states(3.0)
        cs = contraction_set(states, 8)
        assert np.abs(cs.f.imag).max() < 1e-10
        assert np.abs(cs.p.imag).max() < 1e-10
        mask = cs.separations != 0
        assert np.abs(cs.q.real[mask]).max() < 1e-10
        assert np.abs(cs.g.real[mask]).max() < 1e-10

    def test_magnetization_consistency(self):
        _, states = driven_states(1.5)
        cs = contraction_set(states, 8)
        m = magnetization(states, 8)
        assert cs.F(0) == pytest.approx(2 * m, abs=1e-10)
        assert cs.P(0) == pytest.approx(-2 * m, abs=1e-10)


class TestCorrelators:
    def test_r1_collapse(self):
        _, states = driven_states(2.0)
        cs = contraction_set(states, 8)
        sx, sy, sz = correlators(cs, 1)
        assert sx == pytest.approx(cs.F(1).real / 4, abs=1e-12)
        assert sy == pytest.approx(-cs.P(1).real / 4, abs=1e-12)

    def test_sz_closed_form(self):
        _, states = driven_states(2.0)
        cs = contraction_set(states, 8)
        for r in (1, 2, 3):
            _, _, sz = correlators(cs, r)
            expected = (cs.P(0) ** 2 - cs.Q(r) * cs.G(r) + cs.P(r) * cs.F(r)) / 4
            assert sz == pytest.approx(expected.real, abs=1e-12)

    def test_bounds(self):
        rng = np.random.default_rng(8)
        for _ in range(10):
            _, states = driven_states(float(rng.uniform(0, 6)))
            cs = contraction_set(states, 8)
            for r in (1, 2, 3, 4):
                for v in correlators(cs, r):
                    assert abs(v) <= 0.25 + 1e-9

    def test_range_validation(self):
        _, states = equilibrium_states()
        cs = contraction_set(states, 8)
        with pytest.raises(ValueError):
            correlators(cs, 0)
        with pytest.raises(ValueError):
            correlators(cs, 5)

    def test_equilibrium_stationary(self):
        # constant drives: correlators do not move along the evolution
        spec = ChainSpec(n_sites=8, gamma=1.0,
                         j_profile=DrivingProfile(kind="constant", j0=0.5),
                         h_profile=CONST_H, kT=0.5)
        t_grid = np.linspace(0.0, 10.0, 6)
        base = None
        states0 = [thermal_state(spec, m) for m in mode_blocks(spec)]
        for k, t in enumerate(t_grid):
            states = []
            for st in states0:
                prop = propagate_numeric(spec, st.mode, t_grid, tol=1e-10)[k]
                states.append(evolve_state(st, prop))
            cs = contraction_set(states, 8)
            vals = np.array([correlators(cs, r) for r in (1, 2, 3)])
            if base is None:
                base = vals
            assert np.abs(vals - base).max() < 1e-9
