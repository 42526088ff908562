import numpy as np
import pytest

from xychain.entanglement import (TwoSiteState, asymptotic_value, concurrence_general,
                                  concurrence_x, two_site_state)
from xychain.errors import ConsistencyError
from xychain.verify import random_x_state


class TestTwoSiteState:
    def test_fully_polarized(self):
        st = two_site_state(0.5, 0.0, 0.0, 0.25)
        expected = np.zeros((4, 4))
        expected[0, 0] = 1.0
        assert np.allclose(st.rho, expected)

    def test_maximally_mixed(self):
        st = two_site_state(0.0, 0.0, 0.0, 0.0)
        assert np.allclose(st.rho, np.eye(4) / 4)

    def test_unit_trace_exact(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            m = rng.uniform(-0.4, 0.4)
            sz = rng.uniform(-0.2, 0.24)
            st = two_site_state(m, 0.0, 0.0, sz) if abs(m) <= 0.25 + sz else None
            if st is not None:
                assert np.trace(st.rho) == pytest.approx(1.0, abs=1e-15)

    def test_inconsistent_inputs_raise(self):
        with pytest.raises(ConsistencyError):
            two_site_state(0.5, 0.2, 0.2, -0.25)  # negative diagonal far below 0
        with pytest.raises(ConsistencyError):
            two_site_state(0.0, 0.3, 0.0, 0.2)    # inner block not PSD


class TestConcurrenceX:
    def test_bell_state(self):
        rho = np.zeros((4, 4))
        rho[0, 0] = rho[3, 3] = 0.5
        rho[0, 3] = rho[3, 0] = 0.5
        assert concurrence_x(TwoSiteState(rho=rho)).c == pytest.approx(1.0)

    def test_maximally_mixed(self):
        assert concurrence_x(two_site_state(0.0, 0.0, 0.0, 0.0)).c == 0.0

    def test_matches_general_on_random_states(self):
        rng = np.random.default_rng(1)
        for _ in range(1000):
            rho = random_x_state(rng)
            cx = concurrence_x(TwoSiteState(rho=rho))
            cg = concurrence_general(rho)
            assert abs(cx.c - cg.c) < 1e-10
            assert 0.0 <= cx.c <= 1.0
            assert all(r >= -1e-15 for r in cx.roots)

    def test_swap_invariance(self):
        rng = np.random.default_rng(2)
        for _ in range(200):
            rho = random_x_state(rng)
            swapped = rho.copy()
            swapped[1, 1], swapped[2, 2] = rho[2, 2], rho[1, 1]
            c1 = concurrence_x(TwoSiteState(rho=rho)).c
            c2 = concurrence_x(TwoSiteState(rho=swapped)).c
            assert c1 == pytest.approx(c2, abs=1e-12)


class TestConcurrenceGeneral:
    def test_product_state(self):
        rho = np.zeros((4, 4))
        rho[1, 1] = 1.0  # |up down>
        assert concurrence_general(rho).c == 0.0

    def test_werner_states(self):
        bell = np.zeros((4, 4))
        bell[0, 0] = bell[3, 3] = bell[0, 3] = bell[3, 0] = 0.5
        assert concurrence_general(bell).c == pytest.approx(1.0, abs=1e-12)
        for p in (0.5, 0.2, 0.8):
            werner = p * bell + (1 - p) * np.eye(4) / 4
            expected = max(0.0, (3 * p - 1) / 2)
            assert concurrence_general(werner).c == pytest.approx(expected, abs=1e-10)

    def test_rejects_invalid(self):
        with pytest.raises(ValueError):
            concurrence_general(np.eye(4))           # trace 4
        with pytest.raises(ValueError):
            concurrence_general(np.diag([0.5, 0.7, -0.1, -0.1]))


class TestAsymptoticValue:
    def test_constant_series(self):
        t = np.linspace(0, 10, 100)
        series = np.column_stack([t, np.full_like(t, 0.37)])
        assert asymptotic_value(series) == pytest.approx(0.37)

    def test_decaying_oscillation(self):
        t = np.linspace(0, 100, 2000)
        c = 0.2 + np.exp(-t / 10) * np.sin(3 * t) * 0.1
        val = asymptotic_value(np.column_stack([t, c]), 0.3)
        assert abs(val - 0.2) < 1e-4

    def test_window_fraction(self):
        t = np.linspace(0, 10, 200)
        c = np.where(t < 8, 1.0, 0.0)
        assert asymptotic_value(np.column_stack([t, c]), 0.1) == pytest.approx(0.0)

    def test_too_short(self):
        series = [(0.0, 1.0), (1.0, 1.0), (2.0, 1.0)]
        with pytest.raises(ValueError):
            asymptotic_value(series, 0.3)
