from __future__ import annotations

import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from neqsteady.adiabatic import (
    EndBaths,
    ReducedModel,
    closed_form_steady,
    degeneracy_gap,
    eliminate_bus,
    reduced_from_detuning,
    reduced_spec,
    two_mode_basis,
)
from neqsteady.errors import NotDegenerate, ResonantBus, SpecError
from neqsteady.model import SystemSpec, chain
from neqsteady.phasespace import steady_state

FIG2_BATHS = EndBaths(t_l=1.0, gamma_l=0.002, t_r=3.0, gamma_r=0.003)
# (N_L(e+) - N_R(e+) + N_L(e-) - N_R(e-)) / (2 (1 + 4 g^2 / gL gR)) at
# mean 1, g = 0.02, 40-digit evaluation
GAP_G002 = -0.0072722972587289027


def test_eliminate_bus_fig2():
    reduced = eliminate_bus(chain(1.0, 2.0, 1.0, 0.08, 0.08, (1.0, 0.002), (3.0, 0.003)))
    assert reduced.omega_left == pytest.approx(0.9936, abs=1e-15)
    assert reduced.omega_right == pytest.approx(0.9936, abs=1e-15)
    assert reduced.coupling == pytest.approx(-0.0064, abs=1e-15)
    assert reduced.detuning == 0


def test_eliminate_bus_uses_labels_not_order():
    spec = chain(1.1, 2.0, 0.9, 0.05, 0.04, (1.0, 0.002), (3.0, 0.003))
    perm = spec.permuted([1, 2, 0])
    assert eliminate_bus(perm) == eliminate_bus(spec)


def test_eliminate_bus_errors():
    with pytest.raises(ResonantBus):
        eliminate_bus(chain(1.0, 1.0, 1.2, 0.01, 0.01, (1.0, 0.1), (1.0, 0.1)))
    with pytest.raises(SpecError):
        eliminate_bus(SystemSpec((1.0, 1.0), ((0, 1, 0.1),), ((0, 1.0, 0.1), (1, 1.0, 0.1))))
    with pytest.warns(UserWarning, match="bus elimination"):
        eliminate_bus(chain(1.0, 1.2, 1.0, 0.05, 0.05, (1.0, 0.1), (1.0, 0.1)))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        eliminate_bus(chain(1.0, 2.0, 1.0, 0.08, 0.08, (1.0, 0.1), (1.0, 0.1)))


@settings(max_examples=50, deadline=None)
@given(detuning=st.floats(-0.5, 0.5), g=st.floats(-0.1, 0.1))
def test_two_mode_basis_diagonalizes(detuning, g):
    reduced = reduced_from_detuning(1.0, detuning, g)
    (e_minus, e_plus), alpha, beta = two_mode_basis(reduced)
    u = np.array([[alpha, beta], [beta, -alpha]])
    omega = np.array([[reduced.omega_left, g], [g, reduced.omega_right]])
    np.testing.assert_allclose(u @ omega @ u.T, np.diag([e_minus, e_plus]), atol=1e-13)
    assert alpha >= 0
    assert alpha**2 + beta**2 == pytest.approx(1.0)
    if abs(detuning) > 1e-6:
        assert 2 * alpha * beta / (alpha**2 - beta**2) == pytest.approx(-2 * g / detuning, rel=1e-8, abs=1e-12)


def test_reduced_model_properties():
    r = ReducedModel(0.95, 1.05, 0.03)
    assert r.mean_frequency == pytest.approx(1.0)
    assert r.detuning == pytest.approx(0.1)
    assert r.splitting == pytest.approx(np.hypot(0.05, 0.03))
    assert r.epsilon_plus - r.epsilon_minus == pytest.approx(2 * r.splitting)
    d = r.as_dict()
    assert set(d) >= {"alpha", "beta", "epsilon_minus", "epsilon_plus"}


@settings(max_examples=40, deadline=None)
@given(detuning=st.floats(-0.3, 0.3), g=st.floats(-0.08, 0.08).filter(lambda x: abs(x) > 1e-4))
def test_closed_form_matches_solver(detuning, g):
    reduced = reduced_from_detuning(1.0, detuning, g)
    closed = closed_form_steady(reduced, FIG2_BATHS)
    numeric = steady_state(reduced_spec(reduced, FIG2_BATHS))
    assert closed.occupation_left == pytest.approx(numeric.local_occupations[0], abs=1e-10)
    assert closed.occupation_right == pytest.approx(numeric.local_occupations[1], abs=1e-10)
    for coeffs in closed.coefficients.values():
        assert sum(coeffs) == pytest.approx(closed.phi, rel=1e-12)


def test_closed_form_common_temperature():
    reduced = reduced_from_detuning(1.0, 0.05, 0.03)
    baths = EndBaths(1.5, 0.002, 1.5, 0.003)
    closed = closed_form_steady(reduced, baths)
    numeric = steady_state(reduced_spec(reduced, baths))
    assert closed.gap == pytest.approx(numeric.local_occupations[0] - numeric.local_occupations[1], abs=1e-12)


def test_degeneracy_gap_value():
    reduced = reduced_from_detuning(1.0, 0.0, 0.02)
    assert degeneracy_gap(reduced, FIG2_BATHS) == pytest.approx(GAP_G002, abs=1e-15)
    assert closed_form_steady(reduced, FIG2_BATHS).gap == pytest.approx(GAP_G002, abs=1e-14)
    with pytest.raises(NotDegenerate):
        degeneracy_gap(reduced_from_detuning(1.0, 0.01, 0.02), FIG2_BATHS)


def test_gap_shrinks_with_coupling():
    gaps = [abs(degeneracy_gap(reduced_from_detuning(1.0, 0.0, g), FIG2_BATHS)) for g in (0.02, 0.04, 0.06, 0.08)]
    assert all(a > b for a, b in zip(gaps, gaps[1:]))
