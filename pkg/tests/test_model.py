from __future__ import annotations

import numpy as np
import pytest

from neqsteady.errors import DuplicateCoupling, NonPositiveSpectrum, SpecError
from neqsteady.model import Bath, Coupling, SystemSpec, build_omega, chain, normal_modes, splittings, two_mode


def fig2_chain(g: float = 0.08) -> SystemSpec:
    return chain(1.0, 2.0, 1.0, g, g, (1.0, 0.002), (3.0, 0.003))


def test_build_omega_layout():
    omega = build_omega(fig2_chain(0.05))
    expected = np.array([[1, 0.05, 0], [0.05, 2, 0.05], [0, 0.05, 1]])
    np.testing.assert_array_equal(omega, expected)


def test_normal_modes_fig2():
    basis = normal_modes(fig2_chain())
    np.testing.assert_allclose(basis.eigenfrequencies, [0.98735977528094813, 1.0, 2.01264022471905187], atol=1e-13)
    u = basis.transform
    np.testing.assert_allclose(u @ basis.omega_matrix @ u.conj().T, np.diag(basis.eigenfrequencies), atol=1e-13)
    # the eps = 1 mode is the antisymmetric end-mode combination with no bus weight
    assert abs(u[1, 1]) < 1e-12
    np.testing.assert_allclose(abs(u[1, 0]), np.sqrt(0.5), atol=1e-12)
    with pytest.raises(ValueError):
        basis.eigenfrequencies[0] = 0.0


def test_decoupled_modes_are_local():
    spec = two_mode(1.3, 0.7, 0.0, (1.0, 0.1), (2.0, 0.1))
    basis = normal_modes(spec)
    np.testing.assert_allclose(basis.eigenfrequencies, [0.7, 1.3])
    np.testing.assert_allclose(np.abs(basis.transform), [[0, 1], [1, 0]], atol=1e-15)


def test_splittings_antisymmetric():
    d = splittings(normal_modes(fig2_chain()))
    np.testing.assert_allclose(d, -d.T)
    assert np.all(np.diag(d) == 0)


def test_duplicate_coupling_either_order():
    spec = SystemSpec((1.0, 1.0), (Coupling(0, 1, 0.1), Coupling(1, 0, 0.2)), (Bath(0, 1.0, 0.1),))
    with pytest.raises(DuplicateCoupling):
        build_omega(spec)


def test_nonpositive_spectrum():
    spec = two_mode(1.0, 1.0, 1.5, (1.0, 0.1), (1.0, 0.1))
    with pytest.raises(NonPositiveSpectrum):
        normal_modes(spec)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(mode_frequencies=()),
        dict(mode_frequencies=(1.0, -1.0)),
        dict(mode_frequencies=(1.0, 1.0), couplings=(Coupling(0, 2, 0.1),)),
        dict(mode_frequencies=(1.0, 1.0), couplings=(Coupling(1, 1, 0.1),)),
        dict(mode_frequencies=(1.0,), baths=()),
        dict(mode_frequencies=(1.0,), baths=(Bath(0, 0.0, 0.1),)),
        dict(mode_frequencies=(1.0,), baths=(Bath(0, 1.0, -0.1),)),
        dict(mode_frequencies=(1.0,), baths=(Bath(0, 1.0, 0.1), Bath(0, 2.0, 0.1))),
        dict(mode_frequencies=(1.0,), baths=(Bath(3, 1.0, 0.1),)),
        dict(mode_frequencies=(1.0, 1.0), labels=("a", "a")),
    ],
)
def test_validation(kwargs):
    kwargs.setdefault("baths", (Bath(0, 1.0, 0.1),))
    with pytest.raises(SpecError):
        SystemSpec(**kwargs)


def test_tuple_coercion_and_labels():
    spec = SystemSpec([1, 2], [(0, 1, 0.1)], [(0, 1.0, 0.1)])
    assert spec.couplings == (Coupling(0, 1, 0.1),)
    assert spec.labels == ("0", "1")
    assert spec.index("1") == 1
    assert spec.bath_on(1) is None
    with pytest.raises(SpecError):
        spec.index("L")


def test_permutation_keeps_spectrum():
    spec = fig2_chain(0.06)
    perm = spec.permuted([2, 0, 1])
    assert perm.labels == ("R", "L", "bus")
    np.testing.assert_allclose(normal_modes(perm).eigenfrequencies, normal_modes(spec).eigenfrequencies, atol=1e-14)
