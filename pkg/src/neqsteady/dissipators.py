"""Born-Markov dissipator coefficients for flat-spectrum thermal baths.

The generator acting on the system density matrix is::

    d rho/dt = -i[H, rho]
               + sum_ij Lm[i, j] (A_i rho A_j^dag - 1/2 {A_j^dag A_i, rho})
               + sum_ij Lp[i, j] (A_i^dag rho A_j - 1/2 {A_j A_i^dag, rho})

with ``Lm`` (loss) and ``Lp`` (gain) built from the normal-mode transform.
Keeping the inter-mode entries ``i != j`` is what distinguishes the full
master equation from its rotating-wave truncation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .errors import DomainError, SpecError
from .linalg import CMatrix
from .model import NormalModeBasis, SystemSpec


def planck_occupation(omega: float, temperature: float) -> float:
    """Bose-Einstein occupation ``1 / (exp(omega / T) - 1)``."""
    if not (omega > 0 and temperature > 0):
        raise DomainError(f"planck_occupation needs omega > 0 and T > 0, got ({omega}, {temperature})")
    try:
        return 1.0 / math.expm1(omega / temperature)
    except OverflowError:
        return 0.0


@dataclass(frozen=True)
class DissipatorSet:
    """Gain/loss coefficient matrices in the normal-mode basis.

    ``lambda_minus`` is stored with its natural index order: entry ``[j, i]``
    carries ``U[i, s] conj(U[j, s])``. Transposing it silently swaps the
    gain and loss cross terms.
    """

    lambda_plus: CMatrix
    lambda_minus: CMatrix
    rwa: bool = False


def _bath_weights(basis: NormalModeBasis, spec: SystemSpec):
    u = np.asarray(basis.transform)
    eps = np.asarray(basis.eigenfrequencies)
    for bath in spec.baths:
        occ = np.array([planck_occupation(e, bath.temperature) for e in eps])
        yield bath, u[:, bath.mode], occ


def build_dissipators(basis: NormalModeBasis, spec: SystemSpec, rwa: bool = False) -> DissipatorSet:
    """Assemble the gain (``lambda_plus``) and loss (``lambda_minus``) matrices.

    With ``rwa=True`` every off-diagonal (inter-mode) entry is zeroed.
    """
    n = basis.n_modes
    if spec.n_modes != n:
        raise SpecError(f"basis has {n} modes, spec has {spec.n_modes}")
    lp = np.zeros((n, n), dtype=np.complex128)
    lm_t = np.zeros((n, n), dtype=np.complex128)
    for bath, col, occ in _bath_weights(basis, spec):
        outer = np.outer(col, col.conj())
        pair = occ[:, None] + occ[None, :]
        lp += 0.5 * bath.rate * outer * pair
        lm_t += 0.5 * bath.rate * outer * (pair + 2.0)
    lm = lm_t.T.copy()
    if rwa:
        lp = np.diag(np.diag(lp))
        lm = np.diag(np.diag(lm))
    return DissipatorSet(lambda_plus=lp, lambda_minus=lm, rwa=rwa)


@dataclass(frozen=True)
class LocalRates:
    """Bath-resolved rates in the local basis; row ``k`` belongs to ``bath_modes[k]``."""

    gamma_plus: CMatrix
    gamma_minus: CMatrix
    bath_modes: tuple[int, ...]


def local_rates(basis: NormalModeBasis, spec: SystemSpec) -> LocalRates:
    u = np.asarray(basis.transform)
    rows_p, rows_m, modes = [], [], []
    for bath, col, occ in _bath_weights(basis, spec):
        half = 0.5 * bath.rate
        # sum over normal modes i of U[i, s]^* U[i, n] N_s(eps_i)
        rows_p.append(half * (col.conj() * occ) @ u)
        rows_m.append(half * (col * (occ + 1.0)) @ u.conj())
        modes.append(bath.mode)
    return LocalRates(
        gamma_plus=np.array(rows_p, dtype=np.complex128),
        gamma_minus=np.array(rows_m, dtype=np.complex128),
        bath_modes=tuple(modes),
    )


def local_coefficients(rates: LocalRates, n_modes: int) -> tuple[CMatrix, CMatrix]:
    """Loss/gain matrices of the local-mode generator, same layout as ``DissipatorSet``.

    Each bath ``s`` contributes ``gm[s, n] (a_s rho a_n^dag - 1/2 {a_n^dag a_s, rho})``
    and ``gp[s, n] (a_s^dag rho a_n - 1/2 {a_n a_s^dag, rho})`` plus their
    Hermitian conjugates, so the result equals the normal-mode generator
    rewritten in local operators.
    """
    loss = np.zeros((n_modes, n_modes), dtype=np.complex128)
    gain = np.zeros((n_modes, n_modes), dtype=np.complex128)
    for k, s in enumerate(rates.bath_modes):
        loss[s, :] += rates.gamma_minus[k]
        loss[:, s] += rates.gamma_minus[k].conj()
        gain[s, :] += rates.gamma_plus[k]
        gain[:, s] += rates.gamma_plus[k].conj()
    return loss, gain


def gain_loss_gap(basis: NormalModeBasis, spec: SystemSpec) -> NDArray[np.float64]:
    """Net damping of each normal mode, ``sum_s gamma_s |U[i, s]|^2``."""
    u = np.asarray(basis.transform)
    gap = np.zeros(basis.n_modes)
    for bath in spec.baths:
        gap += bath.rate * np.abs(u[:, bath.mode]) ** 2
    return gap
