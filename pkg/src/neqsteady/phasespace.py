"""Gaussian characteristic-function dynamics.

For a state with symmetric characteristic function ``chi(z) = exp(z M z^T)``
in the coordinates ``z = (mu_1..mu_n, mu_1^*..mu_n^*)`` the master equation
reduces to

    dM/dt = D - (T M + M T^T)

with block-diagonal drift ``T = diag(T-, T+)`` and block-antidiagonal
diffusion ``D = [[0, P], [P^T, 0]]``. The steady state solves the
Lyapunov-type equation ``T M + M T^T = D``.

Second moments follow from the mixed block:
``M[i, n + j] = -(<A_i^dag A_j> + delta_ij / 2) / 2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from numpy.typing import NDArray

from .dissipators import DissipatorSet, build_dissipators, local_coefficients, local_rates
from .errors import DomainError, NegativeOccupation, Singular, SpecError, StepTooLarge, UndampedMode
from .linalg import CMatrix, kron, lu_solve, max_norm
from .model import NormalModeBasis, SystemSpec, normal_modes

NEGATIVE_OCCUPATION_FLOOR = -1e-6
BLOWUP_LIMIT = 1e12


@dataclass(frozen=True)
class DriftDiffusion:
    drift: CMatrix
    diffusion: CMatrix

    @property
    def n_modes(self) -> int:
        return self.drift.shape[0] // 2

    @property
    def t_minus(self) -> CMatrix:
        n = self.n_modes
        return self.drift[:n, :n]

    @property
    def t_plus(self) -> CMatrix:
        n = self.n_modes
        return self.drift[n:, n:]

    @property
    def p_block(self) -> CMatrix:
        n = self.n_modes
        return self.diffusion[:n, n:]


@dataclass(frozen=True)
class QuadraticForm:
    matrix: CMatrix
    basis: Literal["normal", "local"] = "normal"
    residual: float = field(default=math.nan, compare=False)

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=np.complex128)
        object.__setattr__(self, "matrix", 0.5 * (m + m.T))

    @property
    def n_modes(self) -> int:
        return self.matrix.shape[0] // 2

    def correlations(self) -> CMatrix:
        """``C[i, j] = <A_i^dag A_j>`` in this form's basis."""
        n = self.n_modes
        mixed = self.matrix[:n, n:] + self.matrix[n:, :n].T
        return -mixed - 0.5 * np.eye(n)

    def occupations(self) -> NDArray[np.float64]:
        return np.real(np.diag(self.correlations()))

    def anomalous_residual(self) -> float:
        n = self.n_modes
        return max(max_norm(self.matrix[:n, :n]), max_norm(self.matrix[n:, n:]))


def thermal_form(occupations, basis: Literal["normal", "local"] = "normal") -> QuadraticForm:
    """Product of thermal states (``occupations = 0`` gives the vacuum)."""
    occ = np.asarray(occupations, dtype=float)
    n = len(occ)
    m = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    half = -0.5 * (occ + 0.5)
    m[np.arange(n), n + np.arange(n)] = half
    m[n + np.arange(n), np.arange(n)] = half
    return QuadraticForm(m, basis)


def drift_diffusion(hamiltonian, loss, gain) -> DriftDiffusion:
    """Drift/diffusion for ``H = a^dag . hamiltonian . a`` plus the loss/gain generator.

    Works in any mode basis; in the normal basis ``hamiltonian`` is
    ``diag(eps)`` and ``loss``/``gain`` are the dissipator matrices.
    """
    h = np.asarray(hamiltonian, dtype=np.complex128)
    lm = np.asarray(loss, dtype=np.complex128)
    lp = np.asarray(gain, dtype=np.complex128)
    n = h.shape[0]
    t_minus = 0.5 * (lm - lp.T) - 1j * h.T
    t_plus = 0.5 * (lm.T - lp) + 1j * h
    p = -0.25 * (lm + lp.T)
    zero = np.zeros((n, n), dtype=np.complex128)
    drift = np.block([[t_minus, zero], [zero, t_plus]])
    diffusion = np.block([[zero, p], [p.T, zero]])
    return DriftDiffusion(drift=drift, diffusion=diffusion)


def build_drift_diffusion(basis: NormalModeBasis, diss: DissipatorSet) -> DriftDiffusion:
    n = basis.n_modes
    if diss.lambda_plus.shape != (n, n):
        raise SpecError("dissipator and basis dimensions differ")
    return drift_diffusion(np.diag(basis.eigenfrequencies), diss.lambda_minus, diss.lambda_plus)


def local_drift_diffusion(basis: NormalModeBasis, spec: SystemSpec) -> DriftDiffusion:
    """Same dynamics assembled directly in the local basis from the local rates."""
    loss, gain = local_coefficients(local_rates(basis, spec), spec.n_modes)
    return drift_diffusion(basis.omega_matrix, loss, gain)


def local_transform(basis: NormalModeBasis) -> CMatrix:
    """``W`` with ``z = zeta . W`` for local coordinates ``zeta = (kappa, kappa^*)``.

    Since ``mu = U kappa``, ``W = blockdiag(U^T, U^dag)``.
    """
    u = np.asarray(basis.transform)
    n = u.shape[0]
    zero = np.zeros((n, n), dtype=np.complex128)
    return np.block([[u.T, zero], [zero, u.conj().T]])


def to_local(m: QuadraticForm, basis: NormalModeBasis) -> QuadraticForm:
    if m.basis == "local":
        return m
    w = local_transform(basis)
    return QuadraticForm(w @ m.matrix @ w.T, "local", m.residual)


def lyapunov_residual(dd: DriftDiffusion, m: CMatrix) -> float:
    t = dd.drift
    return max_norm(t @ m + m @ t.T - dd.diffusion)


def solve_steady(dd: DriftDiffusion) -> QuadraticForm:
    """Unique symmetric ``M`` with ``T M + M T^T = D`` (Kronecker-vectorized solve).

    Raises ``UndampedMode`` when the vectorized operator is singular, i.e.
    some normal mode has no path to any bath.
    """
    t = dd.drift
    dim = t.shape[0]
    eye = np.eye(dim)
    # row-major vec: vec(T M) = (T (x) I) vec M, vec(M T^T) = (I (x) T) vec M
    op = kron(t, eye) + kron(eye, t)
    try:
        vec = lu_solve(op, dd.diffusion.reshape(-1))
    except Singular as exc:
        raise UndampedMode(f"undamped normal mode: steady state is not unique ({exc})") from None
    m = vec.reshape(dim, dim)
    m = 0.5 * (m + m.T)
    return QuadraticForm(m, "normal", lyapunov_residual(dd, m))


def solve_steady_eigen(dd: DriftDiffusion) -> QuadraticForm:
    """Steady form through an explicit eigendecomposition of the drift.

    With ``V T V^-1 = diag(d)``: ``M = V^-1 D' V^-T`` and
    ``D'_ij = (V D V^T)_ij / (d_i + d_j)``. Only a cross-check for
    :func:`solve_steady`; uses a general eigensolver.
    """
    d, right = np.linalg.eig(dd.drift)
    v = np.linalg.inv(right)
    denom = d[:, None] + d[None, :]
    if np.min(np.abs(denom)) < 1e-14 * max(1.0, max_norm(dd.drift)):
        raise UndampedMode("undamped normal mode: d_i + d_j vanishes")
    dprime = (v @ dd.diffusion @ v.T) / denom
    m = right @ dprime @ right.T
    return QuadraticForm(m, "normal", lyapunov_residual(dd, 0.5 * (m + m.T)))


def _rk4_propagator(lin: NDArray, h: float) -> NDArray:
    """One classic RK4 step for ``y' = L y + b`` as an affine map on ``(y, 1)``.

    For linear autonomous systems the four RK4 stages collapse to
    ``y + h*phi(hL)*(L y + b)`` with ``phi(x) = 1 + x/2 + x^2/6 + x^3/24``.
    """
    size = lin.shape[0] - 1
    hl = h * lin
    eye = np.eye(size + 1, dtype=lin.dtype)
    hl2 = hl @ hl
    return eye + hl + hl2 / 2 + hl2 @ hl / 6 + hl2 @ hl2 / 24


def _affine_power(step: NDArray, k: int) -> NDArray:
    result = np.eye(step.shape[0], dtype=step.dtype)
    base = step
    while k:
        if k & 1:
            result = base @ result
        k >>= 1
        if k:
            base = base @ base
            if max_norm(base) > BLOWUP_LIMIT:
                raise StepTooLarge("RK4 propagator blows up; reduce dt")
    return result


def default_dt(dd: DriftDiffusion) -> float:
    scale = float(np.max(np.abs(dd.drift.imag.diagonal())))
    scale = max(scale, float(np.max(np.abs(dd.drift.real.diagonal()))), 1e-12)
    return 0.05 / scale


def evolve_transient(
    dd: DriftDiffusion,
    m0: QuadraticForm,
    t_final: float,
    dt: float | None = None,
) -> QuadraticForm:
    """Integrate ``dM/dt = D - (T M + M T^T)`` with fixed-step classic RK4.

    The step is shrunk so an integer number of steps lands on ``t_final``.
    Because the equation is linear, the RK4 step is formed once as a matrix
    on ``vec(M)`` and applied repeatedly by binary powering.
    """
    if t_final < 0:
        raise SpecError("t_final must be non-negative")
    m_init = np.asarray(m0.matrix, dtype=np.complex128)
    if t_final == 0:
        return QuadraticForm(m_init, m0.basis, m0.residual)
    if dt is None:
        dt = default_dt(dd)
    if dt <= 0:
        raise SpecError("dt must be positive")
    steps = max(1, math.ceil(t_final / dt - 1e-9))
    h = t_final / steps

    t = dd.drift
    dim = t.shape[0]
    eye = np.eye(dim)
    size = dim * dim
    lin = np.zeros((size + 1, size + 1), dtype=np.complex128)
    lin[:size, :size] = -(kron(t, eye) + kron(eye, t))
    lin[:size, size] = dd.diffusion.reshape(-1)

    step = _rk4_propagator(lin, h)
    if np.max(np.abs(np.linalg.eigvals(step[:size, :size]))) > 1.0 + 1e-9:
        raise StepTooLarge(f"RK4 step h={h:.3g} is outside the stability region")
    prop = _affine_power(step, steps)
    y = prop @ np.append(m_init.reshape(-1), 1.0)
    m = y[:size].reshape(dim, dim)
    if max_norm(m) > BLOWUP_LIMIT:
        raise StepTooLarge("quadratic form exceeded 1e12; reduce dt")
    return QuadraticForm(m, m0.basis, lyapunov_residual(dd, 0.5 * (m + m.T)))


def effective_temperature(omega: float, occupation: float) -> float:
    """Temperature of the thermal state with the given mean occupation."""
    if not occupation > 0:
        raise DomainError(f"effective temperature undefined for occupation {occupation}")
    if not omega > 0:
        raise DomainError(f"frequency must be positive, got {omega}")
    return omega / math.log1p(1.0 / occupation)


@dataclass(frozen=True)
class SteadyReport:
    normal_occupations: tuple[float, ...]
    local_occupations: tuple[float, ...]
    effective_temperatures: tuple[float, ...]
    anomalous_residual: float
    solve_residual: float
    labels: tuple[str, ...] = ()
    eigenfrequencies: tuple[float, ...] = ()

    def as_dict(self) -> dict:
        def clean(x: float):
            return None if math.isnan(x) else x

        return {
            "labels": list(self.labels),
            "eigenfrequencies": list(self.eigenfrequencies),
            "normal_occupations": list(self.normal_occupations),
            "local_occupations": list(self.local_occupations),
            "effective_temperatures": [clean(x) for x in self.effective_temperatures],
            "anomalous_residual": self.anomalous_residual,
            "solve_residual": self.solve_residual,
        }


def extract_report(m: QuadraticForm, basis: NormalModeBasis, spec: SystemSpec) -> SteadyReport:
    if m.basis != "normal":
        raise SpecError("extract_report expects a normal-basis quadratic form")
    normal = m.occupations()
    local = to_local(m, basis).occupations()
    worst = min(normal.min(), local.min())
    if worst < NEGATIVE_OCCUPATION_FLOOR:
        raise NegativeOccupation(f"occupation {worst:.3e} is negative beyond roundoff")
    temps = tuple(
        effective_temperature(w, n) if n > 0 else math.nan
        for w, n in zip(spec.mode_frequencies, local)
    )
    return SteadyReport(
        normal_occupations=tuple(float(x) for x in normal),
        local_occupations=tuple(float(x) for x in local),
        effective_temperatures=temps,
        anomalous_residual=m.anomalous_residual(),
        solve_residual=float(m.residual),
        labels=spec.labels,
        eigenfrequencies=tuple(float(e) for e in basis.eigenfrequencies),
    )


def steady_state(spec: SystemSpec, rwa: bool = False) -> SteadyReport:
    """Full pipeline: normal modes, dissipators, drift/diffusion, steady solve, report."""
    basis = normal_modes(spec)
    diss = build_dissipators(basis, spec, rwa=rwa)
    m = solve_steady(build_drift_diffusion(basis, diss))
    return extract_report(m, basis, spec)
