"""Brute-force density-matrix integrator on a truncated Fock space.

Independent of the Gaussian machinery: the master equation is applied
operator by operator to a dense density matrix and relaxed with RK4.

The generator conserves total excitation number, so it is integrated in a
frame rotating at a common ``frame_frequency``. This shifts the Hamiltonian
by ``-frame_frequency * N_total`` and leaves populations, occupations and
the steady state untouched while allowing much larger steps.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import reduce

import numpy as np
import scipy.sparse as sp
from numpy.typing import NDArray

from .dissipators import DissipatorSet, local_coefficients, local_rates
from .errors import NotConverged, SpecError
from .linalg import CMatrix
from .model import NormalModeBasis, SystemSpec, normal_modes

log = logging.getLogger(__name__)

MAX_DIMENSION = 1024
STABILITY_LIMIT = 2.5


@dataclass(frozen=True)
class OracleConfig:
    """Truncation and integration settings.

    ``frame_frequency`` defaults to the mean normal-mode frequency. The step
    guard bounds the generator's spectral radius in that frame,

        2 max|eps_i - f| S + 2 (||Lm||_1 S + ||Lp||_1 (S + n)),   S = sum(cutoffs),

    (``||.||_1`` the trace norm) and requires ``dt`` times it to stay inside
    the left half-disk of radius 2.5 contained in the RK4 stability region.
    ``dt=None`` picks the largest step the guard allows.
    """

    cutoffs: tuple[int, ...]
    dt: float | None = None
    t_final: float = 5000.0
    convergence_tol: float = 1e-7
    frame_frequency: float | None = None
    check_every: int = 10

    def __post_init__(self) -> None:
        object.__setattr__(self, "cutoffs", tuple(int(c) for c in self.cutoffs))
        if any(c < 4 for c in self.cutoffs):
            raise SpecError("every Fock cutoff must be at least 4")
        if math.prod(c + 1 for c in self.cutoffs) > MAX_DIMENSION:
            raise SpecError(f"Fock dimension exceeds {MAX_DIMENSION}")
        if self.dt is not None and not self.dt > 0:
            raise SpecError("dt must be positive")
        if not (self.t_final > 0 and self.convergence_tol > 0):
            raise SpecError("t_final and convergence_tol must be positive")

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(c + 1 for c in self.cutoffs)

    def frame_for(self, basis: NormalModeBasis) -> float:
        if self.frame_frequency is not None:
            return float(self.frame_frequency)
        return float(np.mean(basis.eigenfrequencies))

    def rate_bound(self, basis: NormalModeBasis, diss: DissipatorSet) -> float:
        total = sum(self.cutoffs)
        spread = float(np.max(np.abs(np.asarray(basis.eigenfrequencies) - self.frame_for(basis))))
        loss = float(np.sum(np.abs(np.linalg.eigvalsh(diss.lambda_minus))))
        gain = float(np.sum(np.abs(np.linalg.eigvalsh(diss.lambda_plus))))
        return 2.0 * spread * total + 2.0 * (loss * total + gain * (total + len(self.cutoffs)))

    def step_for(self, basis: NormalModeBasis, diss: DissipatorSet) -> float:
        if self.dt is not None:
            return float(self.dt)
        return STABILITY_LIMIT / self.rate_bound(basis, diss)

    def check_step(self, basis: NormalModeBasis, diss: DissipatorSet) -> None:
        product = self.step_for(basis, diss) * self.rate_bound(basis, diss)
        if product > STABILITY_LIMIT * (1 + 1e-12):
            raise SpecError(
                f"dt={self.step_for(basis, diss):g} too large: dt times the generator bound "
                f"is {product:.3g} > {STABILITY_LIMIT:g}"
            )


@dataclass
class FockState:
    rho: CMatrix
    dims: tuple[int, ...]
    time: float = 0.0
    steps: int = 0
    residual: float = math.nan
    converged: bool = False
    min_eigenvalue: float = math.nan
    history: list[tuple[float, float]] = field(default_factory=list, repr=False)

    @property
    def dimension(self) -> int:
        return self.rho.shape[0]


def vacuum(dims: tuple[int, ...]) -> FockState:
    d = math.prod(dims)
    rho = np.zeros((d, d), dtype=np.complex128)
    rho[0, 0] = 1.0
    return FockState(rho, tuple(dims))


def product_state(factors: list[NDArray]) -> FockState:
    rho = reduce(np.kron, factors)
    return FockState(np.asarray(rho, dtype=np.complex128), tuple(f.shape[0] for f in factors))


def thermal_factor(occupation: float, dim: int) -> NDArray[np.complex128]:
    """Truncated, renormalized single-mode thermal state."""
    q = occupation / (occupation + 1.0)
    p = q ** np.arange(dim)
    return np.diag(p / p.sum()).astype(np.complex128)


def annihilators(dims: tuple[int, ...]) -> list[sp.csr_matrix]:
    """Local annihilation operators embedded in the product space."""
    ops = []
    for k, dk in enumerate(dims):
        a = sp.diags(np.sqrt(np.arange(1, dk)), 1, shape=(dk, dk), format="csr", dtype=np.complex128)
        factors = [sp.identity(d, format="csr", dtype=np.complex128) for d in dims]
        factors[k] = a
        ops.append(reduce(lambda x, y: sp.kron(x, y, format="csr"), factors))
    return ops


@dataclass
class Generator:
    """Precomputed sparse pieces of the master equation.

    ``rhs(rho) = Y + Y^dag + sum_k w_k L_k rho L_k^dag`` with
    ``Y = -i H_eff rho``. Only valid for Hermitian ``rho``, which lets every
    product be a sparse-times-contiguous-dense one.
    """

    h_eff: sp.csr_matrix
    jumps: list[tuple[float, sp.csr_matrix]]

    def __call__(self, rho: CMatrix) -> CMatrix:
        rho = np.ascontiguousarray(rho)
        buf = np.empty_like(rho)
        y = self.h_eff @ rho
        y *= -1j
        out = y + np.conj(y.T, out=buf)
        for weight, op in self.jumps:
            np.conj((op @ rho).T, out=buf)
            out += weight * (op @ buf)
        return out

    def apply(self, rho: CMatrix) -> CMatrix:
        """Apply to an arbitrary matrix by splitting it into Hermitian parts."""
        herm = 0.5 * (rho + rho.conj().T)
        anti = -0.5j * (rho - rho.conj().T)
        return self(herm) + 1j * self(anti)


def _hermitian_channels(coeffs: NDArray, ops: list[sp.csr_matrix]) -> list[tuple[float, sp.csr_matrix]]:
    """Rewrite ``sum_ij c[i, j] O_i rho O_j^dag`` as ``sum_k w_k L_k rho L_k^dag``."""
    c = np.asarray(coeffs, dtype=np.complex128)
    scale = max(1.0, float(np.max(np.abs(c))))
    if np.max(np.abs(c - c.conj().T)) > 1e-12 * scale:
        raise SpecError("dissipator coefficient matrix must be Hermitian")
    weights, vecs = np.linalg.eigh(0.5 * (c + c.conj().T))
    zero = sp.csr_matrix(ops[0].shape, dtype=np.complex128)
    channels = []
    for k, w in enumerate(weights):
        if abs(w) <= 1e-15 * scale:
            continue
        op = sum((vecs[i, k] * ops[i] for i in range(len(ops)) if vecs[i, k] != 0), zero)
        channels.append((float(w), op.tocsr()))
    return channels


def build_generator(
    modes: list[sp.csr_matrix],
    hamiltonian: NDArray,
    loss: NDArray,
    gain: NDArray,
    frame_frequency: float = 0.0,
) -> Generator:
    """Generator for ``H = sum_ij h[i, j] B_i^dag B_j`` plus loss/gain terms on ``B_i``.

    ``modes`` are the operators ``B_i`` (normal or local annihilators). Loss
    contributes ``Lm[i, j] (B_i rho B_j^dag - 1/2 {B_j^dag B_i, rho})`` and gain
    ``Lp[i, j] (B_i^dag rho B_j - 1/2 {B_j B_i^dag, rho})``; both coefficient
    matrices must be Hermitian.
    """
    n = len(modes)
    d = modes[0].shape[0]
    dag = [b.conj().T.tocsr() for b in modes]
    number = sum((dag[i] @ modes[i] for i in range(n)), sp.csr_matrix((d, d), dtype=np.complex128))
    h = sp.csr_matrix((d, d), dtype=np.complex128)
    anti = sp.csr_matrix((d, d), dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            if hamiltonian[i, j] != 0:
                h = h + hamiltonian[i, j] * (dag[i] @ modes[j])
            if loss[i, j] != 0:
                anti = anti + loss[i, j] * (dag[j] @ modes[i])
            if gain[i, j] != 0:
                anti = anti + gain[i, j] * (modes[j] @ dag[i])
    h = h - frame_frequency * number
    h_eff = (h - 0.5j * anti).tocsr()
    jumps = _hermitian_channels(loss, modes) + _hermitian_channels(gain, dag)
    return Generator(h_eff=h_eff, jumps=jumps)


def normal_operators(basis: NormalModeBasis, dims: tuple[int, ...]) -> list[sp.csr_matrix]:
    """``A_i = sum_n U[i, n] a_n`` on the truncated product space."""
    local = annihilators(dims)
    u = np.asarray(basis.transform)
    zero = sp.csr_matrix(local[0].shape, dtype=np.complex128)
    return [
        sum((u[i, k] * local[k] for k in range(len(local)) if u[i, k] != 0), zero).tocsr()
        for i in range(len(local))
    ]


def normal_generator(
    basis: NormalModeBasis, diss: DissipatorSet, dims: tuple[int, ...], frame_frequency: float = 0.0
) -> Generator:
    ops = normal_operators(basis, dims)
    return build_generator(ops, np.diag(basis.eigenfrequencies), diss.lambda_minus, diss.lambda_plus, frame_frequency)


def local_generator(
    basis: NormalModeBasis, spec: SystemSpec, dims: tuple[int, ...], frame_frequency: float = 0.0
) -> Generator:
    """The same master equation written with local operators and local rates."""
    loss, gain = local_coefficients(local_rates(basis, spec), spec.n_modes)
    return build_generator(annihilators(dims), np.asarray(basis.omega_matrix), loss, gain, frame_frequency)


def liouvillian_apply(
    spec: SystemSpec, basis: NormalModeBasis, diss: DissipatorSet, rho: FockState
) -> CMatrix:
    """``d rho/dt`` in the lab frame (no rotating-frame shift)."""
    if len(rho.dims) != spec.n_modes:
        raise SpecError("state and model mode counts differ")
    return normal_generator(basis, diss, rho.dims).apply(rho.rho)


def _rk4(gen: Generator, rho: CMatrix, h: float, k1: CMatrix) -> CMatrix:
    k2 = gen(rho + 0.5 * h * k1)
    k3 = gen(rho + 0.5 * h * k2)
    k4 = gen(rho + h * k3)
    return rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def relax_to_steady(
    spec: SystemSpec,
    diss: DissipatorSet,
    config: OracleConfig,
    basis: NormalModeBasis | None = None,
    initial: FockState | None = None,
    generator: Generator | None = None,
) -> FockState:
    """Integrate from ``initial`` (joint vacuum by default) until ``max|d rho/dt|`` settles.

    Raises ``NotConverged`` if ``t_final`` is reached with the residual still
    above ``10 * convergence_tol``.
    """
    if basis is None:
        basis = normal_modes(spec)
    if len(config.cutoffs) != spec.n_modes:
        raise SpecError(f"{len(config.cutoffs)} cutoffs given for {spec.n_modes} modes")
    config.check_step(basis, diss)
    dims = config.dims
    state = initial if initial is not None else vacuum(dims)
    if state.dims != dims:
        raise SpecError("initial state dimensions do not match the cutoffs")
    gen = generator or normal_generator(basis, diss, dims, config.frame_for(basis))

    rho = state.rho.copy()
    h = config.step_for(basis, diss)
    max_steps = math.ceil(config.t_final / h)
    residual = math.inf
    history = []
    step = 0
    while step < max_steps:
        k1 = gen(rho)
        if step % config.check_every == 0:
            residual = float(np.max(np.abs(k1)))
            history.append((step * h, residual))
            if residual < config.convergence_tol:
                break
        rho = _rk4(gen, rho, h, k1)
        rho /= np.trace(rho).real
        step += 1
        if step % 100 == 0:
            rho = 0.5 * (rho + rho.conj().T)
    else:
        residual = float(np.max(np.abs(gen(rho))))
        history.append((step * h, residual))

    rho = 0.5 * (rho + rho.conj().T)
    converged = residual < config.convergence_tol
    min_eig = float(np.linalg.eigvalsh(rho).min())
    log.info("oracle: t=%.1f steps=%d residual=%.2e min_eig=%.2e", step * h, step, residual, min_eig)
    result = FockState(rho, dims, step * h, step, residual, converged, min_eig, history)
    if residual > 10 * config.convergence_tol:
        raise NotConverged(
            f"max|d rho/dt| = {residual:.3e} after t = {step * h:g} "
            f"(tolerance {config.convergence_tol:.1e})"
        )
    return result


def marginal(state: FockState, mode: int) -> CMatrix:
    """Reduced density matrix of one mode."""
    dims = state.dims
    letters = "abcdefghijklmnopqrstuvwx"[: len(dims)]
    rows = letters[:mode] + "Y" + letters[mode + 1 :]
    cols = letters[:mode] + "Z" + letters[mode + 1 :]
    return np.einsum(f"{rows}{cols}->YZ", state.rho.reshape(dims + dims))


def reduced_marginal(state: FockState, mode: int) -> NDArray[np.float64]:
    """Diagonal populations ``p_n`` of one mode's reduced state."""
    return np.real(np.diag(marginal(state, mode)))


def occupation(state: FockState, mode: int) -> float:
    p = reduced_marginal(state, mode)
    return float(np.dot(np.arange(len(p)), p))


def tail_estimate(state: FockState, mode: int) -> float:
    """Geometric estimate of the population lost above the cutoff."""
    p = reduced_marginal(state, mode)
    n = occupation(state, mode)
    q = n / (n + 1.0) if n > 0 else 0.0
    return float(p[-1] * q / (1.0 - q)) if q < 1 else math.inf
