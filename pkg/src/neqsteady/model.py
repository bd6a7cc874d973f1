"""Oscillator networks with bilinear couplings and their normal modes.

Units: frequencies, couplings, rates and temperatures all share one scale
(the mean end-mode frequency is the natural unit), with hbar = k_B = 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.typing import NDArray

from .errors import DuplicateCoupling, NonPositiveSpectrum, SpecError
from .linalg import CMatrix, hermitian_eigen


@dataclass(frozen=True)
class Coupling:
    m: int
    n: int
    g: float


@dataclass(frozen=True)
class Bath:
    mode: int
    temperature: float
    rate: float


@dataclass(frozen=True)
class SystemSpec:
    """A network of modes ``omega_n a_n^dag a_n`` coupled by ``g (a_m^dag a_n + h.c.)``.

    ``labels`` are optional human-readable mode names (``"L"``, ``"bus"``,
    ``"R"``); they default to the mode indices.
    """

    mode_frequencies: tuple[float, ...]
    couplings: tuple[Coupling, ...] = ()
    baths: tuple[Bath, ...] = ()
    labels: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        object.__setattr__(self, "mode_frequencies", tuple(float(w) for w in self.mode_frequencies))
        object.__setattr__(
            self, "couplings", tuple(c if isinstance(c, Coupling) else Coupling(*c) for c in self.couplings)
        )
        object.__setattr__(self, "baths", tuple(b if isinstance(b, Bath) else Bath(*b) for b in self.baths))
        n = len(self.mode_frequencies)
        if not self.labels:
            object.__setattr__(self, "labels", tuple(str(i) for i in range(n)))
        else:
            object.__setattr__(self, "labels", tuple(self.labels))

        if n == 0:
            raise SpecError("at least one mode is required")
        if len(self.labels) != n or len(set(self.labels)) != n:
            raise SpecError("labels must be unique and one per mode")
        for i, w in enumerate(self.mode_frequencies):
            if not (np.isfinite(w) and w > 0):
                raise SpecError(f"mode {self.labels[i]}: frequency must be positive, got {w}")
        for c in self.couplings:
            if not (0 <= c.m < n and 0 <= c.n < n):
                raise SpecError(f"coupling ({c.m}, {c.n}) references a missing mode")
            if c.m == c.n:
                raise SpecError(f"coupling ({c.m}, {c.n}) couples a mode to itself")
            if not np.isfinite(c.g):
                raise SpecError(f"coupling ({c.m}, {c.n}) strength is not finite")
        if not self.baths:
            raise SpecError("at least one bath is required")
        seen = set()
        for b in self.baths:
            if not 0 <= b.mode < n:
                raise SpecError(f"bath attached to missing mode {b.mode}")
            if b.mode in seen:
                raise SpecError(f"mode {self.labels[b.mode]} has more than one bath")
            seen.add(b.mode)
            if not (np.isfinite(b.temperature) and b.temperature > 0):
                raise SpecError(f"bath on {self.labels[b.mode]}: temperature must be positive")
            if not (np.isfinite(b.rate) and b.rate > 0):
                raise SpecError(f"bath on {self.labels[b.mode]}: rate must be positive")

    @property
    def n_modes(self) -> int:
        return len(self.mode_frequencies)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise SpecError(f"no mode labelled {label!r}") from None

    def bath_on(self, mode: int) -> Bath | None:
        for b in self.baths:
            if b.mode == mode:
                return b
        return None

    def permuted(self, perm: Sequence[int]) -> "SystemSpec":
        """Relabel modes so that new mode ``k`` is old mode ``perm[k]``."""
        inv = {old: new for new, old in enumerate(perm)}
        return SystemSpec(
            mode_frequencies=tuple(self.mode_frequencies[p] for p in perm),
            couplings=tuple(Coupling(inv[c.m], inv[c.n], c.g) for c in self.couplings),
            baths=tuple(Bath(inv[b.mode], b.temperature, b.rate) for b in self.baths),
            labels=tuple(self.labels[p] for p in perm),
        )


def chain(
    omega_l: float,
    omega_m: float,
    omega_r: float,
    g_l: float,
    g_r: float,
    bath_l: tuple[float, float],
    bath_r: tuple[float, float],
) -> SystemSpec:
    """The L - bus - R chain; ``bath_*`` are ``(temperature, rate)`` pairs."""
    return SystemSpec(
        mode_frequencies=(omega_l, omega_m, omega_r),
        couplings=(Coupling(0, 1, g_l), Coupling(1, 2, g_r)),
        baths=(Bath(0, *bath_l), Bath(2, *bath_r)),
        labels=("L", "bus", "R"),
    )


def two_mode(
    omega_l: float,
    omega_r: float,
    g: float,
    bath_l: tuple[float, float],
    bath_r: tuple[float, float],
) -> SystemSpec:
    """Two directly coupled end modes, each with its own bath."""
    return SystemSpec(
        mode_frequencies=(omega_l, omega_r),
        couplings=(Coupling(0, 1, g),),
        baths=(Bath(0, *bath_l), Bath(1, *bath_r)),
        labels=("L", "R"),
    )


@dataclass(frozen=True)
class NormalModeBasis:
    omega_matrix: CMatrix
    transform: CMatrix
    eigenfrequencies: NDArray[np.float64]

    @property
    def n_modes(self) -> int:
        return len(self.eigenfrequencies)


def build_omega(spec: SystemSpec) -> CMatrix:
    """Hermitian frequency matrix with ``H_S = a^dag . Omega . a``."""
    n = spec.n_modes
    omega = np.diag(np.asarray(spec.mode_frequencies, dtype=np.complex128))
    pairs = set()
    for c in spec.couplings:
        key = frozenset((c.m, c.n))
        if key in pairs:
            raise DuplicateCoupling(f"modes ({c.m}, {c.n}) are coupled more than once")
        pairs.add(key)
        omega[c.m, c.n] = c.g
        omega[c.n, c.m] = c.g
    assert omega.shape == (n, n)
    return omega


def normal_modes(spec: SystemSpec) -> NormalModeBasis:
    omega = build_omega(spec)
    eps, u = hermitian_eigen(omega)
    if np.any(eps <= 0):
        raise NonPositiveSpectrum(f"normal-mode frequencies must be positive, got {eps.tolist()}")
    for a in (omega, u, eps):
        a.setflags(write=False)
    return NormalModeBasis(omega_matrix=omega, transform=u, eigenfrequencies=eps)


def splittings(basis: NormalModeBasis) -> NDArray[np.float64]:
    """``d[i, j] = eps_i - eps_j``."""
    eps = np.asarray(basis.eigenfrequencies, dtype=float)
    return eps[:, None] - eps[None, :]
