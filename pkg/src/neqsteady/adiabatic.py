"""Bus elimination for the L - bus - R chain and the two-mode closed forms.

Sign convention: ``detuning = omega'_R - omega'_L`` so that
``omega'_L = mean - detuning/2``. The mixing pair ``(alpha, beta)`` is fixed
by requiring ``U = [[alpha, beta], [beta, -alpha]]`` to diagonalize the
reduced frequency matrix with the *lower* eigenvalue in the first row and
``alpha >= 0``; then ``alpha**2`` is the weight of the left mode in the lower
normal mode.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .dissipators import planck_occupation
from .errors import NotDegenerate, ResonantBus, SpecError
from .model import SystemSpec, two_mode

VALIDITY_RATIO = 5.0


class EndBaths(NamedTuple):
    t_l: float
    gamma_l: float
    t_r: float
    gamma_r: float


@dataclass(frozen=True)
class ReducedModel:
    omega_left: float
    omega_right: float
    coupling: float

    @property
    def mean_frequency(self) -> float:
        return 0.5 * (self.omega_left + self.omega_right)

    @property
    def detuning(self) -> float:
        return self.omega_right - self.omega_left

    @property
    def splitting(self) -> float:
        """Half the normal-mode splitting, ``sqrt(detuning^2/4 + g^2)``."""
        return math.hypot(0.5 * self.detuning, self.coupling)

    @property
    def epsilon_minus(self) -> float:
        return self.mean_frequency - self.splitting

    @property
    def epsilon_plus(self) -> float:
        return self.mean_frequency + self.splitting

    @property
    def mixing(self) -> tuple[float, float]:
        return two_mode_basis(self)[1:]

    def as_dict(self) -> dict:
        alpha, beta = self.mixing
        return {
            "omega_left": self.omega_left,
            "omega_right": self.omega_right,
            "coupling": self.coupling,
            "mean_frequency": self.mean_frequency,
            "detuning": self.detuning,
            "splitting": self.splitting,
            "epsilon_minus": self.epsilon_minus,
            "epsilon_plus": self.epsilon_plus,
            "alpha": alpha,
            "beta": beta,
        }


def reduced_from_detuning(mean: float, detuning: float, coupling: float) -> ReducedModel:
    return ReducedModel(mean - 0.5 * detuning, mean + 0.5 * detuning, coupling)


def _chain_roles(spec: SystemSpec) -> tuple[int, int, int]:
    if spec.n_modes != 3 or len(spec.baths) != 2:
        raise SpecError("bus elimination needs a 3-mode chain with baths on the two end modes")
    ends = sorted(b.mode for b in spec.baths)
    if "L" in spec.labels and "R" in spec.labels:
        ends = [spec.index("L"), spec.index("R")]
    (bus,) = set(range(3)) - set(ends)
    pairs = {frozenset((c.m, c.n)): c.g for c in spec.couplings}
    if frozenset(ends) in pairs:
        raise SpecError("end modes must not be coupled directly")
    return ends[0], bus, ends[1]


def eliminate_bus(spec: SystemSpec) -> ReducedModel:
    """Second-order elimination of a far-detuned, undamped bus mode.

    ``omega'_s = omega_s + g_s^2 / (omega_s - omega_m)`` and
    ``g = (g_L g_R / 2) [1/(omega_L - omega_m) + 1/(omega_R - omega_m)]``.
    Warns when ``|omega_s - omega_m| < 5 |g_s|``.
    """
    left, bus, right = _chain_roles(spec)
    pairs = {frozenset((c.m, c.n)): c.g for c in spec.couplings}
    g_l = pairs.get(frozenset((left, bus)), 0.0)
    g_r = pairs.get(frozenset((bus, right)), 0.0)
    w = spec.mode_frequencies
    det_l = w[left] - w[bus]
    det_r = w[right] - w[bus]
    for det, g, name in ((det_l, g_l, "left"), (det_r, g_r, "right")):
        if abs(det) < 1e-9:
            raise ResonantBus(f"{name} mode is resonant with the bus")
        if g != 0 and abs(det) < VALIDITY_RATIO * abs(g):
            warnings.warn(
                f"{name} detuning {abs(det):.3g} is below {VALIDITY_RATIO:g}x the coupling; "
                "bus elimination may be inaccurate",
                stacklevel=2,
            )
    return ReducedModel(
        omega_left=w[left] + g_l**2 / det_l,
        omega_right=w[right] + g_r**2 / det_r,
        coupling=0.5 * g_l * g_r * (1.0 / det_l + 1.0 / det_r),
    )


def two_mode_basis(reduced: ReducedModel) -> tuple[tuple[float, float], float, float]:
    """Return ``((eps_minus, eps_plus), alpha, beta)``."""
    delta = reduced.detuning
    g = reduced.coupling
    split = reduced.splitting
    if split == 0.0:
        alpha = beta = math.sqrt(0.5)
    else:
        # the larger component from the half-angle formula, the other from
        # 2 alpha beta = -g / split to avoid cancellation
        cos_theta = 0.5 * delta / split
        if cos_theta >= 0:
            alpha = math.sqrt(0.5 * (1.0 + cos_theta))
            beta = -g / (2.0 * split * alpha) + 0.0
        else:
            beta = math.sqrt(0.5 * (1.0 - cos_theta))
            if g > 0:
                beta = -beta
            alpha = -g / (2.0 * split * beta) + 0.0
    return (reduced.epsilon_minus, reduced.epsilon_plus), alpha, beta


def reduced_spec(reduced: ReducedModel, baths: EndBaths) -> SystemSpec:
    """The reduced model as a two-mode network for the numerical solvers."""
    return two_mode(
        reduced.omega_left,
        reduced.omega_right,
        reduced.coupling,
        (baths.t_l, baths.gamma_l),
        (baths.t_r, baths.gamma_r),
    )


@dataclass(frozen=True)
class ClosedFormReport:
    phi: float
    coefficients: dict[str, tuple[float, float, float, float]]
    occupation_left: float
    occupation_right: float

    @property
    def gap(self) -> float:
        return self.occupation_left - self.occupation_right

    def as_dict(self) -> dict:
        return {
            "phi": self.phi,
            "coefficients": {k: list(v) for k, v in self.coefficients.items()},
            "occupation_left": self.occupation_left,
            "occupation_right": self.occupation_right,
            "gap": self.gap,
        }


def closed_form_steady(reduced: ReducedModel, baths: EndBaths) -> ClosedFormReport:
    """Steady end-mode occupations of the two-mode model in closed form.

    Each occupation is ``(A N_L(e-) + B N_L(e+) + C N_R(e-) + D N_R(e+)) / Phi``
    with the coefficient sets returned under ``coefficients["L"|"R"]``.
    The right-end set is the mirror image of the left-end one (swap the
    baths and ``alpha <-> beta``), which keeps every ``(A+B+C+D)/Phi = 1``.
    """
    (e_minus, e_plus), alpha, beta = two_mode_basis(reduced)
    a2, b2 = alpha * alpha, beta * beta
    gl, gr = baths.gamma_l, baths.gamma_r
    s2 = 16.0 * reduced.splitting**2
    base = gl * gr * (gl + gr) ** 2
    mix_ab = a2 * gl + b2 * gr
    mix_ba = b2 * gl + a2 * gr

    phi = base + s2 * mix_ab * mix_ba
    cross = s2 * a2 * b2
    coeffs = {
        "L": (
            a2 * (base + s2 * a2 * mix_ba * gl),
            b2 * (base + s2 * b2 * mix_ab * gl),
            cross * mix_ba * gr,
            cross * mix_ab * gr,
        ),
        "R": (
            cross * mix_ba * gl,
            cross * mix_ab * gl,
            b2 * (base + s2 * b2 * mix_ba * gr),
            a2 * (base + s2 * a2 * mix_ab * gr),
        ),
    }
    occ = (
        planck_occupation(e_minus, baths.t_l),
        planck_occupation(e_plus, baths.t_l),
        planck_occupation(e_minus, baths.t_r),
        planck_occupation(e_plus, baths.t_r),
    )
    n_l = float(np.dot(coeffs["L"], occ) / phi)
    n_r = float(np.dot(coeffs["R"], occ) / phi)
    return ClosedFormReport(phi=phi, coefficients=coeffs, occupation_left=n_l, occupation_right=n_r)


def degeneracy_gap(reduced: ReducedModel, baths: EndBaths) -> float:
    """``N_L - N_R`` at zero renormalized detuning."""
    if abs(reduced.detuning) >= 1e-12:
        raise NotDegenerate(f"detuning {reduced.detuning:.3e} is not zero")
    e_minus, e_plus = reduced.epsilon_minus, reduced.epsilon_plus
    num = (planck_occupation(e_plus, baths.t_l) - planck_occupation(e_plus, baths.t_r)) + (
        planck_occupation(e_minus, baths.t_l) - planck_occupation(e_minus, baths.t_r)
    )
    return num / (2.0 * (1.0 + 4.0 * reduced.coupling**2 / (baths.gamma_l * baths.gamma_r)))
