"""Long-time limit of the walk: scaling function, arcsine law, resonance.

For the two-substep walk the rescaled position m/n concentrates, as n grows,
on the range of a trigonometric scaling function of a uniform phase.  For
the coin families produced by this package that function is a pure second
harmonic, amp * cos(2*phi - shift) plus an offset, so the limit density is
the arcsine (double-horn) law on [offset - amp, offset + amp].

A cavity-driven coin rescales the harmonic by an amplitude C(t) <= 1 built
from the two Rabi angles; at the resonance times C vanishes, the limit law
degenerates and the walk diffuses classically instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .cavity import CavityModel, apply_cavity, rabi_angles
from .operators import (
    SIGMA3,
    bloch_from_density,
    check_density_matrix,
    coin_rotation,
    coin_state_from_angle,
)
from .walk import PositionDistribution, characteristic_function, classical_jump_distribution

# Below this amplitude the limit law is treated as the degenerate point mass
# and callers are pointed at the classical (diffusive) branch.
RESONANCE_EPS = 1e-12


def weak_limit_trace(coin: np.ndarray, k: int, phi: float) -> float:
    """Scaling function of the walk at phase phi, from the trace formula.

    Sums the Heisenberg images of the post-rotation position-step observable
    over the k substeps and traces against the coin state.
    """
    if k < 1:
        raise ValueError(f"k must be a positive integer, got {k}")
    check_density_matrix(coin, name="coin state")
    u0 = coin_rotation()
    observable = u0.conj().T @ SIGMA3 @ u0
    phase = np.diag([np.exp(1j * phi), np.exp(-1j * phi)])
    substep = phase @ u0
    total = observable.copy()
    image = observable
    for _ in range(k - 1):
        image = substep.conj().T @ image @ substep
        total += image
    value = np.trace(total @ np.asarray(coin, dtype=complex))
    return float(value.real)


def weak_limit_derivative(coin: np.ndarray, k: int, phi: float, fd_step: float = 1e-5) -> float:
    """Scaling function via a centered phase derivative of the one-step multiplier.

    Independent route: differentiates the phase-space factor in its first
    argument.  The imaginary residue of the quotient must stay below 1e-6
    or the inputs are rejected.
    """
    if not 1e-7 <= fd_step <= 1e-3:
        raise ValueError(f"fd_step must lie in [1e-7, 1e-3], got {fd_step:g}")
    upper = characteristic_function(coin, k, phi + fd_step, phi)
    lower = characteristic_function(coin, k, phi - fd_step, phi)
    value = -1j * (upper - lower) / (2.0 * fd_step)
    if abs(value.imag) > 1e-6:
        raise ValueError(f"phase derivative is not real (residue {value.imag:.3e})")
    return float(value.real)


def weak_limit_harmonic(coin: np.ndarray, phi: float) -> float:
    """Closed form of the scaling function for the two-substep walk.

    With Bloch vector (r1, r2, r3) the function is
    r1 - r3*cos(2*phi) + r2*sin(2*phi); valid for k = 2 only.
    """
    r = bloch_from_density(coin)
    return float(r[0] - r[2] * math.cos(2.0 * phi) + r[1] * math.sin(2.0 * phi))


@dataclass(frozen=True)
class DrivenAmplitudes:
    """Second-harmonic decomposition of the driven scaling function.

    The function is cos_coeff*cos(2 phi) + sin_coeff*sin(2 phi)
    = amplitude * cos(2 phi - phase), with amplitude >= 0.
    """

    cos_coeff: float
    sin_coeff: float
    amplitude: float
    phase: float


def driven_amplitudes(chi: float, lambda_t: float, eta: float, theta: float) -> DrivenAmplitudes:
    """Harmonic coefficients of the scaling function after cavity driving.

    chi parametrizes the input coin, lambda_t is the accumulated coupling
    angle and (eta, theta) are the Rabi angles of the two branches.
    """
    cos_coeff = -math.cos(2.0 * lambda_t * eta) * math.cos(chi) ** 2 + math.cos(2.0 * lambda_t * theta) * math.sin(chi) ** 2
    sin_coeff = math.sin(2.0 * chi) * math.cos(lambda_t * eta) * math.cos(lambda_t * theta)
    return DrivenAmplitudes(
        cos_coeff=cos_coeff,
        sin_coeff=sin_coeff,
        amplitude=math.hypot(cos_coeff, sin_coeff),
        phase=math.atan2(sin_coeff, cos_coeff),
    )


def amplitudes_for_cavity(chi: float, model: CavityModel) -> DrivenAmplitudes:
    """Harmonic coefficients for a coin angle sent through a cavity model."""
    eta, theta = rabi_angles(model)
    return driven_amplitudes(chi, model.lam * model.t, eta, theta)


@dataclass(frozen=True)
class ArcsineLaw:
    """Arcsine (double-horn) limit law on [offset - amplitude, offset + amplitude]."""

    amplitude: float
    offset: float = 0.0

    def __post_init__(self):
        if self.amplitude < 0:
            raise ValueError(f"amplitude must be nonnegative, got {self.amplitude}")


def _require_nondegenerate(law: ArcsineLaw) -> None:
    if law.amplitude <= RESONANCE_EPS:
        raise ValueError(
            "limit law is degenerate (amplitude ~ 0): the walk is at resonance, use the classical diffusive branch"
        )


def limit_pdf(law: ArcsineLaw, y: float) -> float:
    """Limit density at y; zero outside the open support."""
    _require_nondegenerate(law)
    u = y - law.offset
    if abs(u) >= law.amplitude:
        return 0.0
    return 1.0 / (math.pi * math.sqrt(law.amplitude**2 - u**2))


def limit_cdf(law: ArcsineLaw, y: float) -> float:
    """Limit distribution function at y, clamped to [0, 1] outside the support."""
    _require_nondegenerate(law)
    u = (y - law.offset) / law.amplitude
    if u <= -1.0:
        return 0.0
    if u >= 1.0:
        return 1.0
    return 0.5 + math.asin(u) / math.pi


def limit_moment(law: ArcsineLaw, s: int) -> float:
    """s-th moment of the limit law, in closed form.

    The centered even moments are amplitude^j * binom(j, j/2) / 2^j; odd
    centered moments vanish; the offset enters through the binomial
    expansion.
    """
    if s < 0:
        raise ValueError(f"moment order must be nonnegative, got {s}")
    total = 0.0
    for j in range(0, s + 1, 2):
        central = law.amplitude**j * math.comb(j, j // 2) / 2.0**j
        total += math.comb(s, j) * law.offset ** (s - j) * central
    return total


def pdf_normalization(law: ArcsineLaw) -> float:
    """Integral of the limit pdf over its support.

    Substituting y = offset + amplitude*sin(u) removes the inverse-square-root
    endpoint singularities, so ordinary quadrature converges cleanly.
    """
    _require_nondegenerate(law)

    def integrand(u: float) -> float:
        y = law.offset + law.amplitude * math.sin(u)
        return limit_pdf(law, y) * law.amplitude * math.cos(u)

    value, _ = quad(integrand, -math.pi / 2.0, math.pi / 2.0)
    return float(value)


_ETA_BRANCH_ANGLES = (0.0, math.pi, 2.0 * math.pi)
_THETA_BRANCH_ANGLES = (math.pi / 2.0, 3.0 * math.pi / 2.0)


def resonance_branch(chi: float) -> str:
    """Which Rabi angle controls the resonance for this coin angle.

    Returns "eta" for chi at 0 or pi (mod 2 pi) and "theta" for chi at
    pi/2 or 3 pi/2; other coin angles admit no exact amplitude zero.
    """
    reduced = chi % (2.0 * math.pi)
    if any(abs(reduced - v) < 1e-9 for v in _ETA_BRANCH_ANGLES):
        return "eta"
    if any(abs(reduced - v) < 1e-9 for v in _THETA_BRANCH_ANGLES):
        return "theta"
    raise ValueError(
        f"coin angle {chi:.12g} admits no exact resonance; it must be a multiple of pi/2 (within 1e-9)"
    )


def resonance_times(model: CavityModel, chi: float, count: int = 1) -> list[float]:
    """Interaction times at which the driven amplitude vanishes exactly.

    Only coin angles on the Bloch-sphere poles and equatorial axes admit
    exact zeros: chi in {0, pi} uses the excited-branch angle eta, chi in
    {pi/2, 3pi/2} the ground-branch angle theta.  Returns the `count`
    smallest positive times (2j+1)*pi / (4*lambda*angle).
    """
    if count < 1:
        raise ValueError(f"count must be positive, got {count}")
    eta, theta = rabi_angles(model)
    angle = eta if resonance_branch(chi) == "eta" else theta
    if angle == 0.0:
        raise ValueError(
            "this branch has a dark coin level (Rabi angle 0), so the amplitude never vanishes at finite time"
        )
    times = [(2 * j + 1) * math.pi / (4.0 * model.lam * angle) for j in range(count)]
    for t in times:
        residual = driven_amplitudes(chi, model.lam * t, eta, theta).amplitude
        if residual >= RESONANCE_EPS:
            raise AssertionError(f"resonance time {t:.12g} leaves amplitude {residual:.3e}")
    return times


def ks_distance(dist: PositionDistribution, n: int, law: ArcsineLaw) -> float:
    """Kolmogorov-Smirnov distance between m/n under `dist` and the limit law.

    The supremum over the mass-carrying atoms of the difference between the
    right-continuous empirical distribution function and the limit
    distribution function evaluated at the atoms.
    """
    if n < 1:
        raise ValueError(f"step count must be positive, got {n}")
    _require_nondegenerate(law)
    mask = dist.probabilities > 0.0
    if not mask.any():
        raise ValueError("distribution carries no mass")
    atoms = dist.positions[mask] / float(n)
    masses = dist.probabilities[mask]
    order = np.argsort(atoms, kind="stable")
    atoms, masses = atoms[order], masses[order]
    empirical = np.cumsum(masses)
    scaled = np.clip((atoms - law.offset) / law.amplitude, -1.0, 1.0)
    reference = 0.5 + np.arcsin(scaled) / math.pi
    return float(np.max(np.abs(empirical - reference)))


def classical_variance_rate(k: int) -> float:
    """Variance per step of the mixed-coin jump law.

    For k <= 2 the maximally mixed coin keeps diagonal walker states
    diagonal, so the walk is exactly this iid jump chain and
    Var(position) = rate * n; for larger k coherences re-enter and the
    rate is only the reference jump-law value.
    """
    disps, probs = classical_jump_distribution(k)
    mean = float(np.sum(disps * probs))
    return float(np.sum(disps**2 * probs) - mean**2)


def coin_for_walk(chi: float, model: CavityModel | None) -> np.ndarray:
    """Coin fed to the walk: the chi-family state, optionally cavity-driven."""
    coin = coin_state_from_angle(chi)
    if model is not None:
        coin = apply_cavity(coin, model)
    return coin
