"""Resonant atom-field cavity channels acting on the coin state.

Four interaction variants are supported, all on resonance: the standard
Jaynes-Cummings coupling, its intensity-dependent deformation, and the two-
and general m-photon couplings.  With the field prepared in a Fock state
the reduced coin map has three Kraus operators fixed by two effective Rabi
angles (eta for the excited branch, theta for the ground branch).

`jc_unitary` builds the exact joint atom-field unitary on a truncated Fock
space: every invariant 2x2 block {|e,n>, |g,n+m>} rotates by its own Rabi
angle and the m lowest ground levels are dark.  `channel_via_unitary`
traces the field out of that construction and must agree with the closed
Kraus form to machine precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .operators import check_density_matrix


class CavityVariant(str, Enum):
    JCM = "jcm"
    INTENSITY_DEPENDENT = "id"
    TWO_PHOTON = "2ph"
    MULTI_PHOTON = "mph"


# Photon multiplicity is fixed by the variant except for MULTI_PHOTON.
_FIXED_MULTIPLICITY = {
    CavityVariant.JCM: 1,
    CavityVariant.INTENSITY_DEPENDENT: 1,
    CavityVariant.TWO_PHOTON: 2,
}


@dataclass(frozen=True)
class CavityModel:
    """One cavity configuration: variant, Fock level r, coupling and time.

    `multiplicity` is the number of photons exchanged per transition; it is
    forced to 1 for JCM and the intensity-dependent variant, to 2 for
    TWO_PHOTON, and must be given explicitly for MULTI_PHOTON.  The bare
    atomic/field frequency `omega` is carried as metadata only; on
    resonance it cancels out of the coin channel.
    """

    variant: CavityVariant
    r: int = 0
    m: int | None = None
    lam: float = 1.0
    t: float = 0.0
    omega: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "variant", CavityVariant(self.variant))
        if self.r < 0:
            raise ValueError(f"Fock level r must be nonnegative, got {self.r}")
        if self.lam <= 0:
            raise ValueError(f"coupling lambda must be positive, got {self.lam}")
        if self.t < 0:
            raise ValueError(f"interaction time must be nonnegative, got {self.t}")
        fixed = _FIXED_MULTIPLICITY.get(self.variant)
        if fixed is not None:
            if self.m is not None and self.m != fixed:
                raise ValueError(f"variant {self.variant.value} has multiplicity {fixed}, got m={self.m}")
            object.__setattr__(self, "m", fixed)
        else:
            if self.m is None:
                raise ValueError("multi-photon variant requires an explicit multiplicity m")
            if self.m < 1:
                raise ValueError(f"multiplicity m must be a positive integer, got {self.m}")

    @property
    def multiplicity(self) -> int:
        assert self.m is not None
        return self.m


def rabi_angles(model: CavityModel) -> tuple[float, float]:
    """Dimensionless Rabi angles (eta, theta) for the two coin branches.

    The excited branch couples |e,r> to |g,r+m>; the ground branch couples
    |g,r> to |e,r-m>, and theta = 0 when fewer than m photons are present
    (the ground state is dark).
    """
    r, m = model.r, model.multiplicity
    if model.variant is CavityVariant.INTENSITY_DEPENDENT:
        return float(r + 1), float(r)
    eta = math.sqrt(math.prod(r + i for i in range(1, m + 1)))
    theta = math.sqrt(math.prod(r - i for i in range(m))) if r >= m else 0.0
    return eta, theta


def kraus_triple(model: CavityModel) -> list[np.ndarray]:
    """The three Kraus operators of the reduced coin channel."""
    eta, theta = rabi_angles(model)
    x = model.lam * model.t
    survive = np.array(
        [[math.cos(x * eta), 0.0], [0.0, math.cos(x * theta)]], dtype=complex
    )
    decay = np.array([[0.0, 0.0], [math.sin(x * eta), 0.0]], dtype=complex)
    excite = np.array([[0.0, math.sin(x * theta)], [0.0, 0.0]], dtype=complex)
    return [survive, decay, excite]


def apply_cavity(coin: np.ndarray, model: CavityModel) -> np.ndarray:
    """Send a coin state through the cavity channel."""
    check_density_matrix(coin, name="coin state")
    coin = np.asarray(coin, dtype=complex)
    out = np.zeros((2, 2), dtype=complex)
    for kraus in kraus_triple(model):
        out += kraus @ coin @ kraus.conj().T
    return out


def output_bloch(chi: float, model: CavityModel) -> np.ndarray:
    """Closed-form Bloch vector of the cavity output for the chi-family coin.

    Input coin cos(chi)|e> + i sin(chi)|g>; the output components are
    trigonometric in the two Rabi angles and need no matrix arithmetic.
    """
    eta, theta = rabi_angles(model)
    x = model.lam * model.t
    r2 = math.sin(2.0 * chi) * math.cos(x * eta) * math.cos(x * theta)
    r3 = math.cos(chi) ** 2 * math.cos(2.0 * x * eta) - math.sin(chi) ** 2 * math.cos(2.0 * x * theta)
    return np.array([0.0, r2, r3])


def _block_angle(model: CavityModel, n: int) -> float:
    """Rotation angle of the invariant block {|e,n>, |g,n+m>}."""
    if model.variant is CavityVariant.INTENSITY_DEPENDENT:
        rate = model.lam * (n + 1)
    else:
        rate = model.lam * math.sqrt(math.prod(n + i for i in range(1, model.multiplicity + 1)))
    return rate * model.t


def jc_unitary(model: CavityModel, fock_dim: int) -> np.ndarray:
    """Joint atom-field evolution on a truncated Fock space, block exact.

    Coin-major ordering: index c * fock_dim + n.  Blocks whose upper level
    would fall outside the truncation are left untouched (identity), so the
    matrix is exactly unitary at every truncation.
    """
    m = model.multiplicity
    if fock_dim < model.r + m + 1:
        raise ValueError(
            f"fock_dim {fock_dim} cannot hold the |g,{model.r + m}> level; need at least {model.r + m + 1}"
        )
    out = np.eye(2 * fock_dim, dtype=complex)
    for n in range(fock_dim - m):
        ang = _block_angle(model, n)
        c, s = math.cos(ang), math.sin(ang)
        up = n                      # |e, n>
        down = fock_dim + n + m     # |g, n+m>
        out[up, up] = c
        out[down, down] = c
        out[up, down] = -1j * s
        out[down, up] = -1j * s
    return out


def channel_via_unitary(coin: np.ndarray, model: CavityModel, fock_dim: int | None = None) -> np.ndarray:
    """Coin output computed by tracing the field out of the joint unitary.

    Ground truth for `apply_cavity`: prepares |r><r| in the field, evolves
    the joint state and partial-traces the field.
    """
    check_density_matrix(coin, name="coin state")
    dim = fock_dim if fock_dim is not None else model.r + model.multiplicity + 2
    unitary = jc_unitary(model, dim)
    field = np.zeros((dim, dim), dtype=complex)
    field[model.r, model.r] = 1.0
    joint = np.kron(np.asarray(coin, dtype=complex), field)
    joint = unitary @ joint @ unitary.conj().T
    return np.einsum("injn->ij", joint.reshape(2, dim, 2, dim))
