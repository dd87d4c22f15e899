"""Fixed-size operator algebra shared by the walk and cavity modules.

Conventions used throughout the package:

* The coin (two-level atom) basis is ordered (excited, ground), so the
  projector onto the excited state is ``diag(1, 0)``.
* ``SIGMA2 = [[0, -i], [i, 0]]``, which makes ``exp(i*theta*SIGMA2)`` the
  real rotation ``[[cos t, sin t], [-sin t, cos t]]``.
* Density matrices are plain complex ndarrays.  ``check_density_matrix``
  reports violations instead of silently repairing them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

IDENTITY2 = np.eye(2, dtype=complex)
SIGMA1 = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA2 = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA3 = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

# Tolerances for density-matrix validation.  The eigenvalue floor absorbs
# roundoff from channel arithmetic; anything below it is a real violation.
HERMITICITY_ATOL = 1e-12
TRACE_ATOL = 1e-12
EIGENVALUE_FLOOR = -1e-12


def coin_rotation() -> np.ndarray:
    """The fixed coin flip: a pi/4 rotation about SIGMA2, (1/sqrt2)[[1,1],[-1,1]]."""
    return np.array([[1.0, 1.0], [-1.0, 1.0]], dtype=complex) / math.sqrt(2.0)


def coin_state_from_angle(chi: float) -> np.ndarray:
    """Density matrix of the pure coin state cos(chi)|0> + i sin(chi)|1>."""
    vec = np.array([math.cos(chi), 1.0j * math.sin(chi)], dtype=complex)
    return np.outer(vec, vec.conj())


def check_density_matrix(
    rho: np.ndarray,
    *,
    name: str = "density matrix",
    hermiticity_atol: float = HERMITICITY_ATOL,
    trace_atol: float = TRACE_ATOL,
    eigenvalue_floor: float = EIGENVALUE_FLOOR,
) -> None:
    """Raise ValueError if rho is not Hermitian, unit-trace and positive.

    Eigenvalues are allowed to dip to ``eigenvalue_floor`` below zero so that
    states produced by long channel compositions are not rejected for
    roundoff.  Nothing is clamped; the caller keeps the matrix as given.
    """
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"{name} must be square, got shape {rho.shape}")
    herm_defect = np.max(np.abs(rho - rho.conj().T)) if rho.size else 0.0
    if herm_defect > hermiticity_atol:
        raise ValueError(f"{name} is not Hermitian (defect {herm_defect:.3e})")
    trace_defect = abs(np.trace(rho) - 1.0)
    if trace_defect > trace_atol:
        raise ValueError(f"{name} trace differs from 1 by {trace_defect:.3e}")
    eigs = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    if eigs.min() < eigenvalue_floor:
        raise ValueError(f"{name} has negative eigenvalue {eigs.min():.3e}")


def bloch_from_density(rho: np.ndarray) -> np.ndarray:
    """Bloch vector (r1, r2, r3) of a 2x2 Hermitian unit-trace matrix."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {rho.shape}")
    defect = np.max(np.abs(rho - rho.conj().T))
    if defect > HERMITICITY_ATOL:
        raise ValueError(f"matrix is not Hermitian (defect {defect:.3e})")
    return np.array(
        [np.trace(s @ rho).real for s in (SIGMA1, SIGMA2, SIGMA3)]
    )


def density_from_bloch(r: np.ndarray) -> np.ndarray:
    """2x2 density matrix (1/2)(I + r . sigma) from a Bloch vector of norm <= 1."""
    r = np.asarray(r, dtype=float)
    if r.shape != (3,):
        raise ValueError(f"Bloch vector must have shape (3,), got {r.shape}")
    norm = float(np.linalg.norm(r))
    if norm > 1.0 + 1e-12:
        raise ValueError(f"Bloch vector norm {norm:.12g} exceeds 1")
    return 0.5 * (IDENTITY2 + r[0] * SIGMA1 + r[1] * SIGMA2 + r[2] * SIGMA3)


@dataclass(frozen=True)
class FockOperators:
    """Annihilation, creation and number operators on a truncated Fock space."""

    dim: int
    a: np.ndarray
    a_dagger: np.ndarray
    number_op: np.ndarray


def fock_operators(dim: int) -> FockOperators:
    """Ladder operators truncated to `dim` Fock levels (a|n> = sqrt(n)|n-1>)."""
    if dim < 2:
        raise ValueError(f"Fock dimension must be at least 2, got {dim}")
    a = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(complex)
    a_dagger = a.conj().T
    return FockOperators(dim=dim, a=a, a_dagger=a_dagger, number_op=a_dagger @ a)
