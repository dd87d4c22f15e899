"""Evolution of the walker density matrix under the repeated-substep channel.

One walk step prepares a fresh coin, applies the conditional-shift unitary
(coin rotation followed by a coin-controlled position shift) `k` times, and
traces the coin out.  Grouping the 2^k substep branches by their net
displacement d gives 2x2 coin matrices B_d, and the step acts on the walker
matrix as

    out[x, x'] = sum_{d, d'} Tr(B_d rho_coin B_d'^dag) * rho[x - d, x' - d']

i.e. (k+1)^2 shifted copies of the current window.  `step_channel_joint`
keeps the literal joint coin+walker construction for cross-checks; it is
far too slow for long runs but is the ground truth the fast path must
match.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .operators import check_density_matrix, coin_rotation

# sqrt(2) * P_excited @ coin_rotation() and sqrt(2) * P_ground @ coin_rotation()
# are integer matrices.  Building the k-fold products over the integers and
# scaling once by 2^(-k/2) keeps even-k channel coefficients exact dyadic
# rationals (the classical point exactly reproduces its closed form).
_SHIFT_UP = np.array([[1, 1], [0, 0]], dtype=np.int64)
_SHIFT_DOWN = np.array([[0, 0], [-1, 1]], dtype=np.int64)

PROBABILITY_SUM_ATOL = 1e-10
PROBABILITY_FLOOR = -1e-12


@dataclass(frozen=True)
class WalkerState:
    """Walker density matrix on a finite window of the integer line.

    `matrix[i, j]` is the element between positions `offset + i` and
    `offset + j`.  Windows produced by this module carry a ring of exact
    zeros at the boundary, so no amplitude is ever clipped.
    """

    offset: int
    matrix: np.ndarray

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    @property
    def positions(self) -> np.ndarray:
        return np.arange(self.offset, self.offset + self.size)

    def index_of(self, position: int) -> int:
        idx = position - self.offset
        if not 0 <= idx < self.size:
            raise ValueError(f"position {position} outside window {self.offset}..{self.offset + self.size - 1}")
        return idx


def walker_at_origin(margin: int = 2) -> WalkerState:
    """|0><0| on the window [-margin, margin]."""
    if margin < 1:
        raise ValueError("margin must be at least 1 so the boundary ring stays zero")
    size = 2 * margin + 1
    matrix = np.zeros((size, size), dtype=complex)
    matrix[margin, margin] = 1.0
    return WalkerState(offset=-margin, matrix=matrix)


@dataclass(frozen=True)
class WalkConfig:
    """Parameters of one walk run: substep count k, step count, coin state."""

    k: int
    n_steps: int
    coin: np.ndarray
    initial: WalkerState = field(default_factory=walker_at_origin)

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be a positive integer, got {self.k}")
        if self.n_steps < 0:
            raise ValueError(f"n_steps must be nonnegative, got {self.n_steps}")


@dataclass(frozen=True)
class PositionDistribution:
    """Probabilities over integer positions, kept in position order."""

    positions: np.ndarray
    probabilities: np.ndarray

    def as_dict(self) -> dict[int, float]:
        return {int(m): float(p) for m, p in zip(self.positions, self.probabilities)}

    def probability(self, position: int) -> float:
        hits = np.nonzero(self.positions == position)[0]
        return float(self.probabilities[hits[0]]) if hits.size else 0.0


def _integer_displacement_blocks(k: int) -> dict[int, np.ndarray]:
    """Unscaled (integer) path sums per net displacement; scale is 2^(-k/2)."""
    if k < 1:
        raise ValueError(f"k must be a positive integer, got {k}")
    blocks: dict[int, np.ndarray] = {0: np.eye(2, dtype=np.int64)}
    for _ in range(k):
        grown: dict[int, np.ndarray] = {}
        for d, mat in blocks.items():
            for shift, factor in ((1, _SHIFT_UP), (-1, _SHIFT_DOWN)):
                acc = grown.setdefault(d + shift, np.zeros((2, 2), dtype=np.int64))
                acc += factor @ mat
        blocks = grown
    return blocks


def displacement_operators(k: int) -> dict[int, np.ndarray]:
    """Coin-space matrices B_d collecting all k-substep paths with net shift d."""
    blocks = _integer_displacement_blocks(k)
    scale = 2.0 ** (-k / 2.0)  # exact power of two for even k
    return {d: scale * blocks[d].astype(complex) for d in sorted(blocks)}


def step_coefficients(coin: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Displacements and the coefficient matrix C[a, b] = Tr(B_a coin B_b^dag)."""
    ops = displacement_operators(k)
    disps = np.array(sorted(ops))
    mats = np.stack([ops[d] for d in disps])
    coeffs = np.einsum("aij,jk,bik->ab", mats, np.asarray(coin, dtype=complex), mats.conj())
    return disps, coeffs


def _accumulate_step(src: np.ndarray, dst: np.ndarray, disps: np.ndarray, coeffs: np.ndarray, k: int) -> None:
    """dst (pre-zeroed, each side 2k larger than src) += shifted copies of src."""
    w = src.shape[0]
    for a, d in enumerate(disps):
        for b, dp in enumerate(disps):
            c = coeffs[a, b]
            if c == 0.0:
                continue
            dst[k + d : k + d + w, k + dp : k + dp + w] += c * src


def step_channel(state: WalkerState, coin: np.ndarray, k: int) -> WalkerState:
    """One walk step: fresh coin, k conditional shifts, coin traced out.

    The window grows by k on each side, so repeated calls never clip.
    """
    check_density_matrix(coin, name="coin state")
    disps, coeffs = step_coefficients(coin, k)
    out = np.zeros((state.size + 2 * k, state.size + 2 * k), dtype=complex)
    _accumulate_step(state.matrix, out, disps, coeffs, k)
    return WalkerState(offset=state.offset - k, matrix=out)


def substep_unitary(window_size: int) -> np.ndarray:
    """One conditional-shift substep on the joint coin+window space.

    Coin-major ordering; shifts are truncated at the window edge, so the
    matrix is unitary only on states supported away from the boundary.
    """
    if window_size < 3:
        raise ValueError(f"window must span at least 3 positions, got {window_size}")
    shift_up = np.eye(window_size, k=-1, dtype=complex)
    shift_down = np.eye(window_size, k=1, dtype=complex)
    u0 = coin_rotation()
    p_up = np.diag([1.0, 0.0]).astype(complex)
    p_down = np.diag([0.0, 1.0]).astype(complex)
    return np.kron(p_up @ u0, shift_up) + np.kron(p_down @ u0, shift_down)


def step_channel_joint(state: WalkerState, coin: np.ndarray, k: int) -> WalkerState:
    """Reference implementation of `step_channel` on the joint space.

    Builds the joint coin x walker density matrix, applies the substep
    unitary k times and traces out the coin.  O(W^3) per step; use only
    for small windows.
    """
    check_density_matrix(coin, name="coin state")
    w = state.size + 2 * k
    padded = np.zeros((w, w), dtype=complex)
    padded[k : k + state.size, k : k + state.size] = state.matrix
    joint = np.kron(np.asarray(coin, dtype=complex), padded)
    v_k = np.linalg.matrix_power(substep_unitary(w), k)
    joint = v_k @ joint @ v_k.conj().T
    out = joint[:w, :w] + joint[w:, w:]
    return WalkerState(offset=state.offset - k, matrix=out)


def pure_coin_step_operators(coin_vector: np.ndarray, k: int, window_size: int) -> list[np.ndarray]:
    """The two Kraus matrices of one step for a pure coin, as dense operators.

    Row space is the grown window (2k larger than the input); used as an
    independent check of the displacement-grouped fast path.
    """
    vec = np.asarray(coin_vector, dtype=complex)
    if vec.shape != (2,):
        raise ValueError(f"coin vector must have shape (2,), got {vec.shape}")
    ops = displacement_operators(k)
    out_size = window_size + 2 * k
    kraus = [np.zeros((out_size, window_size), dtype=complex) for _ in range(2)]
    for d, mat in ops.items():
        amp = mat @ vec
        for row in range(window_size):
            kraus[0][k + d + row, row] += amp[0]
            kraus[1][k + d + row, row] += amp[1]
    return kraus


def evolve(config: WalkConfig) -> WalkerState:
    """Run the walk for n_steps and return the final walker state.

    The full window [initial - k*n, initial + k*n] is allocated up front and
    the step kernel writes into growing views of two ping-pong buffers, so
    no reallocation happens mid-run.  The window-edge ring is asserted to
    stay exactly zero after every step.
    """
    check_density_matrix(config.coin, name="coin state")
    k, n = config.k, config.n_steps
    init = config.initial
    if n == 0:
        return WalkerState(offset=init.offset, matrix=init.matrix.copy())
    pad = k * n
    size = init.size + 2 * pad
    current = np.zeros((size, size), dtype=complex)
    current[pad : pad + init.size, pad : pad + init.size] = init.matrix
    scratch = np.zeros_like(current)
    disps, coeffs = step_coefficients(config.coin, k)
    lo, hi = pad, pad + init.size
    for _ in range(n):
        lo, hi = lo - k, hi + k
        dst = scratch[lo:hi, lo:hi]
        dst[...] = 0.0
        _accumulate_step(current[lo + k : hi - k, lo + k : hi - k], dst, disps, coeffs, k)
        current, scratch = scratch, current
        # support can only grow by k per step, so the outermost ring of the
        # full window must still be exactly zero
        edge = max(
            np.max(np.abs(current[0, :])),
            np.max(np.abs(current[-1, :])),
            np.max(np.abs(current[:, 0])),
            np.max(np.abs(current[:, -1])),
        )
        if edge != 0.0:
            raise AssertionError(f"walker amplitude reached the window boundary ({edge:.3e})")
    return WalkerState(offset=init.offset - pad, matrix=current)


def position_distribution(state: WalkerState) -> PositionDistribution:
    """Diagonal of the walker matrix as a validated probability list."""
    diag = np.diagonal(state.matrix)
    imag = float(np.max(np.abs(diag.imag))) if diag.size else 0.0
    if imag > 1e-10:
        raise ValueError(f"position populations have imaginary parts up to {imag:.3e}")
    probs = diag.real.copy()
    total = float(probs.sum())
    if abs(total - 1.0) > PROBABILITY_SUM_ATOL:
        raise ValueError(f"position probabilities sum to {total:.12g}, not 1")
    if probs.min(initial=0.0) < PROBABILITY_FLOOR:
        raise ValueError(f"position probability below floor: {probs.min():.3e}")
    return PositionDistribution(positions=state.positions, probabilities=probs)


def scaled_moment(dist: PositionDistribution, s: int, n: int, exponent: float = 1.0) -> float:
    """E[(position / n**exponent)**s] over the distribution."""
    if s < 0:
        raise ValueError(f"moment order must be nonnegative, got {s}")
    if n < 1:
        raise ValueError(f"step count must be positive, got {n}")
    scaled = dist.positions / float(n) ** exponent
    return float(np.sum(scaled**s * dist.probabilities))


def _phase_matrices(k: int, phis: np.ndarray) -> np.ndarray:
    """Stack of (D(phi) U0)^k where D(phi) = diag(e^{i phi}, e^{-i phi})."""
    phis = np.atleast_1d(np.asarray(phis, dtype=float))
    d = np.zeros((phis.size, 2, 2), dtype=complex)
    d[:, 0, 0] = np.exp(1j * phis)
    d[:, 1, 1] = np.exp(-1j * phis)
    v = d @ coin_rotation()
    out = np.broadcast_to(np.eye(2, dtype=complex), v.shape).copy()
    for _ in range(k):
        out = v @ out
    return out


def characteristic_function(coin: np.ndarray, k: int, phi: float, phi_prime: float) -> complex:
    """One-step phase-space multiplier Tr(M(phi) coin M(phi')^dag).

    In the shift eigenbasis each walk step multiplies the walker matrix
    element at (phi, phi') by this factor.
    """
    m = _phase_matrices(k, np.array([phi]))[0]
    m_prime = _phase_matrices(k, np.array([phi_prime]))[0]
    return complex(np.trace(m @ np.asarray(coin, dtype=complex) @ m_prime.conj().T))


def distribution_via_phase(config: WalkConfig, grid_points: int | None = None) -> PositionDistribution:
    """Position distribution computed through the shift eigenbasis.

    The walker matrix is mapped to a function of two phases, each step
    multiplies it pointwise by the one-step phase factor, and the diagonal
    of the double Fourier transform recovers the populations.  Entirely
    independent of the position-basis kernel, so the two paths cross-check
    each other.
    """
    check_density_matrix(config.coin, name="coin state")
    k, n = config.k, config.n_steps
    init = config.initial
    weight = np.abs(init.matrix).sum(axis=0) + np.abs(init.matrix).sum(axis=1)
    support = np.nonzero(weight)[0]
    if support.size == 0:
        raise ValueError("initial walker state is identically zero")
    lo = init.offset + int(support.min()) - k * n
    hi = init.offset + int(support.max()) + k * n
    span = hi - lo + 1
    grid = grid_points if grid_points is not None else max(2 * span + 2, 16)
    if grid < 4:
        raise ValueError(f"grid must have at least 4 points, got {grid}")
    phis = 2.0 * np.pi * np.arange(grid) / grid
    m = _phase_matrices(k, phis)
    factor = np.einsum("gab,bc,hac->gh", m, np.asarray(config.coin, dtype=complex), m.conj())
    waves = np.exp(1j * np.outer(phis, init.positions))
    spectrum = waves @ init.matrix @ waves.conj().T
    spectrum *= factor**n
    transform = np.fft.fft(np.fft.ifft(spectrum, axis=1), axis=0) / grid
    targets = np.arange(lo, hi + 1)
    probs = transform[targets % grid, targets % grid].real
    total = float(probs.sum())
    if abs(total - 1.0) > 1e-6:
        raise ValueError(
            f"phase grid of {grid} points is too coarse for reach {k * n}: probability sum drifted to {total:.9g}"
        )
    return PositionDistribution(positions=targets, probabilities=probs / total)


def classical_jump_distribution(k: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-step displacement law when the coin is maximally mixed.

    p_d = Tr(B_d B_d^dag)/2, computed from the integer path sums so every
    probability is an exact dyadic rational.
    """
    blocks = _integer_displacement_blocks(k)
    disps = np.array(sorted(blocks))
    probs = np.array([0.5 * float(np.sum(blocks[d] ** 2)) * 2.0**-k for d in disps])
    return disps, probs
