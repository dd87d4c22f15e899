"""Unit tests for the walker-channel evolution and its cross-check routes."""

import numpy as np
import pytest

from cavwalk.operators import IDENTITY2, coin_state_from_angle, density_from_bloch
from cavwalk.walk import (
    PositionDistribution,
    WalkConfig,
    WalkerState,
    characteristic_function,
    classical_jump_distribution,
    displacement_operators,
    distribution_via_phase,
    evolve,
    position_distribution,
    pure_coin_step_operators,
    scaled_moment,
    step_channel,
    step_channel_joint,
    substep_unitary,
    walker_at_origin,
)


def random_coin(rng):
    vec = rng.normal(size=3)
    vec *= rng.uniform(0.0, 1.0) / np.linalg.norm(vec)
    return density_from_bloch(vec)


def random_walker(rng, half_width):
    """Random density matrix on [-half_width, half_width] with a zero boundary ring."""
    size = 2 * half_width + 1
    inner = size - 2
    g = rng.normal(size=(inner, inner)) + 1j * rng.normal(size=(inner, inner))
    rho = g @ g.conj().T
    rho /= np.trace(rho)
    matrix = np.zeros((size, size), dtype=complex)
    matrix[1:-1, 1:-1] = rho
    return WalkerState(offset=-half_width, matrix=matrix)


class TestSubstepUnitary:
    def test_rejects_tiny_window(self):
        with pytest.raises(ValueError, match="at least 3"):
            substep_unitary(2)

    def test_action_on_up_coin(self):
        """V(|e> (x) |0>) = (|e>|1> - |g>|-1>)/sqrt2, window [-1, 0, 1]."""
        v = substep_unitary(3)
        ket = np.zeros(6, dtype=complex)
        ket[0 * 3 + 1] = 1.0  # |e> at the middle position
        expected = np.zeros(6, dtype=complex)
        expected[0 * 3 + 2] = 1.0 / np.sqrt(2.0)   # |e, +1>
        expected[1 * 3 + 0] = -1.0 / np.sqrt(2.0)  # |g, -1>
        assert np.allclose(v @ ket, expected, atol=1e-15)

    def test_action_on_down_coin(self):
        """V(|g> (x) |0>) = (|e>|1> + |g>|-1>)/sqrt2."""
        v = substep_unitary(3)
        ket = np.zeros(6, dtype=complex)
        ket[1 * 3 + 1] = 1.0
        expected = np.zeros(6, dtype=complex)
        expected[0 * 3 + 2] = 1.0 / np.sqrt(2.0)
        expected[1 * 3 + 0] = 1.0 / np.sqrt(2.0)
        assert np.allclose(v @ ket, expected, atol=1e-15)

    def test_unitary_on_interior(self):
        window = 9
        v = substep_unitary(window)
        gram = v.conj().T @ v
        interior = [c * window + p for c in (0, 1) for p in range(1, window - 1)]
        block = gram[np.ix_(interior, interior)]
        assert np.allclose(block, np.eye(len(interior)), atol=1e-14)


class TestDisplacementOperators:
    def test_rejects_bad_k(self):
        with pytest.raises(ValueError):
            displacement_operators(0)

    @pytest.mark.parametrize("k", [1, 2, 3, 4])
    def test_displacement_range(self, k):
        """Net shifts step by 2 and share the parity of k."""
        ops = displacement_operators(k)
        assert sorted(ops) == list(range(-k, k + 1, 2))

    @pytest.mark.parametrize("k", [1, 2, 3, 4])
    def test_completeness(self, k):
        """sum_d B_d^dag B_d = 1 exactly (trace preservation of the step)."""
        total = sum(m.conj().T @ m for m in displacement_operators(k).values())
        assert np.max(np.abs(total - IDENTITY2)) < 1e-15

    def test_k2_values_are_dyadic(self):
        ops = displacement_operators(2)
        assert np.array_equal(ops[2], np.array([[0.5, 0.5], [0.0, 0.0]]))
        assert np.array_equal(ops[-2], np.array([[0.0, 0.0], [-0.5, 0.5]]))
        assert np.array_equal(ops[0], np.array([[-0.5, 0.5], [-0.5, -0.5]]))


class TestSingleStep:
    def test_one_step_distribution_oracle(self):
        """V^2 on |e>|0>: hand contraction gives {-2: 1/4, 0: 1/2, +2: 1/4}."""
        out = step_channel(walker_at_origin(), coin_state_from_angle(0.0), k=2)
        dist = position_distribution(out).as_dict()
        assert abs(dist[-2] - 0.25) < 1e-12
        assert abs(dist[0] - 0.5) < 1e-12
        assert abs(dist[2] - 0.25) < 1e-12
        assert all(abs(dist[m]) < 1e-15 for m in dist if m % 2 == 1)

    def test_one_step_matrix_oracle(self):
        """Full walker matrix after one V^2 step from |e>|0>, by hand.

        The joint state is (|e,2> - |e,0> - |g,0> - |g,-2>)/2; tracing the
        coin leaves 1/4 blocks with signs fixed by the coin overlaps.
        """
        out = step_channel(walker_at_origin(), coin_state_from_angle(0.0), k=2)
        q = 0.25
        expected = {
            (2, 2): q, (0, 0): 2 * q, (-2, -2): q,
            (2, 0): -q, (0, 2): -q,
            (0, -2): q, (-2, 0): q,
            (2, -2): 0.0, (-2, 2): 0.0,
        }
        for (row, col), value in expected.items():
            got = out.matrix[out.index_of(row), out.index_of(col)]
            assert abs(got - value) < 1e-12, (row, col)

    def test_k1_step(self):
        """Single substep from the origin splits evenly onto +-1."""
        out = step_channel(walker_at_origin(), coin_state_from_angle(0.0), k=1)
        dist = position_distribution(out).as_dict()
        assert abs(dist[-1] - 0.5) < 1e-12
        assert abs(dist[1] - 0.5) < 1e-12

    def test_rejects_invalid_coin(self):
        bad = np.array([[0.9, 0.4], [0.4, 0.1]], dtype=complex)
        with pytest.raises(ValueError, match="negative eigenvalue"):
            step_channel(walker_at_origin(), bad, k=2)

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_matches_joint_construction(self, k):
        """Fast displacement-grouped path == literal joint-space partial trace."""
        rng = np.random.default_rng(42 + k)
        for _ in range(5):
            state = random_walker(rng, half_width=3)
            coin = random_coin(rng)
            fast = step_channel(state, coin, k)
            literal = step_channel_joint(state, coin, k)
            assert fast.offset == literal.offset
            assert np.max(np.abs(fast.matrix - literal.matrix)) < 1e-13

    @pytest.mark.parametrize("chi", [0.0, np.pi / 8.0, np.pi / 3.0])
    def test_matches_pure_coin_kraus(self, chi):
        """For pure coins the step is a two-operator Kraus map; dense cross-check."""
        rng = np.random.default_rng(11)
        state = random_walker(rng, half_width=3)
        vec = np.array([np.cos(chi), 1j * np.sin(chi)])
        kraus = pure_coin_step_operators(vec, k=2, window_size=state.size)
        expected = sum(op @ state.matrix @ op.conj().T for op in kraus)
        out = step_channel(state, coin_state_from_angle(chi), k=2)
        assert np.max(np.abs(out.matrix - expected)) < 1e-13

    def test_trace_preserved(self):
        rng = np.random.default_rng(8)
        state = random_walker(rng, half_width=4)
        coin = random_coin(rng)
        out = step_channel(state, coin, k=2)
        assert abs(np.trace(out.matrix) - 1.0) < 1e-12


class TestEvolve:
    def test_zero_steps_returns_initial(self):
        init = walker_at_origin()
        out = evolve(WalkConfig(k=2, n_steps=0, coin=coin_state_from_angle(0.3)))
        assert out.offset == init.offset
        assert np.array_equal(out.matrix, init.matrix)

    def test_window_bounds(self):
        out = evolve(WalkConfig(k=2, n_steps=5, coin=coin_state_from_angle(0.0)))
        assert out.positions[0] == -12 and out.positions[-1] == 12

    def test_boundary_ring_exactly_zero(self):
        out = evolve(WalkConfig(k=2, n_steps=6, coin=coin_state_from_angle(0.2)))
        assert np.max(np.abs(out.matrix[0, :])) == 0.0
        assert np.max(np.abs(out.matrix[:, -1])) == 0.0

    def test_matches_repeated_single_steps(self):
        coin = coin_state_from_angle(np.pi / 8.0)
        state = walker_at_origin()
        for _ in range(4):
            state = step_channel(state, coin, k=2)
        out = evolve(WalkConfig(k=2, n_steps=4, coin=coin))
        assert out.offset == state.offset
        assert np.max(np.abs(out.matrix - state.matrix)) < 1e-15

    def test_state_stays_physical(self):
        """Hermiticity, unit trace and the -1e-10 eigenvalue floor, step by step."""
        coin = random_coin(np.random.default_rng(17))
        state = walker_at_origin()
        for _ in range(6):
            state = step_channel(state, coin, k=2)
            assert np.max(np.abs(state.matrix - state.matrix.conj().T)) < 1e-12
            assert abs(np.trace(state.matrix) - 1.0) < 1e-12
            assert np.linalg.eigvalsh(state.matrix).min() > -1e-10

    def test_odd_positions_empty(self):
        out = evolve(WalkConfig(k=2, n_steps=7, coin=coin_state_from_angle(0.4)))
        dist = position_distribution(out)
        odd = dist.positions % 2 != 0
        assert np.max(np.abs(dist.probabilities[odd])) == 0.0

    def test_support_bound(self):
        out = evolve(WalkConfig(k=2, n_steps=4, coin=coin_state_from_angle(0.0)))
        dist = position_distribution(out)
        outside = np.abs(dist.positions) > 8
        assert np.max(np.abs(dist.probabilities[outside])) == 0.0

    def test_config_validation(self):
        coin = coin_state_from_angle(0.0)
        with pytest.raises(ValueError, match="k must be"):
            WalkConfig(k=0, n_steps=1, coin=coin)
        with pytest.raises(ValueError, match="n_steps"):
            WalkConfig(k=2, n_steps=-1, coin=coin)
        with pytest.raises(ValueError, match="margin"):
            walker_at_origin(margin=0)


class TestClassicalCoin:
    def test_diagonal_evolution_stays_diagonal(self):
        """Maximally mixed coin: off-diagonals are never populated, exactly."""
        state = walker_at_origin()
        for _ in range(3):
            state = step_channel(state, IDENTITY2 / 2.0, k=2)
        off = state.matrix - np.diag(np.diagonal(state.matrix))
        assert np.max(np.abs(off)) == 0.0

    def test_one_step_classical_map(self):
        """Mixed coin on an arbitrary walker state: rho/2 + S rho S^dag/4 + S' rho S'^dag/4."""
        rng = np.random.default_rng(23)
        state = random_walker(rng, half_width=3)
        out = step_channel(state, IDENTITY2 / 2.0, k=2)
        size = state.size
        grown = np.zeros((size + 4, size + 4), dtype=complex)
        grown[2:-2, 2:-2] = state.matrix
        up = np.eye(size + 4, k=-2)
        down = np.eye(size + 4, k=2)
        expected = 0.5 * grown + 0.25 * up @ grown @ up.T + 0.25 * down @ grown @ down.T
        assert np.max(np.abs(out.matrix - expected)) < 1e-15

    @pytest.mark.parametrize("n", [5, 12])
    def test_variance_is_2n(self, n):
        out = evolve(WalkConfig(k=2, n_steps=n, coin=IDENTITY2 / 2.0))
        dist = position_distribution(out)
        mean = scaled_moment(dist, 1, n, exponent=0.0)
        second = scaled_moment(dist, 2, n, exponent=0.0)
        assert abs(mean) < 1e-12
        assert abs(second - mean**2 - 2.0 * n) < 1e-9

    @pytest.mark.parametrize("k,expected", [(1, [0.5, 0.5]), (2, [0.25, 0.5, 0.25])])
    def test_jump_distribution(self, k, expected):
        disps, probs = classical_jump_distribution(k)
        assert np.array_equal(disps, np.arange(-k, k + 1, 2))
        assert np.allclose(probs, expected, atol=1e-15)

    @pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
    def test_jump_distribution_normalized_and_symmetric(self, k):
        disps, probs = classical_jump_distribution(k)
        assert abs(probs.sum() - 1.0) < 1e-12
        assert np.allclose(probs, probs[::-1], atol=1e-15)


class TestDistributions:
    def test_origin_distribution(self):
        dist = position_distribution(walker_at_origin())
        assert dist.as_dict()[0] == 1.0
        assert dist.probability(3) == 0.0

    def test_rejects_unnormalized(self):
        state = WalkerState(offset=0, matrix=np.diag([0.4, 0.4]).astype(complex))
        with pytest.raises(ValueError, match="sum to"):
            position_distribution(state)

    def test_scaled_moment_examples(self):
        dist = PositionDistribution(
            positions=np.array([-2, 0, 2]), probabilities=np.array([0.25, 0.5, 0.25])
        )
        assert scaled_moment(dist, 1, 1) == 0.0
        assert abs(scaled_moment(dist, 2, 1) - 2.0) < 1e-15
        assert abs(scaled_moment(dist, 2, 4, exponent=0.5) - 0.5) < 1e-15

    def test_scaled_moment_validation(self):
        dist = PositionDistribution(positions=np.array([0]), probabilities=np.array([1.0]))
        with pytest.raises(ValueError, match="nonnegative"):
            scaled_moment(dist, -1, 1)
        with pytest.raises(ValueError, match="positive"):
            scaled_moment(dist, 2, 0)


class TestPhaseRoute:
    def test_multiplier_has_unit_diagonal(self):
        """A(phi, phi) = 1: one step preserves the trace pointwise in phase."""
        rng = np.random.default_rng(31)
        for _ in range(10):
            coin = random_coin(rng)
            phi = rng.uniform(0.0, 2.0 * np.pi)
            for k in (1, 2, 3):
                assert abs(characteristic_function(coin, k, phi, phi) - 1.0) < 1e-13

    def test_multiplier_bounded(self):
        rng = np.random.default_rng(32)
        for _ in range(20):
            coin = random_coin(rng)
            val = characteristic_function(coin, 2, rng.uniform(0, 7), rng.uniform(0, 7))
            assert abs(val) <= 1.0 + 1e-12

    @pytest.mark.parametrize("k", [1, 2])
    @pytest.mark.parametrize("chi", [0.0, np.pi / 8.0, np.pi / 4.0])
    @pytest.mark.parametrize("n", [1, 5, 12])
    def test_matches_position_basis(self, k, chi, n):
        config = WalkConfig(k=k, n_steps=n, coin=coin_state_from_angle(chi))
        direct = position_distribution(evolve(config)).as_dict()
        phased = distribution_via_phase(config).as_dict()
        for m in set(direct) | set(phased):
            assert abs(direct.get(m, 0.0) - phased.get(m, 0.0)) < 1e-8

    def test_zero_steps(self):
        config = WalkConfig(k=2, n_steps=0, coin=coin_state_from_angle(0.0))
        assert abs(distribution_via_phase(config).probability(0) - 1.0) < 1e-12

    def test_mixed_initial_state(self):
        """The phase route also handles off-diagonal initial walker matrices."""
        rng = np.random.default_rng(77)
        init = random_walker(rng, half_width=2)
        config = WalkConfig(k=2, n_steps=4, coin=coin_state_from_angle(0.3), initial=init)
        direct = position_distribution(evolve(config)).as_dict()
        phased = distribution_via_phase(config).as_dict()
        for m in set(direct) | set(phased):
            assert abs(direct.get(m, 0.0) - phased.get(m, 0.0)) < 1e-8

    def test_coarse_grid_detected(self):
        config = WalkConfig(k=2, n_steps=10, coin=coin_state_from_angle(0.0))
        with pytest.raises(ValueError, match="too coarse"):
            distribution_via_phase(config, grid_points=8)
