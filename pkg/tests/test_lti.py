import numpy as np
import pytest

from fdwfl.bench import BENCHMARK_DENOMINATOR, BENCHMARK_NUMERATOR
from fdwfl.lti import (
    EigenvalueError,
    IoSpectrumData,
    StateSpaceModel,
    Trajectory,
    augment,
    experiment_to_spectrum,
    is_controllable,
    observability_index,
    observability_matrix,
    periodic_state,
    simulate,
    spectrum_residual,
    transfer_function,
    transient,
)
from fdwfl.spectra import Spectrum, make_grid, numerical_rank
from tests.conftest import odd_bin_input, random_model
from tests.oracles import dense_resolvent, impulse_by_long_division, rational


def test_model_dimension_checks():
    with pytest.raises(ValueError):
        StateSpaceModel(np.eye(2), np.ones((3, 1)), np.ones((1, 2)), np.zeros((1, 1)))
    with pytest.raises(ValueError):
        StateSpaceModel(np.eye(2), np.ones((2, 1)), np.ones((1, 2)), np.zeros((2, 1)))
    m = StateSpaceModel(np.eye(2), np.ones((2, 3)), np.ones((4, 2)), np.zeros((4, 3)))
    assert (m.n_x, m.n_u, m.n_y) == (2, 3, 4)


def test_trajectory_lengths():
    with pytest.raises(ValueError):
        Trajectory(np.zeros(3), np.zeros(4))
    assert len(Trajectory(np.zeros(3), np.zeros((3, 2)))) == 3


class TestSimulate:
    def test_one_step_decay(self):
        m = StateSpaceModel(np.zeros((2, 2)), np.zeros((2, 1)), np.eye(2), np.zeros((2, 1)))
        x, y = simulate(m, np.zeros(4), [1.0, -2.0])
        np.testing.assert_array_equal(y[0], [1, -2])
        assert not y[1:].any()
        assert x.shape == (5, 2)

    def test_zero_response(self, bench_model):
        _, y = simulate(bench_model, np.zeros(10), np.zeros(4))
        assert not y.any()

    def test_impulse_matches_long_division(self, bench_model):
        u = np.zeros(30)
        u[0] = 1.0
        _, y = simulate(bench_model, u, np.zeros(4))
        h = impulse_by_long_division(BENCHMARK_NUMERATOR, BENCHMARK_DENOMINATOR, 30)
        np.testing.assert_allclose(y[:, 0], h, atol=1e-12)

    def test_dimension_mismatch(self, bench_model):
        with pytest.raises(ValueError):
            simulate(bench_model, np.zeros((5, 2)), np.zeros(4))
        with pytest.raises(ValueError):
            simulate(bench_model, np.zeros(5), np.zeros(3))


class TestTransferFunction:
    def test_pure_delay(self):
        m = StateSpaceModel(np.zeros((2, 2)), np.eye(2), np.eye(2), np.zeros((2, 2)))
        np.testing.assert_allclose(transfer_function(m, 2 + 1j), np.eye(2) / (2 + 1j))

    def test_no_input_path(self, rng):
        m = StateSpaceModel(rng.standard_normal((3, 3)), np.zeros((3, 2)), rng.standard_normal((1, 3)),
                            [[0.3, -1.0]])
        np.testing.assert_allclose(transfer_function(m, 1.7j), [[0.3, -1.0]])

    def test_benchmark_dc_gain(self, bench_model):
        expected = 1.5221 / 0.7247  # polynomial coefficient sums
        assert transfer_function(bench_model, 1.0)[0, 0] == pytest.approx(expected, rel=1e-12)
        assert expected == pytest.approx(2.1003, abs=1e-4)

    def test_matches_rational_function(self, bench_model, rng):
        for w in rng.uniform(0, 2 * np.pi, 50):
            z = np.exp(1j * w)
            h = rational(BENCHMARK_NUMERATOR, BENCHMARK_DENOMINATOR, z)
            assert transfer_function(bench_model, z)[0, 0] == pytest.approx(h, rel=1e-10)

    def test_eigenvalue_rejected(self):
        m = StateSpaceModel(np.diag([0.5, -0.2]), np.ones((2, 1)), np.ones((1, 2)), [[0.0]])
        with pytest.raises(EigenvalueError, match="eigenvalue"):
            transfer_function(m, 0.5)
        with pytest.raises(EigenvalueError):
            transient(m, [1.0, 1.0], -0.2)


class TestTransient:
    def test_periodic_data_has_none(self, bench_model):
        assert not transient(bench_model, np.zeros(4), 0.3 + 0.4j).any()

    def test_static_map(self, rng):
        m = StateSpaceModel(np.zeros((3, 3)), np.zeros((3, 1)), np.eye(3), np.zeros((3, 1)))
        dx = rng.standard_normal(3)
        np.testing.assert_allclose(transient(m, dx, 0.7 - 2j), dx, atol=1e-15)

    def test_dense_inverse_oracle(self, bench_model, rng):
        dx = rng.standard_normal(4)
        z = np.exp(1j * np.pi / 7)
        expected = bench_model.C @ dense_resolvent(bench_model.A, z) @ (z * dx)
        np.testing.assert_allclose(transient(bench_model, dx, z), expected, rtol=1e-12)


class TestDiagnostics:
    def test_observability_matrix(self, bench_model, rng):
        np.testing.assert_array_equal(observability_matrix(bench_model, 1), bench_model.C)
        m = StateSpaceModel(np.eye(3), np.ones((3, 1)), rng.standard_normal((2, 3)), np.zeros((2, 1)))
        np.testing.assert_array_equal(observability_matrix(m, 3), np.vstack([m.C] * 3))
        assert numerical_rank(observability_matrix(bench_model, 4))[0] == 4

    def test_observability_index(self, bench_model, rng):
        full = StateSpaceModel(rng.standard_normal((3, 3)), np.ones((3, 1)), np.eye(3), np.zeros((3, 1)))
        assert observability_index(full) == 1
        blind = StateSpaceModel(rng.standard_normal((3, 3)), np.ones((3, 1)), np.zeros((1, 3)), [[0.0]])
        assert observability_index(blind) == 1
        assert observability_index(bench_model) == 4

    def test_controllability(self, bench_model):
        assert not is_controllable(StateSpaceModel(np.zeros((2, 2)), np.zeros((2, 1)), np.ones((1, 2)), [[0]]))
        assert is_controllable(StateSpaceModel([[0.4]], [[2.0]], [[1.0]], [[0.0]]))
        assert is_controllable(bench_model)


class TestAugment:
    def test_zero_boundary_column(self, bench_model):
        aug = augment(bench_model, np.zeros(4))
        assert aug.n_u == 2
        for z in (0.3, 1j, 2 - 1j):
            assert transfer_function(aug, z)[0, 1] == 0

    def test_columns(self, bench_model, rng):
        dx = rng.standard_normal(4)
        aug = augment(bench_model, dx)
        for z in (np.exp(0.4j), 1.3, -0.2 + 0.9j):
            H = transfer_function(aug, z)
            R = dense_resolvent(bench_model.A, z)
            np.testing.assert_allclose(H[:, 0], (bench_model.C @ R @ bench_model.B + bench_model.D)[:, 0],
                                       rtol=1e-11)
            np.testing.assert_allclose(H[:, 1], bench_model.C @ R @ dx, rtol=1e-11)

    def test_silent_extra_input(self, bench_model, rng):
        aug = augment(bench_model, rng.standard_normal(4))
        u = rng.standard_normal(25)
        x0 = rng.standard_normal(4)
        x, y = simulate(bench_model, u, x0)
        xa, ya = simulate(aug, np.column_stack([u, np.zeros(25)]), x0)
        np.testing.assert_array_equal(y, ya)
        np.testing.assert_array_equal(x, xa)


class TestExperimentToSpectrum:
    def test_periodic_state_gives_steady_data(self, bench_model):
        grid = make_grid(20)
        u = odd_bin_input()
        data, dx = experiment_to_spectrum(bench_model, u, periodic_state(bench_model, u), grid)
        assert np.abs(dx).max() < 1e-12
        X, U, Y = data.X.values, data.U.values, data.Y.values
        A, B, C, D = bench_model.A, bench_model.B, bench_model.C, bench_model.D
        np.testing.assert_allclose(grid.phasors[:, None] * X, X @ A.T + U @ B.T, atol=1e-10)
        np.testing.assert_allclose(Y, X @ C.T + U @ D.T, atol=1e-10)

    def test_zero_experiment(self, bench_model):
        data, dx = experiment_to_spectrum(bench_model, np.zeros(8), np.zeros(4), make_grid(4))
        assert not (data.U.values.any() or data.Y.values.any() or data.X.values.any() or dx.any())

    def test_relations_hold_at_every_bin(self, bench_model, rng):
        grid = make_grid(20)
        data, dx = experiment_to_spectrum(bench_model, odd_bin_input(), rng.standard_normal(4), grid)
        assert spectrum_residual(bench_model, data, dx) < 1e-9
        # spot-check one bin against the raw formula
        k = 7
        Om = grid.phasor(k)
        lhs = Om * data.X[k]
        rhs = bench_model.A @ data.X[k] + bench_model.B @ data.U[k] + Om * dx
        np.testing.assert_allclose(lhs, rhs, atol=1e-11)

    def test_length_checked(self, bench_model):
        with pytest.raises(ValueError):
            experiment_to_spectrum(bench_model, np.zeros(9), np.zeros(4), make_grid(4))

    def test_output_decomposition(self, rng):
        model = random_model(rng, 3)
        grid = make_grid(12)
        data, dx = experiment_to_spectrum(model, rng.standard_normal(24), rng.standard_normal(3), grid)
        for k in range(grid.M):
            z = grid.phasor(k)
            expected = transfer_function(model, z) @ data.U[k] + transient(model, dx, z)
            np.testing.assert_allclose(data.Y[k], expected, rtol=1e-9, atol=1e-9 * np.abs(data.Y.values).max())

    def test_single_tone_steady_ratio(self, bench_model):
        grid = make_grid(16)
        k = 3
        n = np.arange(32)
        u = np.cos(np.pi * k * n / 16)
        data, dx = experiment_to_spectrum(bench_model, u, periodic_state(bench_model, u), grid)
        ratio = data.Y[k][0] / data.U[k][0]
        assert ratio == pytest.approx(transfer_function(bench_model, grid.phasor(k))[0, 0], rel=1e-9)

    def test_augmented_steady_state_equivalence(self, bench_model, rng):
        # finite-record data of the model is steady-state data of the augmented model with V=(U, Omega)
        grid = make_grid(20)
        data, dx = experiment_to_spectrum(bench_model, odd_bin_input(), rng.standard_normal(4), grid)
        aug = augment(bench_model, dx)
        V = np.column_stack([data.U.values, grid.phasors])
        X, Y = data.X.values, data.Y.values
        np.testing.assert_allclose(grid.phasors[:, None] * X, X @ aug.A.T + V @ aug.B.T, atol=1e-10)
        np.testing.assert_allclose(Y, X @ aug.C.T + V @ aug.D.T, atol=1e-10)


def test_io_data_grid_checked():
    with pytest.raises(ValueError):
        IoSpectrumData(Spectrum(make_grid(3), np.ones(3)), Spectrum(make_grid(4), np.ones(4)))
