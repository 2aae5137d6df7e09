import warnings

import numpy as np
import pytest

from fdwfl.lti import IoSpectrumData, Trajectory, experiment_to_spectrum, periodic_state, simulate
from fdwfl.spectra import Spectrum, build_F, build_Psi, make_grid
from fdwfl.wfl import (
    PeShortfallWarning,
    generate_trajectory,
    membership_steady,
    membership_transient,
    rank_certificate,
)
from tests.conftest import odd_bin_input, random_experiment
from tests.oracles import initial_state_defect


def complex_form_residual(data, traj):
    """Membership residual of the complex formulation with a general complex coefficient."""
    L = len(traj)
    A = np.vstack([build_Psi(data.U, L), build_Psi(data.Omega, L), build_Psi(data.Y, L)])
    b = np.concatenate([traj.u.ravel(), np.zeros(L), traj.y.ravel()]).astype(complex)
    g = np.linalg.lstsq(A, b, rcond=None)[0]
    return np.abs(A @ g - b).max()


class TestRankCertificate:
    def test_benchmark(self, bench_data):
        rank, full = rank_certificate(bench_data, 5)
        assert full and rank == 4 + 5 * 2

    def test_zero_data(self):
        g = make_grid(10)
        zero = Spectrum(g, np.zeros(10))
        data = IoSpectrumData(zero, zero, Spectrum(g, np.zeros((10, 2))))
        with pytest.warns(PeShortfallWarning):
            rank, full = rank_certificate(data, 2)
        # only the phasor rows survive
        assert not full and rank == 2

    def test_zero_input_zero_state_has_only_phasor_rank(self, bench_model):
        data, _ = experiment_to_spectrum(bench_model, np.zeros(40), np.zeros(4), make_grid(20))
        with pytest.warns(PeShortfallWarning):
            rank, full = rank_certificate(data, 3)
        assert rank == 3 and not full

    def test_requires_state(self, bench_data):
        with pytest.raises(ValueError):
            rank_certificate(IoSpectrumData(bench_data.U, bench_data.Y), 3)

    def test_random_controllable_models(self):
        rng = np.random.default_rng(7)
        for i in range(50):
            _, data, _ = random_experiment(rng, 1 + i % 3)
            with warnings.catch_warnings():
                warnings.simplefilter("error", PeShortfallWarning)
                assert rank_certificate(data, 4).full_row_rank


class TestMembership:
    def test_zero_trajectory(self, bench_data):
        for solve in (membership_transient, membership_steady):
            sol = solve(bench_data, Trajectory(np.zeros(6), np.zeros(6)))
            assert sol.feasible and sol.residual == 0 and sol.G0 == 0 and not sol.G1.any()

    def test_simulated_trajectory(self, bench_model, bench_data, rng):
        u = rng.standard_normal(10)
        _, y = simulate(bench_model, u, rng.standard_normal(4))
        sol = membership_transient(bench_data, Trajectory(u, y))
        assert sol.feasible and sol.residual < 1e-8 and not sol.pe_shortfall

    def test_perturbed_trajectory(self, bench_model, bench_data, rng):
        u = rng.standard_normal(10)
        _, y = simulate(bench_model, u, rng.standard_normal(4))
        y[4] += 10.0
        sol = membership_transient(bench_data, Trajectory(u, y))
        assert not sol.feasible and sol.residual > 1e-3
        assert initial_state_defect(bench_model, u[:, None], y) > 1e-3

    def test_solution_reproduces_trajectory(self, bench_model, bench_data, rng):
        u = rng.standard_normal(8)
        _, y = simulate(bench_model, u, rng.standard_normal(4))
        sol = membership_transient(bench_data, Trajectory(u, y))
        traj, defect = generate_trajectory(bench_data, sol.G0, sol.G1, 8)
        np.testing.assert_allclose(traj.u[:, 0], u, atol=1e-9)
        np.testing.assert_allclose(traj.y[:, 0], y[:, 0], atol=1e-9)
        assert np.abs(defect).max() < 1e-9

    def test_dimension_mismatch(self, bench_data):
        with pytest.raises(ValueError):
            membership_transient(bench_data, Trajectory(np.zeros((4, 2)), np.zeros(4)))

    def test_pe_shortfall_is_flagged(self, bench_model, bench_data, rng):
        u = rng.standard_normal(17)
        _, y = simulate(bench_model, u, np.zeros(4))
        # (U, Omega) on 20 bins supports order <= 19 < 17 + 4
        sol = membership_transient(bench_data, Trajectory(u, y))
        assert sol.pe_shortfall

    def test_steady_data(self, bench_model, rng):
        u_data = odd_bin_input()
        data, dx = experiment_to_spectrum(bench_model, u_data, periodic_state(bench_model, u_data),
                                          make_grid(20))
        assert np.abs(dx).max() < 1e-12
        u = rng.standard_normal(8)
        _, y = simulate(bench_model, u, rng.standard_normal(4))
        sol = membership_steady(data, Trajectory(u, y))
        assert sol.feasible and sol.residual < 1e-8

    def test_steady_assumption_on_transient_data_accepts_non_trajectories(self, bench_model, bench_data, rng):
        # the boundary term adds spurious directions: without the phasor rows,
        # perturbed (non-)trajectories are reproduced exactly
        for L in (6, 10):
            u = rng.standard_normal(L)
            _, y = simulate(bench_model, u, rng.standard_normal(4))
            y[L // 2] += 10.0
            bad = Trajectory(u, y)
            assert membership_steady(bench_data, bad).feasible
            assert not membership_transient(bench_data, bad).feasible

    def test_complex_and_real_forms_agree(self, rng):
        for i in range(20):
            model, data, _ = random_experiment(rng, 1 + i % 3)
            u = rng.standard_normal(8)
            _, y = simulate(model, u, rng.standard_normal(model.n_x))
            if i % 2:
                y = y + rng.standard_normal(y.shape)
            traj = Trajectory(u, y)
            tol = 1e-7
            assert (complex_form_residual(data, traj) < tol) == membership_transient(data, traj).feasible

    def test_completeness_both_directions(self, rng):
        for i in range(30):
            n_x = 1 + i % 3
            model, data, _ = random_experiment(rng, n_x)
            u = rng.standard_normal(10)
            _, y = simulate(model, u, rng.standard_normal(n_x))
            assert membership_transient(data, Trajectory(u, y)).feasible
            y_bad = y + rng.standard_normal(y.shape)
            assert initial_state_defect(model, u[:, None], y_bad) > 1e-3
            assert not membership_transient(data, Trajectory(u, y_bad)).feasible


class TestGenerate:
    def test_zero_coefficients(self, bench_data):
        traj, defect = generate_trajectory(bench_data, 0.0, np.zeros(19), 5)
        assert not traj.u.any() and not traj.y.any() and not defect.any()

    def test_length_checked(self, bench_data):
        with pytest.raises(ValueError):
            generate_trajectory(bench_data, 0.0, np.zeros(5), 5)

    def test_realness(self, bench_data, rng):
        for _ in range(10):
            G0 = rng.standard_normal()
            G1 = rng.standard_normal(19) + 1j * rng.standard_normal(19)
            g = np.concatenate([[G0], G1, np.conj(G1)])
            for S in (bench_data.U, bench_data.Y, bench_data.Omega):
                assert np.abs((build_Psi(S, 7) @ g).imag).max() < 1e-12 * (1 + np.abs(g).sum())

    def test_random_coefficients_defect(self, bench_data, rng):
        G1 = rng.standard_normal(19) + 1j * rng.standard_normal(19)
        traj, defect = generate_trajectory(bench_data, 0.5, G1, 6)
        assert np.abs(defect).max() > 1e-3
        sol = membership_transient(bench_data, traj)
        # the generating coefficients leave exactly the phasor-channel defect,
        # the least-squares fit can only do better
        assert sol.residual <= np.abs(defect).max() + 1e-9

    def test_round_trip_zero_defect(self, bench_data, rng):
        # project random coefficients onto the set with a silent phasor channel
        L = 6
        A = np.hstack([build_F(bench_data.Omega, L).real, build_F(bench_data.Omega, L)[:, 1:].imag])
        phi = rng.standard_normal(A.shape[1])
        phi -= np.linalg.pinv(A) @ (A @ phi)
        G1 = (phi[1:20] - 1j * phi[20:]) / 2
        traj, defect = generate_trajectory(bench_data, phi[0], G1, L)
        assert np.abs(defect).max() < 1e-10
        sol = membership_transient(bench_data, traj)
        assert sol.feasible and sol.residual < 1e-9
