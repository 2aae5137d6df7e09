import numpy as np
import pytest

from fdwfl.bench import ExperimentConfig, benchmark_model, multisine, run_experiment
from fdwfl.lti import StateSpaceModel, experiment_to_spectrum, is_controllable
from fdwfl.spectra import make_grid


def random_model(rng, n_x, n_u=1, n_y=1, radius=0.9):
    """Random controllable model with spectral radius ``radius``."""
    while True:
        A = rng.standard_normal((n_x, n_x))
        A *= radius / max(np.abs(np.linalg.eigvals(A)).max(), 1e-3)
        model = StateSpaceModel(A, rng.standard_normal((n_x, n_u)),
                                rng.standard_normal((n_y, n_x)), rng.standard_normal((n_y, n_u)))
        if is_controllable(model):
            return model


def odd_bin_input(M=20, periods=1):
    return multisine(ExperimentConfig(M=M, periods=periods))


@pytest.fixture(scope="session")
def bench_model():
    return benchmark_model()


@pytest.fixture(scope="session")
def bench_record():
    return run_experiment(ExperimentConfig(seed=0))


@pytest.fixture(scope="session")
def bench_data(bench_record):
    return bench_record.data


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_experiment(rng, n_x, M=20):
    model = random_model(rng, n_x)
    grid = make_grid(M)
    data, dx = experiment_to_spectrum(model, odd_bin_input(M), rng.standard_normal(n_x), grid)
    return model, data, dx
