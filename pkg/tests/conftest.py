import numpy as np
import pytest

from ionpulse import Frame, StateVector, TrapParams


@pytest.fixture
def params3():
    return TrapParams(n_ions=3, trap_freq=1.0, lamb_dicke=0.1, base_rabi=1.0, fock_cutoff=4)


def make_params(n_ions, nmax=4, nu=1.0, eta=0.1, rabi=1.0):
    return TrapParams(n_ions=n_ions, trap_freq=nu, lamb_dicke=eta, base_rabi=rabi, fock_cutoff=nmax)


def random_state(params, rng, frame=None, clock=0.0):
    vec = rng.standard_normal(params.dim) + 1j * rng.standard_normal(params.dim)
    vec /= np.linalg.norm(vec)
    return StateVector(vec, params, frame if frame is not None else Frame(), clock=clock)
