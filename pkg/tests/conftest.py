import numpy as np
import pytest

from nongauss.gaussian import unitary_to_symplectic
from nongauss.moments import symplectic_form


def random_physical_cov(n_modes, rng, nu_max=2.5, strength=0.4):
    """sigma = S diag(nu) S^T with nu >= 1/2 and S a random symplectic."""
    g = rng.standard_normal((2 * n_modes, 2 * n_modes))
    g = 0.5 * strength * (g + g.T)
    from scipy.linalg import expm

    s = expm(symplectic_form(n_modes) @ g)
    nus = 0.5 + rng.uniform(0.0, nu_max - 0.5, size=n_modes)
    d = np.repeat(nus, 2)
    return (s * d[None, :]) @ s.T


def random_symplectic(n_modes, rng, strength=0.4):
    from scipy.linalg import expm

    g = rng.standard_normal((2 * n_modes, 2 * n_modes))
    g = 0.5 * strength * (g + g.T)
    return expm(symplectic_form(n_modes) @ g)


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
