import math

import numpy as np
import pytest

from nongauss import (
    GridCoverageError,
    char_function,
    displacement_matrix,
    gaussian_char_function,
    hs_distance_sq,
    hs_distance_sq_quadrature,
    make_bell_like,
    make_cat,
    make_coherent,
    make_fock,
    make_squeezed_vacuum,
    make_thermal,
    quadrature_purity,
    purity,
)
from nongauss.fock import displacement, embed_state
from nongauss.gaussian import reference_gaussian
from nongauss.moments import moments
from nongauss.phasespace import sample_char_function


class TestDisplacementMatrix:
    @pytest.mark.parametrize("alpha", [0.3, 1.2 - 0.7j, -0.4 + 0.9j])
    def test_matches_exponential_in_the_interior(self, alpha):
        from nongauss.fock import coherent_cutoff

        d = 45
        closed = displacement_matrix(alpha, d)
        via_expm = displacement(alpha, d).matrix
        # the truncated-generator exponential is only trustworthy one guard
        # width away from the cutoff boundary
        keep = d - coherent_cutoff(alpha)
        assert np.abs(closed[:keep, :keep] - via_expm[:keep, :keep]).max() < 1e-8

    def test_columns_near_unit_norm(self):
        m = displacement_matrix(0.8, 40)
        norms = np.linalg.norm(m[:, :20], axis=0)
        assert np.abs(norms - 1.0).max() < 1e-10


class TestCharFunction:
    def test_trace_at_origin(self):
        # chi(0) is the honest trace, deficient by at most the tail budget
        assert char_function(make_thermal(1.0), 0.0) == pytest.approx(1.0, abs=1e-8)

    def test_vacuum(self):
        val = char_function(make_fock(0, 10), 1.0)
        assert val == pytest.approx(math.exp(-0.5), abs=1e-12)

    def test_fock_one_zero_crossing(self):
        val = char_function(make_fock(1, 10), 1.0)
        assert abs(val) < 1e-12
        lam = 0.6
        expected = (1.0 - lam ** 2) * math.exp(-lam ** 2 / 2.0)
        assert char_function(make_fock(1, 10), lam) == pytest.approx(expected,
                                                                     abs=1e-12)

    def test_coherent_phase(self):
        alpha = 0.7 + 0.2j
        lam = 0.3 - 0.4j
        state = make_coherent(alpha)
        expected = np.exp(-abs(lam) ** 2 / 2.0) * np.exp(
            lam * np.conj(alpha) - np.conj(lam) * alpha)
        assert char_function(state, lam) == pytest.approx(expected, abs=1e-9)

    def test_conjugation_symmetry(self, rng):
        state = make_cat(0.5, -0.9)
        for _ in range(5):
            lam = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
            a = char_function(state, lam)
            b = char_function(state, -lam)
            assert a == pytest.approx(np.conj(b), abs=1e-10)

    def test_two_mode_product(self):
        from nongauss import tensor

        state = tensor(make_fock(1, 6), make_fock(0, 6))
        lam = (0.4 + 0.1j, -0.2j)
        expected = char_function(make_fock(1, 6), lam[0]) \
            * char_function(make_fock(0, 6), lam[1])
        assert char_function(state, lam) == pytest.approx(expected, abs=1e-10)

    def test_grid_invariants(self):
        grid = sample_char_function(make_thermal(0.8))
        assert abs(grid.values[grid.values.shape[0] // 2,
                               grid.values.shape[1] // 2] - 1.0) < 1e-8
        assert np.abs(grid.values).max() <= 1.0 + 1e-9


class TestGaussianChar:
    def test_vacuum_form(self):
        val = gaussian_char_function((np.zeros(2), 0.5 * np.eye(2)), 1.0)
        assert val == pytest.approx(math.exp(-0.5), abs=1e-12)

    @pytest.mark.parametrize("build", [
        lambda: make_thermal(1.0),
        lambda: make_squeezed_vacuum(0.4),
        lambda: make_coherent(0.6 - 0.3j),
    ])
    def test_matches_fock_route_on_grid(self, build, rng):
        state = build()
        spec, tau = reference_gaussian(state)
        for _ in range(12):
            lam = complex(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5))
            a = gaussian_char_function(spec, lam)
            b = char_function(tau, lam)
            assert a == pytest.approx(b, abs=1e-6)


class TestQuadrature:
    @pytest.mark.parametrize("build", [
        lambda: make_fock(1, 25),
        lambda: make_fock(2, 25),
        lambda: make_thermal(1.0),
        lambda: make_coherent(1.0),
        lambda: make_squeezed_vacuum(0.5),
    ])
    def test_purity_identity(self, build):
        state = build()
        assert quadrature_purity(state) == pytest.approx(purity(state), abs=1e-4)

    def test_distance_fock_one(self):
        val = hs_distance_sq_quadrature(make_fock(1, 25))
        assert val == pytest.approx(5.0 / 12.0, abs=1e-3)

    def test_distance_gaussian_input(self):
        val = hs_distance_sq_quadrature(make_squeezed_vacuum(0.3))
        assert val <= 1e-4

    def test_matches_algebraic_route(self):
        state = make_cat(0.5, -math.pi / 4)
        _, tau = reference_gaussian(state)
        algebraic = hs_distance_sq(embed_state(state, tau.cutoffs), tau)
        assert hs_distance_sq_quadrature(state) == pytest.approx(algebraic, abs=1e-3)

    def test_refining_the_grid_converges_at_second_order(self):
        state = make_fock(1, 25)
        _, tau = reference_gaussian(state)
        exact = hs_distance_sq(embed_state(state, tau.cutoffs), tau)
        errors = []
        for step in (2.0, 1.0, 0.5):
            val = hs_distance_sq_quadrature(state, step=step)
            errors.append(abs(val - exact))
        floor = 1e-10
        for coarse, fine in zip(errors, errors[1:]):
            assert fine <= coarse / 4.0 or fine < floor

    def test_boundary_coverage_error(self):
        with pytest.raises(GridCoverageError):
            hs_distance_sq_quadrature(make_fock(1, 25), reach=1.0)

    def test_two_mode_distance(self):
        state = make_bell_like("psi", math.pi / 4)
        val = hs_distance_sq_quadrature(state, reach=3.5, step=0.2)
        # algebraic value: (1 + 1/3 - 1/2)/2
        assert val == pytest.approx(5.0 / 12.0, abs=1e-3)
