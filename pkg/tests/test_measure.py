import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.special import hyp2f1

from conftest import random_physical_cov

from nongauss import (
    DomainError,
    IdentityChannel,
    IpsChannel,
    LossChannel,
    NumericIntegrityError,
    SearchBox,
    delta_fock,
    delta_fock_copies,
    delta_loss,
    delta_prime,
    delta_product,
    hs_distance_sq,
    loss_apply,
    make_cat,
    make_coherent,
    make_fock,
    make_squeezed_vacuum,
    make_thermal,
    map_non_gaussianity,
    non_gaussianity,
    optimal_copies,
    overlap_fock_displaced_thermal,
    overlap_loss_displaced_thermal,
    random_state,
    tensor,
)
from nongauss.fock import FockState, apply_unitary, displacement, embed_state, squeeze
from nongauss.gaussian import gaussian_state
from nongauss.measure import terminating_2f1
from nongauss.phasespace import displacement_matrix


class TestHsDistance:
    def test_identical_states(self):
        th = make_thermal(0.7)
        assert hs_distance_sq(th, th) == 0.0

    def test_orthogonal_pure_states(self):
        assert hs_distance_sq(make_fock(0, 5), make_fock(1, 5)) == pytest.approx(1.0)

    def test_fock_vs_thermal(self):
        f1 = make_fock(1, 80)
        assert hs_distance_sq(f1, make_thermal(1.0, 80)) == pytest.approx(
            5.0 / 12.0, abs=1e-9)


class TestNonGaussianity:
    @pytest.mark.parametrize("build", [
        lambda: make_coherent(0.7 + 0.3j),
        lambda: make_squeezed_vacuum(0.6),
        lambda: make_thermal(1.3),
    ])
    def test_gaussian_states_vanish(self, build):
        assert non_gaussianity(build()).delta <= 1e-6

    def test_random_gaussian_states_vanish(self, rng):
        # unitary-synthesized states with random moments stay at zero
        for _ in range(10):
            cov = random_physical_cov(1, rng, nu_max=1.5)
            mean = rng.uniform(-0.7, 0.7, size=2)
            _, state = gaussian_state(mean, cov)
            assert non_gaussianity(state).delta <= 1e-6

    def test_fock_one(self):
        res = non_gaussianity(make_fock(1))
        assert res.delta == pytest.approx(5.0 / 12.0, abs=1e-9)
        assert res.purity_rho == pytest.approx(1.0, abs=1e-12)
        assert res.purity_tau == pytest.approx(1.0 / 3.0, abs=1e-8)
        assert res.overlap == pytest.approx(0.25, abs=1e-8)

    @pytest.mark.parametrize("p", range(1, 6))
    def test_fock_matches_closed_form(self, p):
        res = non_gaussianity(make_fock(p, cutoff=4 * p + 20))
        assert res.delta == pytest.approx(delta_fock(p), abs=1e-6)

    def test_bell_psi_value(self):
        # cos|0,1> + sin|1,0> is a passive rotation of |1,0>, so its delta
        # equals the |1> value: kappa = <1|nu(1)|1><0|nu(0)|0> = 1/4 and
        # mu_tau = 1/3 exactly, giving (1 + 1/3 - 1/2)/2 = 5/12
        from nongauss import make_bell_like

        res = non_gaussianity(make_bell_like("psi", math.pi / 4))
        assert res.delta == pytest.approx(5.0 / 12.0, abs=1e-6)
        assert res.purity_tau == pytest.approx(1.0 / 3.0, abs=1e-6)
        assert res.overlap == pytest.approx(0.25, abs=1e-6)

    def test_bell_phi_value(self):
        from nongauss import make_bell_like

        res = non_gaussianity(make_bell_like("phi", math.pi / 4))
        assert res.delta == pytest.approx(25.0 / 96.0, abs=1e-6)

    def test_assembly_identity(self):
        res = non_gaussianity(make_fock(2))
        rebuilt = (res.purity_rho + res.purity_tau - 2 * res.overlap) \
            / (2 * res.purity_rho)
        assert res.delta == pytest.approx(rebuilt, abs=1e-9)

    def test_symplectic_invariance(self, rng):
        # delta is blind to displacement and squeezing of the state
        for seed in range(6):
            state = random_state(4, seed)
            base = non_gaussianity(state).delta
            alpha = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
            r = rng.uniform(0, 0.5)
            big = embed_state(state, (48,))
            moved = apply_unitary(big, displacement(alpha, 48))
            moved = apply_unitary(moved, squeeze(r, 48))
            assert non_gaussianity(moved).delta == pytest.approx(base, abs=1e-5)


class TestDeltaProduct:
    def test_gaussian_factor_drops(self):
        val = delta_product([make_fock(1), make_thermal(3.0)])
        assert val == pytest.approx(5.0 / 12.0, abs=1e-8)

    def test_two_fock_copies(self):
        val = delta_product([make_fock(1), make_fock(1)])
        assert val == pytest.approx(71.0 / 144.0, abs=1e-9)

    def test_matches_tensor_route(self):
        parts = [make_fock(1, 18), make_thermal(0.5, 18)]
        assembled = delta_product(parts)
        direct = non_gaussianity(tensor(*parts)).delta
        assert assembled == pytest.approx(direct, abs=1e-8)


class TestClosedForms:
    def test_fock_values(self):
        assert delta_fock(0) == 0.0
        assert delta_fock(1) == pytest.approx(5.0 / 12.0, rel=1e-14)
        assert delta_fock(10_000) == pytest.approx(0.5, abs=1e-3)

    def test_fock_monotone(self):
        vals = [delta_fock(p) for p in range(1, 40)]
        assert all(b > a for a, b in zip(vals, vals[1:]))
        assert all(v < 0.5 for v in vals)

    def test_copies_against_exact_arithmetic(self):
        # exact-rational oracle for the argmax over the copy count
        def exact(p, n):
            mu_t = Fraction(1, 2 * p + 1) ** n
            kap = (Fraction(1, p + 1) * Fraction(p, p + 1) ** p) ** n
            return Fraction(1, 2) * (1 + mu_t) - kap

        for p in (1, 5, 25, 26, 27, 60, 100):
            best = max(range(1, 11), key=lambda n: exact(p, n))
            assert optimal_copies(p, 10) == best

    def test_copies_value_matches_formula(self):
        assert delta_fock_copies(1, 2) == pytest.approx(71.0 / 144.0, rel=1e-14)
        assert delta_fock_copies(1, 1) == pytest.approx(delta_fock(1), rel=1e-14)

    def test_terminating_2f1_vs_scipy(self):
        for p in (1, 2, 5, 9):
            for x in (0.0, 0.3, 1.7):
                assert terminating_2f1(p, x) == pytest.approx(
                    float(hyp2f1(-p, -p, 1.0, x)), rel=1e-12)

    def test_loss_endpoints(self):
        for p in (1, 3, 6):
            assert delta_loss(p, 1.0) == pytest.approx(delta_fock(p), rel=1e-12)
            assert delta_loss(p, 0.0) == 0.0

    @pytest.mark.parametrize("p", [1, 2, 3, 4])
    def test_loss_matches_channel(self, p):
        for eta in (0.2, 0.5, 0.8):
            state = loss_apply(make_fock(p, cutoff=p + 6), eta)
            assert non_gaussianity(state).delta == pytest.approx(
                delta_loss(p, eta), abs=1e-6)

    def test_loss_domain(self):
        with pytest.raises(DomainError):
            delta_loss(2, 1.2)


class TestDeltaPrime:
    def test_fock_states(self):
        for p in (1, 2, 3):
            res = delta_prime(make_fock(p))
            assert res.delta == pytest.approx(delta_fock(p), abs=1e-6)
            assert abs(res.c_opt) < 1e-3

    def test_loss_state(self):
        state = loss_apply(make_fock(2, 30), 0.6)
        res = delta_prime(state)
        assert res.delta == pytest.approx(delta_loss(2, 0.6), abs=1e-6)
        assert abs(res.c_opt) < 1e-3

    def test_never_exceeds_constrained(self):
        for phi in (-1.2, -0.6, 0.3, 1.0):
            state = make_cat(0.5, phi)
            base = non_gaussianity(state).delta
            res = delta_prime(state)
            assert res.delta <= base + 1e-9

    def test_cat_gap_small(self):
        state = make_cat(0.5, -math.pi / 3)
        gap = non_gaussianity(state).delta - delta_prime(state).delta
        assert 0.0 <= gap < 0.05


class TestOverlapFormulas:
    def test_fock_at_zero(self):
        assert overlap_fock_displaced_thermal(1, 0.0) == pytest.approx(0.25, rel=1e-12)

    def test_fock_against_numeric(self):
        c = 0.7
        d = displacement(c, 90).matrix
        tau = FockState(d @ make_thermal(2.0, 90).matrix @ d.conj().T)
        from nongauss import overlap

        numeric = overlap(make_fock(2, 90), tau)
        assert overlap_fock_displaced_thermal(2, c) == pytest.approx(numeric, abs=1e-7)

    def test_fock_monotone_in_displacement(self):
        grid = np.linspace(0.0, 2.5, 11)
        for p in (1, 2, 4):
            vals = [overlap_fock_displaced_thermal(p, c) for c in grid]
            assert all(b < a for a, b in zip(vals, vals[1:]))

    def test_loss_at_zero_matches_constrained(self):
        for p, eta in ((1, 0.4), (3, 0.8)):
            direct = (1 + eta * (p - 1)) ** p / (1 + p * eta) ** (p + 1)
            assert overlap_loss_displaced_thermal(p, eta, 0.0) == pytest.approx(
                direct, rel=1e-12)

    def test_loss_against_numeric(self):
        p, eta, c = 2, 0.7, 0.9
        state = loss_apply(make_fock(p, 90), eta)
        d = displacement(c, 90).matrix
        tau = FockState(d @ make_thermal(p * eta, 90).matrix @ d.conj().T)
        from nongauss import overlap

        numeric = overlap(state, tau)
        assert overlap_loss_displaced_thermal(p, eta, c) == pytest.approx(
            numeric, abs=1e-7)


class TestMapMeasure:
    def test_identity_channel(self):
        box = SearchBox(alpha=(0.0, 0.5), r=(0.0, 0.5), n_t=(0.0, 0.3), grid=3)
        res = map_non_gaussianity(IdentityChannel(), box, refine_rounds=0)
        assert res.delta <= 1e-6
        assert res.lower_bound

    def test_loss_channel_gaussian(self):
        box = SearchBox(alpha=(0.0, 0.6), r=(0.0, 0.6), n_t=(0.0, 0.3), grid=3)
        res = map_non_gaussianity(LossChannel(0.5), box, refine_rounds=0)
        assert res.delta <= 1e-6

    def test_ips_channel_positive(self):
        box = SearchBox(alpha=(0.0, 0.0), r=(0.1, 1.0), n_t=(0.0, 0.0), grid=5)
        res = map_non_gaussianity(IpsChannel(0.9, 0.9), box, refine_rounds=1,
                                  refine_grid=3)
        assert res.delta > 0.1
        assert res.argmax[1] >= 0.1


class TestNegativeDeltaGuard:
    def test_large_negative_raises(self):
        from nongauss.measure import _clamp_delta

        assert _clamp_delta(-5e-10) == 0.0
        with pytest.raises(NumericIntegrityError):
            _clamp_delta(-1e-6)
