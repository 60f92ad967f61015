import numpy as np
import pytest

from gocre.families import identity_gaussian, logit_bernoulli
from gocre.firth import (
    CLOSED_FORM_DELTA,
    FULL_DELTA,
    closed_form_leverages,
    corrected_working_response,
    hat_leverages,
)

from oracles import pinv_leverages


def centered(X, w):
    return X - (w @ X) / w.sum()


class TestHatLeverages:
    def test_matches_explicit_pseudoinverse_on_random_fixture(self):
        gen = np.random.default_rng(5)
        X = gen.standard_normal((5, 3))
        w = gen.uniform(0.5, 2.0, 5)
        spec = hat_leverages(X, w)
        assert spec.mode == FULL_DELTA
        assert np.allclose(spec.leverages, pinv_leverages(X, w), atol=1e-10)

    def test_full_rank_square_matrix_gives_unit_leverages(self):
        gen = np.random.default_rng(6)
        X = gen.standard_normal((4, 4))
        spec = hat_leverages(X, np.ones(4))
        assert np.allclose(spec.leverages, 1.0, atol=1e-10)

    def test_trace_equals_rank(self):
        gen = np.random.default_rng(7)
        for n, p in [(6, 3), (4, 10), (5, 5)]:
            X = gen.standard_normal((n, p))
            w = gen.uniform(0.2, 3.0, n)
            rank = np.linalg.matrix_rank(np.sqrt(w)[:, None] * X)
            assert abs(hat_leverages(X, w).leverages.sum() - rank) < 1e-8

    def test_all_zero_matrix_gives_zero_leverages(self):
        spec = hat_leverages(np.zeros((4, 6)), np.ones(4))
        assert np.array_equal(spec.leverages, np.zeros(4))

    def test_wide_centered_matrix_agrees_with_closed_form(self):
        # weighted-centered wide X has rank n-1, where the closed form is exact
        gen = np.random.default_rng(8)
        for trial in range(20):
            n = int(gen.integers(4, 12))
            p = n + int(gen.integers(1, 30))
            w = gen.uniform(0.3, 2.5, n)
            X = centered(gen.standard_normal((n, p)), w)
            full = hat_leverages(X, w).leverages
            closed = closed_form_leverages(w).leverages
            assert np.allclose(full, closed, atol=1e-8), f"trial {trial}"


class TestClosedFormLeverages:
    def test_hand_computed_values(self):
        spec = closed_form_leverages(np.array([1.0, 2.0, 3.0, 4.0]))
        assert spec.mode == CLOSED_FORM_DELTA
        assert abs(spec.leverages[0] - 0.9) < 1e-15
        assert np.allclose(spec.leverages, [0.9, 0.8, 0.7, 0.6])

    def test_equal_weights(self):
        assert np.allclose(closed_form_leverages(np.ones(4)).leverages, 0.75)

    def test_sums_to_n_minus_one(self):
        gen = np.random.default_rng(9)
        for _ in range(10):
            w = gen.uniform(0.1, 5.0, int(gen.integers(2, 40)))
            assert abs(closed_form_leverages(w).leverages.sum() - (len(w) - 1)) < 1e-9

    def test_single_observation_rejected(self):
        with pytest.raises(ValueError):
            closed_form_leverages(np.array([2.0]))


class TestCorrectedWorkingResponse:
    def test_zero_leverage_reduces_to_plain_working_response_bitwise(self):
        fam = logit_bernoulli()
        gen = np.random.default_rng(10)
        y = (gen.random(25) < 0.5).astype(float)
        eta = gen.standard_normal(25) * 2
        plain = fam.working_response(y, eta)
        corrected = corrected_working_response(fam, y, eta, np.zeros(25))
        assert np.array_equal(plain, corrected)

    def test_hand_value_logit_full_leverage(self):
        # y=1, eta=0, zeta=1: (1 + 0.5 - 2*0.5) / (2*0.25) = 1
        fam = logit_bernoulli()
        z1 = corrected_working_response(fam, np.array([1.0]), np.zeros(1), np.ones(1))
        z0 = corrected_working_response(fam, np.array([0.0]), np.zeros(1), np.ones(1))
        assert abs(z1[0] - 1.0) < 1e-12
        assert abs(z0[0] + 1.0) < 1e-12

    def test_correction_shrinks_at_eta_zero(self):
        fam = logit_bernoulli()
        for y in (0.0, 1.0):
            for zeta in (0.25, 0.5, 0.9, 1.0):
                plain = fam.working_response(np.array([y]), np.zeros(1))[0]
                corr = corrected_working_response(
                    fam, np.array([y]), np.zeros(1), np.array([zeta]))[0]
                assert abs(corr) <= abs(plain)

    def test_identity_family_correction(self):
        fam = identity_gaussian()
        y = np.array([2.0])
        eta = np.array([1.0])
        z = corrected_working_response(fam, y, eta, np.array([0.5]))
        # 1 + (2 + 0.25 - 1.5*1) / 1.5
        assert abs(z[0] - (1.0 + 0.75 / 1.5)) < 1e-12

    def test_length_mismatch_rejected(self):
        fam = logit_bernoulli()
        with pytest.raises(ValueError):
            corrected_working_response(fam, np.zeros(3), np.zeros(3), np.zeros(2))


def test_leverage_range_validation():
    with pytest.raises(ValueError):
        from gocre.firth import LeverageSpec
        LeverageSpec(np.array([0.5, 1.5]), CLOSED_FORM_DELTA)
