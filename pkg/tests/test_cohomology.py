"""Class arithmetic: paths, cones, degeneration times, mixed discriminants."""

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import krflow as kf
from krflow.cohomology import VANISHING_RTOL


def random_hermitian(rng, n, shift=0.0):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    a = 0.5 * (a + a.conj().T)
    return a + shift * np.eye(n)


def random_psd(rng, n):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return a @ a.conj().T


class TestClassPath:
    def test_starts_at_omega0(self):
        L, w0 = np.diag([1.0, 0.0]), np.eye(2)
        assert np.allclose(kf.class_path(L, w0, 0.0), w0)

    def test_constant_when_equal(self):
        L = np.array([[2.0, 1j], [-1j, 2.0]])
        for t in (0.0, 1.0, 7.5):
            assert np.allclose(kf.class_path(L, L, t), L)

    def test_diagonal_evaluation(self):
        got = kf.class_path(np.diag([1.0, 0.0]), np.eye(2), 1.0)
        assert np.allclose(got, np.diag([1.0, math.exp(-1)]))

    def test_rejects_negative_time(self):
        with pytest.raises(ValueError):
            kf.class_path(np.eye(2), np.eye(2), -0.1)

    @given(t=st.floats(0.0, 50.0))
    @settings(max_examples=30, deadline=None)
    def test_interpolates_between_omega0_and_L(self, t):
        L, w0 = np.diag([1.0, 0.0]), np.eye(2)
        got = kf.class_path(L, w0, t)
        s = math.exp(-t)
        assert np.allclose(got, L + s * (w0 - L))


class TestKahlerCheck:
    def test_identity(self):
        assert kf.kahler_check(np.eye(2))

    def test_boundary_class(self):
        assert not kf.kahler_check(np.diag([1.0, 0.0]))

    def test_hermitian_offdiagonal(self):
        assert kf.kahler_check(np.array([[2, 1j], [-1j, 2]]))

    def test_indefinite(self):
        assert not kf.kahler_check(np.diag([2.0, -1.0]))


class TestSingularityTime:
    def test_nef_boundary_path_never_degenerates(self):
        assert kf.singularity_time(np.diag([1.0, 0.0]), np.eye(2)) == math.inf

    def test_closed_form_log2(self):
        T = kf.singularity_time(np.diag([2.0, -1.0]), np.eye(2))
        assert abs(T - math.log(2)) < 1e-10

    def test_constant_kahler_path(self):
        assert kf.singularity_time(np.eye(2), np.eye(2)) == math.inf

    def test_rank_one_nef(self):
        L = np.array([[1.0, 1.0], [1.0, 1.0]])
        assert kf.singularity_time(L, np.eye(2)) == math.inf

    def test_non_kahler_initial_rejected(self):
        with pytest.raises(ValueError):
            kf.singularity_time(np.eye(2), np.diag([1.0, 0.0]))

    def test_another_closed_form(self):
        # path diag(3 - 2s, 3s - 1) degenerates at s = 1/3, T = log 3
        T = kf.singularity_time(np.diag([3.0, -1.0]), np.diag([1.0, 2.0]))
        assert abs(T - math.log(3)) < 1e-10


class TestMixedDiscriminant:
    def test_repeated_argument_is_determinant_exact(self):
        rng = np.random.default_rng(11)
        for n in (2, 3):
            for _ in range(100):
                a = random_hermitian(rng, n)
                assert kf.mixed_discriminant(*([a] * n)) == np.linalg.det(a).real

    def test_two_by_two_polarization(self):
        assert kf.mixed_discriminant(np.diag([1.0, 0.0]), np.eye(2)) == 0.5

    def test_identity_pair(self):
        assert kf.mixed_discriminant(np.eye(2), np.eye(2)) == 1.0

    def test_wrong_argument_count(self):
        with pytest.raises(ValueError):
            kf.mixed_discriminant(np.eye(2))
        with pytest.raises(ValueError):
            kf.mixed_discriminant(np.eye(2), np.eye(2), np.eye(2))

    @pytest.mark.parametrize("n", [2, 3])
    def test_permutation_symmetry_exact(self, n):
        rng = np.random.default_rng(23 + n)
        for _ in range(100):
            mats = [random_hermitian(rng, n) for _ in range(n)]
            base = kf.mixed_discriminant(*mats)
            for perm in itertools.permutations(range(n)):
                assert kf.mixed_discriminant(*[mats[i] for i in perm]) == base

    @pytest.mark.parametrize("n", [2, 3])
    def test_multilinearity(self, n):
        rng = np.random.default_rng(37 + n)
        for _ in range(100):
            mats = [random_hermitian(rng, n) for _ in range(n)]
            a, b = random_hermitian(rng, n), random_hermitian(rng, n)
            alpha, beta = rng.normal(size=2)
            lhs = kf.mixed_discriminant(alpha * a + beta * b, *mats[1:])
            rhs = (alpha * kf.mixed_discriminant(a, *mats[1:])
                   + beta * kf.mixed_discriminant(b, *mats[1:]))
            assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs), abs(rhs))

    @pytest.mark.parametrize("n", [2, 3])
    def test_nonnegative_on_psd(self, n):
        rng = np.random.default_rng(51 + n)
        for _ in range(50):
            mats = [random_psd(rng, n) for _ in range(n)]
            assert kf.mixed_discriminant(*mats) >= -1e-12

    @given(alpha=st.floats(-3.0, 3.0), beta=st.floats(-3.0, 3.0),
           seed=st.integers(0, 5000))
    @settings(max_examples=30, deadline=None)
    def test_linearity_property(self, alpha, beta, seed):
        rng = np.random.default_rng(seed)
        a, b, c = (random_hermitian(rng, 2) for _ in range(3))
        lhs = kf.mixed_discriminant(alpha * a + beta * b, c)
        rhs = alpha * kf.mixed_discriminant(a, c) + beta * kf.mixed_discriminant(b, c)
        assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs), abs(rhs))


class TestCollapseOrder:
    def test_kahler_L(self):
        assert kf.collapse_order(np.eye(2), np.eye(2)) == 0

    def test_zero_L(self):
        assert kf.collapse_order(np.zeros((2, 2)), np.eye(2)) == 2
        assert kf.collapse_order(np.zeros((3, 3)), np.eye(3)) == 3

    def test_rank_one_degeneration(self):
        assert kf.collapse_order(np.diag([1.0, 0.0]), np.eye(2)) == 1

    def test_rank_profiles_n3(self):
        assert kf.collapse_order(np.diag([1.0, 1.0, 0.0]), np.eye(3)) == 1
        assert kf.collapse_order(np.diag([1.0, 0.0, 0.0]), np.eye(3)) == 2

    def test_non_nef_rejected(self):
        with pytest.raises(ValueError):
            kf.collapse_order(np.diag([2.0, -1.0]), np.eye(2))

    def test_non_kahler_omega0_rejected(self):
        with pytest.raises(ValueError):
            kf.collapse_order(np.eye(2), np.diag([1.0, 0.0]))


class TestVolumePolynomial:
    def test_collapsing_diagonal(self):
        vp = kf.volume_polynomial(np.diag([1.0, 0.0]), np.eye(2))
        assert vp.coefficients == (0.0, 1.0, 0.0)

    def test_kahler_pair(self):
        vp = kf.volume_polynomial(np.eye(2), 2 * np.eye(2))
        # det((1+s) I) = (1+s)^2
        assert np.allclose(vp.coefficients, (1.0, 2.0, 1.0))

    def test_zero_L(self):
        vp = kf.volume_polynomial(np.zeros((2, 2)), np.eye(2))
        assert np.allclose(vp.coefficients, (0.0, 0.0, 1.0))

    def test_endpoint_values(self):
        rng = np.random.default_rng(5)
        for n in (2, 3):
            L = random_psd(rng, n)
            w0 = random_psd(rng, n) + np.eye(n)
            vp = kf.volume_polynomial(L, w0)
            assert abs(vp(1.0) - np.linalg.det(w0).real) < 1e-10
            assert abs(vp(0.0) - np.linalg.det(L).real) < 1e-12

    @pytest.mark.parametrize("n", [2, 3])
    def test_coefficients_match_mixed_discriminants(self, n):
        rng = np.random.default_rng(71 + n)
        for _ in range(25):
            L = random_hermitian(rng, n, shift=3.0)
            w0 = random_hermitian(rng, n, shift=3.0)
            M = w0 - L
            vp = kf.volume_polynomial(L, w0)
            for j, c in enumerate(vp.coefficients):
                d = kf.mixed_discriminant(*([L] * (n - j) + [M] * j))
                assert abs(c - math.comb(n, j) * d) < 1e-10 * max(1.0, abs(c))

    def test_matches_direct_determinant(self):
        rng = np.random.default_rng(9)
        L = random_psd(rng, 3)
        w0 = random_psd(rng, 3) + np.eye(3)
        vp = kf.volume_polynomial(L, w0)
        for s in (0.1, 0.35, 0.8):
            direct = np.linalg.det(L + s * (w0 - L)).real
            assert abs(vp(s) - direct) < 1e-10 * max(1.0, abs(direct))

    def test_collapse_order_is_first_nonzero_coefficient(self):
        cases = [
            (np.eye(2), np.eye(2)),
            (np.diag([1.0, 0.0]), np.eye(2)),
            (np.zeros((2, 2)), np.eye(2)),
            (np.diag([1.0, 1.0, 0.0]), np.eye(3)),
            (np.diag([1.0, 0.0, 0.0]), np.eye(3)),
            (np.array([[1.0, 1.0], [1.0, 1.0]]), np.eye(2)),
        ]
        for L, w0 in cases:
            vp = kf.volume_polynomial(L, w0)
            assert kf.collapse_order(L, w0) == vp.degree_of_first_nonzero

    def test_leading_small_s_behaviour(self):
        vp = kf.volume_polynomial(np.diag([1.0, 0.0]), np.eye(2))
        k = vp.degree_of_first_nonzero
        for s in (1e-3, 1e-5):
            assert abs(vp(s) / s**k - 1.0) < 1e-2


class TestCohomologyClass:
    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError):
            kf.CohomologyClass(np.array([[1.0, 1.0], [0.0, 1.0]]))

    def test_cone_membership(self):
        assert kf.CohomologyClass(np.eye(2)).is_kahler()
        boundary = kf.CohomologyClass(np.diag([1.0, 0.0]))
        assert not boundary.is_kahler()
        assert boundary.is_nef()
        assert not kf.CohomologyClass(np.diag([1.0, -0.5])).is_nef()

    def test_volume(self):
        assert kf.CohomologyClass(2 * np.eye(2)).volume() == pytest.approx(4.0)

    def test_vanishing_threshold_is_structural(self):
        # an eigenvalue below the relative threshold counts as boundary
        eps = VANISHING_RTOL / 10
        assert not kf.CohomologyClass(np.diag([1.0, -eps])).is_kahler()
