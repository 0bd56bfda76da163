import numpy as np
import pytest

from kinlab.gas import (
    GasState,
    GasDomainError,
    char_speed,
    entropy,
    flux_jacobian_3x3,
    flux_jacobian_5x5,
    flux_jacobian_eigensystem,
    pressure,
)


def random_states(n, seed=0):
    rng = np.random.RandomState(seed)
    for _ in range(n):
        v = rng.uniform(0.1, 10.0)
        theta = rng.uniform(0.1, 10.0)
        u = rng.uniform(-5.0, 5.0, size=3)
        u = u * min(1.0, 5.0 / np.linalg.norm(u))
        yield GasState(v=v, u1=u[0], u2=u[1], u3=u[2], theta=theta)


class TestPressure:
    def test_reference_point(self):
        assert pressure(1.0, 1.0) == pytest.approx(2.0 / 3.0, rel=1e-15)

    def test_arithmetic(self):
        assert pressure(1.0, 1.5) == pytest.approx(1.0, rel=1e-15)

    def test_homogeneity_in_inverse_v(self):
        assert pressure(2.0, 1.0) == pytest.approx(1.0 / 3.0, rel=1e-15)

    def test_domain_error(self):
        with pytest.raises(GasDomainError):
            pressure(-1.0, 1.0)
        with pytest.raises(GasDomainError):
            pressure(1.0, 0.0)


class TestEntropy:
    def test_normalization(self):
        assert entropy(1.0, 1.0) == 0.0

    def test_isentrope_membership(self):
        # equal theta * v^(2/3) means equal entropy
        rng = np.random.RandomState(1)
        for _ in range(20):
            v1, v2 = rng.uniform(0.2, 5.0, size=2)
            c = rng.uniform(0.2, 5.0)
            th1, th2 = c * v1 ** (-2.0 / 3.0), c * v2 ** (-2.0 / 3.0)
            assert entropy(v1, th1) == pytest.approx(entropy(v2, th2), abs=1e-12)

    def test_explicit_value(self):
        # ln(1/4) + (2/3) ln 8 = -2 ln 2 + 2 ln 2 = 0
        assert entropy(8.0, 0.25) == pytest.approx(0.0, abs=1e-14)

    def test_domain_error(self):
        with pytest.raises(GasDomainError):
            entropy(0.0, 1.0)


class TestCharSpeed:
    def test_lagrangian_value(self):
        st = GasState(v=1.0, u1=0.0, theta=1.0)
        assert char_speed(st, 3, "lagrangian") == pytest.approx(1.0540925533894598, rel=1e-12)

    def test_lagrangian_symmetry(self):
        for st in random_states(50, seed=2):
            assert char_speed(st, 1) == pytest.approx(-char_speed(st, 3), rel=1e-15)

    def test_eulerian(self):
        st = GasState(v=1.0, u1=0.5, theta=1.0)
        assert char_speed(st, 3, "eulerian") == pytest.approx(0.5 + np.sqrt(10.0) / 3.0, rel=1e-14)

    def test_algebraic_identity(self):
        # 9 * lambda^2 * v^2 = 10 * theta exactly
        for st in random_states(100, seed=3):
            lam = char_speed(st, 3, "lagrangian")
            assert 9.0 * lam**2 * st.v**2 == pytest.approx(10.0 * st.theta, rel=1e-12)


class TestEigensystem:
    @pytest.mark.parametrize("system", ["three_by_three", "five_by_five"])
    def test_defining_identities(self, system):
        jac = flux_jacobian_3x3 if system == "three_by_three" else flux_jacobian_5x5
        for st in random_states(1000, seed=4):
            es = flux_jacobian_eigensystem(st, system)
            A = jac(st)
            np.testing.assert_allclose(es.left @ A @ es.right, np.diag(es.lambdas), atol=1e-10)
            np.testing.assert_allclose(es.left @ es.right, np.eye(len(es.lambdas)), atol=1e-10)

    def test_eigenvalues_match_char_speeds(self):
        for st in random_states(50, seed=5):
            es = flux_jacobian_eigensystem(st, "three_by_three")
            assert es.lambdas[0] == pytest.approx(char_speed(st, 1), rel=1e-14)
            assert es.lambdas[1] == 0.0
            assert es.lambdas[2] == pytest.approx(char_speed(st, 3), rel=1e-14)

    def test_eigenvalues_sorted_with_exact_zero(self):
        for st in random_states(20, seed=6):
            es = flux_jacobian_eigensystem(st, "five_by_five")
            assert np.all(np.diff(es.lambdas) >= 0.0)
            assert np.count_nonzero(es.lambdas == 0.0) == 3

    def test_pinned_left_family_at_reference_state(self):
        es = flux_jacobian_eigensystem(GasState(v=1.0, u1=0.0, theta=1.0), "five_by_five")
        np.testing.assert_allclose(es.left[1], [2.0 / 3.0, 0.0, 0.0, 0.0, 1.0], atol=1e-12)
        np.testing.assert_allclose(es.left[2], [0.0, 0.0, 1.0, 0.0, 0.0], atol=1e-12)
        np.testing.assert_allclose(es.left[3], [0.0, 0.0, 0.0, 1.0, 0.0], atol=1e-12)

    def test_pinned_left_family_generic_state(self):
        st = GasState(v=0.7, u1=0.4, u2=-0.2, u3=0.1, theta=2.3)
        es = flux_jacobian_eigensystem(st, "five_by_five")
        np.testing.assert_allclose(es.left[1], [st.p, -st.u1, 0.0, 0.0, 1.0], atol=1e-10)

    def test_deterministic_sign_convention(self):
        for st in random_states(20, seed=7):
            es1 = flux_jacobian_eigensystem(st, "three_by_three")
            es2 = flux_jacobian_eigensystem(st, "three_by_three")
            np.testing.assert_array_equal(es1.right, es2.right)
            for j in range(3):
                col = es1.right[:, j]
                first = col[np.nonzero(col)[0][0]]
                assert first > 0.0
