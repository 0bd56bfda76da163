import numpy as np
import pytest

from kinlab.gas import GasState, char_speed, entropy, pressure
from kinlab.riemann import (
    ConfigurationMismatch,
    InadmissibleShock,
    WavePattern,
    contact_connect,
    euler_solution,
    euler_solution_arrays,
    isentrope_u1,
    rarefaction_connect,
    rh_residuals,
    shock_connect,
    solve_riemann,
)

RIGHT_UNIT = GasState(v=1.0, u1=0.0, theta=1.0)


def oracle_riemann(left, right, iters=200):
    """Independent nested-bisection oracle on the contact pressure."""
    p_minus, p_plus = left.p, right.p

    def branches(pc):
        th_star = left.theta * (pc / p_minus) ** 0.4
        v_star = 2.0 * th_star / (3.0 * pc)
        u_star = float(isentrope_u1(left, v_star))
        v_upper = right.v * (pc + 4.0 * p_plus) / (4.0 * pc + p_plus)
        s3 = np.sqrt((pc - p_plus) / (right.v - v_upper))
        u_upper = right.u1 + s3 * (right.v - v_upper)
        return u_star - u_upper, v_star, v_upper

    a, b = p_plus * (1 + 1e-15), p_minus
    fa = branches(a)[0]
    for _ in range(iters):
        m = 0.5 * (a + b)
        fm = branches(m)[0]
        if fa * fm <= 0:
            b = m
        else:
            a, fa = m, fm
    pc = 0.5 * (a + b)
    _, v_star, v_upper = branches(pc)
    return pc, v_star, v_upper


def random_admissible_problems(n, seed, max_strength=0.5):
    """Random R1-CD-S3 data built by walking backward along the wave curves."""
    rng = np.random.RandomState(seed)
    made = 0
    while made < n:
        right = GasState(
            v=rng.uniform(0.5, 2.0), u1=rng.uniform(-0.5, 0.5), theta=rng.uniform(0.5, 2.0)
        )
        try:
            mid_upper, _ = shock_connect(right, right.v * (1.0 - rng.uniform(0.0, 0.12)))
            mid_star = contact_connect(mid_upper, mid_upper.v * np.exp(rng.uniform(-0.15, 0.15)))
            left = rarefaction_connect(mid_star, mid_star.v * (1.0 - rng.uniform(0.0, 0.12)))
        except (InadmissibleShock, ValueError):
            continue
        delta = np.linalg.norm(
            [right.v - left.v, right.u1 - left.u1, right.theta - left.theta]
        )
        if delta > max_strength:
            continue
        made += 1
        yield left, right


class TestRarefactionConnect:
    def test_boundary_identity(self):
        st = rarefaction_connect(RIGHT_UNIT, 1.0)
        assert st == RIGHT_UNIT

    def test_frozen_example(self):
        # oracle: adaptive quadrature of the lambda_1 integral, cross-checked
        # against the closed form sqrt(10)*(v^(-1/3) - 1); both agree to 5e-17
        st = rarefaction_connect(RIGHT_UNIT, 0.9)
        assert st.theta == pytest.approx(1.0727659828951441, rel=1e-12)
        assert st.u1 == pytest.approx(-0.11303298600725353, rel=1e-12)

    def test_entropy_conserved(self):
        rng = np.random.RandomState(8)
        for _ in range(50):
            right = GasState(v=rng.uniform(0.5, 3.0), u1=rng.uniform(-1, 1),
                             theta=rng.uniform(0.5, 3.0))
            st = rarefaction_connect(right, right.v * rng.uniform(0.5, 1.0))
            assert entropy(st.v, st.theta) == pytest.approx(right.s, abs=1e-12)

    def test_rejects_expansion_side(self):
        with pytest.raises(ValueError):
            rarefaction_connect(RIGHT_UNIT, 1.1)


class TestShockConnect:
    def test_frozen_example(self):
        # oracle: Hugoniot closed form + substitution into all three RH relations
        st, s3 = shock_connect(RIGHT_UNIT, 0.8)
        assert st.theta == pytest.approx(1.1636363636363636, rel=1e-12)
        assert st.p == pytest.approx(0.9696969696969697, rel=1e-12)
        assert s3 == pytest.approx(1.2309149097933272, rel=1e-12)
        assert st.u1 == pytest.approx(0.24618298195866545, rel=1e-12)
        assert np.max(np.abs(rh_residuals(st, RIGHT_UNIT, s3))) < 1e-10

    def test_zero_strength_limit(self):
        st, s3 = shock_connect(RIGHT_UNIT, 1.0)
        assert st == RIGHT_UNIT
        assert s3 == pytest.approx(char_speed(RIGHT_UNIT, 3), rel=1e-14)

    def test_lax_condition_strict(self):
        st, s3 = shock_connect(RIGHT_UNIT, 0.8)
        assert char_speed(RIGHT_UNIT, 3) < s3 < char_speed(st, 3)

    def test_rejects_expansion(self):
        with pytest.raises(InadmissibleShock):
            shock_connect(RIGHT_UNIT, 1.2)


class TestContactConnect:
    def test_degenerate(self):
        assert contact_connect(RIGHT_UNIT, 1.0) == RIGHT_UNIT

    def test_frozen_example(self):
        st = contact_connect(RIGHT_UNIT, 2.0)
        assert st.theta == pytest.approx(2.0, rel=1e-14)

    def test_defining_property(self):
        rng = np.random.RandomState(9)
        for _ in range(50):
            base = GasState(v=rng.uniform(0.3, 3.0), u1=rng.uniform(-1, 1),
                            theta=rng.uniform(0.3, 3.0))
            v = rng.uniform(0.3, 3.0)
            st = contact_connect(base, v)
            assert pressure(st.v, st.theta) == pytest.approx(base.p, rel=1e-14)
            assert st.u1 == base.u1


class TestSolveRiemann:
    def test_equal_states(self):
        pat = solve_riemann(RIGHT_UNIT, RIGHT_UNIT)
        assert pat.strengths == (0.0, 0.0, 0.0)
        assert pat.mid_star == RIGHT_UNIT
        assert pat.mid_upper == RIGHT_UNIT

    def test_frozen_example_against_oracle(self):
        left = GasState(v=1.0, u1=0.0, theta=1.0)
        right = GasState(v=2.0, u1=0.0, theta=1.0 / 3.0)
        pat = solve_riemann(left, right)
        pc, v_star, v_upper = oracle_riemann(left, right)
        assert pat.mid_star.v == pytest.approx(v_star, rel=1e-10)
        assert pat.mid_upper.v == pytest.approx(v_upper, rel=1e-10)
        assert pat.p_contact == pytest.approx(pc, rel=1e-10)
        # residual battery
        assert np.max(np.abs(rh_residuals(pat.mid_upper, right, pat.s3))) < 1e-9
        assert abs(pat.mid_star.u1 - pat.mid_upper.u1) < 1e-9
        assert abs(pat.mid_star.p - pat.mid_upper.p) < 1e-9
        assert entropy(pat.mid_star.v, pat.mid_star.theta) == pytest.approx(left.s, abs=1e-10)

    def test_pure_contact_data(self):
        left = GasState(v=1.0, u1=0.2, theta=1.0)
        right = contact_connect(left, 1.7)
        pat = solve_riemann(left, right)
        assert pat.strengths[0] == pytest.approx(0.0, abs=1e-7)
        assert pat.strengths[2] == pytest.approx(0.0, abs=1e-7)
        assert pat.strengths[1] == pytest.approx(abs(right.theta - left.theta), abs=1e-7)

    def test_random_admissible_battery(self):
        for left, right in random_admissible_problems(200, seed=10):
            pat = solve_riemann(left, right)
            assert np.max(np.abs(rh_residuals(pat.mid_upper, pat.right, pat.s3))) < 1e-9
            assert abs(pat.mid_star.u1 - pat.mid_upper.u1) + abs(
                pat.mid_star.p - pat.mid_upper.p
            ) < 1e-9
            assert char_speed(pat.right, 3) < pat.s3 < char_speed(pat.mid_upper, 3)

    def test_entropy_increases_across_shock(self):
        # material points pass from the pre-shock (right) to the post-shock
        # (mid_upper) side, so the post-shock entropy is the larger one
        for left, right in random_admissible_problems(200, seed=11):
            pat = solve_riemann(left, right)
            if pat.strengths[2] > 1e-8:
                assert entropy(pat.mid_upper.v, pat.mid_upper.theta) > entropy(
                    pat.right.v, pat.right.theta
                )

    def test_zero_strength_linear_scaling(self):
        base = GasState(v=1.0, u1=0.0, theta=1.0)
        norms = []
        for eps in (1e-2, 5e-3, 2.5e-3):
            right = GasState(v=1.0 + eps, u1=0.0, theta=1.0 - eps)
            pat = solve_riemann(base, right)
            norms.append(sum(pat.strengths))
        # halving the data perturbation halves the strengths (linear regime)
        assert norms[0] / norms[1] == pytest.approx(2.0, rel=0.05)
        assert norms[1] / norms[2] == pytest.approx(2.0, rel=0.05)

    def test_configuration_mismatch(self):
        # reversed pressures require a 1-shock: refuse
        left = GasState(v=2.0, u1=0.0, theta=1.0 / 3.0)
        right = GasState(v=1.0, u1=0.0, theta=1.0)
        with pytest.raises(ConfigurationMismatch):
            solve_riemann(left, right)

    def test_roundtrip_dict(self):
        left = GasState(v=1.0, u1=0.0, theta=1.0)
        right = GasState(v=2.0, u1=0.0, theta=1.0 / 3.0)
        pat = solve_riemann(left, right)
        again = WavePattern.from_dict(pat.to_dict())
        assert again == pat


class TestEulerSolution:
    @pytest.fixture(scope="class")
    def pattern(self):
        return solve_riemann(
            GasState(v=1.0, u1=0.0, theta=1.0), GasState(v=2.0, u1=0.0, theta=1.0 / 3.0)
        )

    def test_far_left(self, pattern):
        assert euler_solution(pattern, 1.0, -100.0) == pattern.left

    def test_shock_jump(self, pattern):
        t = 1.0
        eps = 1e-12
        assert euler_solution(pattern, t, (pattern.s3 - eps) * t) == pattern.mid_upper
        assert euler_solution(pattern, t, (pattern.s3 + eps) * t) == pattern.right

    def test_fan_edge_continuity(self, pattern):
        t = 2.0
        st = euler_solution(pattern, t, pattern.fan_right * t)
        assert st.v == pytest.approx(pattern.mid_star.v, rel=1e-10)
        assert st.u1 == pytest.approx(pattern.mid_star.u1, abs=1e-10)

    def test_self_similarity(self, pattern):
        rng = np.random.RandomState(12)
        for _ in range(50):
            t = rng.uniform(0.1, 3.0)
            x = rng.uniform(-3.0, 3.0)
            a = euler_solution(pattern, t, x)
            b = euler_solution(pattern, 2 * t, 2 * x)
            assert a == b

    def test_vectorized_matches_scalar(self, pattern):
        t = 0.7
        xs = np.linspace(-2.5, 2.5, 201)
        v, u1, th = euler_solution_arrays(pattern, t, xs)
        for i in (0, 17, 50, 100, 133, 200):
            st = euler_solution(pattern, t, xs[i])
            assert v[i] == pytest.approx(st.v, rel=1e-14)
            assert u1[i] == pytest.approx(st.u1, abs=1e-14)
            assert th[i] == pytest.approx(st.theta, rel=1e-14)
