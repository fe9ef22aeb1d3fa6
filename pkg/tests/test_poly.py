import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flipzeros import poly as pc
from flipzeros.poly import (
    DomainError,
    ExpPolynomialView,
    H_function,
    Polynomial,
    bar_transform,
    central_index,
    evaluate,
    exp_eval,
    h_function,
    reverse,
    s_majorant,
)

coeff_lists = st.lists(st.complex_numbers(max_magnitude=10.0, allow_nan=False, allow_infinity=False), min_size=1, max_size=20).filter(
    lambda c: abs(c[-1]) > 1e-3
)


def random_poly(rng, n, complex_coeffs=True):
    c = rng.uniform(-1, 1, n + 1)
    if complex_coeffs:
        c = c + 1j * rng.uniform(-1, 1, n + 1)
    c[-1] = c[-1] if c[-1] != 0 else 1.0
    return Polynomial(c)


class TestConstruction:
    def test_rejects_zero_top(self):
        with pytest.raises(DomainError):
            Polynomial([1.0, 0.0])

    def test_rejects_empty_and_nonfinite(self):
        with pytest.raises(DomainError):
            Polynomial([])
        with pytest.raises(DomainError):
            Polynomial([1.0, math.nan])
        with pytest.raises(DomainError):
            Polynomial([math.inf, 1.0])

    def test_nondegenerate_flag(self):
        Polynomial([0.0, 1.0])
        with pytest.raises(DomainError):
            Polynomial([0.0, 1.0], nondegenerate=True)

    def test_immutable(self):
        P = Polynomial([1.0, 2.0])
        with pytest.raises(ValueError):
            P.coeffs[0] = 5

    def test_from_roots(self):
        P = Polynomial.from_roots([2, -3])
        assert np.allclose(P.coeffs, [-6, 1, 1])


class TestEvaluate:
    def test_hand_values(self):
        assert evaluate(Polynomial([1, 1, 1]), 1) == 3
        assert evaluate(Polynomial([1, 2]), 0) == 1
        assert evaluate(Polynomial([-6, 1, 1]), 2) == 0

    def test_array_input(self):
        out = evaluate(Polynomial([-6, 1, 1]), np.array([2.0, -3.0, 0.0]))
        assert np.allclose(out, [0, 0, -6])

    def test_horner_matches_power_sum(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            n = int(rng.integers(0, 65))
            P = random_poly(rng, n)
            z = complex(*rng.uniform(-1.2, 1.2, 2))
            naive = sum(c * z**k for k, c in enumerate(P.coeffs))
            scale = sum(abs(c) * abs(z) ** k for k, c in enumerate(P.coeffs))
            assert abs(evaluate(P, z) - naive) <= 1e-10 * scale


class TestMajorant:
    def test_hand_values(self):
        assert s_majorant(Polynomial([1, 2, 3]), 2) == 17
        assert s_majorant(Polynomial([1, 1]), 1) == 2

    @pytest.mark.parametrize("r", [0.0, -1.0])
    def test_rejects_nonpositive_radius(self, r):
        with pytest.raises(DomainError):
            s_majorant(Polynomial([1, 1]), r)

    @settings(max_examples=60, deadline=None)
    @given(coeff_lists, st.floats(1e-2, 1e2))
    def test_dominates_circle_values(self, coeffs, r):
        P = Polynomial(coeffs)
        theta = np.linspace(0, 2 * np.pi, 257)
        vals = np.abs(evaluate(P, r * np.exp(1j * theta)))
        assert vals.max() <= s_majorant(P, r) * (1 + 1e-12)


class TestLogMaximum:
    def test_hand_values(self):
        assert h_function(Polynomial([1, 2]), 0) == pytest.approx(math.log(2))
        assert h_function(Polynomial([1, 1, 1]), 1) == 0.0

    def test_zero_coefficients_skipped(self):
        P = Polynomial([0, 0, 3])
        assert h_function(P, 0.1) == pytest.approx(math.log(3) - 2 * math.pi * 2 * 0.1)
        assert central_index(P, 5.0) == 2

    def test_central_index_hand_values(self):
        assert central_index(Polynomial([1, 2]), 0) == 1
        assert central_index(Polynomial([1, 2]), 1) == 0
        assert central_index(Polynomial([1, 1, 1]), 0) == 2

    @settings(max_examples=80, deadline=None)
    @given(coeff_lists, st.floats(-2, 2))
    def test_sandwich(self, coeffs, t):
        P = Polynomial(coeffs)
        H = H_function(P, t)
        S = s_majorant(P, pc.t_to_radius(t))
        assert H <= S * (1 + 1e-12)
        assert S <= (P.degree + 1) * H * (1 + 1e-12)

    def test_central_index_non_increasing(self):
        rng = np.random.default_rng(1)
        ts = np.linspace(-1, 1, 401)
        for _ in range(50):
            P = random_poly(rng, int(rng.integers(1, 30)))
            idx = [central_index(P, t) for t in ts]
            assert all(a >= b for a, b in zip(idx, idx[1:]))

    def test_convex_with_central_slope(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            P = random_poly(rng, int(rng.integers(1, 20)))
            t1, t2, t3 = np.sort(rng.uniform(-1, 1, 3))
            lam = (t3 - t2) / (t3 - t1)
            chord = lam * h_function(P, t1) + (1 - lam) * h_function(P, t3)
            assert h_function(P, t2) <= chord + 1e-9
            t = float(rng.uniform(-1, 1))
            d = 1e-7
            slope = (h_function(P, t + d) - h_function(P, t - d)) / (2 * d)
            if central_index(P, t + d) == central_index(P, t - d):
                assert slope == pytest.approx(-2 * math.pi * central_index(P, t), abs=1e-5)


class TestTransforms:
    def test_reverse(self):
        assert np.array_equal(reverse(Polynomial([1, 2])).coeffs, [2, 1])
        P = Polynomial([-6, 1, 1])
        assert reverse(reverse(P)) == P
        R = reverse(P)
        assert abs(evaluate(R, 0.5)) < 1e-12
        assert abs(evaluate(R, -1 / 3)) < 1e-12

    def test_reverse_drops_leading_zeros(self):
        assert reverse(Polynomial([0, 0, 1, 2])).degree == 1

    def test_bar(self):
        assert np.array_equal(bar_transform(Polynomial([1, 1])).coeffs, [1, 0, -1])
        assert np.array_equal(bar_transform(Polynomial([1])).coeffs, [1, -1])

    @settings(max_examples=60, deadline=None)
    @given(coeff_lists, st.complex_numbers(max_magnitude=2.0, allow_nan=False, allow_infinity=False))
    def test_bar_identity(self, coeffs, z):
        P = Polynomial(coeffs)
        lhs = evaluate(bar_transform(P), z)
        rhs = (1 - z) * evaluate(P, z)
        scale = 3 * s_majorant(P, max(abs(z), 1e-3)) + 1
        assert abs(lhs - rhs) <= 1e-12 * scale

    @settings(max_examples=60, deadline=None)
    @given(coeff_lists, st.floats(1e-3, 1e3))
    def test_bar_majorant_inequality(self, coeffs, r):
        P = Polynomial(coeffs)
        lhs = s_majorant(bar_transform(P), r)
        assert lhs >= (1 + r) / (2 * (P.degree + 1)) * s_majorant(P, r) * (1 - 1e-12)


class TestExpView:
    def test_hand_values(self):
        Q = ExpPolynomialView(Polynomial([1, 1]))
        assert exp_eval(Q, 0) == pytest.approx(2)
        assert abs(exp_eval(Q, 0.5j)) < 1e-15
        assert Q(0) == exp_eval(Q, 0)

    def test_matches_base(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            P = random_poly(rng, int(rng.integers(0, 20)))
            w = complex(rng.uniform(-0.2, 0.2), rng.uniform(-1, 1))
            z = cmath.exp(-2 * math.pi * w)
            expect = evaluate(P, z)
            got = exp_eval(ExpPolynomialView(P), w)
            assert abs(got - expect) <= 1e-10 * (abs(expect) + s_majorant(P, abs(z)) * 1e-3)

    def test_upper_bound_on_vertical_lines(self):
        rng = np.random.default_rng(4)
        for _ in range(100):
            P = random_poly(rng, int(rng.integers(0, 20)))
            t, s = rng.uniform(-0.3, 0.3), rng.uniform(-2, 2)
            val = abs(exp_eval(ExpPolynomialView(P), complex(t, s)))
            assert val <= (P.degree + 1) * H_function(P, t) * (1 + 1e-12)


class TestSerialization:
    def test_json_round_trip(self):
        P = Polynomial([1 + 2j, -0.5, 3])
        assert pc.from_json(pc.to_json(P)) == P
        assert pc.from_json('{"coeffs": [1, [0, 1]]}') == Polynomial([1, 1j])

    def test_text_round_trip(self, tmp_path):
        P = Polynomial([0.1, -2.5 + 1e-17j, 7])
        assert pc.from_text(pc.to_text(P)) == P
        f = tmp_path / "p.txt"
        f.write_text("# comment\n1 0\n\n2\n")
        assert pc.load(f) == Polynomial([1, 2])
        g = tmp_path / "p.json"
        g.write_text(pc.to_json(P))
        assert pc.load(g) == P

    def test_radius_conversions(self):
        assert pc.radius_to_t(pc.t_to_radius(0.3)) == pytest.approx(0.3)
        with pytest.raises(DomainError):
            pc.radius_to_t(0.0)
