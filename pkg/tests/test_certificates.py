import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flipzeros import certificates as cert
from flipzeros.errors import ConfigError, NumericalError
from flipzeros.poly import DomainError, Polynomial
from flipzeros.theta import FlipModel, make_symmetric_model

ExpP = cert.ExpPolynomial


def dense_max(p, lo, hi, points=50_001):
    t = np.linspace(lo, hi, points)
    return float(np.max(np.abs(p(t))))


class TestArcMax:
    def test_constant_modulus(self):
        assert cert.arc_max(ExpP(((1, 1),)), (0.3, 1.1)) == pytest.approx(1, abs=1e-15)

    def test_full_circle_peak(self):
        assert cert.arc_max(ExpP(((1, 0), (1, 1))), (-math.pi, math.pi)) == pytest.approx(2, abs=1e-12)

    def test_endpoint_max(self):
        got = cert.arc_max(ExpP(((1, 0), (1, 1))), (math.pi - 0.1, math.pi))
        assert got == pytest.approx(2 * math.sin(0.05), rel=1e-12)

    def test_polynomial_on_circle(self):
        P = Polynomial([1, 1])
        assert cert.arc_max(P, (-1, 1), r=2.0) == pytest.approx(3, rel=1e-12)
        with pytest.raises(DomainError):
            cert.arc_max(P, (-1, 1))

    def test_callable(self):
        assert cert.arc_max(lambda t: np.cos(t), (0.0, 3.0)) == pytest.approx(1.0, abs=1e-14)

    def test_errors(self):
        with pytest.raises(DomainError):
            ExpP(())
        with pytest.raises(DomainError):
            ExpP(((1, 2), (3, 2)))
        with pytest.raises(DomainError):
            cert.arc_max(ExpP(((1, 1),)), (0, 7))
        with pytest.raises(DomainError):
            cert.arc_max(ExpP(((1, 1),)), (1, 1))

    def test_grid_doubling_check(self):
        p = ExpP(((1.0, 0), (0.7j, 97), (-0.4, 211)))
        with pytest.raises(NumericalError):
            cert.arc_max(p, (0.1, 6), grid_points=16, check=True)
        cert.arc_max(p, (0.1, 6), check=True)

    def test_against_dense_sampling(self):
        rng = np.random.default_rng(0)
        for _ in range(40):
            m = int(rng.integers(1, 8))
            freqs = rng.choice(30, size=m, replace=False)
            p = ExpP.from_arrays(rng.normal(size=m) + 1j * rng.normal(size=m), freqs)
            lo = float(rng.uniform(-3, 3))
            hi = lo + float(rng.uniform(0.01, 2 * math.pi - 0.01))
            got = cert.arc_max(p, (lo, hi))
            assert got >= dense_max(p, lo, hi) * (1 - 1e-12)
            assert got <= dense_max(p, lo, hi) * (1 + 1e-6)

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False), min_size=1, max_size=6),
           st.floats(-3, 3), st.floats(0.01, 6.28))
    def test_triangle_inequality(self, coeffs, lo, length):
        p = ExpP.from_arrays(coeffs, np.arange(len(coeffs)) * 3)
        assert cert.arc_max(p, (lo, lo + length)) <= p.l1 * (1 + 1e-12) + 1e-300

    def test_single_term_equality(self):
        p = ExpP(((2 - 1j, 5),))
        assert cert.arc_max(p, (0, 0.01)) == pytest.approx(abs(2 - 1j), rel=1e-9)


class TestTuran:
    def test_single_term_ratio(self):
        assert cert.turan_ratio(ExpP(((3j, 4),)), (0, 0.2)) == pytest.approx(1, rel=1e-12)

    def test_closed_forms(self):
        assert cert.turan_ratio(ExpP(((1, 0), (1, 1))), (-math.pi, math.pi)) == pytest.approx(1)
        for eps in (0.2, 0.1, 0.05):
            got = cert.turan_ratio(ExpP(((1, 0), (-1, 1))), (-eps, eps))
            assert abs(got - math.sin(eps / 2)) < 1e-6

    def test_estimate_two_terms(self):
        lengths = [1.0, 0.2]
        rows = cert.estimate_turan_b(2, lengths, trials=10, seed=3, steps=60)
        for row, length in zip(rows, lengths):
            exact = math.sin(length / 4) / length
            assert 0 < row["b_emp"] <= 1
            # the estimate is an upper bound on the true constant and lands near it
            assert row["b_emp"] >= exact * (1 - 1e-9)
            assert row["b_emp"] <= exact * 1.01
            ok, worst = cert.turan_self_check(row, samples=200, seed=9)
            assert ok and worst >= 1 - 1e-9

    def test_more_trials_never_raise_estimate(self):
        a = cert.estimate_turan_b(3, [0.7], trials=10, seed=1, steps=20)[0]["b_emp"]
        b = cert.estimate_turan_b(3, [0.7], trials=20, seed=1, steps=20)[0]["b_emp"]
        assert b <= a

    def test_witness_reproduces_minimum(self):
        row = cert.estimate_turan_b(3, [0.5], trials=10, seed=2, steps=10)[0]
        w = row["witness"]
        p = ExpP.from_arrays([complex(*c) for c in w["coeffs"]], w["freqs"])
        assert cert.turan_ratio(p, (-0.25, 0.25)) == pytest.approx(row["min_ratio"], rel=1e-9)

    def test_errors(self):
        with pytest.raises(ConfigError):
            cert.estimate_turan_b(1, [1.0], trials=10)
        with pytest.raises(ConfigError):
            cert.estimate_turan_b(2, [1.0], trials=9)


class TestMajorantInequality:
    def test_constant(self):
        lhs, rhs, ok = cert.sbar_check(Polynomial([1]), 3.0)
        assert lhs == 4 and rhs == 2 and ok

    def test_hand_example(self):
        lhs, rhs, ok = cert.sbar_check(Polynomial([1, 1]), 1.0)
        assert lhs == 2 and rhs == 1 and ok


class TestJensen:
    def test_monomials(self):
        res = cert.jensen_bound(Polynomial([0, 1]), 0, 1)
        assert res.bound == pytest.approx(math.log(2) / math.log(1.25), rel=1e-9)
        assert res.bound == pytest.approx(3.106, abs=1e-3)
        assert res.actual == 1 and res.ok
        res = cert.jensen_bound(Polynomial([0, 0, 0, 0, 0, 1]), 0, 1)
        assert res.bound == pytest.approx(15.53, abs=1e-2)
        assert res.actual == 5 and res.ok

    def test_constant(self):
        res = cert.jensen_bound(Polynomial([1]), 0.5j, 2)
        assert res == (0.0, 0, True)

    def test_vanishing_inner_circle(self):
        with pytest.raises(NumericalError):
            cert.jensen_bound(Polynomial([0] * 40 + [1]), 0, 1e-12)

    def test_random_disks(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            n = int(rng.integers(1, 20))
            P = Polynomial(rng.normal(size=n + 1) + 1j * rng.normal(size=n + 1))
            res = cert.jensen_bound(P, complex(*rng.normal(size=2)), float(rng.uniform(0.1, 3)))
            assert res.ok


class TestZeroFree:
    def test_certified(self):
        ok, margin = cert.zero_free_circle(Polynomial([1, math.exp(-10)]), 0.0)
        assert ok
        assert margin == pytest.approx(10 - 2 * math.pi)

    def test_root_on_circle(self):
        ok, margin = cert.zero_free_circle(Polynomial([1, 1]), 0.0)
        assert not ok and margin == pytest.approx(-2 * math.pi)

    def test_monomial(self):
        assert cert.zero_free_circle(Polynomial([0, 0, 2]), 0.3) == (True, math.inf)


class TestFlipArcMaxima:
    def test_two_term_model(self):
        model = FlipModel([1, 1], [-1, -1])
        rep = cert.theorem2_experiment(model, 1.0, (0, math.pi / 2), 1, [0.01, 0.1, 0.2])
        assert rep["min_ratio"] >= math.sqrt(2) / 2 * (1 - 1e-12)
        assert rep["params"]["mode"] == "exhaustive"
        assert rep["params"]["sequences"] == 4
        for row in rep["f_table"]:
            if row["threshold"] < math.sqrt(2) / 2:
                assert row["f"] == 0

    def test_huge_threshold_fails_everything(self):
        model = FlipModel([1, 1, 1], [-1, -1, -1])
        rep = cert.theorem2_experiment(model, 1.0, (0, math.pi / 2), 1, [10.0])
        assert rep["f_table"][0]["f"] == 1.0
        assert rep["max_ratio"] <= 1 + 1e-12

    def test_monotone_and_c_star(self):
        model = make_symmetric_model("rademacher", 10).draw_model(np.random.default_rng(0))
        grid = np.geomspace(0.01, 10, 61).tolist()
        rep = cert.theorem2_experiment(model, 1.0, (0.0, 1.0), 2, grid)
        f = [row["f"] for row in rep["f_table"]]
        assert all(a <= b for a, b in zip(f, f[1:]))
        assert f[0] == 0
        assert rep["c_star"] is not None and rep["c_star"] > 0
        assert rep["f_at_c_star"] <= 0.25
        assert sum(rep["histogram"]["counts"]) == 2**11
        assert len(rep["histogram"]["edges"]) == 65

    def test_resolution_flag(self):
        model = FlipModel(np.ones(4), -np.ones(4))
        assert cert.theorem2_experiment(model, 1.0, (0, 1), 5, [1.0])["resolution_limit"]
        assert not cert.theorem2_experiment(model, 1.0, (0, 1), 3, [1.0])["resolution_limit"]

    def test_block_partition_irrelevant(self):
        model = make_symmetric_model("normal", 6).draw_model(np.random.default_rng(2))
        a = cert.theorem2_experiment(model, 0.8, (0, 2), 2, [0.5, 1, 2], block=7)
        b = cert.theorem2_experiment(model, 0.8, (0, 2), 2, [0.5, 1, 2], block=1024)
        assert a == b

    def test_sampled_mode(self):
        model = FlipModel(np.ones(26), -np.ones(26))
        rep = cert.theorem2_experiment(model, 1.0, (0, 1), 1, [1.0], samples=100, check=False)
        assert rep["params"]["mode"] == "sampled"
        assert rep["params"]["sequences"] == 2**11

    def test_errors(self):
        model = FlipModel([1, 1], [-1, -1])
        with pytest.raises(DomainError):
            cert.theorem2_experiment(model, 0.0, (0, 1), 1, [1.0])
        with pytest.raises(ConfigError):
            cert.theorem2_experiment(model, 1.0, (0, 1), 0, [1.0])
