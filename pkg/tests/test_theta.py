import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from flipzeros.errors import ConfigError
from flipzeros.poly import DomainError
from flipzeros.theta import (
    FlipModel,
    all_signs,
    as_signs,
    check_theta,
    enumerate_flips,
    greedy_pairing,
    make_median_model,
    make_symmetric_model,
    random_signs,
    sample_flip,
    sampler_from_config,
)


class TestCheckTheta:
    def test_symmetric_pair_margin(self):
        ok, margin = check_theta([(3.0, -3.0)], 0.0)
        assert ok and margin == pytest.approx(3.0)

    def test_close_pair_fails(self):
        ok, margin = check_theta([(1.0, 1.1)], 0.0)
        assert not ok
        assert margin == pytest.approx(0.1 - 1.05)

    def test_kappa_range(self):
        with pytest.raises(DomainError):
            check_theta([(1, -1)], 0, kappa=0)
        with pytest.raises(DomainError):
            check_theta([(1, -1)], 0, kappa=1.5)


class TestGreedyPairing:
    def test_single_pair(self):
        pairs, a = greedy_pairing([0, 1])
        assert pairs == [(0, 1)] and a == 0.5

    def test_hand_execution(self):
        pairs, a = greedy_pairing([0, 1, 10, 11])
        assert pairs == [(0, 11), (1, 10)]
        assert a == 5.5

    def test_odd_rejected(self):
        with pytest.raises(DomainError):
            greedy_pairing([1, 2, 3])

    @settings(max_examples=100, deadline=None)
    @given(st.integers(1, 40), st.integers(0, 2**32 - 1))
    def test_pairs_separated_and_ordered(self, half, seed):
        rng = np.random.default_rng(seed)
        atoms = rng.normal(size=2 * half) + 1j * rng.normal(size=2 * half)
        pairs, a = greedy_pairing(atoms)
        assert len(pairs) == half
        ok, _ = check_theta(pairs, a, 0.5)
        assert ok
        d = [abs(p - q) for p, q in pairs]
        assert all(x >= y for x, y in zip(d, d[1:]))
        used = sorted(np.array(pairs).ravel(), key=lambda z: (z.real, z.imag))
        assert np.array_equal(used, sorted(atoms, key=lambda z: (z.real, z.imag)))

    def test_tie_break_smallest_indices(self):
        pairs, _ = greedy_pairing([0, 1, 2, 3])
        assert pairs[0] == (0, 3)


class TestModels:
    def test_symmetric_rademacher(self):
        sampler = make_symmetric_model("rademacher", 4)
        model = sampler.draw_model(np.random.default_rng(0))
        assert np.array_equal(model.pairs, np.array([[1, -1]] * 5))
        ok, margin = check_theta(model.pairs, model.a)
        assert ok and margin == pytest.approx(1.0)

    def test_symmetric_margin_is_magnitude(self):
        model = make_symmetric_model([0.5, 2.0, 3.0], 2).draw_model(np.random.default_rng(0))
        margins = np.abs(model.plus - model.minus) - 0.5 * (np.abs(model.plus) + np.abs(model.minus))
        assert np.allclose(margins, [0.5, 2.0, 3.0])

    def test_bad_descriptor(self):
        with pytest.raises(ConfigError):
            make_symmetric_model("cauchy", 3)
        with pytest.raises(ConfigError):
            make_symmetric_model([1, 2], 3)

    def test_median_model(self):
        model = make_median_model([(-3, 3)], 0.0)
        assert check_theta(model.pairs, model.a)[1] == pytest.approx(3.0)
        model = make_median_model([(0, 2)], 1.0)
        assert check_theta(model.pairs, model.a)[1] == pytest.approx(1.0)
        with pytest.raises(ConfigError):
            make_median_model([(0, 3)], 1.0)

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.tuples(st.floats(-50, 50), st.floats(0.01, 50)), min_size=1, max_size=10), st.floats(-5, 5))
    def test_median_margin_identity(self, rows, a):
        pairs = [(a - d, a + d) for _, d in rows]
        model = make_median_model(pairs, a)
        plus, minus = model.plus, model.minus
        margin = np.abs(plus - minus) - 0.5 * (np.abs(plus - a) + np.abs(minus - a))
        assert np.allclose(margin, 0.5 * (np.abs(plus - a) + np.abs(minus - a)))

    def test_flip_model_validation(self):
        with pytest.raises(DomainError):
            FlipModel([1.0, 1.0], [1.1, -1.0])
        with pytest.raises(DomainError):
            FlipModel([1.0], [1.0, 2.0])
        with pytest.raises(DomainError):
            FlipModel([0.0, 1.0], [2.0, -1.0], a=1.0, nondegenerate=True)

    def test_config_parsing(self):
        s = sampler_from_config({"kind": "iid_atoms", "atoms": [1, -1, [0, 2], 3]}, n=5)
        assert s.kind == "iid_atoms"
        P = s.sample(np.random.default_rng(0))
        assert P.degree == 5
        with pytest.raises(ConfigError):
            sampler_from_config({"kind": "iid_atoms", "atoms": [1, 0]}, n=2)
        with pytest.raises(ConfigError):
            sampler_from_config({"kind": "nope"}, n=2)
        with pytest.raises(ConfigError):
            sampler_from_config({"kind": "symmetric", "extra": 1}, n=2)
        m = sampler_from_config({"kind": "median", "pairs": [[0, 2], [-1, 3], [0.5, 1.5]], "a": 1}, n=2)
        with pytest.raises(ConfigError):
            sampler_from_config({"kind": "median", "pairs": [[0, 2], [0, 3]], "a": 1}, n=1)
        assert m.draw_model(np.random.default_rng(0)).n == 2

    def test_iid_flag(self):
        assert make_symmetric_model("normal", 3).iid_continuous
        assert not make_symmetric_model("rademacher", 3).iid_continuous


class TestFlips:
    def test_all_plus(self):
        model = FlipModel([1, 2, 3], [-1, -2, -3])
        assert np.array_equal(sample_flip(model, "+++").coeffs, [1, 2, 3])

    def test_single_flip_changes_one(self):
        model = FlipModel([1, 2, 3], [-1, -2, -3])
        a = sample_flip(model, [1, 1, 1]).coeffs
        b = sample_flip(model, [1, -1, 1]).coeffs
        assert np.sum(a != b) == 1

    def test_length_mismatch(self):
        model = FlipModel([1, 2, 3], [-1, -2, -3])
        with pytest.raises(DomainError):
            sample_flip(model, [1, 1])
        with pytest.raises(DomainError):
            as_signs([1, 0, 1])

    def test_enumeration(self):
        model = FlipModel([1, 1], [-1, -1])
        seqs = [s for s, _ in enumerate_flips(model)]
        assert seqs == [(1, 1), (1, -1), (-1, 1), (-1, -1)]
        model3 = FlipModel(np.ones(4), -np.ones(4))
        seqs = [s for s, _ in enumerate_flips(model3)]
        assert len(seqs) == 16 and len(set(seqs)) == 16
        assert seqs == sorted(seqs, reverse=True)

    def test_enumeration_measure(self):
        # +-1 +-2 +-3 is positive for exactly three patterns: 6, 4 and 2
        model = FlipModel([1, 2, 3], [-1, -2, -3])
        hits = sum(1 for _, P in enumerate_flips(model) if P.coeffs.real.sum() > 0)
        assert hits / 8 == 3 / 8

    def test_enumeration_refused(self):
        with pytest.raises(DomainError, match="refusing"):
            all_signs(25)

    def test_sign_frequencies(self):
        rng = np.random.default_rng(11)
        s = random_signs(rng, 4, size=10_000)
        model = make_symmetric_model("normal", 4).draw_model(rng)
        coeffs = model.coefficients(s)
        for k in range(5):
            plus = int(np.sum(coeffs[:, k] == model.plus[k]))
            assert stats.chisquare([plus, 10_000 - plus]).pvalue > 0.01
        joint = [int(np.sum((s[:, 0] == a) & (s[:, 1] == b))) for a in (1, -1) for b in (1, -1)]
        assert stats.chisquare(joint).pvalue > 0.01
