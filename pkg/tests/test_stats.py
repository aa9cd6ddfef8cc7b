import numpy as np
import pytest

from triscore.stats import (
    affine_invariance_check,
    modality_report,
    paired_bootstrap,
    pearson,
)
from triscore.store import load_dataset

from conftest import make_record
from oracles import fsum_pearson


class TestPearson:
    def test_self_correlation(self):
        assert pearson([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]) == 1.0

    def test_sign_flip(self):
        xs = [1.0, 2.0, 3.0]
        assert pearson(xs, [-x for x in xs]) == -1.0

    def test_hand_value(self):
        # frozen from the fsum textbook-formula oracle
        assert pearson([1, 2, 3, 4], [2, 4, 5, 9]) == pytest.approx(
            0.9647638212377322, abs=1e-12
        )

    def test_matches_fsum_oracle(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            xs = rng.standard_normal(rng.integers(2, 40))
            ys = rng.standard_normal(xs.shape[0])
            assert pearson(xs, ys) == pytest.approx(fsum_pearson(xs, ys), abs=1e-10)

    def test_symmetric(self):
        rng = np.random.default_rng(1)
        xs, ys = rng.standard_normal((2, 25))
        assert pearson(xs, ys) == pearson(ys, xs)

    def test_bounds(self):
        rng = np.random.default_rng(2)
        for _ in range(500):
            xs, ys = rng.standard_normal((2, 5))
            assert -1.0 <= pearson(xs, ys) <= 1.0

    def test_length_mismatch(self):
        with pytest.raises(ValueError, match="length mismatch"):
            pearson([1.0, 2.0], [1.0, 2.0, 3.0])

    def test_too_short(self):
        with pytest.raises(ValueError, match="at least 2"):
            pearson([1.0], [2.0])

    def test_constant_input(self):
        with pytest.raises(ValueError, match="constant"):
            pearson([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])


class TestAffineInvariance:
    def test_simple(self):
        xs, ys = [1.0, 4.0, 2.0, 8.0], [0.5, 1.0, 2.0, 3.0]
        assert affine_invariance_check(xs, ys, 2.0, 5.0)
        assert affine_invariance_check(xs, ys, 1.0, 0.0)

    def test_random_sweep(self):
        rng = np.random.default_rng(3)
        xs, ys = rng.standard_normal((2, 50))
        for _ in range(100):
            a = float(rng.uniform(1e-3, 1e3))
            b = float(rng.uniform(-100, 100))
            assert affine_invariance_check(xs, ys, a, b)

    def test_nonpositive_slope(self):
        with pytest.raises(ValueError, match="positive"):
            affine_invariance_check([1.0, 2.0], [1.0, 2.0], 0.0, 1.0)


class TestPairedBootstrap:
    def test_identical_systems_all_ties(self):
        rng = np.random.default_rng(4)
        a = rng.standard_normal(50)
        h = rng.standard_normal(50)
        verdict = paired_bootstrap(a, a.copy(), h, resamples=200, seed=0)
        assert (verdict.wins_a, verdict.wins_b, verdict.ties) == (0.0, 0.0, 1.0)
        assert not verdict.significant

    def test_planted_winner_significant(self):
        rng = np.random.default_rng(5)
        h = rng.standard_normal(200)
        noise = rng.standard_normal(200)
        verdict = paired_bootstrap(h, noise, h, resamples=1000, alpha=0.05, seed=7)
        assert verdict.significant
        assert verdict.wins_a >= 0.95

    def test_deterministic(self):
        rng = np.random.default_rng(6)
        a, b, h = rng.standard_normal((3, 40))
        v1 = paired_bootstrap(a, b, h, resamples=300, seed=11)
        v2 = paired_bootstrap(a, b, h, resamples=300, seed=11)
        assert v1 == v2

    def test_fractions_sum_to_one(self):
        rng = np.random.default_rng(7)
        a, b, h = rng.standard_normal((3, 30))
        v = paired_bootstrap(a, b, h, resamples=257, seed=3)
        assert abs(v.wins_a + v.wins_b + v.ties - 1.0) <= 1e-12
        assert 0.0 <= v.wins_a <= 1.0 and 0.0 <= v.wins_b <= 1.0

    def test_constant_human_gives_ties(self):
        a = [1.0, 2.0, 3.0, 4.0]
        b = [4.0, 3.0, 2.0, 1.0]
        v = paired_bootstrap(a, b, [2.0, 2.0, 2.0, 2.0], resamples=50, seed=1)
        assert v.ties == 1.0

    def test_length_mismatch(self):
        with pytest.raises(ValueError, match="length mismatch"):
            paired_bootstrap([1.0, 2.0], [1.0, 2.0], [1.0, 2.0, 3.0])

    def test_validation(self):
        a = [1.0, 2.0]
        with pytest.raises(ValueError):
            paired_bootstrap(a, a, a, resamples=0)
        with pytest.raises(ValueError):
            paired_bootstrap(a, a, a, alpha=1.5)


class TestModalityReport:
    def test_two_combo_report(self, build_dataset):
        rng = np.random.default_rng(8)
        emb = rng.standard_normal((6, 4)).astype("<f4")
        records = []
        for k in range(6):
            combo = ("speech",) * 3 if k % 2 == 0 else ("text",) * 3
            records.append(
                make_record(f"i{k}", k, ratings=(float(1 + (k % 5)),), modalities=combo)
            )
        ds = load_dataset(build_dataset(records, {"emb.blse": emb}))
        scores = {f"i{k}": float(k) for k in range(6)}
        report = modality_report(ds, scores)
        assert [c.combo for c in report] == [("speech",) * 3, ("text",) * 3]
        assert all(c.count == 3 for c in report)
        assert all(c.pearson_r is None or -1.0 <= c.pearson_r <= 1.0 for c in report)
