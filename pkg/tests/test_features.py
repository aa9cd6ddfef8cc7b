import numpy as np
import pytest

from triscore.features import build_features, feature_dim


def test_dim_1024_gives_6144():
    rng = np.random.default_rng(0)
    f = build_features(*rng.standard_normal((3, 1024)))
    assert f.shape == (6144,)
    assert feature_dim(1024) == 6144


def test_hand_example():
    f = build_features([1.0, 2.0], [3.0, 4.0], [5.0, 6.0])
    assert f.tolist() == [5, 6, 3, 4, 3, 8, 2, 2, 15, 24, 2, 2]


def test_zero_mt_annihilates_product_blocks():
    rng = np.random.default_rng(1)
    src, ref = rng.standard_normal((2, 5))
    f = build_features(src, np.zeros(5), ref)
    assert np.all(f[10:15] == 0.0)  # src*mt block
    assert np.all(f[20:25] == 0.0)  # ref*mt block


def test_length_law():
    rng = np.random.default_rng(2)
    for d in (1, 2, 7, 33, 128):
        f = build_features(*rng.standard_normal((3, d)))
        assert f.shape == (6 * d,)


def test_product_block_commutes():
    rng = np.random.default_rng(3)
    src, mt, ref = rng.standard_normal((3, 16))
    a = build_features(src, mt, ref)[2 * 16 : 3 * 16]
    assert np.array_equal(a, mt * src)


def test_difference_blocks_nonnegative():
    rng = np.random.default_rng(4)
    for _ in range(50):
        src, mt, ref = rng.standard_normal((3, 9))
        f = build_features(src, mt, ref)
        assert np.all(f[3 * 9 : 4 * 9] >= 0.0)
        assert np.all(f[5 * 9 : 6 * 9] >= 0.0)


def test_leading_blocks_are_verbatim_copies():
    rng = np.random.default_rng(5)
    src, mt, ref = rng.standard_normal((3, 11))
    f = build_features(src, mt, ref)
    assert np.array_equal(f[:11], ref)
    assert np.array_equal(f[11:22], mt)


def test_dim_mismatch():
    with pytest.raises(ValueError, match="dimension mismatch"):
        build_features([1.0], [1.0, 2.0], [1.0])
