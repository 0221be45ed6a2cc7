import numpy as np
import pytest

from hdbandit.encoding import (
    ContextEncoder,
    RewardEncoder,
    encode_context,
    encode_reward,
    quantize_level,
)
from hdbandit.hypervec import BipolarHV, DimensionMismatchError, bind, cosine, hamming


@pytest.fixture(scope="module")
def enc():
    return ContextEncoder(1024, 5, seed=11)


class TestQuantize:
    @pytest.mark.parametrize("x,level", [(-3.0, 0), (3.0, 15), (0.0, 8), (-10.0, 0), (99.0, 15),
                                         (-2.6, 1), (2.99, 15)])
    def test_levels(self, enc, x, level):
        assert quantize_level(x, enc) == level

    def test_monotone(self, enc):
        xs = np.linspace(-5, 5, 2001)
        q = enc.quantize(xs)
        assert np.all(np.diff(q) >= 0)
        assert q.min() == 0 and q.max() == 15


class TestContextEncoder:
    def test_roles_distinct_and_bipolar(self, enc):
        assert enc.roles.shape == (5, 1024)
        assert np.all(np.abs(enc.roles) == 1)
        assert len({r.tobytes() for r in enc.roles}) == 5

    def test_distinct_roles_even_in_tiny_dims(self):
        small = ContextEncoder(3, 8, seed=0)
        assert len({r.tobytes() for r in small.roles}) == 8
        with pytest.raises(ValueError):
            ContextEncoder(3, 9, seed=0)

    def test_level_flip_structure(self, enc):
        block = 1024 // (2 * 15)
        assert enc.flip_block == block
        for a in range(15):
            assert hamming(enc.levels[a], enc.levels[a + 1]) == block
        assert hamming(enc.levels[0], enc.levels[15]) == 15 * block

    def test_level_similarity_monotone_in_distance(self, enc):
        for a in range(16):
            dists = [hamming(enc.levels[a], enc.levels[b]) for b in range(a, 16)]
            assert dists == sorted(dists)

    def test_output_bipolar_and_deterministic(self, enc):
        rng = np.random.default_rng(0)
        x = rng.standard_normal(5)
        h1 = encode_context(x, enc)
        h2 = ContextEncoder(1024, 5, seed=11).encode(x)
        assert isinstance(h1, BipolarHV)
        assert h1 == h2

    def test_no_call_order_dependence(self, enc):
        rng = np.random.default_rng(1)
        xs = rng.standard_normal((20, 5))
        forward = [enc.encode(x) for x in xs]
        backward = [enc.encode(x) for x in xs[::-1]][::-1]
        assert forward == backward
        np.testing.assert_array_equal(enc.encode_batch(xs), np.stack([h.components for h in forward]))

    def test_single_feature_is_bound_pair(self):
        e = ContextEncoder(256, 1, seed=5)
        for v in (-2.2, 0.3, 1.7):
            expected = bind(BipolarHV(e.roles[0]), BipolarHV(e.levels[e.quantize(v)]))
            assert e.encode([v]) == expected

    def test_zero_sums_use_tie_breaker(self):
        e = ContextEncoder(512, 2, seed=9)
        x = np.array([0.4, -1.1])
        q = e.quantize(x)
        total = e.roles[0].astype(int) * e.levels[q[0]] + e.roles[1].astype(int) * e.levels[q[1]]
        ties = total == 0
        assert ties.any()
        out = e.encode(x).components
        np.testing.assert_array_equal(out[ties], e.tie_breaker[ties])
        np.testing.assert_array_equal(out[~ties], np.sign(total[~ties]))

    def test_length_mismatch(self, enc):
        with pytest.raises(DimensionMismatchError):
            enc.encode(np.zeros(4))

    def test_seed_changes_codebook(self):
        a = ContextEncoder(256, 3, seed=1)
        b = ContextEncoder(256, 3, seed=2)
        assert not np.array_equal(a.roles, b.roles)

    def test_nearby_contexts_more_similar_than_random(self):
        # one perturbed feature vs. independent contexts, over many encoder seeds
        rng = np.random.default_rng(2024)
        near, far = [], []
        for seed in range(1000):
            e = ContextEncoder(1024, 5, seed=seed)
            x = rng.standard_normal(5)
            x2 = x.copy()
            x2[rng.integers(5)] = rng.standard_normal()
            y = rng.standard_normal(5)
            hx = e.encode(x)
            near.append(cosine(hx, e.encode(x2)))
            far.append(abs(cosine(hx, e.encode(y))))
        assert np.mean(near) > np.mean(far)
        assert np.mean(near) > 0.5


class TestRewardEncoder:
    def test_extremes(self):
        enc = RewardEncoder(64)
        assert encode_reward(1.0, enc) == BipolarHV.ones(64)
        assert encode_reward(0.0, enc) == -BipolarHV.ones(64)

    def test_half(self):
        out = RewardEncoder(1024).encode(0.5).components
        assert np.all(out[:512] == 1) and np.all(out[512:] == -1)

    def test_clamped(self):
        enc = RewardEncoder(16)
        assert enc.encode(3.0) == enc.encode(1.0)
        assert enc.encode(-1.0) == enc.encode(0.0)

    def test_monotone_thermometer(self):
        enc = RewardEncoder(100)
        rs = np.sort(np.random.default_rng(3).random(50))
        prev = np.zeros(100, bool)
        for r in rs:
            on = enc.encode(r).components == 1
            assert np.all(on[prev])
            prev = on

    def test_binary_reward_target_is_signed_context(self, enc):
        x = enc.encode(np.random.default_rng(4).standard_normal(5))
        renc = RewardEncoder(1024)
        assert bind(renc.encode(1), x) == x
        assert bind(renc.encode(0), x) == -x
