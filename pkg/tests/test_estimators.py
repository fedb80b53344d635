import itertools

import numpy as np
import pytest

from conftest import tiny_angle
from pixelwb import estimators
from pixelwb.errors import ConfigError

ALGOS = ["gray-world", "white-patch", "shades-of-gray:p=6", "gray-edge:p=6,sigma=1"]


def rand_image(rng, h=32, w=32, lo=0.02, hi=0.9):
    return rng.uniform(lo, hi, (h, w, 3))


class TestRegion:
    def test_defaults_cover_whole_image(self, rng):
        img = rand_image(rng)
        r = estimators.Region(img)
        assert (r.width, r.height) == (32, 32)
        assert np.array_equal(r.patch(), img)

    def test_sub_rectangle(self, rng):
        img = rand_image(rng)
        r = estimators.Region(img, x=4, y=8, width=10, height=6)
        assert np.array_equal(r.patch(), img[8:14, 4:14])

    @pytest.mark.parametrize("kw", [dict(x=-1), dict(y=40), dict(width=0),
                                    dict(x=30, width=5), dict(height=100)])
    def test_out_of_bounds(self, rng, kw):
        with pytest.raises(ConfigError):
            estimators.Region(rand_image(rng), **kw)

    def test_saturation_exclusion(self, rng):
        img = rand_image(rng, hi=0.5)
        img[0, 0] = 1.0
        keep = estimators.Region(img).included()
        assert not keep[0, 0] and keep.sum() == 32 * 32 - 1

    def test_saturation_fallback_when_all_saturated(self):
        img = np.ones((4, 4, 3))
        keep = estimators.Region(img).included()
        assert keep.all()

    def test_explicit_exclusion(self, rng):
        img = rand_image(rng, h=4, w=4)
        mask = np.zeros((4, 4), dtype=bool)
        mask[1, 2] = True
        keep = estimators.Region(img, exclude=mask).included()
        assert not keep[1, 2] and keep.sum() == 15


class TestGrayWorld:
    def test_equals_channel_means(self, rng):
        img = rand_image(rng)
        e = estimators.gray_world(estimators.Region(img))
        means = img.reshape(-1, 3).mean(axis=0)
        assert tiny_angle(e, means) < 1e-10

    def test_uniform_image_gives_white(self):
        img = np.full((8, 8, 3), 0.3)
        e = estimators.gray_world(estimators.Region(img))
        assert np.allclose(e, 1 / np.sqrt(3), atol=1e-12)


class TestWhitePatch:
    def test_equals_channel_maxima(self, rng):
        img = rand_image(rng)
        e = estimators.white_patch(estimators.Region(img))
        maxima = img.reshape(-1, 3).max(axis=0)
        assert tiny_angle(e, maxima) < 1e-10

    def test_single_bright_patch_dominates(self):
        img = np.full((8, 8, 3), 0.1)
        img[3, 3] = [0.8, 0.4, 0.2]
        e = estimators.white_patch(estimators.Region(img))
        assert tiny_angle(e, [0.8, 0.4, 0.2]) < 1e-10


class TestShadesOfGray:
    def test_p1_equals_gray_world(self, rng):
        for seed in range(20):
            img = rand_image(np.random.default_rng(seed))
            r = estimators.Region(img)
            a = estimators.shades_of_gray(r, p=1)
            b = estimators.gray_world(r)
            assert tiny_angle(a, b) < 1e-12

    def test_matches_loop_oracle(self, rng):
        img = rand_image(rng, h=6, w=7)
        r = estimators.Region(img)
        e = estimators.shades_of_gray(r, p=6)
        acc = np.zeros(3)
        for y in range(6):
            for x in range(7):
                acc += img[y, x] ** 6
        oracle = (acc / 42) ** (1 / 6)
        assert tiny_angle(e, oracle) < 1e-10

    def test_rejects_bad_exponent(self, rng):
        with pytest.raises(ConfigError):
            estimators.shades_of_gray(estimators.Region(rand_image(rng)), p=0.5)


class TestGrayEdge:
    def test_uniform_image_is_degenerate(self):
        img = np.full((16, 16, 3), 0.4)
        with pytest.raises(Exception):
            estimators.gray_edge(estimators.Region(img))

    def test_matches_loop_oracle(self, rng):
        # independent per-pixel reimplementation: separable Gaussian smooth,
        # replicate-padded central differences, Minkowski pooling
        img = rand_image(rng, h=10, w=11)
        h, w = 10, 11
        p, sigma = 6.0, 1.0
        radius = int(np.ceil(3 * sigma))
        xs = np.arange(-radius, radius + 1)
        k = np.exp(-xs ** 2 / (2 * sigma ** 2))
        k /= k.sum()

        def clamp(i, n):
            return min(max(i, 0), n - 1)

        sm = np.zeros_like(img)
        for y in range(h):
            for x in range(w):
                for dy_ in range(-radius, radius + 1):
                    for dx_ in range(-radius, radius + 1):
                        sm[y, x] += (k[dy_ + radius] * k[dx_ + radius]
                                     * img[clamp(y + dy_, h), clamp(x + dx_, w)])
        mag = np.zeros_like(img)
        for y in range(h):
            for x in range(w):
                gy = (sm[clamp(y + 1, h), x] - sm[clamp(y - 1, h), x]) / 2
                gx = (sm[y, clamp(x + 1, w)] - sm[y, clamp(x - 1, w)]) / 2
                mag[y, x] = np.sqrt(gx ** 2 + gy ** 2)
        oracle = (mag.reshape(-1, 3) ** p).mean(axis=0) ** (1 / p)
        e = estimators.gray_edge(estimators.Region(img), p=p, smooth_sigma=sigma)
        assert tiny_angle(e, oracle) < 1e-8

    def test_too_small_region(self, rng):
        with pytest.raises(ConfigError):
            estimators.gray_edge(estimators.Region(rand_image(rng, h=2, w=8)))


class TestInvariances:
    @pytest.mark.parametrize("algo", ALGOS)
    def test_scale_invariance(self, algo):
        for seed in range(10):
            img = rand_image(np.random.default_rng(seed), lo=0.02, hi=0.09)
            base = estimators.estimate(algo, estimators.Region(img))
            for k in (0.1, 0.5, 2.0, 10.0):
                e = estimators.estimate(algo, estimators.Region(img * k))
                assert tiny_angle(base, e) < 1e-5

    @pytest.mark.parametrize("algo", ALGOS)
    def test_channel_equivariance(self, algo, rng):
        img = rand_image(rng, lo=0.02, hi=0.09)
        base = estimators.estimate(algo, estimators.Region(img))
        for perm in itertools.permutations(range(3)):
            e = estimators.estimate(algo, estimators.Region(img[:, :, perm]))
            assert np.allclose(e, base[list(perm)], atol=1e-12)


class TestParsing:
    def test_defaults(self):
        eid = estimators.parse_estimator("shades-of-gray")
        assert eid.params == {"p": 6.0}
        assert str(eid) == "shades-of-gray:p=6"

    def test_explicit_params(self):
        eid = estimators.parse_estimator("gray-edge:p=4,sigma=2")
        assert eid.params == {"p": 4.0, "sigma": 2.0}

    def test_round_trip(self):
        for name in estimators.list_algorithms():
            assert str(estimators.parse_estimator(name)) == name

    @pytest.mark.parametrize("bad", ["nope", "gray-world:p=6", "gray-edge:p=",
                                     "shades-of-gray:p=0.2", "gray-edge:sigma=0"])
    def test_rejects(self, bad):
        with pytest.raises(ConfigError):
            estimators.parse_estimator(bad)

    def test_registry(self):
        assert estimators.list_algorithms() == [
            "gray-world", "white-patch", "shades-of-gray:p=6",
            "gray-edge:p=6,sigma=1"]
