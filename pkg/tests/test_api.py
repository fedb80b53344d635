import numpy as np
import pytest
from sklearn.base import clone

from conftest import tiny_angle, tiny_angle_field
from pixelwb import GlobalIlluminantEstimator, PixelwiseIlluminantEstimator
from pixelwb.errors import ConfigError, FormatError


class TestGlobalEstimator:
    def test_predict_matches_gray_world(self, rng):
        img = rng.uniform(0.05, 0.9, (24, 24, 3))
        est = GlobalIlluminantEstimator()
        L = est.fit(img).predict(img)
        means = img.reshape(-1, 3).mean(axis=0)
        assert tiny_angle(L, means) < 1e-10
        assert np.linalg.norm(L) == pytest.approx(1.0, abs=1e-12)

    def test_transform_neutralizes_uniform_image(self):
        img = np.full((16, 16, 3), 0.4)
        out = GlobalIlluminantEstimator().transform(img)
        assert np.allclose(out, img, atol=1e-12)

    def test_get_set_params_and_clone(self):
        est = GlobalIlluminantEstimator(algo="white-patch")
        assert est.get_params() == {"algo": "white-patch"}
        est2 = clone(est).set_params(algo="shades-of-gray:p=4")
        assert est2.get_params()["algo"] == "shades-of-gray:p=4"

    def test_invalid_algo_rejected_at_fit(self, rng):
        img = rng.uniform(0, 1, (8, 8, 3))
        with pytest.raises(ConfigError):
            GlobalIlluminantEstimator(algo="nope").fit(img)

    def test_invalid_image_rejected(self):
        with pytest.raises(FormatError):
            GlobalIlluminantEstimator().fit(np.zeros((4, 4)))


class TestPixelwiseEstimator:
    def test_predict_shape_and_norm(self, rng):
        img = rng.uniform(0.05, 0.9, (32, 40, 3))
        est = PixelwiseIlluminantEstimator()
        field = est.predict(img)
        assert field.shape == img.shape
        assert np.allclose(np.linalg.norm(field, axis=2), 1.0, atol=1e-12)
        assert est.last_result_.params.beta == 8

    def test_matches_functional_pipeline(self, rng):
        from pixelwb import pipeline
        img = rng.uniform(0.05, 0.9, (32, 32, 3))
        est = PixelwiseIlluminantEstimator(beta=16, sigma=8.0)
        field = est.predict(img)
        ref = pipeline.run_pipeline(
            img, pipeline.PipelineParams(beta=16, sigma=8.0)).field
        assert tiny_angle_field(field, ref).max() == 0.0

    def test_transform_corrects_constant_cast(self, rng):
        refl = rng.uniform(0.1, 0.9, (32, 32))
        L = np.array([0.8, 0.5, 0.3])
        L = L / np.linalg.norm(L)
        img = refl[:, :, None] * (np.sqrt(3.0) * L)
        out = PixelwiseIlluminantEstimator().transform(img)
        gray = refl[:, :, None] * np.ones(3)
        assert np.abs(out - gray).max() < 1e-9

    def test_params_round_trip(self):
        est = PixelwiseIlluminantEstimator(algo="gray-edge:p=6,sigma=1",
                                           beta=16, sigma=12.0,
                                           confidence="whiteness")
        params = est.get_params()
        assert params == {"algo": "gray-edge:p=6,sigma=1", "beta": 16,
                          "sigma": 12.0, "confidence": "whiteness"}
        assert clone(est).get_params() == params

    def test_invalid_beta_rejected(self, rng):
        with pytest.raises(ConfigError):
            PixelwiseIlluminantEstimator(beta=1).fit(rng.uniform(0, 1, (8, 8, 3)))
