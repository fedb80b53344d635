import json

import numpy as np
import pytest

from pixelwb import illusions, pipeline
from pixelwb.errors import DegenerateSpecError


SMALL = dict(width=128, height=128)


class TestIllusionSpec:
    def test_defaults_valid(self):
        spec = illusions.IllusionSpec()
        assert spec.pattern == "stripe_grating"
        assert spec.period == pytest.approx(100.0 / spec.inducer_frequency)

    @pytest.mark.parametrize("kw", [
        dict(pattern="nope"), dict(width=10), dict(inducer_thickness=-1),
        dict(inducer_frequency=0), dict(inducer_colors=()),
        dict(background=(1.5, 0, 0)), dict(target_color=(0, 0, -0.1)),
    ])
    def test_validation(self, kw):
        with pytest.raises(DegenerateSpecError):
            illusions.IllusionSpec(**kw)

    def test_json_round_trip(self):
        spec = illusions.IllusionSpec(pattern="concentric_disks",
                                      inducer_frequency=7.5,
                                      target_geometry={"segment_len": 10})
        back = illusions.IllusionSpec.from_json(spec.to_json())
        assert back == spec

    def test_unknown_field_rejected(self):
        with pytest.raises(DegenerateSpecError, match="unknown"):
            illusions.IllusionSpec.from_json(json.dumps({"wobble": 3}))

    def test_bad_json_rejected(self):
        with pytest.raises(DegenerateSpecError):
            illusions.IllusionSpec.from_json("{nope")


class TestGenerate:
    @pytest.mark.parametrize("pattern", illusions.PATTERNS)
    def test_masks_disjoint_and_exact_colors(self, pattern):
        spec = illusions.IllusionSpec(pattern=pattern, **SMALL)
        stim = illusions.generate_illusion(spec)
        assert not (stim.target_mask & stim.inducer_mask).any()
        assert stim.target_mask.any() and stim.inducer_mask.any()
        assert np.allclose(stim.image[stim.target_mask],
                           spec.target_color, atol=1e-12)
        outside = ~stim.target_mask & ~stim.inducer_mask
        assert np.allclose(stim.image[outside], spec.background, atol=1e-12)

    def test_deterministic(self):
        spec = illusions.IllusionSpec(**SMALL)
        a = illusions.generate_illusion(spec)
        b = illusions.generate_illusion(spec)
        assert np.array_equal(a.image, b.image)

    def test_frequency_scales_inducer_count(self):
        low = illusions.generate_illusion(
            illusions.IllusionSpec(inducer_frequency=5.0, **SMALL))
        high = illusions.generate_illusion(
            illusions.IllusionSpec(inducer_frequency=10.0, **SMALL))
        assert high.inducer_mask.sum() > 1.5 * low.inducer_mask.sum()

    def test_empty_target_geometry_rejected(self):
        spec = illusions.IllusionSpec(
            target_geometry={"segment_phase": 10_000}, **SMALL)
        with pytest.raises(DegenerateSpecError):
            illusions.generate_illusion(spec)


class TestExtractTarget:
    def test_target_only_view(self):
        spec = illusions.IllusionSpec(**SMALL)
        stim = illusions.generate_illusion(spec)
        view = illusions.extract_target(stim)
        assert np.allclose(view[stim.target_mask], spec.target_color)
        assert np.allclose(view[~stim.target_mask], spec.background)
        # gray target on gray background: zero variance before processing
        assert view.std() == 0.0

    def test_inducers_only_fill(self):
        spec = illusions.IllusionSpec(**SMALL)
        stim = illusions.generate_illusion(spec)
        view = illusions.extract_target(stim, fill=(0, 0, 0), inducers_only=True)
        assert np.allclose(view[stim.inducer_mask], 0.0)
        assert np.allclose(view[stim.target_mask], spec.target_color)


class TestAssimilationShift:
    def test_identity_output_zero_shift(self):
        spec = illusions.IllusionSpec(**SMALL)
        stim = illusions.generate_illusion(spec)
        shifts = illusions.assimilation_shift(stim, stim.image)
        assert len(shifts) > 1
        for s in shifts:
            assert s.delta_deg == pytest.approx(0.0, abs=1e-9)
            assert s.area > 0 and len(s.inducer_rgb) == 3

    def test_synthetic_move_toward_inducer_is_positive(self):
        spec = illusions.IllusionSpec(**SMALL)
        stim = illusions.generate_illusion(spec)
        base = illusions.assimilation_shift(stim, stim.image)
        from scipy import ndimage
        labels, _ = ndimage.label(stim.target_mask,
                                  structure=np.ones((3, 3), dtype=bool))
        out = stim.image.copy()
        # drag every target region 30% toward its own local inducer color
        for s in base:
            region = labels == s.region
            out[region] = (0.7 * out[region]
                           + 0.3 * np.asarray(s.inducer_rgb))
        shifts = illusions.assimilation_shift(stim, out)
        assert all(s.delta_deg > 0 for s in shifts)

    def test_shape_mismatch(self):
        spec = illusions.IllusionSpec(**SMALL)
        stim = illusions.generate_illusion(spec)
        with pytest.raises(DegenerateSpecError):
            illusions.assimilation_shift(stim, np.ones((64, 64, 3)))

    def test_pipeline_produces_positive_shift(self):
        # desk-scale version of the reproduction property on one stimulus
        spec = illusions.IllusionSpec(width=256, height=256)
        stim = illusions.generate_illusion(spec)
        res = pipeline.run_pipeline(stim.image)
        out = np.clip(pipeline.apply_correction(stim.image, res.field), 0, 1)
        shifts = illusions.assimilation_shift(stim, out)
        deltas = np.array([s.delta_deg for s in shifts])
        assert deltas.mean() > 0


class TestDefaultLadder:
    def test_ladder_composition(self):
        specs = illusions.default_ladder()
        assert len(specs) == 6
        patterns = [s.pattern for s in specs]
        assert patterns.count("stripe_grating") == 4
        assert "concentric_disks" in patterns and "ring_lattice" in patterns
        freqs = [s.inducer_frequency for s in specs[:4]]
        assert freqs == illusions.frequency_ladder()
        assert freqs == sorted(freqs)
