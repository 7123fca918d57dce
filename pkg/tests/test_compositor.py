import numpy as np
import pytest

from pulsekit import (
    AnimationConfig,
    DimensionError,
    EmptyMask,
    FrameBuffer,
    InputError,
    MaskCountError,
    PerfusionMask,
    PHYSIO_WEIGHTS,
    SamplingError,
    TraceLengthError,
    VideoSequence,
    animate,
    augment_frame,
    synth_physio,
    synth_sine,
)
from conftest import make_face


def gray_frame(value=0.5, size=4):
    return FrameBuffer(np.full((size, size, 3), value))


def ones(size=4):
    return PerfusionMask(np.ones((size, size)))


class TestAugmentFrame:
    def test_physio_example(self):
        out = augment_frame(gray_frame(0.5, 1), PerfusionMask([[0.8]]), 0.5, 0.15, PHYSIO_WEIGHTS)
        assert out.pixels[0, 0, 0] == pytest.approx(0.5138, abs=1e-9)
        assert out.pixels[0, 0, 1] == pytest.approx(0.5246, abs=1e-9)
        assert out.pixels[0, 0, 2] == pytest.approx(0.5216, abs=1e-9)

    def test_gamma_zero_is_identity(self):
        frame = make_face(8, 8)
        out = augment_frame(frame, ones(8), -0.5, 0.0, PHYSIO_WEIGHTS)
        assert np.array_equal(out.pixels, frame.pixels)

    def test_clamp_at_white(self):
        out = augment_frame(gray_frame(0.99, 1), ones(1), 1.0, 0.75, PHYSIO_WEIGHTS)
        assert out.pixels[0, 0, 0] == 1.0

    def test_clamp_at_black(self):
        out = augment_frame(gray_frame(0.01, 1), ones(1), -1.0, 0.75, PHYSIO_WEIGHTS)
        assert out.pixels[0, 0, 0] == 0.0

    def test_masked_out_pixels_untouched(self):
        frame = make_face(8, 8)
        grid = np.zeros((8, 8))
        grid[:4, :] = 1.0
        out = augment_frame(frame, PerfusionMask(grid), 0.5, 0.15, PHYSIO_WEIGHTS)
        assert np.array_equal(out.pixels[4:], frame.pixels[4:])
        assert not np.array_equal(out.pixels[:4], frame.pixels[:4])

    def test_input_not_modified(self):
        frame = make_face(8, 8)
        before = frame.pixels.copy()
        augment_frame(frame, ones(8), 0.9, 0.75, PHYSIO_WEIGHTS)
        assert np.array_equal(frame.pixels, before)

    def test_shape_mismatch(self):
        with pytest.raises(DimensionError):
            augment_frame(gray_frame(0.5, 4), ones(5), 0.1, 0.15, PHYSIO_WEIGHTS)

    def test_empty_mask(self):
        with pytest.raises(EmptyMask):
            augment_frame(gray_frame(0.5, 4), PerfusionMask(np.zeros((4, 4))), 0.1, 0.15, PHYSIO_WEIGHTS)

    def test_negative_gamma(self):
        with pytest.raises(InputError):
            augment_frame(gray_frame(0.5, 4), ones(4), 0.1, -0.2, PHYSIO_WEIGHTS)

    def test_gamma_linearity_below_clamp(self):
        frame = make_face(8, 8)
        mask = PerfusionMask(np.random.default_rng(6).random((8, 8)))
        lo = augment_frame(frame, mask, 0.8, 0.1, PHYSIO_WEIGHTS)
        hi = augment_frame(frame, mask, 0.8, 0.2, PHYSIO_WEIGHTS)
        dev_lo = lo.pixels - frame.pixels
        dev_hi = hi.pixels - frame.pixels
        assert np.allclose(dev_hi, 2.0 * dev_lo, atol=1e-14)

    def test_monotone_in_mask(self):
        frame = make_face(8, 8)
        rng = np.random.default_rng(7)
        weak = rng.random((8, 8)) * 0.5
        strong = weak + 0.3
        out_weak = augment_frame(frame, PerfusionMask(weak), 0.9, 0.75, PHYSIO_WEIGHTS)
        out_strong = augment_frame(frame, PerfusionMask(strong), 0.9, 0.75, PHYSIO_WEIGHTS)
        assert (out_strong.pixels >= out_weak.pixels - 1e-15).all()

    def test_output_always_in_range(self):
        rng = np.random.default_rng(8)
        for _ in range(20):
            frame = FrameBuffer(rng.random((6, 6, 3)))
            mask = PerfusionMask(rng.random((6, 6)))
            pulse = float(rng.uniform(-3, 3))
            gamma = float(rng.uniform(0, 5))
            out = augment_frame(frame, mask, pulse, gamma, PHYSIO_WEIGHTS)
            assert out.pixels.min() >= 0.0
            assert out.pixels.max() <= 1.0


class TestAnimate:
    def test_static_source_replication(self):
        face = make_face(8, 8)
        trace = synth_physio(60, 30, 10)
        config = AnimationConfig()
        video = animate(face, ones(8), trace, config)
        assert len(video) == 300
        assert video.fps == 30.0
        direct = augment_frame(face, ones(8), float(trace.samples[7]), 0.15, PHYSIO_WEIGHTS)
        assert np.array_equal(video.frames[7].pixels, direct.pixels)

    def test_gamma_zero_bit_identical(self):
        face = make_face(8, 8)
        trace = synth_physio(60, 30, 10)
        video = animate(face, ones(8), trace, AnimationConfig(gamma=0.0))
        assert all(np.array_equal(f.pixels, face.pixels) for f in video.frames)

    def test_red_baseline_leaves_green_blue(self):
        face = make_face(8, 8)
        trace = synth_physio(60, 30, 10)
        video = animate(face, ones(8), trace, AnimationConfig(weight_mode="red-baseline"))
        for t in (0, 150, 299):
            assert np.array_equal(video.frames[t].pixels[:, :, 1], face.pixels[:, :, 1])
            assert np.array_equal(video.frames[t].pixels[:, :, 2], face.pixels[:, :, 2])
        assert not np.array_equal(video.frames[7].pixels[:, :, 0], face.pixels[:, :, 0])

    def test_green_mean_closed_form(self):
        trace = synth_sine(60, 30, 10)
        video = animate(gray_frame(0.5, 4), ones(4), trace, AnimationConfig())
        means = np.array([f.pixels[:, :, 1].mean() for f in video.frames])
        expected = 0.5 + 0.15 * 0.41 * trace.samples
        assert np.abs(means - expected).max() <= 1e-6

    def test_channel_amplitude_ratios(self):
        face = make_face(16, 16)
        trace = synth_physio(60, 30, 10)
        video = animate(face, ones(16), trace, AnimationConfig())
        stds = [np.std([f.pixels[:, :, c].mean() for f in video.frames]) for c in range(3)]
        assert stds[1] / stds[0] == pytest.approx(0.41 / 0.23, rel=0.01)
        assert stds[2] / stds[0] == pytest.approx(0.36 / 0.23, rel=0.01)

    def test_sequence_source(self):
        face = make_face(8, 8)
        source = VideoSequence((face,) * 150, 30.0)
        trace = synth_physio(60, 30, 10)
        config = AnimationConfig(duration_s=5.0)
        video = animate(source, ones(8), trace, config)
        assert len(video) == 150

    def test_per_frame_masks(self):
        face = make_face(8, 8)
        trace = synth_physio(60, 30, 10)
        masks = [ones(8)] * 300
        video = animate(face, masks, trace, AnimationConfig())
        assert len(video) == 300

    def test_single_mask_in_list(self):
        face = make_face(8, 8)
        trace = synth_physio(60, 30, 10)
        video = animate(face, [ones(8)], trace, AnimationConfig())
        assert len(video) == 300

    def test_wrong_mask_count(self):
        face = make_face(8, 8)
        trace = synth_physio(60, 30, 10)
        with pytest.raises(MaskCountError):
            animate(face, [ones(8)] * 2, trace, AnimationConfig())

    def test_short_trace(self):
        face = make_face(8, 8)
        trace = synth_physio(60, 30, 5)
        with pytest.raises(TraceLengthError):
            animate(face, ones(8), trace, AnimationConfig(duration_s=10.0))

    def test_trace_rate_mismatch(self):
        face = make_face(8, 8)
        trace = synth_physio(60, 25, 10)
        with pytest.raises(SamplingError):
            animate(face, ones(8), trace, AnimationConfig(fps=30.0))

    def test_source_rate_mismatch(self):
        face = make_face(8, 8)
        source = VideoSequence((face,) * 100, 25.0)
        trace = synth_physio(60, 30, 10)
        with pytest.raises(SamplingError):
            animate(source, ones(8), trace, AnimationConfig(fps=30.0))

    def test_deterministic(self):
        face = make_face(8, 8)
        trace = synth_physio(60, 30, 10)
        a = animate(face, ones(8), trace, AnimationConfig())
        b = animate(face, ones(8), trace, AnimationConfig())
        assert all(np.array_equal(x.pixels, y.pixels) for x, y in zip(a.frames, b.frames))
