import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from causalfc.spectrum import (
    RescaledResponse,
    SampledResponse,
    prepare,
    rescale,
    restrict_to_band,
    symmetrize,
)


def resp(freqs, values=None, w_min=None, w_max=None):
    freqs = np.asarray(freqs, dtype=float)
    values = np.ones(freqs.size, dtype=complex) if values is None else values
    return SampledResponse.from_arrays(freqs, values, w_min, w_max)


class TestSampledResponse:
    def test_kind_follows_w_min(self):
        assert resp([0, 1, 2]).kind == "baseband"
        assert resp([1, 2, 3]).kind == "bandpass"

    @pytest.mark.parametrize(
        "freqs, msg",
        [([0, 1, 1], "duplicate"), ([0, 2, 1], "increasing"), ([1], "two samples")],
    )
    def test_rejects_bad_grids(self, freqs, msg):
        with pytest.raises(ValueError, match=msg):
            resp(freqs)

    def test_rejects_mismatched_lengths(self):
        with pytest.raises(ValueError, match="differ in length"):
            SampledResponse([0, 1], [1, 2, 3], 0, 1, "baseband")

    def test_rejects_samples_outside_band(self):
        with pytest.raises(ValueError, match="outside"):
            SampledResponse([0, 1, 2], [1, 1, 1], 0, 1.5, "baseband")

    def test_rejects_wrong_kind(self):
        with pytest.raises(ValueError, match="inconsistent"):
            SampledResponse([1, 2], [1, 1], 1, 2, "baseband")

    def test_rejects_nan(self):
        with pytest.raises(ValueError, match="non-finite"):
            resp([0, 1], np.array([1, np.nan]))

    def test_nonuniform_spacing_accepted(self):
        r = resp([0, 0.1, 0.5, 2.0])
        assert len(r) == 4


class TestRescale:
    @pytest.mark.parametrize("w, x", [(6, 0.5), (0, 0.0), (3, 0.25)])
    def test_map(self, w, x):
        r = rescale(resp([0, 3, 6], w_max=6))
        assert r.points[[0, 3, 6].index(w)] == x

    def test_gap_halfwidth(self):
        r = rescale(resp([1, 2, 4], w_min=1, w_max=4))
        assert r.gap_halfwidth == pytest.approx(0.125)

    def test_values_untouched(self):
        v = np.array([1 + 2j, 3 - 1j, 0.5j])
        assert np.array_equal(rescale(resp([1, 2, 3], v)).values, v)


class TestSymmetrize:
    def test_conjugate_mirror(self):
        out = symmetrize(RescaledResponse([0.25], [1 + 2j]))
        assert out.points.tolist() == [-0.25, 0.25]
        assert out.values.tolist() == [1 - 2j, 1 + 2j]

    def test_real_dc_not_duplicated(self):
        out = symmetrize(RescaledResponse([0.0], [2.8 + 0j]))
        assert len(out) == 1 and out.values[0] == 2.8

    def test_complex_dc_rejected(self):
        with pytest.raises(ValueError, match="not real"):
            symmetrize(RescaledResponse([0.0], [1 + 0.5j]))

    def test_idempotent(self):
        once = symmetrize(RescaledResponse([0.0, 0.2, 0.5], [1, 1j + 2, 3 - 1j]))
        assert symmetrize(once) is once

    def test_negative_asymmetric_input_rejected(self):
        with pytest.raises(ValueError, match="not conjugate-symmetric"):
            symmetrize(RescaledResponse([-0.2, 0.2], [1 + 1j, 1 + 1j]))

    def test_bandpass_keeps_gap_empty(self):
        out = prepare(resp([1, 2, 3, 4], np.arange(4) + 1j, w_min=1, w_max=4))
        a = out.gap_halfwidth
        assert not np.any(np.abs(out.points) < a)
        assert len(out) == 8

    @given(
        st.lists(st.floats(0.001, 100), min_size=2, max_size=30, unique=True),
        st.booleans(),
        st.integers(0, 2**32 - 1),
    )
    def test_even_real_odd_imag(self, freqs, with_dc, seed):
        freqs = sorted(freqs)
        if with_dc:
            freqs = [0.0] + freqs
        rng = np.random.default_rng(seed)
        vals = rng.standard_normal(len(freqs)) + 1j * rng.standard_normal(len(freqs))
        if with_dc:
            vals[0] = vals[0].real
        out = prepare(resp(freqs, vals, w_min=0.0 if with_dc else None))
        assert np.array_equal(out.points, -out.points[::-1])
        assert np.array_equal(out.values.real, out.values.real[::-1])
        assert np.array_equal(out.values.imag, -out.values.imag[::-1])
        assert len(out) == 2 * len(freqs) - (1 if with_dc else 0)


class TestRestrict:
    def setup_method(self):
        f = np.linspace(5e9 / 100, 5e9, 100)
        self.r = resp(f, w_min=f[0], w_max=5e9)

    def test_filter(self):
        out = restrict_to_band(self.r, 1e9)
        assert out.w_max == 1e9 and out.freqs.max() <= 1e9 and len(out) == 20

    def test_identity(self):
        out = restrict_to_band(self.r, 5e9)
        assert np.array_equal(out.freqs, self.r.freqs)

    def test_too_few(self):
        with pytest.raises(ValueError, match="fewer than two"):
            restrict_to_band(self.r, 0.5 * (self.r.freqs[0] + self.r.freqs[1]))
