import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from arraybeam import (
    ArchimedeanParams,
    ArrayLayout,
    EquiAreaParams,
    FourArmSpiralParams,
    GeometryError,
    LinearParams,
    ParameterError,
    RingParams,
    UnderbrinkParams,
    make_archimedean,
    make_concentric,
    make_equi_area,
    make_four_arm_spiral,
    make_layout,
    make_linear,
    make_underbrink,
)


def polar(layout):
    p = layout.positions
    return np.hypot(p[:, 0], p[:, 1]), np.degrees(np.arctan2(p[:, 1], p[:, 0]))


def same_point_set(a, b, tol=1e-9):
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        return False
    dist = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=2)
    return bool(np.all(dist.min(axis=1) < tol) and np.all(dist.min(axis=0) < tol))


class TestLinear:
    def test_two_point_line(self):
        pos = make_linear(LinearParams(2, 1.0)).positions
        np.testing.assert_array_equal(pos, [[0, 0, 0], [1, 0, 0]])

    def test_line4_configuration(self):
        x = make_linear(LinearParams(4, 0.2)).positions[:, 0]
        np.testing.assert_allclose(x, [0.0, 0.2, 0.4, 0.6], atol=1e-15)

    @pytest.mark.parametrize("N,d", [(1, 0.1), (4, 0.0), (4, -1.0)])
    def test_invalid(self, N, d):
        with pytest.raises(ParameterError):
            make_linear(LinearParams(N, d))


class TestConcentric:
    def test_two_point_rings(self):
        pos = make_concentric(RingParams(4, 1.0, 2.0)).positions
        np.testing.assert_allclose(pos[:, :2], [[1, 0], [-1, 0], [2, 0], [-2, 0]],
                                   atol=1e-15)

    def test_table1_rings(self):
        r, ang = polar(make_concentric(RingParams(16, 0.1, 0.5)))
        np.testing.assert_allclose(r[:8], 0.1)
        np.testing.assert_allclose(r[8:], 0.5)
        np.testing.assert_allclose(np.mod(ang[:8], 360), 45.0 * np.arange(8), atol=1e-9)

    def test_odd_count(self):
        with pytest.raises(ParameterError, match="even"):
            make_concentric(RingParams(15, 0.1, 0.5))

    def test_ring_offsets_rotate_rings(self):
        r, ang = polar(make_concentric(RingParams(8, 0.1, 0.5, offsets=(0.0, 45.0))))
        assert ang[4] == pytest.approx(45.0)

    def test_pitch_rotation_symmetry(self):
        pos = make_concentric(RingParams(16, 0.1, 0.5)).positions
        t = math.radians(45.0)
        rot = np.array([[math.cos(t), -math.sin(t), 0], [math.sin(t), math.cos(t), 0],
                        [0, 0, 1]])
        assert same_point_set(pos @ rot.T, pos)


class TestFourArm:
    def test_two_per_arm(self):
        r, ang = polar(make_four_arm_spiral(FourArmSpiralParams(8, 1.0, 2.0)))
        assert (r[0], ang[0]) == pytest.approx((1.0, 0.0))
        assert (r[1], ang[1]) == pytest.approx((2.0, 45.0))

    def test_table1_tails(self):
        r, ang = polar(make_four_arm_spiral(FourArmSpiralParams(16, 0.1, 0.5)))
        assert r[3] == pytest.approx(0.5)
        assert ang[3] == pytest.approx(45.0)
        heads = np.mod(ang[::4], 360)
        np.testing.assert_allclose(heads, [0, 90, 180, 270], atol=1e-9)
        np.testing.assert_allclose(np.mod(ang[3::4], 360), [45, 135, 225, 315], atol=1e-9)

    @pytest.mark.parametrize("N", [6, 4, 0])
    def test_invalid_count(self, N):
        with pytest.raises(ParameterError):
            make_four_arm_spiral(FourArmSpiralParams(N, 0.1, 0.5))


class TestArchimedean:
    def test_endpoints(self):
        r, ang = polar(make_archimedean(ArchimedeanParams(2, 1.0, 2.0, 90.0)))
        assert (r[0], ang[0]) == pytest.approx((1.0, 0.0))
        assert (r[1], ang[1]) == pytest.approx((2.0, 90.0))

    def test_table1_ninth_mic(self):
        r, ang = polar(make_archimedean(ArchimedeanParams(16, 0.1, 0.5, 90.0)))
        assert r[8] == pytest.approx(0.31333333333333335, abs=1e-12)
        assert ang[8] == pytest.approx(48.0, abs=1e-9)

    def test_single_mic(self):
        with pytest.raises(ParameterError):
            make_archimedean(ArchimedeanParams(1, 0.1, 0.5, 90.0))


class TestUnderbrink:
    params = UnderbrinkParams(4, 4, 0.1, 0.5, 5 * math.pi / 16)

    def test_second_radius(self):
        r, _ = polar(make_underbrink(self.params))
        assert r[1] == pytest.approx(0.22360679774997896, abs=1e-12)

    def test_count_and_inner_circle(self):
        layout = make_underbrink(self.params)
        r, ang = polar(layout)
        assert layout.n_mics == 16
        np.testing.assert_allclose(r[::4], 0.1)
        np.testing.assert_allclose(np.mod(ang[::4], 360), [0, 90, 180, 270], atol=1e-9)

    def test_first_mic_single_arm(self):
        r, ang = polar(make_underbrink(UnderbrinkParams(1, 2, 1.0, 2.0, 1.0)))
        assert (r[0], ang[0]) == pytest.approx((1.0, 0.0))

    def test_log_spiral_angle(self):
        _, ang = polar(make_underbrink(self.params))
        r2 = math.sqrt(1 / 5) * 0.5
        expected = 180 * math.log(r2 / 0.1) * math.tan(5 * math.pi / 16) / math.pi
        assert ang[1] == pytest.approx(expected)

    def test_equal_area_annuli(self):
        Nm, R2 = 6, 0.5
        layout = make_underbrink(UnderbrinkParams(3, Nm, 0.05, R2, 1.0))
        r, _ = polar(layout)
        sq = r[1:Nm] ** 2
        np.testing.assert_allclose(np.diff(sq), 2 * R2**2 / (2 * Nm - 3), rtol=1e-12)

    @pytest.mark.parametrize("nu", [0.0, math.pi / 2, 2.0])
    def test_bad_spiral_angle(self, nu):
        with pytest.raises(ParameterError):
            make_underbrink(UnderbrinkParams(4, 4, 0.1, 0.5, nu))


class TestEquiArea:
    params = EquiAreaParams(16, 11, 0.5)

    def test_outer_ring_radius(self):
        s1, _ = self.params.ring_sizes()
        assert s1 == pytest.approx(0.1099030196813064, abs=1e-12)
        r, _ = polar(make_equi_area(self.params))
        np.testing.assert_allclose(r[:11], 0.5 - 0.1099030196813064, atol=1e-12)

    def test_outer_ring_pitch(self):
        _, ang = polar(make_equi_area(self.params))
        step = np.diff(np.unwrap(np.radians(ang[:11])))
        np.testing.assert_allclose(np.degrees(step), 360 / 11, atol=1e-9)

    def test_inner_ring(self):
        s1, s2 = self.params.ring_sizes()
        r, _ = polar(make_equi_area(self.params))
        np.testing.assert_allclose(r[11:], 0.5 - 2 * s1 - s2, atol=1e-12)

    def test_equal_circles_touch(self):
        # neighbouring outer mics are 2*s1 apart and the circles fit inside R
        s1, s2 = self.params.ring_sizes()
        pos = make_equi_area(self.params).positions
        assert np.linalg.norm(pos[0] - pos[1]) == pytest.approx(2 * s1)
        inner = pos[11:]
        assert np.linalg.norm(inner[0] - inner[1]) == pytest.approx(2 * s2)

    def test_degenerate(self):
        with pytest.raises(ParameterError):
            make_equi_area(EquiAreaParams(2, 1, 1.0))

    def test_outer_ring_rotation_symmetry(self):
        pos = make_equi_area(self.params).positions[:11]
        t = 2 * math.pi / 11
        rot = np.array([[math.cos(t), -math.sin(t), 0], [math.sin(t), math.cos(t), 0],
                        [0, 0, 1]])
        assert same_point_set(pos @ rot.T, pos)


class TestLayout:
    def test_coincident_rejected(self):
        with pytest.raises(GeometryError):
            ArrayLayout([[0, 0, 0], [0, 0, 0]])

    def test_off_plane_rejected(self):
        with pytest.raises(GeometryError):
            ArrayLayout([[0, 0, 1.0]])

    def test_nonfinite_rejected(self):
        with pytest.raises(GeometryError):
            ArrayLayout([[np.nan, 0.0]])

    def test_json_round_trip(self, tmp_path, layouts):
        for layout in layouts.values():
            path = tmp_path / "layout.json"
            layout.to_json(path)
            back = ArrayLayout.from_json(path)
            np.testing.assert_array_equal(back.positions, layout.positions)
            assert back.design == layout.design
            assert json.loads(path.read_text())["format"] == "arraybeam/v1"

    def test_make_layout_dispatch(self):
        layout = make_layout("equi-area", N=16, N_OR=11, R=0.5)
        assert layout.design == "equi_area" and layout.n_mics == 16

    def test_mics_view(self):
        mics = make_linear(LinearParams(2, 1.0)).mics
        assert mics[1].x == 1.0 and mics[1].z == 0.0


@settings(max_examples=60, deadline=None)
@given(N=st.integers(2, 40), R1=st.floats(0.01, 1.0), span=st.floats(0.01, 2.0),
       phi=st.floats(1.0, 1080.0))
def test_generators_valid_and_deterministic(N, R1, span, phi):
    R2 = R1 + span
    builders = [lambda: make_archimedean(ArchimedeanParams(N, R1, R2, phi)),
                lambda: make_concentric(RingParams(2 * N, R1, R2)),
                lambda: make_four_arm_spiral(FourArmSpiralParams(4 * N, R1, R2)),
                lambda: make_underbrink(UnderbrinkParams(3, N, R1, R2, 1.2))]
    for build in builders:
        try:
            a = build()
        except GeometryError:
            continue  # some spirals wrap onto themselves; rejection is the contract
        b = build()
        assert np.array_equal(a.positions, b.positions)
        assert np.all(a.positions[:, 2] == 0) and np.all(np.isfinite(a.positions))
