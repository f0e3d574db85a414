import math

import numpy as np
import pytest

from arraybeam import ParameterError, disk_grid, dome_grid, sweep_1d


class TestSweep:
    def test_two_cells(self):
        g = sweep_1d(math.pi / 2)
        np.testing.assert_allclose(g.coords[:, 0], [-math.pi / 4, math.pi / 4])

    def test_hundredth_degree(self):
        assert len(sweep_1d(math.radians(0.01))) == 18000

    @pytest.mark.parametrize("step", [0.0, -0.1, math.pi])
    def test_bad_step(self, step):
        with pytest.raises(ParameterError):
            sweep_1d(step)

    def test_weights_and_symmetry(self):
        g = sweep_1d(math.radians(0.37))
        assert g.weights.sum() == pytest.approx(1.0)
        th = np.sort(g.coords[:, 0])
        np.testing.assert_allclose(th, -th[::-1], atol=1e-15)

    def test_matches_quadrature(self):
        # midpoint rule against the closed form mean of |cos| on [-pi/2, pi/2]
        g = sweep_1d(math.radians(0.05))
        mean = g.weights @ np.abs(np.cos(g.coords[:, 0]))
        assert mean == pytest.approx(2 / math.pi, rel=1e-7)


class TestDome:
    def test_four_nodes(self):
        assert len(dome_grid(math.pi / 2, math.pi / 2)) == 4

    def test_default_radius(self):
        g = dome_grid(math.radians(10))
        np.testing.assert_allclose(np.linalg.norm(g.points, axis=1), 100.0)

    def test_axis_node(self):
        g = dome_grid(math.radians(60))  # 3 x 3 cells, centre node at (0, 0)
        k = int(np.argmin(np.abs(g.coords).sum(axis=1)))
        np.testing.assert_allclose(g.points[k], [0, 0, 100.0], atol=1e-12)

    @pytest.mark.parametrize("convention", ["azel", "polar"])
    def test_sign_flip_symmetry(self, convention):
        g = dome_grid(math.radians(7.5), convention=convention)
        for flip in ([-1, 1], [1, -1]):
            flipped = {tuple(np.round(c * flip, 12)) for c in g.coords}
            assert flipped == {tuple(np.round(c, 12)) for c in g.coords}

    def test_refinement(self):
        assert len(dome_grid(math.radians(2))) >= 4 * len(dome_grid(math.radians(4)))

    def test_bad_radius(self):
        with pytest.raises(ParameterError):
            dome_grid(0.1, radius=0.0)


class TestDisk:
    def test_cartesian_area(self):
        Rs = 2.0
        g = disk_grid(Rs, 0.1, Rs / 100, scheme="cartesian")
        area = len(g) * (Rs / 100) ** 2
        assert area == pytest.approx(math.pi * Rs**2, rel=0.01)

    def test_origin_present(self):
        g = disk_grid(2.0, 0.1, 0.05, scheme="cartesian")
        assert np.any(np.all(g.points == [0.0, 0.0, 0.1], axis=1))

    @pytest.mark.parametrize("scheme", ["cartesian", "polar"])
    def test_inside_and_height(self, scheme):
        g = disk_grid(2.0, 0.1, 0.04, scheme=scheme)
        assert np.all(np.hypot(g.points[:, 0], g.points[:, 1]) <= 2.0 + 1e-12)
        assert np.all(g.points[:, 2] == 0.1)
        assert g.weights.sum() == pytest.approx(1.0)

    @pytest.mark.parametrize("scheme", ["cartesian", "polar"])
    def test_sign_flip_symmetry(self, scheme):
        g = disk_grid(1.5, 0.2, 0.07, scheme=scheme)
        pts = {tuple(np.round(p[:2], 9)) for p in g.points}
        for flip in ([-1, 1], [1, -1]):
            assert {tuple(np.round(p[:2] * flip, 9) + 0.0) for p in g.points} == pts

    @pytest.mark.parametrize("scheme", ["cartesian", "polar"])
    def test_refinement(self, scheme):
        # lattice boundary effects keep the Cartesian ratio a little under 4
        ratio = len(disk_grid(2, 0.1, 0.05, scheme)) / len(disk_grid(2, 0.1, 0.1, scheme))
        assert ratio >= (4.0 if scheme == "polar" else 3.9)

    @pytest.mark.parametrize("kw", [dict(Rs=2, Hs=0.1, ds=2.0), dict(Rs=2, Hs=0, ds=0.1),
                                    dict(Rs=-1, Hs=0.1, ds=0.1)])
    def test_bad_params(self, kw):
        with pytest.raises(ParameterError):
            disk_grid(**kw)

    def test_polar_rectangle_average(self):
        # equal weights in (r, angle): the mean of r is Rs / 2, not 2 Rs / 3
        g = disk_grid(2.0, 0.1, 0.01)
        r = np.hypot(g.points[:, 0], g.points[:, 1])
        assert g.weights @ r == pytest.approx(1.0, rel=1e-9)

    def test_csv(self):
        text = disk_grid(1.0, 0.1, 0.25, scheme="cartesian").to_csv()
        lines = text.splitlines()
        assert lines[0].startswith("# arraybeam/v1")
        assert lines[1] == "xs,ys,x,y,z,weight"
