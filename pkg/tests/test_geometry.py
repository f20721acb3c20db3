import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lislimits import GeometryError, Medium, RectSurface, grid, make_parallel_link, make_perpendicular_link
from lislimits.geometry import min_distance

CM = 0.01


def test_medium_constants():
    m = Medium(0.01)
    assert m.wavenumber * m.wavelength == pytest.approx(2 * np.pi, rel=1e-12)
    assert m.impedance == pytest.approx(376.730313, rel=1e-8)
    assert m.angular_frequency == pytest.approx(m.wavenumber * m.speed_of_light)


def test_medium_rejects_nonpositive_wavelength():
    with pytest.raises(GeometryError):
        Medium(0.0)


def test_factory_link_has_unit_F():
    link = make_parallel_link(5.0, (5 * CM, 5 * CM), (5.0, 5.0), medium=Medium(CM))
    assert link.F == pytest.approx(1.0)
    assert link.d == 5.0
    assert np.allclose(link.tx.normal, [0, 0, 1]) and np.allclose(link.rx.normal, [0, 0, 1])


def test_unit_link_center_separation():
    link = make_parallel_link(1.0, (1, 1), (1, 1), medium=Medium(0.1))
    assert link.F == 1.0
    assert np.linalg.norm(np.subtract(link.tx.center, link.rx.center)) == 1.0


def test_F_for_2m_surface_at_10m():
    link = make_parallel_link(10.0, (0.1, 0.1), (2, 2), medium=Medium(CM))
    assert link.F == pytest.approx(25.0)
    assert 10 * np.log10(link.F) == pytest.approx(13.98, abs=0.01)


def test_perpendicular_link():
    link = make_perpendicular_link(5.0, (5 * CM, 5 * CM), (5, 5), medium=Medium(CM))
    assert link.F == pytest.approx(1.0)
    assert np.allclose(np.abs(link.tx.normal), [0, 1, 0])
    off = make_perpendicular_link(5.0, (5 * CM, 5 * CM), (5, 5), (1.0, 0.0), medium=Medium(CM))
    assert off.tx.center == (1.0, 0.0, 5.0)


@pytest.mark.parametrize("make", [make_parallel_link, make_perpendicular_link])
def test_reactive_near_field_rejected(make):
    with pytest.raises(GeometryError, match="near-field"):
        make(0.5 * CM, (CM, CM), (1, 1), medium=Medium(CM))


def test_nonpositive_sizes_rejected():
    with pytest.raises(GeometryError):
        make_parallel_link(5.0, (0, 1), (1, 1), medium=Medium(CM))
    with pytest.raises(GeometryError):
        make_parallel_link(5.0, (1, 1), (1, -1), medium=Medium(CM))


def test_min_distance_guard_for_perpendicular_tx_reaching_down():
    # tx spans z in [d - L_z/2, d + L_z/2]; its lower edge is only 0.5 lambda above the rx
    with pytest.raises(GeometryError):
        make_perpendicular_link(2.0, (1.0, 3.0), (4, 4), medium=Medium(1.0))


def test_min_distance_exact():
    a = RectSurface((0, 0, 0), (1, 0, 0), (0, 1, 0), 2, 2)
    b = RectSurface((3, 0, 4), (1, 0, 0), (0, 1, 0), 2, 2)
    # nearest points (1, y, 0) and (2, y, 4)
    assert min_distance(a, b) == pytest.approx(np.hypot(1, 4), rel=1e-9)


def test_surface_rejects_bad_axes():
    with pytest.raises(GeometryError):
        RectSurface((0, 0, 0), (1, 0, 0), (1, 1, 0), 1, 1)
    with pytest.raises(GeometryError):
        RectSurface((0, 0, 0), (2, 0, 0), (0, 1, 0), 1, 1)


@pytest.mark.parametrize(
    "side, delta, count",
    [((1.0, 1.0), 0.25, 16), ((5 * CM, 5 * CM), CM / 16, 6400)],
)
def test_grid_counts(side, delta, count):
    s = RectSurface((0, 0, 0), (1, 0, 0), (0, 1, 0), *side)
    g = grid(s, delta)
    assert g.size == count
    assert g.points.shape == (count, 3)


def test_grid_rejects_non_tiling():
    s = RectSurface((0, 0, 0), (1, 0, 0), (0, 1, 0), 1, 1)
    with pytest.raises(GeometryError):
        grid(s, 0.3)


def test_grid_points_are_patch_centers():
    s = RectSurface((1, 2, 3), (1, 0, 0), (0, 1, 0), 1, 0.5)
    g = grid(s, 0.25)
    xs = np.unique(g.points[:, 0])
    assert np.allclose(xs, 1 + np.array([-0.375, -0.125, 0.125, 0.375]))
    assert np.allclose(g.points.mean(axis=0), s.center)


@given(st.floats(0.05, 20.0))
def test_F_is_scale_invariant(factor):
    link = make_parallel_link(3.0, (0.2, 0.1), (4.0, 2.0), (0.3, -0.2), medium=Medium(0.1))
    assert link.scaled(factor).F == pytest.approx(link.F, rel=1e-12)


def test_swapped_link_keeps_distance():
    link = make_parallel_link(2.0, (2, 2), (8, 8), medium=Medium(1.0))
    sw = link.swapped()
    assert sw.tx == link.rx and sw.rx == link.tx
    assert sw.d == link.d
