import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from lislimits import Medium, make_parallel_link, make_perpendicular_link
from lislimits.linkbudget import (
    SmallTransmitterWarning,
    capacity_gain,
    coupling_intensity,
    coupling_intensity_green,
    friis_factors,
    friis_gain,
    gain_closed,
    gain_closed_square,
    gain_friis,
    gain_large_lis,
    gain_numeric,
    gain_report,
    spatial_density,
    transmit_aperture_gain,
)
from lislimits.quadrature import QuadratureSpec

CM = 0.01
# independent high-precision quadrature of the flux integral at F = 1
GAIN_F1 = 18.8671719255402263
G_LARGE_LIS = 104.719755119659775
CAPACITY_20_100 = 7.76473534196846595


def _link(d, rx, tx=(5 * CM, 5 * CM), offset=(0.0, 0.0), lam=CM):
    return make_parallel_link(d, tx, rx, offset, medium=Medium(lam))


def _dblquad_gain(link):
    sx, sy, d = link.rx.len_u, link.rx.len_v, link.d
    x0, y0 = link.tx.center[:2]

    def f(y, x):
        rho = np.sqrt((x - x0) ** 2 + (y - y0) ** 2 + d * d)
        return ((y - y0) ** 2 + d * d) * d / rho**5

    val, _ = integrate.dblquad(f, -sx / 2, sx / 2, -sy / 2, sy / 2, epsabs=0, epsrel=1e-12)
    return link.tx.area / link.medium.wavelength**2 * val


def test_gain_at_unit_F():
    link = _link(5.0, (5.0, 5.0))
    assert gain_closed(link) == pytest.approx(GAIN_F1, rel=1e-12)
    assert gain_closed_square(1.0, 25e-4, CM) == pytest.approx(GAIN_F1, rel=1e-12)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SmallTransmitterWarning)
        assert gain_numeric(link) == pytest.approx(GAIN_F1, rel=1e-9)


@pytest.mark.parametrize(
    "d, rx", [(5.0, (5.0, 5.0)), (2.0, (8.0, 3.0)), (2.0, (3.0, 8.0)), (40.0, (1.0, 2.0)), (0.3, (20.0, 20.0))]
)
def test_closed_form_against_dblquad(d, rx):
    link = _link(d, rx)
    assert gain_closed(link) == pytest.approx(_dblquad_gain(link), rel=1e-10)


def test_offset_gain_against_dblquad():
    link = _link(3.0, (4.0, 6.0), offset=(1.5, -0.7))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SmallTransmitterWarning)
        assert gain_numeric(link) == pytest.approx(_dblquad_gain(link), rel=1e-9)
    with pytest.raises(ValueError):
        gain_closed(link)


def test_closed_form_orientation_dependence():
    # the x-polarized closed form is not symmetric in S_x and S_y
    g_long_x = gain_closed(_link(2.0, (8.0, 2.0)))
    g_long_y = gain_closed(_link(2.0, (2.0, 8.0)))
    assert g_long_x != pytest.approx(g_long_y, rel=1e-3)


def test_square_form_matches_rectangular():
    for F in (1e-3, 0.1, 1.0, 10.0, 1e4):
        d = 3.0
        side = d / np.sqrt(F)
        link = _link(d, (side, side))
        assert gain_closed_square(F, link.tx.area, CM) == pytest.approx(gain_closed(link), rel=1e-11)


def test_gain_closed_square_vectorized():
    F = np.logspace(-3, 3, 7)
    out = gain_closed_square(F, 1.0, 1.0)
    assert out.shape == F.shape
    assert np.all(np.diff(out) < 0)
    with pytest.raises(ValueError):
        gain_closed_square(0.0, 1.0, 1.0)


def test_large_lis_value():
    assert gain_large_lis(25e-4, CM) == pytest.approx(G_LARGE_LIS, rel=1e-14)
    assert gain_large_lis(25e-4, CM) / transmit_aperture_gain(25e-4, CM) == pytest.approx(1 / 3)


def test_friis_factors_product():
    link = _link(1000.0, (2.0, 2.0))
    gt, gr, gi = friis_factors(link)
    assert gt * gr * gi == pytest.approx(gain_friis(link), rel=1e-14)
    assert friis_gain(1.0, 1.0, 1.0, 1.0) == 1.0


def test_friis_recovered_far_away():
    link = _link(1e3, (2.0, 2.0))
    assert gain_closed(link) == pytest.approx(gain_friis(link), rel=1e-5)


def test_small_transmitter_warning():
    link = _link(5.0, (5.0, 5.0), tx=(1.0, 1.0))
    with pytest.warns(SmallTransmitterWarning):
        gain_numeric(link)


def test_gain_requires_parallel():
    link = make_perpendicular_link(5.0, (5 * CM, 5 * CM), (5, 5), medium=Medium(CM))
    with pytest.raises(ValueError):
        gain_numeric(link)
    with pytest.raises(ValueError):
        gain_closed(link)


def test_coupling_intensity_two_ways():
    link = make_parallel_link(3.0, (0.5, 0.5), (2.0, 1.0), medium=Medium(0.1))
    spec = QuadratureSpec(rel_tol=1e-9)
    a = coupling_intensity(link, spec)
    b = coupling_intensity_green(link, spec)
    assert a == pytest.approx(b, rel=1e-8)
    # far apart, the coupling intensity reduces to the Friis gain
    far = make_parallel_link(200.0, (0.5, 0.5), (2.0, 1.0), medium=Medium(0.1))
    assert coupling_intensity(far, spec) == pytest.approx(gain_friis(far), rel=1e-4)


def test_gain_report_fields():
    r = gain_report(_link(5.0, (5.0, 5.0)))
    assert r.g_closed == pytest.approx(GAIN_F1, rel=1e-12)
    assert r.normalized_gain == pytest.approx(GAIN_F1 / transmit_aperture_gain(25e-4, CM))
    off = gain_report(_link(5.0, (5.0, 5.0), offset=(1.0, 0.0)))
    assert off.g_closed is None


def test_capacity_gain_value():
    assert capacity_gain(20, 100.0) == pytest.approx(CAPACITY_20_100, rel=1e-14)
    assert capacity_gain(1, 3.0) == 1.0
    with pytest.raises(ValueError):
        capacity_gain(0, 10.0)
    with pytest.raises(ValueError):
        capacity_gain(2, 0.0)


@given(st.integers(1, 200), st.floats(1e-3, 1e6))
def test_capacity_gain_bounds(D, snr):
    g = capacity_gain(D, snr)
    assert 1 - 1e-12 <= g <= D * (1 + 1e-12)
    assert capacity_gain(D + 1, snr) >= g * (1 - 1e-12)


def test_spatial_density():
    assert spatial_density(20, 25e-4) == pytest.approx(8000, rel=1e-15)
    with pytest.raises(ValueError):
        spatial_density(20, 0.0)
