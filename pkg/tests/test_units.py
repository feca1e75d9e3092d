import math

from hypothesis import given
from hypothesis import strategies as st

from disktrap import units as U

finite = st.floats(min_value=-1e12, max_value=1e12, allow_nan=False).filter(lambda x: abs(x) > 1e-12)


@given(finite)
def test_roundtrip_temperature(x):
    assert math.isclose(U.to_uK(U.uK(x)), x, rel_tol=1e-12)
    assert math.isclose(U.to_mK(U.mK(x)), x, rel_tol=1e-12)


@given(finite)
def test_roundtrip_frequency(x):
    assert math.isclose(U.to_MHz(U.MHz(x)), x, rel_tol=1e-12)
    assert math.isclose(U.to_kHz(U.kHz(x)), x, rel_tol=1e-12)


@given(finite)
def test_roundtrip_length_and_field(x):
    assert math.isclose(U.to_nm(U.nm(x)), x, rel_tol=1e-12)
    assert math.isclose(U.to_um(U.um(x)), x, rel_tol=1e-12)
    assert math.isclose(U.to_gauss(U.gauss(x)), x, rel_tol=1e-12)


def test_mhz_is_cyclic():
    assert math.isclose(U.MHz(1.0), 2 * math.pi * 1e6)
