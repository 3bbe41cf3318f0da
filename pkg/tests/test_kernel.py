"""Both series kernels must agree term by term."""

from hypothesis import given, strategies as st

from conftest import series_in
from crembed.series import BACKEND, Ring
from crembed.series import _kernel_py
from crembed.series.core import mul


def _raw(s):
    return s._keys, s._degs, s._gdegs, s._re, s._im


def test_backend_reported():
    assert BACKEND in ("compiled", "python")


@given(series_in(Ring(("a", "b", "c"), 6, [(("a", "b"), 4)]), max_terms=12),
       series_in(Ring(("a", "b", "c"), 6, [(("a", "b"), 4)]), max_terms=12))
def test_kernels_agree(a, b):
    ring = a.ring
    args = (*_raw(a), *_raw(b), ring.cap, ring.gcaps)
    expected = {k: tuple(v[:2]) for k, v in _kernel_py.mul_terms(*args).items() if v[0] or v[1]}
    try:
        from crembed.series import _kernel
    except ImportError:
        return
    got = {k: tuple(v[:2]) for k, v in _kernel.mul_terms(*args).items() if v[0] or v[1]}
    assert got == expected


@given(st.integers(0, 3))
def test_product_degrees_respected(k):
    ring = Ring(("a",), 5)
    from crembed.series import TruncatedSeries

    a = TruncatedSeries.variable(ring, "a") ** (k + 1)
    b = mul(a, a)
    assert b.is_zero() == (2 * (k + 1) > 5)
