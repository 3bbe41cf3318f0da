from fractions import Fraction

from hypothesis import settings, strategies as st

from crembed.series import GaussianRational, Ring, TruncatedSeries

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

small_fractions = st.builds(Fraction, st.integers(-20, 20), st.integers(1, 12))
gaussians = st.builds(GaussianRational, small_fractions, small_fractions)
nonzero_gaussians = gaussians.filter(bool)

RING = Ring(("x", "y", "t"), 5, [(("x", "y"), 3)])


@st.composite
def series_in(draw, ring: Ring = RING, max_terms: int = 8):
    monos = ring.monomials()
    picked = draw(st.lists(st.sampled_from(monos), max_size=max_terms, unique=True))
    return TruncatedSeries.from_dict(ring, {m: draw(gaussians) for m in picked})


@st.composite
def units_in(draw, ring: Ring = RING):
    s = draw(series_in(ring))
    c = draw(nonzero_gaussians)
    return s - TruncatedSeries.constant(ring, s.constant_term()) + TruncatedSeries.constant(ring, c)


# acceptance criteria report: one line per criterion, printed after the run
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[num]
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
