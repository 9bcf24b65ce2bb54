"""Shared hypothesis strategies for the test suite."""

from hypothesis import assume
from hypothesis import strategies as st

from mms.geometry import SimplicialSet, affinely_independent, _nonneg_ball


@st.composite
def small_simplices(draw, max_n=3, degrees=(2, 4, 6), full_dim_only=False):
    n = draw(st.integers(min_value=1, max_value=max_n))
    two_d = draw(st.sampled_from(degrees))
    ball = [tuple(int(c) for c in row) for row in _nonneg_ball(n, two_d // 2)]
    evens = [tuple(2 * c for c in p) for p in ball if any(p)]
    k = n if full_dim_only else draw(st.integers(min_value=1, max_value=n))
    idx = draw(
        st.lists(
            st.integers(min_value=0, max_value=len(evens) - 1),
            min_size=k,
            max_size=k,
            unique=True,
        )
    )
    pts = [(0,) * n] + [evens[i] for i in idx]
    assume(affinely_independent(sorted(set(pts))))
    return SimplicialSet.of(pts)
