from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from opf.exactpoly import BiPoly, UniPoly

settings.register_profile("opf", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("opf")

small_fractions = st.fractions(min_value=-5, max_value=5, max_denominator=6)


@st.composite
def unipolys(draw, max_degree=4):
    return UniPoly(draw(st.lists(small_fractions, max_size=max_degree + 1)))


@st.composite
def bipolys(draw, max_degree=3, max_terms=5):
    keys = st.tuples(st.integers(0, max_degree), st.integers(0, max_degree))
    terms = draw(st.dictionaries(keys, small_fractions, max_size=max_terms))
    return BiPoly(terms)


@pytest.fixture(autouse=True)
def _clean_series_env(monkeypatch):
    monkeypatch.delenv("OPF_SERIES_ORDER", raising=False)


def F(*args) -> Fraction:
    return Fraction(*args)
