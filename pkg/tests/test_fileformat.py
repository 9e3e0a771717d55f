import random

import pytest
from hypothesis import given, seed, settings, strategies as st

from diffduality import twovar
from diffduality.diffop import op_adjoint
from diffduality.fileformat import (
    DimensionMismatch, DocumentError, format_entry, parse_metric, parse_operator, print_metric, print_operator,
)
from diffduality.gallery import linearized_curvature, metric_make
from diffduality.randops import random_diffop

DOC = """vars: x1,x2
in: eta[2]
out: zeta[1]
entry 1 1: d{1,0} - x2
entry 1 2: d{0,1}
"""


def test_parse_example_system():
    assert parse_operator(DOC).equal_entries(twovar.system())


def test_empty_entry_list_is_zero():
    d = parse_operator("vars: x1\nin: u[2]\nout: v[3]\n")
    assert d.is_zero() and d.shape == (3, 2)
    text = print_operator(d)
    assert "entry" not in text and parse_operator(text) == d


def test_component_out_of_range():
    with pytest.raises(DimensionMismatch):
        parse_operator(DOC + "entry 1 3: 1\n")


def test_weights_and_labels_must_match_dimension():
    with pytest.raises(DimensionMismatch):
        parse_operator("vars: x1\nin: u[2] weights=1\nout: v[1]\n")


@pytest.mark.parametrize("bad,line,col", [
    ("entry 1 1: d{1,0} x2", 4, None),
    ("entry 1 1: 1/0", 4, None),
    ("entry 1 1: x3", 4, None),
    ("entry 1 1: (x1", 4, None),
])
def test_syntax_errors_carry_line(bad, line, col):
    doc = "vars: x1,x2\nin: eta[2]\nout: zeta[1]\n" + bad + "\n"
    with pytest.raises(DocumentError) as info:
        parse_operator(doc)
    assert info.value.line == line
    assert info.value.col is not None


def test_error_column_points_at_token():
    doc = "vars: x1,x2\nin: eta[2]\nout: zeta[1]\nentry 1 1: x1 + $\n"
    with pytest.raises(DocumentError) as info:
        parse_operator(doc)
    assert info.value.col == doc.splitlines()[3].index("$") + 1


def test_unknown_lines_and_missing_headers():
    with pytest.raises(DocumentError):
        parse_operator("vars: x1\nin: u[1]\nout: v[1]\nfoo: bar\n")
    with pytest.raises(DocumentError):
        parse_operator("vars: x1\nin: u[1]\n")
    with pytest.raises(DocumentError):
        parse_operator("vars: y1\nin: u[1]\nout: v[1]\n")


def test_duplicate_entries_sum():
    d = parse_operator(DOC + "entry 1 1: x2\n")
    assert d.entry(0, 0) == {(1, 0): twovar.system().entry(0, 0)[(1, 0)]}


def test_adjoint_print_renders_mu_rows():
    text = print_operator(op_adjoint(twovar.system()))
    assert "entry 1 1: -d{1,0} - (x2)" in text and "entry 2 1: -d{0,1}" in text


def test_print_is_canonical():
    d = linearized_curvature(metric_make("minkowski", 3), "einstein")
    assert print_operator(d) == print_operator(parse_operator(print_operator(d)))


@seed(1234)
@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 3), st.integers(1, 3))
def test_round_trip_random_operators(s, m, k):
    d = random_diffop(random.Random(s), 2, m, k)
    assert parse_operator(print_operator(d)) == d


def test_metric_round_trip():
    text = "vars: x1,x2\nomega 1 1: 1\nomega 2 2: x1^2\n"
    m = parse_metric(text)
    assert m.inverse[1][1] == m.omega[1][1].inverse()
    assert parse_metric(print_metric(m)).omega == m.omega
    assert parse_metric(print_metric(metric_make("minkowski", 4))).omega == metric_make("minkowski", 4).omega


def test_metric_errors():
    with pytest.raises(DocumentError):
        parse_metric("vars: x1,x2\nomega 1 2: 1\nomega 2 1: 2\nomega 1 1: 1\n")
    with pytest.raises(DocumentError):
        parse_metric("vars: x1\nomega 1 1: d{1}\n")
    with pytest.raises(DimensionMismatch):
        parse_metric("vars: x1\nomega 1 2: 1\n")


def test_format_entry_orders_by_degree():
    e = twovar.parametrization_displayed().entry(0, 0)
    assert format_entry(e) == "d{1,1} - (x2) d{0,1} - (2)"
