import random

import pytest
from hypothesis import given, settings, strategies as st

from dgva import builders
from dgva.mutate import mutate
from dgva.vadf import (VadfSemanticError, VadfSyntaxError, parse_combo, parse_model, parse_module,
                       serialize_model, serialize_module, tables_equal)
from dgva.vertex import adjoint_module, check_vertex_axioms

DUAL = """\
model dual
basis one deg=0 wt=0
basis x deg=0 wt=0
vacuum one
window wt<=0 modes=-2..2
mode x[-1] x = 0
mode x[-1] one = 1*x
mode one[-1] x = 1*x
mode one[-1] one = 1*one
end
"""


def test_reference_dual_file():
    m = parse_model(DUAL)
    assert m.space.dim == 2
    assert check_vertex_axioms(m).passed


def test_undeclared_id_is_semantic_error_at_line():
    text = DUAL.replace("mode x[-1] x = 0", "mode x[-1] x = 1*c")
    with pytest.raises(VadfSemanticError) as e:
        parse_model(text)
    assert e.value.line == 6


def test_bidegree_violation_rejected():
    text = DUAL.replace("basis x deg=0 wt=0", "basis x deg=1 wt=0")
    parse_model(text)
    # x_{-1} x has degree 2, and x has degree 1
    with pytest.raises(VadfSemanticError) as e:
        parse_model(text.replace("mode x[-1] x = 0", "mode x[-1] x = 1*x"))
    assert e.value.line == 6


def test_duplicate_mode_line_rejected():
    text = DUAL.replace("end\n", "mode one[-1] one = 1*one\nend\n")
    with pytest.raises(VadfSemanticError):
        parse_model(text)


def test_closed_vacuum_required():
    text = DUAL.replace("end\n", "d one = 1*x\nend\n")
    with pytest.raises(VadfSemanticError):
        parse_model(text)


def test_syntax_error_has_column():
    with pytest.raises(VadfSyntaxError) as e:
        parse_model(DUAL.replace("vacuum one", "  vacum one"))
    assert e.value.line == 4 and e.value.col == 3


def test_weights_must_be_half_integers():
    with pytest.raises(VadfSemanticError):
        parse_model(DUAL.replace("basis x deg=0 wt=0", "basis x deg=0 wt=1/3"))


def test_combo_grammar():
    assert parse_combo("0") == []
    assert parse_combo("1/2*a - 3*b.c") == [(1 / 2, "a"), (-3, "b.c")]
    with pytest.raises(VadfSyntaxError):
        parse_combo("2a")


@pytest.mark.parametrize("build", [builders.dual_numbers, builders.nilpotent_dg,
                                   lambda: builders.build_heisenberg(4)])
def test_round_trip(build):
    m = build()
    text = serialize_model(m)
    m2 = parse_model(text)
    assert tables_equal(m, m2)
    assert serialize_model(m2) == text


def test_module_round_trip(heis4):
    adj = adjoint_module(heis4)
    text = serialize_module(adj)
    assert text.startswith("module ")
    back = parse_module(text, heis4)
    assert serialize_module(back) == text


@given(st.integers(0, 100_000))
@settings(max_examples=25, deadline=None)
def test_round_trip_of_mutants(seed):
    m, _ = mutate(builders.nilpotent_dg(), random.Random(seed))
    text = serialize_model(m)
    assert serialize_model(parse_model(text)) == text
