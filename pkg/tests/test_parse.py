import pytest

from dpsolve.corpus import builtin_corpus, load_corpus
from dpsolve.errors import NonRational, ParseError
from dpsolve.parse import parse_expr, parse_poly
from dpsolve.poly import normalize_primitive


def test_basic():
    assert parse_expr("x^2*y - 1").num == parse_poly("x*y^2-1".replace("x*y^2", "x^2*y"))
    assert parse_expr("0").is_zero()
    phi = parse_expr("(-y^7+x*y^4-x^2*y+y^2)/(2*x*y^6-7*x^2*y^3+2*x^3+3*x*y)")
    assert str(phi.num) == "-y^7+x*y^4-x^2*y+y^2"
    assert str(phi.den) == "2*x*y^6-7*x^2*y^3+2*x^3+3*x*y"


def test_precedence_and_unary():
    assert parse_poly("-x^2") == parse_poly("0-x^2")
    assert parse_poly("2*x^2") == parse_poly("2*x*x")
    assert parse_poly("-x*-y") == parse_poly("x*y")
    assert parse_expr("x/y/x").num == parse_expr("1/y").num


def test_nested_division_canonical():
    r = parse_expr("(x^2-y^2)/((x-y)*(x+1))")
    assert str(r) == "(x+y)/(x+1)"


@pytest.mark.parametrize("text,offset", [("x/", 2), ("x+*y", 2), ("(x+y", 4), ("2x", 1), ("x^-1", 2)])
def test_errors(text, offset):
    with pytest.raises(ParseError) as err:
        parse_expr(text)
    assert err.value.offset == offset


def test_variable_exponent():
    with pytest.raises(NonRational):
        parse_expr("x^y")


def test_division_by_zero_rejected():
    with pytest.raises(Exception):
        parse_expr("x/0")


def test_corpus_transcription_roundtrip():
    cases = builtin_corpus()
    assert [c.id for c in cases] == [f"ex{i}" for i in range(1, 11)]
    for c in cases:
        phi = c.ode.phi
        again = parse_expr(f"({phi.num})/({phi.den})")
        assert again == phi
        for p in c.expected_dps:
            assert normalize_primitive(p) == p
            assert parse_poly(str(p)) == p
    assert not {c.id: c for c in cases}["ex7"].verifiable


def test_corpus_file(tmp_path):
    f = tmp_path / "c.json"
    f.write_text('[{"id": "circ", "ode": "-x/y", "expected_dps": ["x^2+y^2"]}]')
    (case,) = load_corpus(str(f))
    assert case.id == "circ" and str(case.expected_dps[0]) == "x^2+y^2"
    f.write_text("[]")
    assert load_corpus(str(f)) == []
