import cmath

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from bryantsurf.errors import ExpressionSyntaxError, PoleAtPoint, UnsupportedFunction
from bryantsurf.holomorphic import (
    Add,
    Const,
    Div,
    Exp,
    Mobius,
    Mul,
    Pow,
    Sub,
    Var,
    Z,
    eval_jet2,
    evaluate,
    parse_holomorphic,
    pretty,
    substitute,
)


def test_parse_power():
    assert parse_holomorphic("z^2") == Pow(Var(), 2)


def test_parse_quotient_of_affine():
    e = parse_holomorphic("(2z + 1)/(z - 3i)")
    assert isinstance(e, Div)
    assert isinstance(e.left, Add) and isinstance(e.right, Sub)
    assert e.right.right == Const(3j)
    assert evaluate(e, 1.0) == pytest.approx(3 / (1 - 3j))


def test_syntax_error_offset():
    with pytest.raises(ExpressionSyntaxError) as info:
        parse_holomorphic("z^")
    assert info.value.position == 2


@pytest.mark.parametrize("text", ["", "z +", "(z", "z)", "2..3", "z^1.5", "mobius(1, 2, z)", "@"])
def test_malformed(text):
    with pytest.raises(ExpressionSyntaxError):
        parse_holomorphic(text)


@pytest.mark.parametrize("text", ["log(z)", "sqrt(z)", "w"])
def test_unsupported(text):
    with pytest.raises((UnsupportedFunction, ExpressionSyntaxError)):
        parse_holomorphic(text)


def test_precedence():
    assert evaluate(parse_holomorphic("-z^2"), 2) == -4
    assert evaluate(parse_holomorphic("2z^2 + 1"), 1j) == -1
    assert evaluate(parse_holomorphic("1/2z"), 4) == 2  # implicit product binds like *
    assert evaluate(parse_holomorphic("z^-1"), 4) == 0.25
    assert isinstance(parse_holomorphic("exp(z)"), Exp)
    assert isinstance(parse_holomorphic("mobius(1, 2, 3, 4, z)"), Mobius)


def test_constant_folding():
    assert parse_holomorphic("2*3 + 1") == Const(7)
    assert parse_holomorphic("(1+2i)^2") == Const((1 + 2j) ** 2)


def test_jet_examples():
    assert eval_jet2(parse_holomorphic("z^2"), 1 + 1j) == (2j, 2 + 2j, 2)
    for z in (0, 1 + 2j, -3.5j):
        assert eval_jet2(Z, z) == (z, 1, 0)
    with pytest.raises(PoleAtPoint):
        eval_jet2(parse_holomorphic("1/z"), 0)
    with pytest.raises(PoleAtPoint):
        eval_jet2(parse_holomorphic("mobius(0, 1, 1, 0, z)"), 0)


def test_jet_of_exp_and_mobius():
    z = 0.3 - 0.2j
    e = eval_jet2(parse_holomorphic("exp(2z)"), z)
    assert e.f0 == pytest.approx(cmath.exp(2 * z)) and e.f2 == pytest.approx(4 * cmath.exp(2 * z))
    m = eval_jet2(parse_holomorphic("mobius(1, 2, 3, 4, z)"), z)
    det = 1 * 4 - 2 * 3
    assert m.f1 == pytest.approx(det / (3 * z + 4) ** 2)
    assert m.f2 == pytest.approx(-2 * 3 * det / (3 * z + 4) ** 3)


def test_substitute():
    h = parse_holomorphic("z^2")
    inner = Mobius(1, 2, 3, 4, Z)
    w = 0.7 + 0.1j
    assert evaluate(substitute(h, inner), w) == pytest.approx(((w + 2) / (3 * w + 4)) ** 2)


# random rational expressions for the property tests
leaf = st.one_of(
    st.just(Z),
    st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False).map(lambda c: Const(complex(round(c.real, 2), round(c.imag, 2)))),
)


def _extend(children):
    return st.one_of(
        st.tuples(children, children).map(lambda t: Add(*t)),
        st.tuples(children, children).map(lambda t: Sub(*t)),
        st.tuples(children, children).map(lambda t: Mul(*t)),
        st.tuples(children, children).map(lambda t: Div(*t)),
        st.tuples(children, st.integers(-3, 4)).map(lambda t: Pow(*t)),
        children.map(lambda c: Exp(Mul(Const(0.5), c))),
    )


exprs = st.recursive(leaf, _extend, max_leaves=6)
points = st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False)


@settings(max_examples=150, deadline=None)
@given(exprs)
def test_pretty_parse_round_trip(e):
    text = pretty(e)
    again = pretty(parse_holomorphic(text))
    assert pretty(parse_holomorphic(again)) == again
    assert again == text or pretty(parse_holomorphic(text)) == again


@settings(max_examples=150, deadline=None)
@given(exprs, points)
def test_round_trip_preserves_value(e, z):
    try:
        v = evaluate(e, z)
    except Exception:
        return
    assume(abs(v) < 1e6)
    assert evaluate(parse_holomorphic(pretty(e)), z) == pytest.approx(v, rel=1e-9, abs=1e-12)


def _fd_ok(e, z, d):
    try:
        jet = eval_jet2(e, z)
        vals = [evaluate(e, z + s) for s in (d, -d, 1j * d, -1j * d)]
    except Exception:
        return None
    return jet, vals


@settings(max_examples=150, deadline=None)
@given(exprs, points)
def test_jets_match_finite_differences(e, z):
    d = 1e-5
    res = _fd_ok(e, z, d)
    assume(res is not None)
    jet, (xp, xm, yp, ym) = res
    # keep away from poles and huge values where FD is meaningless
    assume(abs(jet.f0) < 1e3 and abs(jet.f1) < 1e3 and abs(jet.f2) < 1e3)
    scale = 1 + abs(jet.f1) + abs(jet.f2) * d
    fd_x = (xp - xm) / (2 * d)
    fd_y = (yp - ym) / (2j * d)  # Cauchy-Riemann: the y-derivative over i is h' again
    assert abs(fd_x - jet.f1) <= 1e-6 * scale
    assert abs(fd_y - jet.f1) <= 1e-6 * scale
