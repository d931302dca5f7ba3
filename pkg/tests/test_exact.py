from fractions import Fraction

from hypothesis import given, strategies as st

from speclab.exact import QuadSurd

fracs = st.fractions(max_denominator=50).filter(lambda f: abs(f) < 1000)


def test_sqrt2_is_positive_and_irrational_relation_free():
    r = QuadSurd(0, 1, 2)
    assert r.sign() == 1
    assert float(r) == 2**0.5
    # 1 + sqrt2 differs from any rational
    assert QuadSurd(1, 1, 2) != QuadSurd(Fraction(12, 5))


def test_product_in_field():
    a = QuadSurd(1, 1, 2)
    assert a * a == QuadSurd(3, 2, 2)


@given(fracs, fracs, fracs, fracs)
def test_ring_laws_match_floats(a, b, c, e):
    x, y = QuadSurd(a, b, 2), QuadSurd(c, e, 2)
    assert abs(float(x + y) - (float(x) + float(y))) < 1e-9 * (1 + abs(float(x)) + abs(float(y)))
    assert abs(float(x * y) - float(x) * float(y)) < 1e-9 * (1 + abs(float(x) * float(y)))
    assert (x - y) + y == x


@given(fracs, fracs)
def test_sign_agrees_with_float(a, b):
    x = QuadSurd(a, b, 2)
    f = float(x)
    if abs(f) > 1e-9:
        assert x.sign() == (1 if f > 0 else -1)
    assert (x.sign() == 0) == (a == 0 and b == 0)


@given(fracs, fracs, fracs, fracs)
def test_ordering_total_and_consistent(a, b, c, e):
    x, y = QuadSurd(a, b, 2), QuadSurd(c, e, 2)
    assert (x < y) + (y < x) + (x == y) == 1
    if x == y:
        assert hash(x) == hash(y)
