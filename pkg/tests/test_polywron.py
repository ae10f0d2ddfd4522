import json
from fractions import Fraction as Fr

import numpy as np
import pytest
import sympy
from hypothesis import assume, given
from hypothesis import strategies as st

from gaudin_wronski.errors import NoSolutionError, PreconditionError
from gaudin_wronski.polywron import (Polynomial, PolyPlane, derivative, discriminant, evaluate,
                                     is_generic_plane, is_nondegenerate_plane, is_squarefree,
                                     max_vanishing_order, plane_wronskian, polynomial_gcd,
                                     recover_plane, resultant, root_multiplicity, sylvester_matrix,
                                     wronskian_pair)

X = sympy.Symbol("x")


def P(*c):
    return Polynomial(c)


def to_sympy(p):
    return sympy.Poly(list(reversed([sympy.Rational(c.numerator, c.denominator) for c in p.coeffs])), X)


small_ints = st.integers(-6, 6)
int_polys = st.lists(small_ints, min_size=1, max_size=6).map(lambda c: Polynomial(c + [1]))


# -- arithmetic -------------------------------------------------------------------


def test_evaluate_examples():
    p = P(0, -1, 1)
    assert evaluate(p, 0) == 0
    assert evaluate(p, 2) == 2
    assert evaluate(P(1), 7) == 1


def test_derivative_examples():
    assert derivative(P(0, 0, 1)) == P(0, 2)
    assert derivative(P(5)).is_zero
    assert derivative(P(0, -3, 0, 1)) == P(-3, 0, 3)


def test_zero_polynomial_sentinel():
    z = Polynomial.zero()
    assert z.degree == -1 and z.is_zero
    assert P(1, 2, 0, 0).degree == 1


def test_kind_inference():
    assert P(1, Fr(1, 2)).kind == "rational"
    assert P(1, 0.5).kind == "complex"
    assert (P(1, 1) * P(0.5)).kind == "complex"


@given(int_polys, int_polys)
def test_divmod_identity(a, b):
    q, r = divmod(a, b)
    assert q * b + r == a
    assert r.degree < b.degree


@given(int_polys, st.integers(-5, 5))
def test_horner_matches_numpy(p, x):
    assert complex(p(x)) == pytest.approx(np.polyval(list(reversed(p.to_numpy())), x))


@given(st.lists(st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False),
                min_size=1, max_size=6))
def test_roots_recover_from_roots(roots):
    roots = np.array(roots)
    gaps = np.abs(roots[:, None] - roots[None, :]) + np.eye(len(roots)) * 10
    assume(gaps.min() > 0.1)
    found = Polynomial.from_roots(roots).roots()
    for r in roots:
        assert np.abs(found - r).min() < 1e-8


def test_taylor_and_multiplicity():
    p = Polynomial.from_roots([2, 2, 2, -1])
    tay = p.taylor(2)
    assert tay[:3] == [0, 0, 0] and tay[3] != 0
    assert root_multiplicity(p, 2) == 3
    assert root_multiplicity(p.to_complex(), 2.0) == 3
    assert root_multiplicity(p, 0) == 0


def test_gcd():
    g = polynomial_gcd(Polynomial.from_roots([1, 2, 3]), Polynomial.from_roots([2, 3, 5]))
    assert g == Polynomial.from_roots([2, 3])
    with pytest.raises(PreconditionError):
        polynomial_gcd(P(1.0, 1), P(1, 1))


def test_json_round_trip():
    for p in (P(Fr(1, 3), -2, 1), P(0.5 + 1j, 2.0)):
        back = Polynomial.from_json(json.loads(json.dumps(p.to_json())))
        assert back == p
    assert P(Fr(1, 3), 1).to_json() == ["1/3", "1/1"]


# -- Wronskians -------------------------------------------------------------------


def test_wronskian_pair_examples():
    assert wronskian_pair(P(1), P(0, 1), 0, 1) == P(1)
    assert wronskian_pair(P(0, 1), P(0, 0, 1), 1, 2) == P(0, 0, 1)
    assert wronskian_pair(P(1, 0, 1), P(0, 0, 0, 1), 2, 3) == P(0, 0, 3, 0, 1)


def test_wronskian_pair_rejects_equal_degrees():
    with pytest.raises(PreconditionError):
        wronskian_pair(P(0, 1), P(1, 1), 1, 1)


def test_plane_wronskian_examples():
    assert plane_wronskian(PolyPlane(P(1), P(0, 1))) == P(1)
    assert plane_wronskian(PolyPlane(P(Fr(-1, 2), 1), P(0, 0, 1))) == P(0, -1, 1)
    assert plane_wronskian(PolyPlane(P(0, 1), P(0, 0, 0, 1))) == P(0, 0, 0, 1)


def test_plane_canonical_form():
    a = PolyPlane(P(Fr(-1, 2), 1), P(3, 7, 1))
    b = PolyPlane(P(-1, 2), P(Fr(11, 2), 2, 1))  # differs from a's big by 2 * small
    assert a == b
    assert a.big.coeff(1) == 0
    with pytest.raises(PreconditionError):
        PolyPlane(P(0, 0, 1), P(0, 1))


planes = st.tuples(st.lists(small_ints, min_size=0, max_size=3),
                   st.lists(small_ints, min_size=1, max_size=3),
                   st.integers(1, 3))


def _plane(data):
    lo, hi, gap = data
    small = Polynomial(lo + [1])
    big = Polynomial(hi + [0] * max(0, len(lo) + gap - len(hi)) + [1])
    assume(big.degree > small.degree)
    return PolyPlane(small, big)


@given(planes)
def test_degree_law(data):
    V = _plane(data)
    assert plane_wronskian(V).degree == V.order + V.degree - 1


@given(planes, small_ints)
def test_basis_independence(data, lam):
    V = _plane(data)
    W = wronskian_pair(V.small, V.big + V.small * lam, V.order, V.degree)
    assert W == plane_wronskian(V)


@given(planes)
def test_round_trip_recover(data):
    V = _plane(data)
    assume(is_nondegenerate_plane(V))
    assert recover_plane(V.small, plane_wronskian(V)) == V


@given(planes)
def test_no_shared_roots(data):
    V = _plane(data)
    assume(V.order >= 1 and is_nondegenerate_plane(V))
    W = plane_wronskian(V).to_complex()
    scale = max(abs(c) for c in W.coeffs)
    for t in V.small.roots():
        assert abs(W(t)) > 1e-8 * scale * max(1, abs(t)) ** W.degree


@given(st.integers(2, 4), st.lists(st.integers(1, 6), min_size=1, max_size=3, unique=True),
       st.integers(-4, 4))
def test_root_transfer(mult, rest, x0):
    # g in V has a root of exact multiplicity `mult` at x0; the Wronskian is basis independent
    g = Polynomial.from_roots([x0] * mult + [x0 + r for r in rest])
    small = P(-(x0 - 7), 1)
    V = PolyPlane.from_basis(small, g)
    assume(is_nondegenerate_plane(V))
    assert root_multiplicity(g, x0) == mult
    assert root_multiplicity(plane_wronskian(V), x0) == mult - 1
    assert max_vanishing_order(V, x0) == mult


@given(planes)
def test_order_jump_at_zero(data):
    V = _plane(data)
    assume(is_nondegenerate_plane(V))
    m = root_multiplicity(plane_wronskian(V), 0)
    assert max_vanishing_order(V, 0) == m + 1


# -- resultants -------------------------------------------------------------------


def test_resultant_examples():
    assert resultant(P(0, 1), P(-1, 1)) == 1
    assert resultant(P(0, -1, 1), P(Fr(-1, 2), 1)) == Fr(-1, 4)
    assert resultant(P(1, 0, 1), P(1, 0, 1)) == 0


def test_discriminant_examples():
    assert discriminant(P(-3, 1)) == 1
    assert discriminant(P(-1, 0, 1)) == 4
    assert discriminant(P(0, 0, 1)) == 0
    with pytest.raises(PreconditionError):
        discriminant(P(3))


def test_resultant_rejects_zero():
    with pytest.raises(PreconditionError):
        resultant(Polynomial.zero(), P(1, 1))


def companion_resultant(p, q):
    """``lc(q)**deg(p) * det p(C)`` for the companion matrix ``C`` of monic ``q``."""
    qm = q.monic()
    n = qm.degree
    C = sympy.zeros(n, n)
    for i in range(1, n):
        C[i, i - 1] = 1
    for i in range(n):
        C[i, n - 1] = -sympy.Rational(qm.coeffs[i].numerator, qm.coeffs[i].denominator)
    acc = sympy.zeros(n, n)
    for c in reversed(p.coeffs):
        acc = acc * C + sympy.Rational(c.numerator, c.denominator) * sympy.eye(n)
    lc = sympy.Rational(q.leading.numerator, q.leading.denominator)
    return lc ** p.degree * acc.det()


@given(int_polys, int_polys)
def test_resultant_matches_companion_oracle(p, q):
    assert resultant(p, q) == companion_resultant(p, q)


@given(int_polys)
def test_discriminant_matches_sympy(p):
    assume(p.degree >= 1)
    assert discriminant(p) == sympy.discriminant(to_sympy(p).as_expr(), X)


@given(st.lists(st.tuples(st.integers(-4, 4), st.integers(1, 3)), min_size=1, max_size=3,
                unique_by=lambda zm: zm[0]),
       st.lists(st.fractions(-5, 5, max_denominator=4), min_size=1, max_size=3))
def test_resultant_root_product_convention(zm, t):
    W = Polynomial.from_roots([z for z, m in zm for _ in range(m)])
    F = Polynomial.from_roots(t)
    expected = Fr(1)
    for ti in t:
        for z, m in zm:
            expected *= (ti - z) ** m
    assert resultant(W, F) == expected
    disc = Fr(1)
    for i in range(len(t)):
        for j in range(i + 1, len(t)):
            disc *= (t[i] - t[j]) ** 2
    assert discriminant(F) == disc


def test_float_resultant_matches_exact():
    p, q = P(1, -2, 0, 3), P(-5, 1, 2)
    assert complex(resultant(p.to_complex(), q.to_complex())) == pytest.approx(float(resultant(p, q)))


def test_sylvester_shape():
    rows = sylvester_matrix(P(1, 2, 1), P(3, 1))
    assert len(rows) == 3 and all(len(r) == 3 for r in rows)


# -- plane predicates and recovery ------------------------------------------------


def test_generic_and_nondegenerate_examples():
    assert is_generic_plane(PolyPlane(P(1), P(0, 1)))
    assert not is_generic_plane(PolyPlane(P(0, 1), P(0, 0, 1)))
    assert is_generic_plane(PolyPlane(P(Fr(-1, 2), 1), P(0, 0, 1)))
    assert is_nondegenerate_plane(PolyPlane(P(Fr(-1, 2), 1), P(0, 0, 1)))
    assert not is_nondegenerate_plane(PolyPlane(P(0, 0, 1), P(1, 0, 0, 1)))
    assert not is_nondegenerate_plane(PolyPlane(P(0, 1), P(0, 0, 0, 1)))


def test_float_predicates():
    assert is_generic_plane(PolyPlane(P(-0.5, 1.0), P(0.0, 0.0, 1.0)))
    assert not is_generic_plane(PolyPlane(P(0.0, 1.0), P(0.0, 0.0, 1.0)))
    assert not is_squarefree(Polynomial.from_roots([0.3, 0.3 + 1e-12, 2.0]))
    assert is_squarefree(Polynomial.from_roots([0.3, 0.5, 2.0]))


def test_squarefree_high_degree_spread_roots():
    roots = np.exp(2j * np.pi * np.arange(8) / 8) * np.linspace(0.5, 1.5, 8)
    assert is_squarefree(Polynomial.from_roots(roots))


def test_recover_plane_examples():
    assert recover_plane(P(Fr(-1, 2), 1), P(0, -1, 1)) == PolyPlane(P(Fr(-1, 2), 1), P(0, 0, 1))
    assert recover_plane(P(1), P(1)) == PolyPlane(P(1), P(0, 1))
    with pytest.raises(NoSolutionError):
        recover_plane(P(Fr(-1, 2), 1), P(1, 0, 1))


def test_recover_plane_float():
    V = recover_plane(P(-0.5, 1.0), P(0.0, -1.0, 1.0))
    assert V.isclose(PolyPlane(P(-0.5, 1.0), P(0.0, 0.0, 1.0)))
    with pytest.raises(NoSolutionError):
        recover_plane(P(-0.5, 1.0), P(1.0, 0.0, 1.0))


def test_recover_plane_constant_member():
    W = P(0, -1, 1)
    V = recover_plane(P(1), W)
    assert V.degree == 3
    assert plane_wronskian(V) == W
    assert V.big == P(0, 0, Fr(-3, 2), 1)


def test_root_transfer_example():
    V = PolyPlane(P(-1, 1), P(0, 0, 0, 1))
    assert root_multiplicity(V.big, 0) == 3
    assert root_multiplicity(plane_wronskian(V), 0) == 2
    assert max_vanishing_order(V, 0) == 3
