import random

import numpy as np
import pytest
import sympy
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from dyndeg.algebraic import (AlgebraicNumber, NumberField, char_poly, compare, count_roots,
                              factor_deg_le5, is_irreducible, power_bounds, power_compare,
                              real_roots, spectral_radius)

x = sympy.Symbol("x")


def sym(p):
    return sum(c * x**i for i, c in enumerate(p))


def matrices(n_max=5, entry=3):
    return st.integers(1, n_max).flatmap(
        lambda n: st.lists(st.lists(st.integers(0, entry), min_size=n, max_size=n), min_size=n, max_size=n))


def test_char_poly_examples():
    assert char_poly([[1, 1], [1, 0]]) == [-1, -1, 1]
    assert char_poly([[2, 0], [1, 0]]) == [0, -2, 1]
    assert char_poly([[1, 1, 0], [1, 0, 0], [1, 0, 0]]) == [0, -1, -1, 1]


@given(matrices())
def test_char_poly_vs_sympy(M):
    want = sympy.Matrix(M).charpoly(x).all_coeffs()[::-1]
    assert char_poly(M) == [int(c) for c in want]


def test_spectral_radius_examples():
    assert spectral_radius([[0, 1], [1, 0]]) == 1
    phi = spectral_radius([[1, 1], [1, 0]])
    assert phi.minpoly == (-1, -1, 1)
    r2 = spectral_radius([[0, 1], [2, 0]])
    assert r2.minpoly == (-2, 0, 1)
    assert spectral_radius([[0, 1], [0, 0]]) == 0


@settings(max_examples=60, deadline=None)
@given(matrices(entry=2))
def test_spectral_radius_properties(M):
    rho = spectral_radius(M)
    cp = char_poly(M)
    # minpoly divides the characteristic polynomial
    assert sympy.rem(sym(cp), sym(rho.minpoly), x) == 0 or rho == 0
    # floating estimate inside the certified interval
    est = max(abs(np.linalg.eigvals(np.array(M, dtype=float))))
    fine = rho.refine(mpq(1, 10**6))
    assert float(fine.lo) - 1e-6 <= est <= float(fine.hi) + 1e-6
    assert is_irreducible(list(rho.minpoly))


@settings(max_examples=40, deadline=None)
@given(matrices(n_max=4, entry=2), st.data())
def test_perron_monotone(M, data):
    n = len(M)
    i, j = data.draw(st.integers(0, n - 1)), data.draw(st.integers(0, n - 1))
    N = [row[:] for row in M]
    N[i][j] += 1
    assert compare(spectral_radius(N), spectral_radius(M)) >= 0


def test_factor_examples():
    assert sorted(factor_deg_le5([0, -1, -1, 1])) == sorted([[0, 1], [-1, -1, 1]])
    assert sorted(factor_deg_le5([1, 0, -2, 0, 1])) == [[-1, 1], [-1, 1], [1, 1], [1, 1]]
    assert factor_deg_le5([-2, 0, 0, 1]) == [[-2, 0, 0, 1]]
    with pytest.raises(Exception):
        factor_deg_le5([1, 0, 0, 0, 0, 0, 1])


@settings(max_examples=80, deadline=None)
@given(st.lists(st.integers(-6, 6), min_size=2, max_size=6).filter(lambda c: c[-1] != 0))
def test_factor_vs_sympy(p):
    fs = factor_deg_le5(p)
    prod = sympy.Integer(1)
    for f in fs:
        prod *= sym(f)
        if len(f) > 1:
            assert is_irreducible(f)
            assert sympy.Poly(sym(f), x).is_irreducible
    # product equals input up to a constant
    assert sympy.cancel(sym(p) / prod).is_number
    assert sum(len(f) - 1 for f in fs) == len(p) - 1


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-5, 5), min_size=2, max_size=6).filter(lambda c: c[-1] != 0))
def test_real_roots_vs_sympy(p):
    roots = real_roots(p)
    want = sorted(set(sympy.Poly(sym(p), x).real_roots()))
    assert len(roots) == len(want)
    for (lo, hi), r in zip(roots, want):
        assert float(lo) - 1e-12 <= float(r) <= float(hi) + 1e-12


def test_compare_and_powers():
    phi = AlgebraicNumber.from_poly_root([-1, -1, 1], 1, 2)
    r2 = AlgebraicNumber.from_poly_root([-2, 0, 1], 1, 2)
    assert compare(phi, 1) > 0
    assert compare(r2, mpq(3, 2)) < 0
    lo, hi = power_bounds(phi, 4)
    assert lo <= (7 + 3 * sympy.sqrt(5)) / 2 <= hi
    assert power_compare(phi, 4, 8) < 0
    assert power_compare(AlgebraicNumber.rational(2), 3, 8) == 0
    assert r2 < phi and max(r2, phi) == phi


def test_from_poly_root_reduces():
    a = AlgebraicNumber.from_poly_root([0, -2, 0, 1], 1, 2)  # x^3 - 2x, root sqrt2
    assert a.minpoly == (-2, 0, 1)
    b = AlgebraicNumber.from_poly_root([-4, 0, 1], 1, 3)
    assert b.is_rational() and b == 2


def test_json_roundtrip():
    a = spectral_radius([[1, 1, 0], [0, 0, 1], [1, 0, 0]])
    d = a.to_json()
    assert set(d) == {"minpoly", "interval", "approx"}
    assert all(isinstance(v, str) for v in d["interval"])
    assert AlgebraicNumber.from_json(d) == a


def test_number_field():
    r = spectral_radius([[0, 1, 0], [0, 0, 1], [2, 0, 0]])  # cube root of 2
    K = NumberField(r)
    t = K.theta
    assert t * t * t == K(2)
    assert (t * t).inverse() * t * t == K.one
    assert (t - K(1)).sign() > 0
    assert abs((t * t).approx() - 2 ** (2 / 3)) < 1e-9
    assert K.zero.is_zero()


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(-4, 4), min_size=3, max_size=3), st.lists(st.integers(-4, 4), min_size=3, max_size=3))
def test_number_field_vs_sympy(u, v):
    r = spectral_radius([[0, 1, 0], [0, 0, 1], [3, 1, 0]])
    K = NumberField(r)
    a, b = K.from_coeffs(u), K.from_coeffs(v)
    val = float(sympy.Poly(sym(list(r.minpoly)), x).real_roots()[-1].evalf(30))
    ev = lambda c: sum(ci * val**i for i, ci in enumerate(c))
    assert abs((a * b).approx() - ev(u) * ev(v)) < 1e-6 * (1 + abs(ev(u) * ev(v)))
    assert abs((a + b).approx() - ev(u) - ev(v)) < 1e-9 * (1 + abs(ev(u)) + abs(ev(v)))
    if not a.is_zero():
        assert abs((a.inverse() * a).approx() - 1) < 1e-9
