import math
import random

import pytest
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from dyndeg.algebraic import NumberField
from dyndeg.automorphism import compose, degree_sequence, iterate, make_permutation, parse_map
from dyndeg.polyring import Polynomial, PolynomialError
from dyndeg.weights import (INCONCLUSIVE, MU_STABLE, THETA_ONE, contained_matrices, deg_mu,
                            leading_stability, maximal_eigenvalue, maximal_eigenvector,
                            mu_degree_of_map, stability_verdict)
from dyndeg.algebraic import power_compare

from conftest import polys, nonzero_polys

HENON = "x2 + x1^2; x1"
FIB = "x3 + x1*x2; x2 + x1; x1"


def M(t):
    return parse_map(t)


def test_deg_mu_examples():
    assert deg_mu(Polynomial.parse("x1^2*x2", 3), (1, 1, 1)) == 3
    assert deg_mu(Polynomial.parse("x3 + x1*x2"), (1, 2, 3)) == 3
    with pytest.raises(PolynomialError):
        deg_mu(Polynomial.zero(2), (1, 1))


def test_mu_degree_examples():
    assert mu_degree_of_map(M("x1; x2; x3"), (1, 2, 5)) == 1
    assert mu_degree_of_map(M(HENON), (2, 1)) == 2
    # 0/1 weight: fiber degree
    assert mu_degree_of_map(M("x1; x2; x4 + x1*x3^2; x3"), (0, 0, 1, 1)) == 2
    assert mu_degree_of_map(M("x1 + x2; x2"), (0, 1)) == math.inf


def test_contained_matrices():
    assert contained_matrices(M(HENON)) == [((0, 1), (1, 0)), ((2, 0), (1, 0))]
    assert contained_matrices(M("x1; x2")) == [((1, 0), (0, 1))]
    assert len(contained_matrices(M(FIB))) == 4


def test_maximal_eigenvalue():
    assert maximal_eigenvalue(M(HENON)).theta == 2
    d = maximal_eigenvalue(M(FIB))
    assert d.theta.minpoly == (-1, -1, 1)
    assert d.witness == ((1, 1, 0), (1, 0, 0), (1, 0, 0))
    assert maximal_eigenvalue(M("x1; x2; x3")).theta == 1


def _check_eigen(f, data):
    K = NumberField(data.theta)
    for k, i in enumerate(data.active):
        assert deg_mu(f[i], data.mu, data.active) == K.theta * data.mu[k]


def test_maximal_eigenvector_examples():
    f = M(FIB)
    d = maximal_eigenvector(f)
    _check_eigen(f, d)
    f = M("x2; x3; x4 + x1^2; x1")
    d = maximal_eigenvector(f)
    K = NumberField(d.theta)
    t = K.theta
    assert d.theta.minpoly == (-2, 0, 0, 1)
    mu = d.mu
    assert mu[1] == mu[0] * t and mu[2] == mu[1] * t and mu[0] == mu[3] * t
    assert mu[3] == K.one  # last nonzero entry normalized to 1
    d = maximal_eigenvector(M("x1; x2; x3"))
    assert all(m == 1 for m in d.mu)


def test_verdicts():
    v = stability_verdict(M("x2; x3; x4 + x1^2; x1"))
    assert v.kind == MU_STABLE and v.theta.minpoly == (-2, 0, 0, 1)
    assert v.data.leading_dominant == "monomial"
    assert stability_verdict(M("x1; x2 + 3*x1; x3 + x2 - x1 + 4")).kind == THETA_ONE
    v = stability_verdict(M("x3 + x1^2; x4 + 5; x1; x2"))
    assert v.kind == INCONCLUSIVE and v.zero_pattern() == (1, 3)


def test_positive_mu_is_not_enough():
    # a shear along the invariant x1 - x2: theta = 2 with mu = (1, 1), yet deg f^r = 2
    f = M("x1 + x1^2 - 2*x1*x2 + x2^2; x2 + x1^2 - 2*x1*x2 + x2^2")
    v = stability_verdict(f)
    assert v.theta == 2 and v.data.strictly_positive
    assert v.kind != MU_STABLE
    assert degree_sequence(f, 5) == [2] * 5


def test_leading_stability_kinds():
    v = stability_verdict(M(FIB))
    assert v.kind == MU_STABLE
    K = NumberField(v.theta)
    assert leading_stability(M(FIB), v.mu, K, v.data.active) in ("monomial", "jacobian", "generic-rank")


@settings(max_examples=40, deadline=None)
@given(nonzero_polys(), nonzero_polys(), st.lists(st.integers(0, 4), min_size=3, max_size=3))
def test_deg_mu_laws(p, q, mu):
    mu = [mpq(m) for m in mu]
    assert deg_mu(p * q, mu) == deg_mu(p, mu) + deg_mu(q, mu)
    if not (p + q).is_zero():
        assert deg_mu(p + q, mu) <= max(deg_mu(p, mu), deg_mu(q, mu))
    assert deg_mu(p, [1, 1, 1]) == p.total_degree()


def _random_pt(rng, n=3):
    omega = rng.sample(range(1, n + 1), n)
    comps = []
    for i in range(n):
        p = Polynomial.var(i, n)
        if i:
            for _ in range(rng.randint(0, 2)):
                e = [0] * n
                for _ in range(rng.randint(1, 3)):
                    e[rng.randrange(i)] += 1
                p = p + Polynomial.from_terms(n, [(e, rng.choice([-2, -1, 1, 2]))])
        comps.append(p)
    from dyndeg.automorphism import PolyMap
    return compose(make_permutation(omega).forward, PolyMap(comps))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_theta_sandwich_and_eigenvector(seed):
    rng = random.Random(seed)
    f = _random_pt(rng)
    v = stability_verdict(f)
    assert v.theta <= f.degree()
    if v.mu is not None:
        _check_eigen(f, v.data)
    if v.kind in (MU_STABLE, THETA_ONE):
        degs = degree_sequence(f, 5)
        for r, d in enumerate(degs, start=1):
            assert power_compare(v.theta, r, d) <= 0
    if v.kind == MU_STABLE:
        K = NumberField(v.theta)
        power = K.one
        for r in range(1, 4):
            power = power * K.theta
            assert mu_degree_of_map(iterate(f, r), v.mu) <= power


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6))
def test_mu_degree_submultiplicative(seed):
    rng = random.Random(seed)
    f, g = _random_pt(rng), _random_pt(rng)
    mu = [mpq(rng.randint(1, 3)) for _ in range(3)]
    a, b, c = mu_degree_of_map(compose(f, g), mu), mu_degree_of_map(f, mu), mu_degree_of_map(g, mu)
    assert a <= b * c
