"""Acceptance criteria 1-8; a PASS/FAIL line per criterion is printed in the summary."""

import itertools
import random

import numpy as np
import pytest
import sympy
from gmpy2 import mpq

from dyndeg import families
from dyndeg.algebraic import AlgebraicNumber, NumberField, power_compare, spectral_radius
from dyndeg.automorphism import (PermTriForm, compose, degree_sequence, identity_map,
                                 line_degree_sequence, make_permutation, parse_map)
from dyndeg.classify4 import classify, random_affine_triangular, verify_trace
from dyndeg.cli import theorem1_sweep
from dyndeg.families import FamilyError
from dyndeg.polyring import Polynomial
from dyndeg.weights import contained_matrices, deg_mu, maximal_eigenvector

from conftest import X, record_acceptance, to_sympy
from test_automorphism import random_affine, random_triangular
from test_classify4 import GOLDEN, golden_input


def check(criterion, part, fn):
    """Run fn, record the outcome, re-raise failures."""
    try:
        detail = fn() or ""
    except Exception as exc:
        record_acceptance(criterion, part, False, f"{type(exc).__name__}: {str(exc).splitlines()[0]}")
        raise
    record_acceptance(criterion, part, True, detail)


GRID = [(a, b, c) for a in range(4) for b in range(4) for c in range(4)
        if a + b <= 3 and not (a == 0 and b * c == 0)]


# -- 1, 2: the dimension-3 family and its second realizer ------------------------------

def test_criterion_1_dim3_formula():
    def run():
        for a, b, c in GRID:
            tr = classify(families.dim3_family(a, b, c))
            want = families.dim3_lambda_formula(a, b, c)
            assert tr.certified, (a, b, c)
            assert tr.value.minpoly == want.minpoly and tr.value == want, (a, b, c)
        assert families.dim3_lambda_formula(1, 1, 1).minpoly == (-1, -1, 1)
        assert families.dim3_lambda_formula(0, 1, 2).minpoly == (-2, 0, 1)
        assert families.dim3_lambda_formula(2, 1, 1).minpoly == (-1, -2, 1)
        return f"{len(GRID)} triples"
    check(1, "dim3 grid", run)


def test_criterion_2_second_realizer():
    def run():
        for a, b, c in GRID:
            tr = classify(families.second_family(a, b, c))
            assert tr.certified and tr.value == families.dim3_lambda_formula(a, b, c), (a, b, c)
    check(2, "second family grid", run)


# -- 3: the quadratic value set --------------------------------------------------------

def test_criterion_3_quadratic_set():
    def run():
        res = theorem1_sweep(2)
        got = {tuple(v.minpoly) for v in res["values"]}
        # 1, sqrt 2, golden ratio, 2
        assert got == {(-1, 1), (-2, 0, 1), (-1, -1, 1), (-2, 1)}, got
        assert res["all_agree"] and res["all_certified"]
    check(3, "D=2 sweep", run)


# -- 4: random affine-triangular maps of A^4 --------------------------------------------

N_RANDOM = 250


def test_criterion_4_random_dimension_four():
    def run():
        estimates, ratio = 0, mpq(17, 20) ** 8
        for seed in range(N_RANDOM):
            alpha, tau = random_affine_triangular(random.Random(seed), n=4, max_degree=3, coeff=2)
            tr = classify(alpha, tau)
            if not tr.certified:
                estimates += 1
                assert "cited-integer" in tr.tags, seed
                continue
            assert tr.value.degree <= 4, seed
            assert verify_trace(tr, alpha, tau), seed
            # line degrees are lower bounds for deg f^r, so both checks below are
            # sufficient for the exact statements
            lows = line_degree_sequence(compose(alpha.forward, tau.forward), 8, seed=seed)
            for r in range(1, 7):
                assert power_compare(tr.value, r, lows[r - 1]) <= 0, (seed, r)
            assert power_compare(tr.value, 8, mpq(lows[7]) / ratio) <= 0, seed
        assert estimates < 0.05 * N_RANDOM
        return f"{N_RANDOM} maps, {estimates} estimate-only"
    check(4, "random A^4", run)


# -- 5: golden routes ------------------------------------------------------------------

def test_criterion_5_golden_routes():
    def run():
        for name, (minpoly, method, route) in GOLDEN.items():
            tr = classify(golden_input(name))
            assert tr.route()[1:] == route, name
            assert tr.method == method and list(tr.value.minpoly) == minpoly, name
        transfers = {k: [s[1] for s in GOLDEN[k][2] if s[0] == "transfer"] for k in GOLDEN}
        assert transfers["omega10"] == ["omega9", "omega12"]
        assert transfers["omega18"] == ["omega19"]
        assert transfers["omega22"] == ["omega21"]
        assert transfers["omega23"] == ["omega22", "omega21"]
        return f"{len(GOLDEN)} representatives"
    check(5, "golden routes", run)


# -- 6: the mu-stable exemplar ---------------------------------------------------------

def test_criterion_6_mu_stable_exemplar():
    def run():
        f = parse_map("x2; x3; x4 + x1^2; x1")
        tr = classify(f)
        assert tr.certified and tr.value.minpoly == (-2, 0, 0, 1)
        d = maximal_eigenvector(f)
        K = NumberField(d.theta)
        t, mu = K.theta, d.mu
        assert d.theta == tr.value
        assert mu[1] == mu[0] * t and mu[2] == mu[1] * t and mu[0] == mu[3] * t
        d9 = degree_sequence(f, 9)[-1]
        assert mpq(6, 5) ** 9 <= d9 <= mpq(29, 20) ** 9, d9
        return f"deg f^9 = {d9}"
    check(6, "x^3 - 2 exemplar", run)


# -- 7: the maps of section four -------------------------------------------------------

def test_criterion_7_s1_lambda_and_decomposition():
    def run():
        f = families.make_S1(1)
        assert families.s1_lambda(f) == 1
        for r in (1, 2, 3):
            assert families.s1_decomposition(f, r)["fiber_affine"]
    check(7, "S1 lambda and decomposition", run)


def test_criterion_7_s1_growth_bound():
    # with o1 = 1 the degrees grow linearly (about 1.5 r), so r = 12 gives 19^(1/12) > 1.2
    def run():
        d = degree_sequence(families.make_S1(1), 12)[-1]
        assert mpq(d) <= mpq(6, 5) ** 12, f"deg S1^12 = {d}, {d ** (1 / 12):.4f} > 1.2"
    check(7, "S1 growth", run)


def test_criterion_7_s2():
    def run():
        node = families.s2_lambda(families.make_S2(1))
        assert node.certified and node.value.degree <= 4
        return str(node.value.minpoly)
    check(7, "S2", run)


def _random_tails(rng, n):
    tails = {}
    for i in range(2, n + 1):
        terms = []
        for _ in range(rng.randint(1, 2)):
            e = [0] * n
            for _ in range(rng.randint(1, 2)):
                e[rng.randrange(i - 1)] += 1
            terms.append((e, rng.choice([-2, -1, 1, 2])))
        tails[i] = Polynomial.from_terms(n, terms)
    return tails


def _chain_ok(f):
    res = families.t_chain_reduce(f)
    assert res.steps <= 3
    total = f
    for g in res.conjugators:
        assert compose(g.forward, g.inverse) == identity_map(f.n)
        total = compose(g.inverse, compose(total, g.forward))
    assert total == res.perm_elementary
    assert PermTriForm.from_map(res.perm_elementary).is_permutation_elementary()
    node = families.perm_elementary_lambda(res.perm_elementary, 6)
    assert node.value is not None and node.value.degree <= 4


@pytest.mark.parametrize("shape", ["T1", "T2"])
def test_criterion_7_t_chains(shape):
    build = families.t1_map if shape == "T1" else families.t2_map

    def run():
        rng = random.Random(shape)
        for k in range(12):
            _chain_ok(build(5, _random_tails(rng, 5)))
    check(7, f"{shape} chain", run)


# -- 8: property suites ----------------------------------------------------------------

def _random_poly(rng, n=4):
    terms = [([rng.randint(0, 4) for _ in range(n)], rng.randint(-5, 5)) for _ in range(rng.randint(1, 6))]
    p = Polynomial.from_terms(n, terms)
    return p if not p.is_zero() else Polynomial.parse("x1", n)


def test_criterion_8_deg_mu_scan():
    def run():
        rng = random.Random(8)
        for _ in range(1000):
            p = _random_poly(rng)
            mu = [mpq(rng.randint(0, 7), rng.randint(1, 3)) for _ in range(4)]
            expr = sympy.Poly(to_sympy(p), *X[:4])
            scan = max(sum(mpq(e) * m for e, m in zip(mono, mu)) for mono, _ in expr.terms())
            assert deg_mu(p, mu) == scan
    check(8, "deg_mu scan", run)


def test_criterion_8_contained_matrices():
    def run():
        rng = random.Random(88)
        for _ in range(200):
            n = rng.randint(2, 4)
            comps = [_random_poly(rng, n) for _ in range(n)]
            f = parse_map("; ".join(str(c) for c in comps))
            rows = [sorted(set(sympy.Poly(to_sympy(c), *X[:n]).monoms())) for c in comps]
            direct = set(itertools.product(*rows))
            assert set(contained_matrices(f)) == direct
    check(8, "contained matrices", run)


def _power_iteration(M, steps=20000):
    B = np.array(M, dtype=float) + np.eye(len(M))
    v = np.ones(len(M))
    est = 0.0
    for _ in range(steps):
        w = B @ v
        est = np.linalg.norm(w) / np.linalg.norm(v)
        v = w / np.linalg.norm(w)
    return est - 1.0


def test_criterion_8_spectral_radius():
    def run():
        rng = random.Random(888)
        for _ in range(200):
            n = rng.randint(1, 5)
            M = [[rng.choice([0, 0, 1, 2, 3]) for _ in range(n)] for _ in range(n)]
            rho = spectral_radius(M).refine(mpq(1, 10**9))
            est = _power_iteration(M)
            tol = 2e-3 * max(1.0, est)
            assert float(rho.lo) - tol <= est <= float(rho.hi) + tol, (M, est, rho)
    check(8, "spectral radius", run)


def test_criterion_8_inverses():
    def run():
        rng = random.Random(8888)
        maps = []
        for _ in range(40):
            a, t = random_affine_triangular(rng)
            maps += [a, t, a.then(t)]
            maps.append(random_affine(rng, 3).then(random_triangular(rng, 3)))
        maps += [families.dim3_family(2, 1, 3), families.second_family(1, 2, 2),
                 families.shift_like(4, "x1^2*x2")]
        for g in maps:
            n = g.forward.n
            assert compose(g.forward, g.inverse) == identity_map(n)
            assert compose(g.inverse, g.forward) == identity_map(n)
        return f"{len(maps)} automorphisms"
    check(8, "inverses", run)


def test_criterion_8_sandwich():
    def run():
        rng = random.Random(88888)
        for _ in range(100):
            f = compose(make_permutation(rng.sample([1, 2, 3], 3)).forward,
                        random_triangular(rng, 3).forward)
            g = random_affine(rng, 3).then(random_triangular(rng, 3, deg=2))
            r = rng.randint(1, 4)
            fr = f
            for _ in range(r - 1):
                fr = compose(f, fr)
            h = g.conjugate(fr)
            dg, dgi = g.forward.degree(), g.inverse.degree()
            assert h.degree() <= dgi * fr.degree() * dg
            assert fr.degree() <= dg * h.degree() * dgi
    check(8, "sandwich", run)
