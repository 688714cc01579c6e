import random

import pytest
from hypothesis import given, settings, strategies as st

from dyndeg.automorphism import (Automorphism, PermTriForm, compose, degree_sequence,
                                 identity_map, make_affine, make_permutation, make_triangular,
                                 parse_map)
from dyndeg.conjugation import (ConjugationError, apply_transfer, bruhat_reduce,
                                can_eliminate_case1, can_eliminate_case2, conjugate,
                                eliminate_tail_case1, eliminate_tail_case2,
                                to_permutation_triangular)
from dyndeg.polyring import QQ, Polynomial

TAILS4 = ["0", "x1^2 + 1", "x1*x2 + x2^2 + x1", "x1*x3 + x2^2 + x1^2*x3"]


def form(omega, tails=TAILS4, cs=(2, 3, 5, 7)):
    n = len(omega)
    return PermTriForm(tuple(omega), tuple(QQ.coerce(c) for c in cs[:n]),
                       tuple(Polynomial.parse(t, n) for t in tails[:n]))


def rand_tri(rng, n=4):
    tails = []
    for i in range(n):
        p = Polynomial.zero(n)
        for _ in range(rng.randint(0, 2) if i else 0):
            e = [0] * n
            for _ in range(rng.randint(1, 2)):
                e[rng.randrange(i)] += 1
            p = p + Polynomial.from_terms(n, [(e, rng.randint(-2, 2))])
        tails.append(p)
    return make_triangular([rng.choice([1, -1, 2]) for _ in range(n)], tails)


def rand_affine(rng, n=4):
    while True:
        try:
            return make_affine([[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)],
                               [rng.randint(-1, 1) for _ in range(n)])
        except Exception:
            continue


def test_conjugate_identity_and_permutation():
    f = form((2, 4, 1, 3)).realize()
    assert conjugate(f, Automorphism.identity(4)) == f
    g = make_permutation((2, 1, 3, 4))
    h = conjugate(f, g)
    assert h == compose(g.forward, compose(f, g.inverse))


def test_bruhat_examples():
    L, R, pi = bruhat_reduce([[0, 1], [1, 0]], QQ)
    assert sorted(pi) == [0, 1]
    alpha = make_permutation((3, 1, 4, 2))
    tau = rand_tri(random.Random(0))
    mv = to_permutation_triangular(alpha, tau)
    assert mv.conjugator.forward == identity_map(4)
    assert mv.form.realize() == compose(alpha.forward, tau.forward)
    alpha = make_affine([[1, 1], [1, 0]])
    mv = to_permutation_triangular(alpha, make_triangular([1, 1], ["0", "x1^2"]))
    assert mv.form.omega == (2, 1)
    with pytest.raises(ConjugationError):
        to_permutation_triangular(parse_map("x1^2 + x2; x1"), Automorphism.identity(2))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_bruhat_random(seed):
    rng = random.Random(seed)
    a, t = rand_affine(rng), rand_tri(rng)
    mv = to_permutation_triangular(a, t)
    f = compose(a.forward, t.forward)
    assert mv.conjugator.verify()
    assert mv.conjugator.conjugate(f) == mv.form.realize()


def test_case1_examples():
    # omega14 = (2,4,3,1): i = 2, omega(2) = 4 > omega(1) = 2
    fm = form((2, 4, 3, 1))
    assert can_eliminate_case1(fm.omega, 2)
    mv = eliminate_tail_case1(fm, 2)
    assert mv.form.tails[1].is_zero() and mv.form.omega == fm.omega
    assert mv.conjugator.conjugate(fm.realize()) == mv.form.realize()
    again = eliminate_tail_case1(mv.form, 2)
    assert again.conjugator.forward == identity_map(4)
    with pytest.raises(ConjugationError):
        eliminate_tail_case1(fm, 4)


def test_case2_examples():
    # omega10 = (1,4,2,3): i = 4, omega(4) = 3, covered by j = 1, 3
    fm = form((1, 4, 2, 3))
    assert can_eliminate_case2(fm.omega, 4)
    mv = eliminate_tail_case2(fm, 4)
    assert mv.form.tails[2].is_zero() and mv.form.omega == fm.omega
    assert mv.conjugator.conjugate(fm.realize()) == mv.form.realize()
    again = eliminate_tail_case2(mv.form, 4)
    assert again.conjugator.forward == identity_map(4)
    # omega23 = (2,4,1,3): p2 then p3
    fm = form((2, 4, 1, 3))
    m1 = eliminate_tail_case2(fm, 3)  # omega(3) = 1: constant p1 (here zero)
    m2 = eliminate_tail_case1(m1.form, 2)
    m3 = eliminate_tail_case2(m2.form, 4)
    assert m3.form.tails[1].is_zero() and m3.form.tails[2].is_zero()
    with pytest.raises(ConjugationError):
        eliminate_tail_case2(form((4, 3, 2, 1)), 1)


def test_transfer_examples():
    # omega9 -> omega12 by (x2, x1, x3, x4) once p2 = 0
    fm = form((1, 3, 4, 2))
    fm = eliminate_tail_case1(fm, 2).form
    mv = apply_transfer(fm, (2, 1, 3, 4))
    assert mv.form.omega == (3, 2, 4, 1)
    assert mv.conjugator.conjugate(fm.realize()) == mv.form.realize()
    assert apply_transfer(fm, (1, 2, 3, 4)).form == fm
    with pytest.raises(ConjugationError):
        apply_transfer(form((1, 3, 4, 2)), (4, 3, 2, 1))


@settings(max_examples=30, deadline=None)
@given(st.permutations([1, 2, 3, 4]), st.integers(0, 10**6))
def test_eliminations_preserve_omega(omega, seed):
    rng = random.Random(seed)
    t = rand_tri(rng)
    fm = PermTriForm.from_map(compose(make_permutation(tuple(omega)).forward, t.forward))
    for i in range(1, 5):
        for can, elim in ((can_eliminate_case1, eliminate_tail_case1),
                          (can_eliminate_case2, eliminate_tail_case2)):
            if can(fm.omega, i):
                mv = elim(fm, i)
                assert mv.form.omega == fm.omega
                assert mv.conjugator.verify()
                assert mv.conjugator.conjugate(fm.realize()) == mv.form.realize()
                a, b = degree_sequence(fm.realize(), 3), degree_sequence(mv.form.realize(), 3)
                dg, dgi = mv.conjugator.forward.degree(), mv.conjugator.inverse.degree()
                for x, y in zip(a, b):
                    assert y <= dg * x * dgi and x <= dgi * y * dg
