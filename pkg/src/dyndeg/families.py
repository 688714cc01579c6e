"""Named maps with known or computable dynamical degrees.

The dimension-3 family (x3 + x1^a x2^b, x2 + x1^c, x1) and its second realizer,
permutation-elementary maps, the two conjugation chains that bring
permutation-triangular maps of a shift shape to permutation-elementary form,
and two quadratic homogeneous automorphisms of A^5.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .algebraic import AlgebraicNumber
from .automorphism import (Automorphism, PermTriForm, PolyMap, compose, make_triangular,
                           parse_map)
from .polyring import QQ, FieldSpec, Polynomial, PolynomialError
from .projection import (LambdaNode, ProjectionWitness, affine_fiber_reduce, lambda_engine,
                         remark_decompose, sub_map)

__all__ = [
    "FamilyError", "dim3_family", "dim3_lambda_formula", "second_family",
    "perm_elementary_lambda", "shift_like", "t1_map", "t2_map", "t_chain_reduce", "ChainResult",
    "make_S1", "make_S2", "s1_lambda", "s2_lambda", "s1_decomposition",
]


class FamilyError(PolynomialError):
    pass


def _automorphism(f: PolyMap) -> Automorphism:
    form = PermTriForm.from_map(f)
    if form is None:
        raise FamilyError("map is not permutation-triangular")
    return form.automorphism()


# -- dimension three ---------------------------------------------------------------

def _check_abc(a: int, b: int, c: int) -> None:
    if min(a, b, c) < 0:
        raise FamilyError("a, b, c must be nonnegative")


def dim3_family(a: int, b: int, c: int, field: FieldSpec = QQ) -> Automorphism:
    """(x3 + x1^a x2^b, x2 + x1^c, x1)."""
    _check_abc(a, b, c)
    f = parse_map(f"x3 + x1^{a}*x2^{b}; x2 + x1^{c}; x1", field)
    return _automorphism(f)


def dim3_lambda_formula(a: int, b: int, c: int) -> AlgebraicNumber:
    """(a + sqrt(a^2 + 4bc)) / 2, the largest root of x^2 - a x - bc."""
    _check_abc(a, b, c)
    if a == 0 and b * c == 0:
        raise FamilyError("(a, b, c) gives lambda = 0")
    disc = a * a + 4 * b * c
    s = math.isqrt(disc)
    if s * s == disc:
        return AlgebraicNumber.rational((a + s) // 2)
    return AlgebraicNumber.from_poly_root([-b * c, -a, 1], a, a + 1 + b * c)


def second_family(a: int, b: int, c: int, field: FieldSpec = QQ) -> Automorphism:
    """(x3 + x1^a x2^{bc}, x1, x2)."""
    _check_abc(a, b, c)
    f = parse_map(f"x3 + x1^{a}*x2^{b * c}; x1; x2", field)
    return _automorphism(f)


# -- permutation-elementary maps -----------------------------------------------------

def shift_like(n: int, p: str | Polynomial, field: FieldSpec = QQ) -> Automorphism:
    """(x_{n} + p(x_1..x_{n-1}), x_1, .., x_{n-1}) on n variables."""
    if n < 2:
        raise FamilyError("shift-like maps need n >= 2")
    if isinstance(p, str):
        p = Polynomial.parse(p, n, field)
    if not p.uses_only(range(n - 1)):
        raise FamilyError(f"p must only use x1..x{n - 1}")
    comps = [Polynomial.var(n - 1, n, field) + p] + [Polynomial.var(i, n, field) for i in range(n - 1)]
    return _automorphism(PolyMap(comps))


def perm_elementary_lambda(f: Automorphism | PolyMap, R: int = 10) -> LambdaNode:
    """lambda of a permutation-elementary map; its minimal polynomial has degree <= n - 1."""
    m = f.forward if isinstance(f, Automorphism) else f
    form = PermTriForm.from_map(m)
    if form is None or not form.is_permutation_elementary():
        raise FamilyError("map is not permutation-elementary")
    node = lambda_engine(m, None, R)
    if node.value is not None and node.value.degree > m.n - 1:
        raise FamilyError(f"minimal polynomial degree {node.value.degree} exceeds n - 1 = {m.n - 1}")
    return node


# -- the T1 / T2 chains ----------------------------------------------------------------

def _tails(n: int, tails: dict[int, str | Polynomial], field: FieldSpec) -> list[Polynomial]:
    out = []
    for i in range(1, n + 1):
        p = tails.get(i, Polynomial.zero(n, field))
        if isinstance(p, str):
            p = Polynomial.parse(p, n, field)
        if not p.uses_only(range(i - 1)):
            raise FamilyError(f"p{i} must only use x1..x{i - 1}")
        out.append(p)
    return out


def t1_map(n: int, tails: dict[int, str | Polynomial], field: FieldSpec = QQ) -> PolyMap:
    """(x1, x_n + p_n, .., x3 + p3, x2 + p2)."""
    ps = _tails(n, tails, field)
    comps = [Polynomial.var(0, n, field)]
    for i in range(n, 1, -1):
        comps.append(Polynomial.var(i - 1, n, field) + ps[i - 1])
    return PolyMap(comps)


def t2_map(n: int, tails: dict[int, str | Polynomial], field: FieldSpec = QQ) -> PolyMap:
    """(x2 + p2, x3 + p3, .., x_n + p_n, x1)."""
    ps = _tails(n, tails, field)
    comps = [Polynomial.var(i - 1, n, field) + ps[i - 1] for i in range(2, n + 1)]
    comps.append(Polynomial.var(0, n, field))
    return PolyMap(comps)


@dataclass
class ChainResult:
    shape: str
    perm_elementary: PolyMap
    conjugators: list[Automorphism]

    @property
    def steps(self) -> int:
        return len(self.conjugators)


def _shape(f: PolyMap) -> str:
    n = f.n
    form = PermTriForm.from_map(f)
    if form is None or any(c != 1 for c in form.constants):
        raise FamilyError("input is not of T1 or T2 shape")
    if form.omega == (1,) + tuple(range(n, 1, -1)):
        return "T1"
    if form.omega == tuple(range(2, n + 1)) + (1,):
        return "T2"
    raise FamilyError("input is not of T1 or T2 shape")


def t_chain_reduce(f: PolyMap) -> ChainResult:
    """Conjugate by g_k = (.., x_k - q_k(x_1..x_{k-1}), ..), k = 2, .., n-1, with
    f' = g_k^{-1} o f o g_k, removing the tail of x_k at each step.

    Each intermediate map must stay of the same shape; otherwise FamilyError.
    """
    shape = _shape(f)
    n, fld = f.n, f.field
    cur = f
    conjs: list[Automorphism] = []
    for k in range(2, n):
        form = PermTriForm.from_map(cur)
        q = form.tails[k - 1]
        if q.is_zero():
            continue
        tails = [Polynomial.zero(n, fld)] * n
        tails[k - 1] = -q
        g = make_triangular([1] * n, tails, fld)
        nxt = g.inv().conjugate(cur)
        new = PermTriForm.from_map(nxt)
        if new is None or new.omega != form.omega or not new.tails[k - 1].is_zero():
            raise FamilyError(f"{shape}: step k={k} leaves the {shape} shape")
        conjs.append(g)
        cur = nxt
    form = PermTriForm.from_map(cur)
    if not form.is_permutation_elementary():
        raise FamilyError(f"{shape}: chain did not reach a permutation-elementary map")
    # exact conjugacy of the whole chain
    total = f
    for g in conjs:
        total = compose(g.inverse, compose(total, g.forward))
    if total != cur:
        raise FamilyError("chain conjugacy check failed")
    return ChainResult(shape, cur, conjs)


# -- two quadratic maps of A^5 ---------------------------------------------------------

def _quad(text: str | Polynomial, n: int, field: FieldSpec) -> Polynomial:
    p = Polynomial.parse(text, n, field) if isinstance(text, str) else text
    if not p.uses_only(range(2)):
        raise FamilyError("tau_i must be a polynomial in x1, x2")
    if not p.is_zero() and any(sum(e) != 2 for e in p.support()):
        raise FamilyError("tau_i must be quadratic homogeneous")
    return p


def make_S1(o1=0, tau2: str | Polynomial = "0", tau3: str | Polynomial = "0",
            tau4: str | Polynomial = "0", field: FieldSpec = QQ) -> PolyMap:
    n = 5
    t2, t3, t4 = (_quad(t, n, field) for t in (tau2, tau3, tau4))
    x = [Polynomial.var(i, n, field) for i in range(n)]
    o1 = field.coerce(o1)
    return PolyMap([
        x[0],
        x[1] + (x[0] * x[0]).scale(o1) if o1 else x[1],
        x[2] - x[0] * x[3] + t2,
        x[3] + x[0] * x[4] + x[1] * x[2] + t3,
        x[4] + x[1] * x[3] + t4,
    ])


def make_S2(a=1, o1=0, o2=0, o3=0, o4=0, field: FieldSpec = QQ) -> PolyMap:
    if not field.coerce(a):
        raise FamilyError("S2 needs a != 0")
    n = 5
    x = [Polynomial.var(i, n, field) for i in range(n)]
    a, o1, o2, o3, o4 = (field.coerce(v) for v in (a, o1, o2, o3, o4))
    sq1 = x[0] * x[0]
    return PolyMap([
        x[0],
        x[1] + (x[3] * x[3]).scale(a) + sq1.scale(o1),
        x[2] - (x[3] * x[4]).scale(2 * a) + x[0] * x[1] + sq1.scale(o2),
        x[3] + (x[4] * x[4]).scale(a) + x[0] * x[2] + sq1.scale(o3),
        x[4] + x[0] * x[3] + sq1.scale(o4),
    ])


def _witness(f: PolyMap, S: Sequence[int]) -> ProjectionWitness:
    S = tuple(S)
    base = sub_map(f, S)
    return ProjectionWitness(S, base, PermTriForm.from_map(base) is not None)


def s1_lambda(f: PolyMap | None = None) -> AlgebraicNumber:
    """lambda(S1) from the base (x1, x2 + o1 x1^2): the fiber is affine over k(x1, x2)."""
    f = make_S1() if f is None else f
    return affine_fiber_reduce(f, _witness(f, (0, 1)))


def s1_decomposition(f: PolyMap | None = None, r: int = 3) -> dict:
    """f^r = g^r o G_r for the base g; G_r is affine in x3, x4, x5 over k(x1, x2)."""
    f = make_S1() if f is None else f
    out = remark_decompose(f, _witness(f, (0, 1)), r)
    G = out["G_r"]
    out["fiber_affine"] = all(G[j].degree_in((2, 3, 4)) <= 1 for j in (2, 3, 4))
    return out


def s2_lambda(f: PolyMap | None = None, R: int = 10) -> LambdaNode:
    """lambda(S2) = max(1, lambda of the fiber over k(x1)); x1 is fixed."""
    f = make_S2() if f is None else f
    base = lambda_engine(f, (0,), R)
    fiber = lambda_engine(f, (1, 2, 3, 4), R)
    val = None
    if base.value is not None and fiber.value is not None:
        val = max(base.value, fiber.value)
    if val is not None and val.degree > 4:
        raise FamilyError(f"minimal polynomial degree {val.degree} > 4")
    return LambdaNode(tuple(range(5)), "projection", val, None, [base, fiber], (0,))
