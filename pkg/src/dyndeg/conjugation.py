"""Normal forms by conjugation: affine-triangular to permutation-triangular,
the two tail eliminations, and coordinate-permutation transfers.

Every move returns a conjugator h with f' = h o f o h^{-1}, checked exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .automorphism import (Automorphism, PermTriForm, PolyMap, compose, make_affine,
                           make_permutation, make_triangular)
from .polyring import Polynomial, PolynomialError

__all__ = [
    "ConjugationError", "Move", "conjugate", "to_permutation_triangular",
    "bruhat_reduce", "eliminate_tail_case1", "eliminate_tail_case2",
    "can_eliminate_case1", "can_eliminate_case2", "apply_transfer",
    "affine_data", "triangular_data",
]


class ConjugationError(PolynomialError):
    pass


@dataclass(frozen=True)
class Move:
    """One conjugation step: ``form`` = conjugator o previous o conjugator^{-1}."""

    step: str
    form: PermTriForm
    conjugator: Automorphism
    i: int | None = None

    def record(self) -> dict:
        return {"step": self.step, "i": self.i, "g": str(self.conjugator.forward)}


def conjugate(f: PolyMap, g: Automorphism) -> PolyMap:
    """g o f o g^{-1}."""
    return g.conjugate(f)


def _check(prev: PolyMap, h: Automorphism, form: PermTriForm) -> None:
    if h.conjugate(prev) != form.realize():
        raise ConjugationError("conjugation check failed")


# -- reading affine / triangular input ---------------------------------------------

def affine_data(alpha: PolyMap) -> tuple[list[list], list]:
    """(A, b) with alpha(x) = A x + b."""
    if alpha.degree() > 1:
        raise ConjugationError("alpha is not affine")
    n, fld = alpha.n, alpha.field
    A = [[fld.coerce(0)] * n for _ in range(n)]
    b = []
    for i, comp in enumerate(alpha.components):
        for e, c in comp.terms():
            if sum(e):
                A[i][e.index(1)] = c
        b.append(comp.constant_term())
    return A, b


def triangular_data(tau: PolyMap) -> tuple[list, list[Polynomial]]:
    """(c, p) with tau_i = c_i x_i + p_i(x_1..x_{i-1})."""
    n, fld = tau.n, tau.field
    cs, ps = [], []
    for i, comp in enumerate(tau.components):
        e = [0] * n
        e[i] = 1
        c = comp.coefficient(e)
        p = comp - Polynomial.var(i, n, fld).scale(c) if c else comp
        if not c or not p.uses_only(range(i)):
            raise ConjugationError(f"tau component {i + 1} is not of the form c*x{i + 1} + p(x1..x{i})")
        cs.append(c)
        ps.append(p)
    return cs, ps


# -- Bruhat-style reduction --------------------------------------------------------

def bruhat_reduce(A: Sequence[Sequence], field) -> tuple[list[list], list[list], list[int]]:
    """Lower-unitriangular L with L A = R whose rows end in distinct columns.

    Rows are processed top-down; the last nonzero entry of each row is cleared
    against earlier reduced rows until its column is new.  Returns (L, R, pi)
    with pi[i] the column of the last nonzero entry of R's row i.
    """
    n = len(A)
    p = field.characteristic
    red = (lambda x: x % p) if p else (lambda x: x)
    R: list[list] = []
    L: list[list] = []
    pi: list[int] = []
    for i in range(n):
        row = [field.coerce(x) for x in A[i]]
        lrow = [field.coerce(1 if j == i else 0) for j in range(n)]
        while True:
            last = max((j for j in range(n) if row[j]), default=None)
            if last is None:
                raise ConjugationError("linear part is singular")
            if last not in pi:
                break
            k = pi.index(last)
            fac = red(row[last] * field.inverse(R[k][last]))
            row = [red(x - fac * y) for x, y in zip(row, R[k])]
            lrow = [red(x - fac * y) for x, y in zip(lrow, L[k])]
        R.append(row)
        L.append(lrow)
        pi.append(last)
    return L, R, pi


def to_permutation_triangular(alpha: Automorphism | PolyMap, tau: Automorphism | PolyMap) -> Move:
    """Conjugate alpha o tau by a linear lower-triangular map into omega o s."""
    a = alpha.forward if isinstance(alpha, Automorphism) else alpha
    t = tau.forward if isinstance(tau, Automorphism) else tau
    triangular_data(t)
    A, _ = affine_data(a)
    fld = a.field
    L, _, _ = bruhat_reduce(A, fld)
    h = make_affine(L, None, fld)
    f = compose(a, t)
    image = h.conjugate(f)
    form = PermTriForm.from_map(image)
    if form is None:
        raise ConjugationError("reduction did not produce a permutation-triangular map")
    return Move("bruhat", form, h)


# -- tail eliminations --------------------------------------------------------------

def can_eliminate_case1(omega: Sequence[int], i: int) -> bool:
    """omega(i) != i and omega(i) exceeds omega(1..i-1) (1-based i)."""
    w = omega[i - 1]
    return w != i and all(w > omega[j] for j in range(i - 1))


def _covering(omega: Sequence[int], i: int) -> list[int] | None:
    """j_1..j_{w-1} (1-based, j_t < i) with omega(j_t) = t, or None."""
    w = omega[i - 1]
    js = []
    for t in range(1, w):
        j = omega.index(t) + 1
        if j >= i:
            return None
        js.append(j)
    return js


def can_eliminate_case2(omega: Sequence[int], i: int) -> bool:
    return omega[i - 1] != i and _covering(omega, i) is not None


def eliminate_tail_case1(form: PermTriForm, i: int) -> Move:
    """Remove p_i by conjugating with h = (.., x_i + c_i^{-1} p_i, ..)."""
    if not can_eliminate_case1(form.omega, i):
        raise ConjugationError(f"case-1 elimination not licensed at i={i} for omega={form.omega}")
    n, fld = form.n, form.field
    p = form.tails[i - 1]
    if p.is_zero():
        return Move("elim1", form, Automorphism.identity(n, fld), i)
    tails = [Polynomial.zero(n, fld)] * n
    tails[i - 1] = p.scale(fld.inverse(form.constants[i - 1]))
    h = make_triangular([1] * n, tails, fld)
    new = PermTriForm.from_map(h.conjugate(form.realize()))
    if new is None or new.omega != form.omega or not new.tails[i - 1].is_zero():
        raise ConjugationError("case-1 elimination left the permutation-triangular shape")
    return Move("elim1", new, h, i)


def eliminate_tail_case2(form: PermTriForm, i: int) -> Move:
    """Remove p_{omega(i)} by conjugating with h = (.., x_i - q(x_{j_1}, ..), ..)
    where q(f_{j_1}, .., f_{j_{w-1}}) = p_{omega(i)}."""
    omega = form.omega
    if not can_eliminate_case2(omega, i):
        raise ConjugationError(f"case-2 elimination not licensed at i={i} for omega={omega}")
    n, fld = form.n, form.field
    w = omega[i - 1]
    p = form.tails[w - 1]
    if p.is_zero():
        return Move("elim2", form, Automorphism.identity(n, fld), i)
    js = _covering(omega, i)
    m = w - 1
    f = form.realize()
    if m == 0:
        # p_1 is a constant; q is that constant
        return _finish_case2(form, f, i, w, p)
    # tau_N = (f_{j_1}, .., f_{j_m}) is triangular on x_1..x_m
    proj = list(range(n))
    sub_tails, sub_c = [], []
    for t, j in enumerate(js, start=1):
        comp = f[j - 1]
        if not comp.uses_only(range(m)):
            raise ConjugationError("covering components leave x_1..x_{w-1}")
        sub_c.append(form.constants[t - 1])
        sub_tails.append(form.tails[t - 1].rename(proj, m))
    tau_n = make_triangular(sub_c, sub_tails, fld)
    q = p.rename(proj, m).substitute(tau_n.inverse.components)
    # q in y_1..y_m; send y_t to x_{j_t}
    q = q.rename([j - 1 for j in js], n)
    return _finish_case2(form, f, i, w, q)


def _finish_case2(form: PermTriForm, f: PolyMap, i: int, w: int, q: Polynomial) -> Move:
    n, fld, omega = form.n, form.field, form.omega
    tails = [Polynomial.zero(n, fld)] * n
    tails[i - 1] = -q
    h = make_triangular([1] * n, tails, fld)
    new = PermTriForm.from_map(h.conjugate(f))
    if new is None or new.omega != omega or not new.tails[w - 1].is_zero():
        raise ConjugationError("case-2 elimination left the permutation-triangular shape")
    return Move("elim2", new, h, i)


def apply_transfer(form: PermTriForm, g: Automorphism | Sequence[int]) -> Move:
    """g o f o g^{-1} for a coordinate permutation g, read back as omega o s."""
    if not isinstance(g, Automorphism):
        g = make_permutation(g, form.field)
    if g.forward.degree() != 1 or any(len(c) != 1 or c.total_degree() != 1 or
                                      next(iter(c.terms()))[1] != 1 for c in g.forward):
        raise ConjugationError("transfer must be a coordinate permutation")
    new = PermTriForm.from_map(g.conjugate(form.realize()))
    if new is None:
        raise ConjugationError("transfer result is not permutation-triangular")
    return Move("transfer", new, g)
