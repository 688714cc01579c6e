"""Weighted degrees, contained matrices, the maximal eigenvalue and eigenvector.

Everything here can be restricted to an *active* set of coordinates J.  The
remaining variables are then treated as constants of the fraction field
K = k(x_j : j not in J), so only exponents on J matter: a monomial of f_i
contributes its J-part to row i, and rows/columns run over J only.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field as dc_field
from itertools import combinations, product
from typing import Iterable, Sequence

import numpy as np
from gmpy2 import mpq

from .algebraic import (AlgebraicError, AlgebraicNumber, NFElement, NumberField,
                        char_poly, largest_real_root, poly_divmod)
from .automorphism import PolyMap
from .polyring import Polynomial, PolynomialError

__all__ = [
    "MU_STABLE", "THETA_ONE", "INCONCLUSIVE", "MaxData", "Verdict",
    "deg_mu", "mu_degree_of_map", "contained_matrices", "row_supports",
    "maximal_eigenvalue", "maximal_eigenvector", "stability_verdict",
    "verify_eigenvector", "leading_parts", "leading_stability",
]

MU_STABLE = "MU_STABLE"
THETA_ONE = "THETA_ONE"
INCONCLUSIVE = "INCONCLUSIVE"

# float pre-screen window for Perron roots; defective eigenvalues lose accuracy
_WINDOW = 1e-2
_MAX_TIES = 64
_FIXED_POINT_CAP = 64


def _active(f: PolyMap, active: Iterable[int] | None) -> tuple[int, ...]:
    return tuple(range(f.n)) if active is None else tuple(sorted(active))


def _as_field_vector(mu: Sequence, K: NumberField | None) -> tuple[list, NumberField | None]:
    if K is None:
        K = next((m.field for m in mu if isinstance(m, NFElement)), None)
    if K is None:
        return [mpq(m) for m in mu], None
    return [K(m) for m in mu], K


def deg_mu(p: Polynomial, mu: Sequence, active: Sequence[int] | None = None):
    """max over the terms of p of sum_i a_i mu_i (mu indexed like ``active``)."""
    if p.is_zero():
        raise PolynomialError("deg_mu of the zero polynomial")
    J = tuple(range(p.nvars)) if active is None else tuple(active)
    vals, K = _as_field_vector(mu, None)
    if len(vals) != len(J):
        raise PolynomialError("weight vector length mismatch")
    best = None
    seen = set()
    for e, _ in p.terms():
        a = tuple(e[j] for j in J)
        if a in seen:
            continue
        seen.add(a)
        w = sum((vals[k] * a[k] for k in range(len(J)) if a[k]), K.zero if K else mpq(0))
        if best is None or w > best:
            best = w
    return best


def mu_degree_of_map(f: PolyMap, mu: Sequence, active: Sequence[int] | None = None):
    """max_i deg_mu(f_i)/mu_i; ``math.inf`` when some mu_i = 0 but deg_mu(f_i) > 0."""
    J = _active(f, active)
    vals, K = _as_field_vector(mu, None)
    best = None
    for k, i in enumerate(J):
        d = deg_mu(f[i], vals, J)
        if vals[k] == 0:
            if d > 0:
                return math.inf
            continue
        q = d / vals[k]
        if best is None or q > best:
            best = q
    return best


def _restricted_rows(f: PolyMap, J: tuple[int, ...]) -> list[list[tuple[int, ...]]]:
    rows = []
    for i in J:
        if f[i].is_zero():
            raise PolynomialError(f"component {i + 1} is zero")
        rows.append(sorted({tuple(e[j] for j in J) for e in f[i].support()}))
    return rows


def contained_matrices(f: PolyMap, active: Iterable[int] | None = None) -> list[tuple[tuple[int, ...], ...]]:
    """Every matrix whose i-th row is the exponent vector of a monomial of f_i."""
    rows = _restricted_rows(f, _active(f, active))
    return sorted(product(*rows))


def _prune(row: list[tuple[int, ...]]) -> list[tuple[int, ...]]:
    """Drop exponent vectors dominated componentwise by another one.

    A dominated vector never exceeds its dominator under a nonnegative weight,
    so neither the maximal eigenvalue nor the eigenvector search changes.
    """
    out = []
    for a in row:
        if not any(b != a and all(x <= y for x, y in zip(a, b)) for b in row):
            out.append(a)
    return out


def row_supports(f: PolyMap, active: Iterable[int] | None = None, prune: bool = True):
    rows = _restricted_rows(f, _active(f, active))
    return [_prune(r) for r in rows] if prune else rows


@dataclass
class MaxData:
    theta: AlgebraicNumber
    witness: tuple[tuple[int, ...], ...]
    active: tuple[int, ...]
    ties: list = dc_field(default_factory=list)
    mu: tuple | None = None
    strictly_positive: bool | None = None
    leading_dominant: str | None = None

    @property
    def field(self) -> NumberField:
        return NumberField(self.theta)

    def zeros(self) -> tuple[int, ...]:
        """Original coordinate indices where mu vanishes."""
        if self.mu is None:
            return ()
        return tuple(i for i, m in zip(self.active, self.mu) if m == 0)

    def to_json(self) -> dict:
        out = {"theta": self.theta.to_json(),
               "witness": [list(r) for r in self.witness],
               "active": [i + 1 for i in self.active]}
        if self.mu is not None:
            out["mu"] = [m.to_json() for m in self.mu]
            out["mu_approx"] = [m.approx() for m in self.mu]
        if self.leading_dominant is not None:
            out["leading_dominant"] = self.leading_dominant
        return out


_ROOT_CACHE: dict[tuple[int, ...], AlgebraicNumber] = {}


def _perron(cp: tuple[int, ...]) -> AlgebraicNumber:
    r = _ROOT_CACHE.get(cp)
    if r is None:
        r = largest_real_root(list(cp))
        if r is None or r < 0:
            r = AlgebraicNumber.rational(0)
        _ROOT_CACHE[cp] = r
    return r


def _divides(minpoly: Sequence[int], cp: Sequence[int]) -> bool:
    return not poly_divmod(cp, minpoly)[1]


def maximal_eigenvalue(f: PolyMap, active: Iterable[int] | None = None) -> MaxData:
    """theta = max Perron root over the (pruned) contained matrices."""
    J = _active(f, active)
    rows = row_supports(f, J)
    k = len(J)
    sizes = [len(r) for r in rows]
    total = math.prod(sizes)
    if total > 2_000_000:
        raise PolynomialError(f"{total} contained matrices after pruning; too many to enumerate")
    # batched float screen
    idx = np.indices(sizes).reshape(k, -1).T
    mats = np.empty((total, k, k), dtype=float)
    for r in range(k):
        table = np.array(rows[r], dtype=float).reshape(sizes[r], k)
        mats[:, r, :] = table[idx[:, r]]
    rho = np.abs(np.linalg.eigvals(mats)).max(axis=1) if k else np.zeros(total)
    top = rho.max()
    cand = np.nonzero(rho >= top - _WINDOW * max(1.0, top))[0]
    best: AlgebraicNumber | None = None
    scored = []
    for c in cand:
        M = tuple(rows[r][idx[c, r]] for r in range(k))
        cp = tuple(char_poly(M))
        root = _perron(cp)
        scored.append((M, cp, root))
        if best is None or root > best:
            best = root
    ties = [(M, cp) for M, cp, root in scored if _divides(best.minpoly, cp) and root == best]
    ties.sort(key=lambda t: (-sum(t[0][i][i] for i in range(k)), t[0]))
    return MaxData(best, ties[0][0], J, ties=[t[0] for t in ties])


# -- eigenvector search --------------------------------------------------------

def _kernel(A: list[list[NFElement]], K: NumberField) -> list[list[NFElement]]:
    """Basis of the right kernel of A over Q(theta)."""
    rows = [list(r) for r in A]
    n = len(rows[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(rows)) if not rows[i][c].is_zero()), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = rows[r][c].inverse()
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and not rows[i][c].is_zero():
                fac = rows[i][c]
                rows[i] = [x - fac * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        v = [K.zero] * n
        v[fc] = K.one
        for i, pc in enumerate(pivots):
            v[pc] = -rows[i][fc]
        basis.append(v)
    return basis


def _dot(a: Sequence[int], v: Sequence[NFElement], K: NumberField) -> NFElement:
    acc = K.zero
    for x, y in zip(a, v):
        if x:
            acc = acc + y * x
    return acc


def verify_eigenvector(rows: list[list[tuple[int, ...]]], mu: Sequence[NFElement],
                       K: NumberField) -> bool:
    """deg_mu(f_i) = theta * mu_i for every row, exactly."""
    theta = K.theta
    if any(m.sign() < 0 for m in mu) or all(m.is_zero() for m in mu):
        return False
    for i, row in enumerate(rows):
        best = max((_dot(a, mu, K) for a in row), key=_Key)
        if not (best - theta * mu[i]).is_zero():
            return False
    return True


class _Key:
    """Exact ordering wrapper so max() works on NFElements."""

    __slots__ = ("v",)

    def __init__(self, v):
        self.v = v

    def __lt__(self, other):
        return self.v < other.v


def _normalize(v: list[NFElement]) -> tuple[NFElement, ...]:
    last = next(x for x in reversed(v) if not x.is_zero())
    inv = last.inverse()
    return tuple(x * inv for x in v)


def _cone_rays(basis: list[list[NFElement]], rows, K: NumberField) -> list[list[NFElement]]:
    """Extreme rays of {c : B c >= 0, theta (Bc)_i - <a, Bc> >= 0}."""
    d = len(basis)
    n = len(basis[0])
    theta = K.theta
    # each constraint as a linear form in c
    cons = []
    for j in range(n):
        cons.append([basis[t][j] for t in range(d)])
    for i, row in enumerate(rows):
        for a in row:
            cons.append([theta * basis[t][i] - _dot(a, basis[t], K) for t in range(d)])
    cons = [c for c in cons if any(not x.is_zero() for x in c)]
    rays = []
    seen = set()
    for sub in combinations(range(len(cons)), d - 1):
        ker = _kernel([cons[s] for s in sub], K) if d > 1 else [[K.one]]
        if len(ker) != 1:
            continue
        for sgn in (1, -1):
            c = [x * sgn for x in ker[0]]
            if all(sum((x * y for x, y in zip(con, c)), K.zero).sign() >= 0 for con in cons):
                v = [sum((c[t] * basis[t][j] for t in range(d)), K.zero) for j in range(n)]
                if all(x.is_zero() for x in v):
                    continue
                key = _normalize(v)
                sig = tuple(x.coeffs for x in key)
                if sig not in seen:
                    seen.add(sig)
                    rays.append(list(key))
    return rays


def _fixed_point(rows, K: NumberField) -> tuple[NFElement, ...] | None:
    theta_inv = K.theta.inverse()
    mu = [K.one] * len(rows)
    for _ in range(_FIXED_POINT_CAP):
        nxt = [max((_dot(a, mu, K) for a in row), key=_Key) * theta_inv for row in rows]
        if all((x - y).is_zero() for x, y in zip(nxt, mu)):
            return tuple(mu)
        if all(x.is_zero() for x in nxt):
            return None
        mu = list(_normalize(nxt))
    return None


def maximal_eigenvector(f: PolyMap, data: MaxData | None = None,
                        active: Iterable[int] | None = None) -> MaxData:
    """Attach a verified maximal eigenvector to ``data`` (computed if absent).

    Candidates are the Perron eigenvectors of the contained matrices reaching
    theta, by decreasing trace; a strictly positive vector wins, otherwise the
    one with fewest zeros.  mu stays None only when every candidate and the
    capped fixed-point iteration fail.
    """
    J = _active(f, active) if data is None else data.active
    if data is None:
        data = maximal_eigenvalue(f, J)
    K = NumberField(data.theta)
    theta = K.theta
    rows = row_supports(f, J)
    k = len(J)
    best = None
    for M in data.ties[:_MAX_TIES]:
        A = [[K(M[i][j]) - (theta if i == j else 0) for j in range(k)] for i in range(k)]
        basis = _kernel(A, K)
        if not basis:
            continue
        if len(basis) == 1:
            v = basis[0]
            if any(x.sign() < 0 for x in v):
                v = [-x for x in v]
            cands = [list(_normalize(v))] if all(x.sign() >= 0 for x in v) else []
        else:
            rays = _cone_rays(basis, rows, K)
            cands = []
            if rays:
                total = [sum((r[j] for r in rays), K.zero) for j in range(k)]
                cands.append(list(_normalize(total)))
        for v in cands:
            if verify_eigenvector(rows, v, K):
                zeros = sum(1 for x in v if x.is_zero())
                if best is None or zeros < best[0]:
                    best = (zeros, tuple(v))
                if zeros == 0:
                    break
        if best is not None and best[0] == 0:
            break
    if best is None:
        fp = _fixed_point(rows, K)
        if fp is not None and verify_eigenvector(rows, fp, K):
            best = (sum(1 for x in fp if x.is_zero()), fp)
    if best is not None:
        data.mu = best[1]
        data.strictly_positive = best[0] == 0
    return data


@dataclass
class Verdict:
    kind: str
    data: MaxData

    @property
    def theta(self) -> AlgebraicNumber:
        return self.data.theta

    @property
    def mu(self):
        return self.data.mu

    def zero_pattern(self) -> tuple[int, ...]:
        return self.data.zeros()

    def to_json(self) -> dict:
        out = {"verdict": self.kind}
        out.update(self.data.to_json())
        if self.kind == INCONCLUSIVE:
            out["zeros"] = [i + 1 for i in self.zero_pattern()]
        return out


_JAC_PRIME = 2**61 - 1


def _mod(c, p: int) -> int:
    if type(c).__name__ == "mpq":
        return int(c.numerator) * pow(int(c.denominator), -1, p) % p
    return int(c) % p


def leading_parts(f: PolyMap, mu: Sequence[NFElement], K: NumberField,
                  active: Sequence[int] | None = None) -> list[list[tuple]]:
    """Terms of each active f_i whose mu-weight on the active exponents is theta*mu_i."""
    J = _active(f, active)
    theta = K.theta
    out = []
    for k, i in enumerate(J):
        target = theta * mu[k]
        out.append([(e, c) for e, c in f[i].terms()
                    if (_dot([e[j] for j in J], mu, K) - target).is_zero()])
    return out


def _rank_mod(A: list[list[int]], p: int) -> int:
    A = [row[:] for row in A]
    rank, rows = 0, len(A)
    cols = len(A[0]) if A else 0
    for c in range(cols):
        piv = next((r for r in range(rank, rows) if A[r][c]), None)
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        inv = pow(A[rank][c], -1, p)
        for r in range(rows):
            if r != rank and A[r][c]:
                fac = A[r][c] * inv % p
                A[r] = [(x - fac * y) % p for x, y in zip(A[r], A[rank])]
        rank += 1
    return rank


def _eval_terms(terms, pt, p: int) -> int:
    acc = 0
    for e, c in terms:
        t = c
        for v, k in enumerate(e):
            if k:
                t = t * pow(pt[v], k, p) % p
        acc = (acc + t) % p
    return acc


def _jacobian_at(rows, J, pt, p: int) -> list[list[int]]:
    jac = []
    for terms in rows:
        row = []
        for j in J:
            acc = 0
            for e, c in terms:
                if e[j]:
                    t = c * e[j] % p
                    for v, k in enumerate(e):
                        kk = k - 1 if v == j else k
                        if kk:
                            t = t * pow(pt[v], kk, p) % p
                    acc = (acc + t) % p
            row.append(acc)
        jac.append(row)
    return jac


def _matmul_mod(A, B, p: int):
    return [[sum(a * b for a, b in zip(row, col)) % p for col in zip(*B)] for row in A]


def leading_stability(f: PolyMap, mu: Sequence[NFElement], K: NumberField,
                      active: Sequence[int] | None = None, seed: int = 0) -> str | None:
    """Why the mu-leading part L of f has no vanishing component in any iterate.

    Then deg_mu(f^r) = theta^r mu_i exactly and lambda = theta.  The images
    V_r of L^r form a decreasing chain that is constant once its dimension
    stops dropping, so it is enough to follow a random point until the rank
    of the chained Jacobian repeats, checking every component along the way.

    Returns "monomial" (L is a monomial map), "jacobian" (full rank at r = 1),
    "generic-rank" (rank repeat observed at a random point, exact up to a
    Schwartz-Zippel failure probability), or None.
    """
    J = _active(f, active)
    lead = leading_parts(f, mu, K, J)
    if any(not terms for terms in lead):
        return None
    if all(len(terms) == 1 for terms in lead):
        return "monomial"
    q = f.field.characteristic
    p = q if q else _JAC_PRIME
    rng = random.Random(seed)
    rows = [[(e, _mod(c, p)) for e, c in terms] for terms in lead]
    k = len(J)
    pt = [rng.randrange(1, p) for _ in range(f.n)]
    chain = None
    prev_rank = k
    for r in range(1, k + 2):
        values = [_eval_terms(terms, pt, p) for terms in rows]
        if any(v == 0 for v in values):
            return None
        jac = _jacobian_at(rows, J, pt, p)
        chain = jac if chain is None else _matmul_mod(jac, chain, p)
        rank = _rank_mod(chain, p)
        if r == 1 and rank == k:
            return "jacobian"
        if rank == prev_rank:
            # image dimension equals Jacobian rank only for separable maps
            return "generic-rank" if q == 0 else None
        prev_rank = rank
        nxt = list(pt)
        for idx, j in enumerate(J):
            nxt[j] = values[idx]
        pt = nxt
    return None


def stability_verdict(f: PolyMap, active: Iterable[int] | None = None) -> Verdict:
    """THETA_ONE if theta = 1, MU_STABLE if a strictly positive mu verifies,
    INCONCLUSIVE otherwise (carrying mu and its zero pattern when found)."""
    data = maximal_eigenvalue(f, active)
    if data.theta == 1:
        k = len(data.active)
        K = NumberField(data.theta)
        data.mu = tuple(K.one for _ in range(k))
        rows = row_supports(f, data.active)
        if verify_eigenvector(rows, data.mu, K):
            data.strictly_positive = True
        else:
            maximal_eigenvector(f, data)
        return Verdict(THETA_ONE, data)
    if data.theta < 1:
        raise AlgebraicError(f"maximal eigenvalue {data.theta} < 1; not an automorphism")
    maximal_eigenvector(f, data)
    if data.mu is not None and data.strictly_positive:
        data.leading_dominant = leading_stability(f, data.mu, NumberField(data.theta), data.active)
        if data.leading_dominant:
            return Verdict(MU_STABLE, data)
    return Verdict(INCONCLUSIVE, data)
