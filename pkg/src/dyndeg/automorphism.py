"""Polynomial maps of affine n-space, automorphisms with certified inverses,
and degree sequences of iterates."""

from __future__ import annotations

import math
import os
import random
from dataclasses import dataclass, field as dc_field
from typing import Iterable, Sequence

import gmpy2

from .linalg import coerce_matrix, inverse as mat_inverse
from .polyring import (QQ, BudgetExceeded, FieldSpec, Polynomial, PolynomialError,
                       parse_polynomial)

__all__ = [
    "PolyMap", "Automorphism", "PermTriForm", "BudgetExceeded",
    "compose", "identity_map", "make_triangular", "make_affine", "make_permutation",
    "iterate", "degree_sequence", "dyndeg_estimate", "line_degree_sequence",
    "default_budget", "parse_map",
]

DEFAULT_BUDGET = 10**6


def default_budget() -> int:
    env = os.environ.get("DYNDEG_BUDGET_TERMS")
    return int(env) if env else DEFAULT_BUDGET


class PolyMap:
    """f = (f_1, ..., f_n) with every f_i in k[x_1, ..., x_n]."""

    __slots__ = ("components",)

    def __init__(self, components: Sequence[Polynomial]):
        comps = tuple(components)
        if not comps:
            raise PolynomialError("a map needs at least one component")
        n = len(comps)
        fld = comps[0].field
        for c in comps:
            if c.nvars != n:
                raise PolynomialError(f"component has {c.nvars} variables, expected {n}")
            if c.field != fld:
                raise PolynomialError("components over different fields")
        self.components = comps

    @property
    def n(self) -> int:
        return len(self.components)

    @property
    def field(self) -> FieldSpec:
        return self.components[0].field

    def __getitem__(self, i: int) -> Polynomial:
        return self.components[i]

    def __iter__(self):
        return iter(self.components)

    def __len__(self) -> int:
        return len(self.components)

    def __eq__(self, other) -> bool:
        return isinstance(other, PolyMap) and self.components == other.components

    def __hash__(self) -> int:
        return hash(self.components)

    def degree(self) -> int:
        """deg(f) = max_i deg(f_i)."""
        return max(c.total_degree() for c in self.components)

    def term_count(self) -> int:
        return sum(len(c) for c in self.components)

    def is_identity(self) -> bool:
        return self == identity_map(self.n, self.field)

    def __str__(self) -> str:
        return "; ".join(str(c) for c in self.components)

    def __repr__(self) -> str:
        return f"PolyMap({str(self)!r})"

    @classmethod
    def parse(cls, text: str, field: FieldSpec = QQ) -> "PolyMap":
        return parse_map(text, field)

    @classmethod
    def from_strings(cls, parts: Iterable[str], field: FieldSpec = QQ) -> "PolyMap":
        parts = list(parts)
        return cls([parse_polynomial(p, len(parts), field) for p in parts])


def parse_map(text: str, field: FieldSpec = QQ) -> PolyMap:
    parts = [p for p in text.strip().rstrip(";").split(";")]
    return PolyMap.from_strings(parts, field)


def identity_map(n: int, field: FieldSpec = QQ) -> PolyMap:
    return PolyMap([Polynomial.var(i, n, field) for i in range(n)])


def compose(g: PolyMap, f: PolyMap, budget: int | None = None) -> PolyMap:
    """g o f, i.e. x -> g(f(x))."""
    if g.n != f.n:
        raise PolynomialError(f"dimension mismatch: {g.n} vs {f.n}")
    if g.field != f.field:
        raise PolynomialError("field mismatch")
    cache = [[] for _ in range(f.n)]
    return PolyMap([gi.substitute(f.components, _powers=cache, budget=budget)
                    for gi in g.components])


@dataclass(frozen=True)
class Automorphism:
    forward: PolyMap
    inverse: PolyMap

    def __post_init__(self):
        if self.forward.n != self.inverse.n or self.forward.field != self.inverse.field:
            raise PolynomialError("forward/inverse mismatch")

    @property
    def n(self) -> int:
        return self.forward.n

    @property
    def field(self) -> FieldSpec:
        return self.forward.field

    def inv(self) -> "Automorphism":
        return Automorphism(self.inverse, self.forward)

    def then(self, other: "Automorphism") -> "Automorphism":
        """other o self."""
        return Automorphism(compose(other.forward, self.forward),
                            compose(self.inverse, other.inverse))

    def verify(self) -> bool:
        idn = identity_map(self.n, self.field)
        return (compose(self.forward, self.inverse) == idn
                and compose(self.inverse, self.forward) == idn)

    def conjugate(self, f: PolyMap) -> PolyMap:
        """self o f o self^{-1}."""
        return compose(self.forward, compose(f, self.inverse))

    @classmethod
    def identity(cls, n: int, field: FieldSpec = QQ) -> "Automorphism":
        idn = identity_map(n, field)
        return cls(idn, idn)


def make_triangular(constants: Sequence, tails: Sequence[Polynomial | str],
                    field: FieldSpec = QQ) -> Automorphism:
    """f_i = c_i x_i + p_i(x_1..x_{i-1}); the inverse is built by back-substitution."""
    n = len(constants)
    if len(tails) != n:
        raise PolynomialError("need one tail per constant")
    cs = [field.coerce(c) for c in constants]
    ps = [parse_polynomial(t, n, field) if isinstance(t, str) else t for t in tails]
    for i, (c, p) in enumerate(zip(cs, ps)):
        if not c:
            raise PolynomialError(f"c_{i + 1} must be nonzero")
        if p.nvars != n or p.field != field:
            raise PolynomialError("tail dimension/field mismatch")
        if not p.uses_only(range(i)):
            raise PolynomialError(f"tail p_{i + 1} uses a variable of index >= {i + 1}")
    xs = [Polynomial.var(i, n, field) for i in range(n)]
    forward = PolyMap([xs[i].scale(cs[i]) + ps[i] for i in range(n)])
    inv: list[Polynomial] = []
    for i in range(n):
        # p_i only reads x_1..x_{i-1}, so pad the substitution with zeros
        sub = inv + [Polynomial.zero(n, field)] * (n - i)
        inv.append((xs[i] - ps[i].substitute(sub)).scale(field.inverse(cs[i])))
    return Automorphism(forward, PolyMap(inv))


def _affine_map(A, b, field: FieldSpec) -> PolyMap:
    n = len(A)
    xs = [Polynomial.var(i, n, field) for i in range(n)]
    comps = []
    for i in range(n):
        acc = Polynomial.constant(b[i], n, field)
        for j in range(n):
            if A[i][j]:
                acc = acc + xs[j].scale(A[i][j])
        comps.append(acc)
    return PolyMap(comps)


def make_affine(A: Sequence[Sequence], b: Sequence | None = None,
                field: FieldSpec = QQ) -> Automorphism:
    """x -> A x + b, with inverse y -> A^{-1} y - A^{-1} b."""
    A = coerce_matrix(A, field)
    n = len(A)
    b = [field.coerce(x) for x in (b if b is not None else [0] * n)]
    Ainv = mat_inverse(A, field)
    p = field.characteristic
    binv = []
    for i in range(n):
        s = field.coerce(0)
        for j in range(n):
            s = s - Ainv[i][j] * b[j]
        binv.append(s % p if p else s)
    return Automorphism(_affine_map(A, b, field), _affine_map(Ainv, binv, field))


def make_permutation(omega: Sequence[int], field: FieldSpec = QQ) -> Automorphism:
    """(x_{w(1)}, ..., x_{w(n)}) for w given 1-based as (w(1), ..., w(n))."""
    n = len(omega)
    if sorted(omega) != list(range(1, n + 1)):
        raise PolynomialError(f"{tuple(omega)} is not a permutation of 1..{n}")
    inv = [0] * n
    for i, w in enumerate(omega):
        inv[w - 1] = i + 1
    fwd = PolyMap([Polynomial.var(w - 1, n, field) for w in omega])
    back = PolyMap([Polynomial.var(w - 1, n, field) for w in inv])
    return Automorphism(fwd, back)


@dataclass(frozen=True)
class PermTriForm:
    """f = omega o s with s_j = c_j x_j + p_j(x_1..x_{j-1}).

    ``omega`` is 1-based (omega(1), ..., omega(n)); ``constants`` and ``tails``
    are indexed by variable, so f_i = c_{omega(i)} x_{omega(i)} + p_{omega(i)}.
    """

    omega: tuple[int, ...]
    constants: tuple
    tails: tuple[Polynomial, ...]

    def __post_init__(self):
        n = len(self.omega)
        if sorted(self.omega) != list(range(1, n + 1)):
            raise PolynomialError("omega is not a permutation")
        if len(self.constants) != n or len(self.tails) != n:
            raise PolynomialError("constants/tails length mismatch")
        for j, (c, p) in enumerate(zip(self.constants, self.tails)):
            if not c:
                raise PolynomialError(f"c_{j + 1} is zero")
            if not p.uses_only(range(j)):
                raise PolynomialError(f"p_{j + 1} uses a variable of index >= {j + 1}")

    @property
    def n(self) -> int:
        return len(self.omega)

    @property
    def field(self) -> FieldSpec:
        return self.tails[0].field

    def omega_inverse(self) -> tuple[int, ...]:
        inv = [0] * self.n
        for i, w in enumerate(self.omega):
            inv[w - 1] = i + 1
        return tuple(inv)

    def realize(self) -> PolyMap:
        n, fld = self.n, self.field
        comps = []
        for w in self.omega:
            comps.append(Polynomial.var(w - 1, n, fld).scale(self.constants[w - 1]) + self.tails[w - 1])
        return PolyMap(comps)

    def triangular_part(self) -> Automorphism:
        return make_triangular(self.constants, self.tails, self.field)

    def automorphism(self) -> Automorphism:
        s = self.triangular_part()
        w = make_permutation(self.omega, self.field)
        return s.then(w)

    def is_permutation_elementary(self) -> bool:
        """All c_j = 1 and every tail but the last vanishes."""
        n = self.n
        if any(c != 1 for c in self.constants[:-1]):
            return False
        return all(p.is_zero() for p in self.tails[:n - 1])

    @classmethod
    def from_map(cls, f: PolyMap) -> "PermTriForm | None":
        """Read off omega, c, p when f is permutation-triangular, else None."""
        n, fld = f.n, f.field
        omega, cs, ps = [0] * n, [None] * n, [None] * n
        for i, fi in enumerate(f.components):
            vs = fi.variables()
            if not vs:
                return None
            j = max(vs)
            lead = [(e, c) for e, c in fi.terms() if e[j]]
            if len(lead) != 1:
                return None
            e, c = lead[0]
            if e[j] != 1 or sum(e) != 1:
                return None
            if cs[j] is not None:
                return None
            omega[i] = j + 1
            cs[j] = c
            ps[j] = fi - Polynomial.var(j, n, fld).scale(c)
        return cls(tuple(omega), tuple(cs), tuple(ps))

    def __str__(self) -> str:
        return str(self.realize())


def iterate(f: PolyMap, r: int, budget: int | None = None) -> PolyMap:
    if r < 1:
        raise PolynomialError("r must be >= 1")
    out = f
    for _ in range(r - 1):
        out = compose(f, out, budget)
        _check_budget(out, budget)
    return out


def _check_budget(f: PolyMap, budget: int | None) -> None:
    b = default_budget() if budget is None else budget
    if f.term_count() > b:
        raise BudgetExceeded(f"iterate has {f.term_count()} terms, budget {b}")


def degree_sequence(f: PolyMap, R: int, budget: int | None = None) -> list[int]:
    """(deg f^1, ..., deg f^R) by exact symbolic iteration f^r = f o f^{r-1}."""
    if R < 1:
        raise PolynomialError("R must be >= 1")
    b = default_budget() if budget is None else budget
    degs = [f.degree()]
    cur = f
    for _ in range(R - 1):
        cur = compose(f, cur, b)
        _check_budget(cur, b)
        degs.append(cur.degree())
    return degs


@dataclass(frozen=True)
class DegreeEstimate:
    degrees: tuple[int, ...]
    last_ratio: float
    fekete_upper: float
    certified: bool = True

    def as_dict(self) -> dict:
        return {"degrees": list(self.degrees), "last_ratio": self.last_ratio,
                "fekete_upper": self.fekete_upper, "certified": self.certified}


def estimate_from_degrees(degs: Sequence[int], certified: bool = True) -> DegreeEstimate:
    R = len(degs)
    ratios = [d ** (1.0 / (r + 1)) for r, d in enumerate(degs)]
    return DegreeEstimate(tuple(degs), ratios[-1], min(ratios), certified)


def dyndeg_estimate(f: PolyMap, R: int, budget: int | None = None,
                    shadow_prime: int | None = None, seed: int = 0) -> DegreeEstimate:
    """Last ratio (deg f^R)^{1/R} and the Fekete bound min_r (deg f^r)^{1/r}.

    With ``shadow_prime`` the degrees come from restriction to random lines
    over F_p; they are then lower bounds and the result is flagged uncertified.
    """
    if R < 2:
        raise PolynomialError("R must be >= 2")
    if shadow_prime is not None:
        degs = line_degree_sequence(f, R, prime=shadow_prime, seed=seed)
        return estimate_from_degrees(degs, certified=False)
    return estimate_from_degrees(degree_sequence(f, R, budget))


# -- degrees along random lines, modulo a prime ------------------------------

_LINE_PRIME = 2**61 - 1


def _coeff_mod(c, p: int) -> int:
    if type(c).__name__ == "mpq":
        num, den = int(c.numerator), int(c.denominator)
        if den % p == 0:
            raise ZeroDivisionError
        return num * pow(den, -1, p) % p
    return int(c) % p


class _UniMod:
    """Univariate arithmetic mod p via Kronecker substitution into big ints."""

    def __init__(self, p: int, max_degree: int):
        self.p = p
        bits = 2 * p.bit_length() + max(1, max_degree + 1).bit_length() + 1
        self.slot = (bits + 7) // 8

    def pack(self, coeffs: list[int]):
        return gmpy2.mpz(int.from_bytes(b"".join(c.to_bytes(self.slot, "little") for c in coeffs), "little"))

    def unpack(self, z, length: int) -> list[int]:
        s = self.slot
        raw = int(z).to_bytes(length * s, "little")
        p = self.p
        return [int.from_bytes(raw[i * s:(i + 1) * s], "little") % p for i in range(length)]

    def mul(self, a: list[int], b: list[int]) -> list[int]:
        if len(a) == 1:
            return [x * a[0] % self.p for x in b]
        if len(b) == 1:
            return [x * b[0] % self.p for x in a]
        return _strip(self.unpack(self.pack(a) * self.pack(b), len(a) + len(b) - 1))


def _strip(a: list[int]) -> list[int]:
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return a


def _add(a: list[int], b: list[int], p: int) -> list[int]:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, x in enumerate(b):
        out[i] = (out[i] + x) % p
    return _strip(out)


def line_degree_sequence(f: PolyMap, R: int, prime: int | None = None, seed: int = 0,
                         lines: int = 2, fixed: Iterable[int] = ()) -> list[int]:
    """Lower bounds for deg f^1..f^R: degrees of f^r restricted to random lines
    x = a + t*b, computed modulo ``prime``.

    Reduction mod p commutes with composition, and restriction to a line can
    only lower the degree, so each entry is a rigorous lower bound; for random
    lines it is exact with high probability.  The maximum over ``lines``
    independent lines is returned.  Coordinates in ``fixed`` get direction 0,
    which bounds the degree in the remaining variables instead.
    """
    p = prime or _LINE_PRIME
    rng = random.Random(seed)
    n = f.n
    d = max(1, f.degree())
    best = [0] * R
    comps = [[(e, _coeff_mod(c, p)) for e, c in fi.terms()] for fi in f.components]
    fixed = set(fixed)
    for _ in range(lines):
        cur = [[rng.randrange(p)] if i in fixed else [rng.randrange(p), rng.randrange(1, p)]
               for i in range(n)]
        for r in range(R):
            maxdeg = max(len(x) for x in cur) - 1
            uni = _UniMod(p, maxdeg * d + 1)
            powers = [[[1], x] for x in cur]
            nxt = []
            for terms in comps:
                acc = [0]
                for e, c in terms:
                    t = [c]
                    for i, k in enumerate(e):
                        if k:
                            pw = powers[i]
                            while len(pw) <= k:
                                pw.append(uni.mul(pw[-1], pw[1]))
                            t = uni.mul(t, pw[k])
                    acc = _add(acc, t, p)
                nxt.append(acc)
            cur = nxt
            deg = max(len(x) - 1 if any(x) else 0 for x in cur)
            best[r] = max(best[r], deg)
    return best


def fekete_upper(degs: Sequence[int]) -> float:
    return min(d ** (1.0 / (r + 1)) for r, d in enumerate(degs))


def log_ratio(d: int, r: int) -> float:
    return math.exp(math.log(d) / r) if d > 0 else 0.0
