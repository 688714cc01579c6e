"""Exact real algebraic numbers and the Perron root of nonnegative integer
matrices.

Univariate polynomials are plain coefficient lists in ascending order.  An
:class:`AlgebraicNumber` is an irreducible primitive integer polynomial plus
a rational interval isolating one of its real roots.  :class:`NumberField`
implements Q(theta) as polynomials in theta reduced modulo the minimal
polynomial; signs are decided by interval evaluation with refinement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, total_ordering
from itertools import product
from typing import Iterable, Sequence

from gmpy2 import mpq, mpz

__all__ = [
    "AlgebraicError", "char_poly", "sturm_sequence", "count_roots", "real_roots",
    "factor_deg_le5", "is_irreducible", "AlgebraicNumber", "spectral_radius",
    "NumberField", "NFElement", "compare", "power_bounds", "power_compare",
    "poly_to_str",
]


class AlgebraicError(ValueError):
    pass


# -- dense univariate helpers --------------------------------------------------

def _trim(p: list) -> list:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def degree(p: Sequence) -> int:
    return len(_trim(p)) - 1


def poly_eval(p: Sequence, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def poly_mul(a: Sequence, b: Sequence) -> list:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim(out)


def poly_divmod(a: Sequence, b: Sequence) -> tuple[list, list]:
    """Division over Q."""
    b = _trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    r = [mpq(x) for x in _trim(a)]
    q = [mpq(0)] * max(0, len(r) - len(b) + 1)
    lb = mpq(b[-1])
    while len(r) >= len(b) and r:
        k = len(r) - len(b)
        c = r[-1] / lb
        q[k] = c
        for i, y in enumerate(b):
            r[i + k] -= c * y
        r = _trim(r)
    return _trim(q), r


def poly_gcd(a: Sequence, b: Sequence) -> list:
    a, b = _trim([mpq(x) for x in a]), _trim([mpq(x) for x in b])
    while b:
        a, b = b, poly_divmod(a, b)[1]
    if not a:
        return []
    lc = a[-1]
    return [x / lc for x in a]


def derivative(p: Sequence) -> list:
    return _trim([i * p[i] for i in range(1, len(p))])


def primitive(p: Sequence) -> list[int]:
    """Integer primitive part with positive leading coefficient."""
    p = _trim([mpq(x) for x in p])
    if not p:
        return []
    den = 1
    for c in p:
        den = den * int(c.denominator) // math.gcd(den, int(c.denominator))
    ints = [int(c * den) for c in p]
    g = 0
    for c in ints:
        g = math.gcd(g, c)
    ints = [c // g for c in ints]
    if ints[-1] < 0:
        ints = [-c for c in ints]
    return ints


def poly_to_str(p: Sequence, var: str = "x") -> str:
    p = _trim(p)
    if not p:
        return "0"
    parts = []
    for k in range(len(p) - 1, -1, -1):
        c = p[k]
        if not c:
            continue
        mag = abs(c)
        mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
        body = str(mag) if (mag != 1 or not mono) else ""
        body = f"{body}*{mono}" if body and mono else (body or mono)
        parts.append(("-" if c < 0 else "+", body))
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for s, b in parts[1:]:
        out += f" {s} {b}"
    return out


# -- characteristic polynomial --------------------------------------------------

def char_poly(M: Sequence[Sequence[int]]) -> list[int]:
    """det(x I - M), ascending integer coefficients (Faddeev-LeVerrier)."""
    n = len(M)
    if any(len(r) != n for r in M):
        raise AlgebraicError("matrix must be square")
    A = [[int(x) for x in r] for r in M]
    coeffs = [0] * (n + 1)
    coeffs[n] = 1
    Mk = [[0] * n for _ in range(n)]
    for k in range(1, n + 1):
        # Mk <- A*M_{k-1} + c_{n-k+1} I
        prod_ = [[sum(A[i][t] * Mk[t][j] for t in range(n)) for j in range(n)] for i in range(n)]
        c_prev = coeffs[n - k + 1]
        for i in range(n):
            prod_[i][i] += c_prev
        Mk = prod_
        tr = sum(sum(A[i][t] * Mk[t][i] for t in range(n)) for i in range(n))
        if tr % k:
            raise AlgebraicError("non-integral trace step")  # cannot happen for integer A
        coeffs[n - k] = -tr // k
    return coeffs


# -- Sturm sequences and real roots ---------------------------------------------

def sturm_sequence(p: Sequence) -> list[list]:
    p = _trim([mpq(x) for x in p])
    seq = [p, derivative(p)]
    while seq[-1]:
        r = poly_divmod(seq[-2], seq[-1])[1]
        seq.append([-x for x in r])
    return [s for s in seq if s]


def _sign_changes(seq: list[list], x) -> int:
    signs = []
    for s in seq:
        v = poly_eval(s, x)
        if v:
            signs.append(v > 0)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_roots(p: Sequence, lo, hi, seq: list[list] | None = None) -> int:
    """Number of distinct real roots of p in the half-open interval (lo, hi]."""
    seq = seq or sturm_sequence(p)
    return _sign_changes(seq, mpq(lo)) - _sign_changes(seq, mpq(hi))


def _root_bound(p: Sequence) -> mpq:
    p = _trim(p)
    lc = abs(mpq(p[-1]))
    return 1 + max((abs(mpq(c)) / lc for c in p[:-1]), default=mpq(0))


def squarefree(p: Sequence) -> list:
    g = poly_gcd(p, derivative(p))
    if len(g) <= 1:
        return primitive(p)
    return primitive(poly_divmod(p, g)[0])


def real_roots(p: Sequence) -> list[tuple[mpq, mpq]]:
    """Isolating intervals [lo, hi] for the distinct real roots, ascending.

    Roots landing exactly on a bisection point are returned as [r, r].
    """
    p = squarefree(p)
    if len(p) <= 1:
        return []
    seq = sturm_sequence(p)
    B = _root_bound(p)
    out: list[tuple[mpq, mpq]] = []
    stack = [(-B, B)]
    while stack:
        lo, hi = stack.pop()
        k = count_roots(p, lo, hi, seq)
        if k == 0:
            continue
        if k == 1:
            if poly_eval(p, hi) == 0:
                out.append((hi, hi))
            else:
                out.append((lo, hi))
            continue
        mid = (lo + hi) / 2
        stack.append((lo, mid))
        stack.append((mid, hi))
    if poly_eval(p, -B) == 0:  # (lo, hi] excludes -B; bound makes this impossible
        out.append((-B, -B))
    out.sort()
    return out


# -- factorization in degree <= 5 -------------------------------------------------

def _divisors(n: int) -> list[int]:
    n = abs(n)
    small = [d for d in range(1, int(math.isqrt(n)) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def _exact_div(p: list[int], q: list[int]) -> list[int] | None:
    quo, rem = poly_divmod(p, q)
    if rem or any(c.denominator != 1 for c in quo):
        return None
    return [int(c) for c in quo]


def _rational_root_factor(p: list[int]) -> list[int] | None:
    if p[0] == 0:
        return [0, 1]
    for b in _divisors(p[-1]):
        for a in _divisors(p[0]):
            for s in (1, -1):
                if math.gcd(a, b) != 1:
                    continue
                if poly_eval(p, mpq(s * a, b)) == 0:
                    return [-s * a, b]
    return None


def _quadratic_factor(p: list[int]) -> list[int] | None:
    """Kronecker search for an integer quadratic factor (p has no rational root)."""
    v0, v1, vm = poly_eval(p, 0), poly_eval(p, 1), poly_eval(p, -1)
    for d0, d1, dm in product(_divisors(v0), _divisors(v1), _divisors(vm)):
        for s1, sm in product((1, -1), repeat=2):
            a1, am = s1 * d1, sm * dm
            # q(0)=d0, q(1)=a1, q(-1)=am
            if (a1 - am) % 2 or (a1 + am) % 2:
                continue
            b = (a1 - am) // 2
            a = (a1 + am) // 2 - d0
            if a == 0:
                continue
            q = primitive([d0, b, a])
            if len(q) == 3 and _exact_div(p, q) is not None:
                return q
    return None


def factor_deg_le5(p: Sequence[int]) -> list[list[int]]:
    """Irreducible factors over Q of an integer polynomial of degree <= 5.

    Factors are primitive with positive leading coefficient and repeated by
    multiplicity; a nontrivial integer content (sign included) is returned as a
    leading degree-0 factor, so the product of the list is the input.
    """
    p = _trim([int(c) for c in p])
    if not p:
        raise AlgebraicError("cannot factor the zero polynomial")
    if len(p) - 1 > 5:
        raise AlgebraicError(f"degree {len(p) - 1} > 5 is unsupported")
    prim = primitive(p)
    content = p[-1] // prim[-1]
    factors: list[list[int]] = []
    if content != 1:
        factors.append([content])
    rest = prim
    while len(rest) > 1:
        lin = _rational_root_factor(rest)
        if lin is None:
            break
        factors.append(lin)
        rest = _exact_div(rest, lin)
    while len(rest) > 3:
        q = _quadratic_factor(rest)
        if q is None:
            break
        factors.append(q)
        rest = _exact_div(rest, q)
    if len(rest) > 1:
        factors.append(rest)
    return factors


def is_irreducible(p: Sequence[int]) -> bool:
    fs = [f for f in factor_deg_le5(p) if len(f) > 1]
    return len(fs) == 1


# -- algebraic numbers ----------------------------------------------------------

def _interval_eval(p: Sequence, lo: mpq, hi: mpq) -> tuple[mpq, mpq]:
    """Enclosure of p over [lo, hi] by interval Horner."""
    a = b = mpq(0)
    for c in reversed(p):
        cands = (a * lo, a * hi, b * lo, b * hi)
        a, b = min(cands) + c, max(cands) + c
    return a, b


@total_ordering
@dataclass(frozen=True, eq=False)
class AlgebraicNumber:
    """The unique root of the irreducible ``minpoly`` lying in [lo, hi]."""

    minpoly: tuple[int, ...]
    lo: mpq
    hi: mpq

    @classmethod
    def rational(cls, q) -> "AlgebraicNumber":
        q = mpq(q)
        return cls(tuple(primitive([-q, 1])), q, q)

    @classmethod
    def from_poly_root(cls, poly: Sequence[int], lo, hi) -> "AlgebraicNumber":
        """Wrap the root of ``poly`` isolated by [lo, hi], reducing to its minimal polynomial."""
        lo, hi = mpq(lo), mpq(hi)
        for f in factor_deg_le5(poly) if degree(poly) <= 5 else [primitive(poly)]:
            if len(f) < 2:
                continue
            if lo == hi:
                if poly_eval(f, lo) == 0:
                    return cls.rational(lo)
                continue
            if count_roots(f, lo, hi) == 1 or poly_eval(f, lo) == 0:
                if len(f) == 2:
                    return cls.rational(mpq(-f[0], f[1]))
                return cls(tuple(f), lo, hi)
        raise AlgebraicError("interval does not isolate a root of the polynomial")

    @property
    def degree(self) -> int:
        return len(self.minpoly) - 1

    def is_rational(self) -> bool:
        return self.degree == 1

    def as_rational(self) -> mpq:
        if not self.is_rational():
            raise AlgebraicError("not rational")
        return mpq(-self.minpoly[0], self.minpoly[1])

    def is_integer(self) -> bool:
        return self.is_rational() and self.as_rational().denominator == 1

    def is_algebraic_integer(self) -> bool:
        return self.minpoly[-1] == 1

    def refine(self, width) -> "AlgebraicNumber":
        """Bisect until hi - lo <= width."""
        if self.is_rational():
            r = self.as_rational()
            return AlgebraicNumber(self.minpoly, r, r)
        lo, hi = self.lo, self.hi
        p = self.minpoly
        slo = poly_eval(p, lo) > 0
        width = mpq(width)
        while hi - lo > width:
            mid = (lo + hi) / 2
            v = poly_eval(p, mid)
            if v == 0:  # impossible for irreducible degree >= 2
                lo = hi = mid
                break
            if (v > 0) == slo:
                lo = mid
            else:
                hi = mid
        return AlgebraicNumber(self.minpoly, lo, hi)

    @cached_property
    def approx(self) -> float:
        r = self.refine(mpq(1, 2**60))
        return float((r.lo + r.hi) / 2)

    def __float__(self) -> float:
        return self.approx

    def _cmp(self, other) -> int:
        if not isinstance(other, AlgebraicNumber):
            other = AlgebraicNumber.rational(other)
        if self.is_rational() and other.is_rational():
            a, b = self.as_rational(), other.as_rational()
            return (a > b) - (a < b)
        if self.minpoly == other.minpoly:
            roots = real_roots(self.minpoly)
            ia = _root_index(roots, self)
            ib = _root_index(roots, other)
            return (ia > ib) - (ia < ib)
        # distinct irreducible minimal polynomials have no common root
        a, b = self, other
        while True:
            if a.hi < b.lo:
                return -1
            if b.hi < a.lo:
                return 1
            a = a.refine((a.hi - a.lo) / 4) if not a.is_rational() else a
            b = b.refine((b.hi - b.lo) / 4) if not b.is_rational() else b

    def __eq__(self, other) -> bool:
        if not isinstance(other, (AlgebraicNumber, int)) and type(other).__name__ not in ("mpq", "Fraction", "mpz"):
            return NotImplemented
        return self._cmp(other) == 0

    def __lt__(self, other) -> bool:
        return self._cmp(other) < 0

    def __hash__(self) -> int:
        return hash(self.minpoly)

    def to_json(self) -> dict:
        return {"minpoly": list(self.minpoly),
                "interval": [_qstr(self.lo), _qstr(self.hi)],
                "approx": self.approx}

    @classmethod
    def from_json(cls, data: dict) -> "AlgebraicNumber":
        lo, hi = (mpq(x) for x in data["interval"])
        mp = tuple(int(c) for c in data["minpoly"])
        num = cls(mp, lo, hi)
        num.validate()
        return num

    def validate(self) -> None:
        """Check irreducibility and that the interval isolates exactly one root."""
        if not is_irreducible(list(self.minpoly)):
            raise AlgebraicError(f"{poly_to_str(self.minpoly)} is not irreducible")
        if self.lo == self.hi:
            if poly_eval(self.minpoly, self.lo) != 0:
                raise AlgebraicError("degenerate interval is not a root")
            return
        n = count_roots(self.minpoly, self.lo, self.hi)
        if n != 1 or poly_eval(self.minpoly, self.lo) == 0:
            raise AlgebraicError("interval does not isolate exactly one root")

    def __str__(self) -> str:
        if self.is_rational():
            return _qstr(self.as_rational())
        return f"root of {poly_to_str(self.minpoly)} near {self.approx:.12g}"

    def __repr__(self) -> str:
        return f"AlgebraicNumber({list(self.minpoly)}, {_qstr(self.lo)}, {_qstr(self.hi)})"


def _qstr(q) -> str:
    q = mpq(q)
    return str(int(q.numerator)) if q.denominator == 1 else f"{int(q.numerator)}/{int(q.denominator)}"


def _root_index(roots: list[tuple[mpq, mpq]], a: AlgebraicNumber) -> int:
    for i, (lo, hi) in enumerate(roots):
        if lo <= a.hi and a.lo <= hi:
            # overlap; confirm the overlap region holds the root
            x_lo, x_hi = max(lo, a.lo), min(hi, a.hi)
            if x_lo == x_hi:
                if poly_eval(a.minpoly, x_lo) == 0:
                    return i
                continue
            if count_roots(a.minpoly, x_lo, x_hi) == 1 or poly_eval(a.minpoly, x_lo) == 0:
                return i
    raise AlgebraicError("root not found among isolated roots")


def compare(a: AlgebraicNumber, b) -> int:
    """-1, 0, 1 as a <, =, > b (b algebraic or rational)."""
    return a._cmp(b)


def largest_real_root(poly: Sequence[int]) -> AlgebraicNumber | None:
    best = None
    for f in factor_deg_le5(poly):
        if len(f) < 2:
            continue
        roots = real_roots(f)
        if not roots:
            continue
        lo, hi = roots[-1]
        cand = AlgebraicNumber.rational(mpq(-f[0], f[1])) if len(f) == 2 else AlgebraicNumber(tuple(f), lo, hi)
        if best is None or cand > best:
            best = cand
    return best


def spectral_radius(M: Sequence[Sequence[int]]) -> AlgebraicNumber:
    """Perron root of a nonnegative integer matrix: its largest real eigenvalue."""
    if any(x < 0 for r in M for x in r):
        raise AlgebraicError("matrix has negative entries")
    root = largest_real_root(char_poly(M))
    if root is None or root < 0:
        return AlgebraicNumber.rational(0)
    return root


def power_bounds(a: AlgebraicNumber, r: int, width=mpq(1, 2**40)) -> tuple[mpq, mpq]:
    """Rational bounds lo <= a^r <= hi for a >= 0."""
    if a < 0:
        raise AlgebraicError("power_bounds expects a nonnegative number")
    b = a.refine(width)
    lo = max(b.lo, mpq(0))
    return lo ** r, b.hi ** r


def power_compare(a: AlgebraicNumber, r: int, d) -> int:
    """Exact sign of a^r - d for integer/rational d."""
    K = NumberField(a)
    return (K.theta ** r - K(d)).sign()


# -- the number field Q(theta) ---------------------------------------------------

class NumberField:
    """Q(theta) for a real algebraic number theta."""

    def __init__(self, theta: AlgebraicNumber):
        self.theta_value = theta
        self.minpoly = [mpq(c) for c in theta.minpoly]
        self.d = theta.degree
        lc = self.minpoly[-1]
        self._monic = [c / lc for c in self.minpoly]
        self._fine = theta.refine(mpq(1, 2**80))
        self._approx = theta.approx

    @classmethod
    def rationals(cls) -> "NumberField":
        return cls(AlgebraicNumber.rational(0))

    def __eq__(self, other) -> bool:
        return isinstance(other, NumberField) and self.theta_value.minpoly == other.theta_value.minpoly \
            and self.theta_value == other.theta_value

    def __hash__(self) -> int:
        return hash(self.theta_value.minpoly)

    def __call__(self, value) -> "NFElement":
        if isinstance(value, NFElement):
            if value.field is not self and value.field != self:
                raise AlgebraicError("element from a different field")
            return value
        return NFElement(self, (mpq(value),))

    def from_coeffs(self, coeffs: Sequence) -> "NFElement":
        return NFElement(self, self._reduce([mpq(c) for c in coeffs]))

    @property
    def theta(self) -> "NFElement":
        if self.d == 1:
            return self(self.theta_value.as_rational())
        return NFElement(self, (mpq(0), mpq(1)))

    @property
    def zero(self) -> "NFElement":
        return NFElement(self, ())

    @property
    def one(self) -> "NFElement":
        return NFElement(self, (mpq(1),))

    def _reduce(self, c: list) -> tuple:
        c = _trim(c)
        d = self.d
        m = self._monic
        if d == 1:
            # theta is rational: evaluate
            if not c:
                return ()
            v = poly_eval(c, self.theta_value.as_rational())
            return (v,) if v else ()
        while len(c) > d:
            top = c.pop()
            k = len(c) - d
            for i in range(d):
                c[k + i] -= top * m[i]
            c = _trim(c)
        return tuple(c)


class NFElement:
    __slots__ = ("field", "coeffs", "_approx")

    def __init__(self, field: NumberField, coeffs: tuple):
        self.field = field
        self.coeffs = tuple(coeffs)
        self._approx = None

    def __add__(self, other) -> "NFElement":
        other = self.field(other)
        a, b = list(self.coeffs), list(other.coeffs)
        if len(a) < len(b):
            a, b = b, a
        for i, x in enumerate(b):
            a[i] += x
        return NFElement(self.field, tuple(_trim(a)))

    __radd__ = __add__

    def __neg__(self) -> "NFElement":
        return NFElement(self.field, tuple(-x for x in self.coeffs))

    def __sub__(self, other) -> "NFElement":
        return self + (-self.field(other))

    def __rsub__(self, other) -> "NFElement":
        return self.field(other) - self

    def __mul__(self, other) -> "NFElement":
        if isinstance(other, NFElement):
            return NFElement(self.field, self.field._reduce(poly_mul(self.coeffs, other.coeffs)))
        k = mpq(other)
        return NFElement(self.field, tuple(_trim([x * k for x in self.coeffs])))

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "NFElement":
        out, base = self.field.one, self
        while e:
            if e & 1:
                out = out * base
            e >>= 1
            if e:
                base = base * base
        return out

    def inverse(self) -> "NFElement":
        if not self.coeffs:
            raise ZeroDivisionError("inverse of zero in Q(theta)")
        K = self.field
        if K.d == 1:
            return NFElement(K, (1 / self.coeffs[0],))
        # extended Euclid: s*a + t*m = 1
        r0, r1 = list(K.minpoly), list(self.coeffs)
        s0, s1 = [], [mpq(1)]
        while len(_trim(r1)) > 1:
            q, r = poly_divmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, _poly_sub(s0, poly_mul(q, s1))
        c = _trim(r1)[0]
        return K.from_coeffs([x / c for x in s1])

    def __truediv__(self, other) -> "NFElement":
        other = self.field(other)
        return self * other.inverse()

    def __rtruediv__(self, other) -> "NFElement":
        return self.field(other) * self.inverse()

    def is_zero(self) -> bool:
        return not self.coeffs

    def approx(self) -> float:
        if self._approx is None:
            self._approx = float(poly_eval([float(c) for c in self.coeffs], self.field._approx)) if self.coeffs else 0.0
        return self._approx

    def sign(self) -> int:
        if not self.coeffs:
            return 0
        K = self.field
        if K.d == 1:
            v = self.coeffs[0]
            return (v > 0) - (v < 0)
        t = K._fine
        while True:
            lo, hi = _interval_eval(self.coeffs, t.lo, t.hi)
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            t = t.refine((t.hi - t.lo) / 2**20)
            K._fine = t

    def __eq__(self, other) -> bool:
        if isinstance(other, NFElement) or isinstance(other, (int,)) or type(other).__name__ in ("mpq", "mpz"):
            return (self - other).is_zero()
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __lt__(self, other) -> bool:
        return (self - other).sign() < 0

    def __le__(self, other) -> bool:
        return (self - other).sign() <= 0

    def __gt__(self, other) -> bool:
        return (self - other).sign() > 0

    def __ge__(self, other) -> bool:
        return (self - other).sign() >= 0

    def to_json(self) -> list[str]:
        return [_qstr(c) for c in self.coeffs]

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for k, c in enumerate(self.coeffs):
            if c:
                t = _qstr(c)
                parts.append(t if k == 0 else (f"{t}*t" if k == 1 else f"{t}*t^{k}"))
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"NFElement({self}, ~{self.approx():.6g})"


def _poly_sub(a: Sequence, b: Sequence) -> list:
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return _trim([x - y for x, y in zip(a, b)])
