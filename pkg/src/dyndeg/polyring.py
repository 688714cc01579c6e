"""Exact sparse multivariate polynomials over Q or a prime field F_p.

Monomials are stored packed into a single Python int, ``_BITS`` bits per
variable, so that monomial multiplication is integer addition.  Polynomials
are immutable; every operation returns a new value in canonical form (no
zero coefficients, one entry per exponent vector).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

import gmpy2
import numpy as np
from gmpy2 import mpq

__all__ = [
    "FieldSpec",
    "QQ",
    "GF",
    "Polynomial",
    "PolynomialError",
    "ParseError",
    "parse_polynomial",
    "format_coefficient",
]

_BITS = 20
_MASK = (1 << _BITS) - 1
_MAX_EXP = _MASK


class PolynomialError(ValueError):
    """Dimension/field mismatch or an operation undefined on the input."""


class ParseError(PolynomialError):
    pass


def _is_prime(p: int) -> bool:
    return p >= 2 and bool(gmpy2.is_prime(p, 50))


@dataclass(frozen=True)
class FieldSpec:
    """Coefficient field: characteristic 0 means Q, otherwise F_p."""

    characteristic: int = 0

    def __post_init__(self):
        p = self.characteristic
        if p != 0 and (p > 2**61 or not _is_prime(p)):
            raise PolynomialError(f"characteristic must be 0 or a prime <= 2^61, got {p}")

    @property
    def kind(self) -> str:
        return "rationals" if self.characteristic == 0 else "prime-field"

    @property
    def is_rational(self) -> bool:
        return self.characteristic == 0

    def __str__(self) -> str:
        return "q" if self.characteristic == 0 else f"fp:{self.characteristic}"

    @classmethod
    def parse(cls, text: str) -> "FieldSpec":
        text = text.strip().lower()
        if text in ("q", "qq", "rationals"):
            return QQ
        if text.startswith("fp:"):
            try:
                return cls(int(text[3:]))
            except ValueError as exc:
                raise ParseError(f"bad field spec {text!r}") from exc
        raise ParseError(f"unknown field {text!r} (expected 'q' or 'fp:<prime>')")

    def coerce(self, value):
        p = self.characteristic
        if p == 0:
            if isinstance(value, Fraction):
                return mpq(value.numerator, value.denominator)
            if isinstance(value, str):
                return mpq(value)
            return mpq(value)
        if isinstance(value, (Fraction,)) or type(value).__name__ == "mpq":
            num, den = int(value.numerator), int(value.denominator)
            if den % p == 0:
                raise PolynomialError(f"denominator {den} not invertible mod {p}")
            return num * pow(den, -1, p) % p
        if isinstance(value, str):
            return self.coerce(mpq(value))
        return int(value) % p

    def inverse(self, c):
        if not c:
            raise ZeroDivisionError("inverse of zero")
        p = self.characteristic
        if p == 0:
            return 1 / mpq(c)
        return pow(int(c), -1, p)


QQ = FieldSpec(0)


def GF(p: int) -> FieldSpec:
    return FieldSpec(p)


def pack(exponents: Sequence[int]) -> int:
    key = 0
    for i, e in enumerate(exponents):
        if e < 0 or e > _MAX_EXP:
            raise PolynomialError(f"exponent {e} out of range")
        key |= e << (_BITS * i)
    return key


def unpack(key: int, n: int) -> tuple[int, ...]:
    return tuple((key >> (_BITS * i)) & _MASK for i in range(n))


def _key_degree(key: int) -> int:
    d = 0
    while key:
        d += key & _MASK
        key >>= _BITS
    return d


# -- Kronecker substitution ---------------------------------------------------------
# Large products are done as one big-integer product: exponent vectors are laid
# out densely (mixed radix), coefficients in fixed-width signed digits.

_KRONECKER_MIN = 20000
_KRONECKER_MAX_BYTES = 1 << 27


def _integerize(terms: Mapping[int, object], p: int) -> tuple[dict[int, int], object]:
    if p:
        return terms, 1  # type: ignore[return-value]
    den = 1
    for c in terms.values():
        d = c.denominator
        if d != 1:
            den = gmpy2.lcm(den, d)
    if den == 1:
        return {k: int(c.numerator) for k, c in terms.items()}, 1
    return {k: int((c * den).numerator) for k, c in terms.items()}, den


def _kronecker_mul(a: Mapping[int, object], b: Mapping[int, object], n: int, p: int):
    if n == 0:
        return None
    ea = [unpack(k, n) for k in a]
    eb = [unpack(k, n) for k in b]
    radix = [max(e[i] for e in ea) + max(e[i] for e in eb) + 1 for i in range(n)]
    strides, size = [], 1
    for r in radix:
        strides.append(size)
        size *= r
    ia, da = _integerize(a, p)
    ib, db = _integerize(b, p)
    ma = max(abs(c) for c in ia.values())
    mb = max(abs(c) for c in ib.values())
    bound = ma * mb * min(len(a), len(b))
    nbytes = (bound.bit_length() + 2 + 7) // 8
    if size * nbytes > _KRONECKER_MAX_BYTES or size > len(a) * len(b):
        return None

    def packed(exps, coeffs):
        pos = bytearray(size * nbytes)
        neg = bytearray(size * nbytes)
        any_neg = False
        for e, c in zip(exps, coeffs):
            at = sum(x * s for x, s in zip(e, strides)) * nbytes
            if c >= 0:
                pos[at:at + nbytes] = int(c).to_bytes(nbytes, "little")
            else:
                neg[at:at + nbytes] = int(-c).to_bytes(nbytes, "little")
                any_neg = True
        v = gmpy2.mpz(int.from_bytes(pos, "little"))
        if any_neg:
            v -= gmpy2.mpz(int.from_bytes(neg, "little"))
        return v

    prod = packed(ea, ia.values()) * packed(eb, ib.values())
    half = 1 << (8 * nbytes - 1)
    offset_row = half.to_bytes(nbytes, "little")
    offset = int.from_bytes(offset_row * size, "little")
    raw = int(prod + offset).to_bytes(size * nbytes, "little")
    grid = np.frombuffer(raw, dtype=np.uint8).reshape(size, nbytes)
    hits = np.nonzero(np.any(grid != np.frombuffer(offset_row, dtype=np.uint8), axis=1))[0]
    den = da * db
    out: dict[int, object] = {}
    for idx in hits.tolist():
        at = idx * nbytes
        c = int.from_bytes(raw[at:at + nbytes], "little") - half
        if p:
            c %= p
            if not c:
                continue
        elif den != 1:
            c = mpq(c, den)
        else:
            c = mpq(c)
        key, rest = 0, idx
        for i in range(n - 1, -1, -1):
            e, rest = divmod(rest, strides[i])
            key |= e << (_BITS * i)
        out[key] = c
    return out


def format_coefficient(c) -> str:
    """Canonical decimal text of a field element: ``3``, ``-1/3``."""
    if type(c).__name__ == "mpq" or isinstance(c, Fraction):
        if c.denominator == 1:
            return str(int(c.numerator))
        return f"{int(c.numerator)}/{int(c.denominator)}"
    return str(int(c))


class Polynomial:
    """Immutable sparse polynomial in ``nvars`` variables over ``field``."""

    __slots__ = ("nvars", "field", "_terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[int, object] | None = None,
                 field: FieldSpec = QQ, *, _canonical: bool = False):
        if nvars < 0:
            raise PolynomialError("negative dimension")
        self.nvars = nvars
        self.field = field
        self._hash = None
        if _canonical:
            self._terms = terms  # type: ignore[assignment]
            return
        clean = {}
        coerce = field.coerce
        for k, c in (terms or {}).items():
            c = coerce(c)
            if c:
                clean[k] = c
        self._terms = clean

    # construction -------------------------------------------------------
    @classmethod
    def zero(cls, nvars: int, field: FieldSpec = QQ) -> "Polynomial":
        return cls(nvars, {}, field, _canonical=True)

    @classmethod
    def constant(cls, value, nvars: int, field: FieldSpec = QQ) -> "Polynomial":
        return cls(nvars, {0: value}, field)

    @classmethod
    def one(cls, nvars: int, field: FieldSpec = QQ) -> "Polynomial":
        return cls.constant(1, nvars, field)

    @classmethod
    def var(cls, i: int, nvars: int, field: FieldSpec = QQ) -> "Polynomial":
        """The coordinate x_{i+1} (``i`` is 0-based)."""
        if not 0 <= i < nvars:
            raise PolynomialError(f"variable index {i} outside dimension {nvars}")
        return cls(nvars, {1 << (_BITS * i): 1}, field)

    @classmethod
    def from_terms(cls, nvars: int, terms: Iterable[tuple[Sequence[int], object]],
                   field: FieldSpec = QQ) -> "Polynomial":
        acc: dict[int, object] = {}
        coerce = field.coerce
        p = field.characteristic
        for exps, c in terms:
            if len(exps) != nvars:
                raise PolynomialError("exponent vector length differs from dimension")
            k = pack(exps)
            v = acc.get(k, 0) + coerce(c)
            acc[k] = v % p if p else v
        return cls(nvars, {k: v for k, v in acc.items() if v}, field, _canonical=True)

    @classmethod
    def parse(cls, text: str, nvars: int | None = None, field: FieldSpec = QQ) -> "Polynomial":
        return parse_polynomial(text, nvars, field)

    # inspection ---------------------------------------------------------
    def terms(self) -> Iterator[tuple[tuple[int, ...], object]]:
        n = self.nvars
        for k, c in self._terms.items():
            yield unpack(k, n), c

    def packed_terms(self) -> Mapping[int, object]:
        return self._terms

    def support(self) -> list[tuple[int, ...]]:
        """Exponent vectors with nonzero coefficient, sorted (grlex, descending)."""
        return [e for e, _ in self.sorted_terms()]

    def sorted_terms(self) -> list[tuple[tuple[int, ...], object]]:
        items = list(self.terms())
        items.sort(key=lambda t: (sum(t[0]), t[0]), reverse=True)
        return items

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and 0 in self._terms)

    def constant_term(self):
        return self._terms.get(0, self.field.coerce(0))

    def coefficient(self, exponents: Sequence[int]):
        return self._terms.get(pack(exponents), self.field.coerce(0))

    def total_degree(self) -> int:
        if not self._terms:
            raise PolynomialError("degree of the zero polynomial is undefined")
        return max(_key_degree(k) for k in self._terms)

    def degree_in(self, variables: Iterable[int]) -> int:
        """Degree in the given 0-based variables, the others counting as coefficients."""
        if not self._terms:
            raise PolynomialError("degree of the zero polynomial is undefined")
        vs = list(variables)
        return max(sum((k >> (_BITS * i)) & _MASK for i in vs) for k in self._terms)

    def variables(self) -> set[int]:
        """0-based indices of variables that actually occur."""
        occ = 0
        for k in self._terms:
            occ |= k
        return {i for i in range(self.nvars) if (occ >> (_BITS * i)) & _MASK}

    def uses_only(self, variables: Iterable[int]) -> bool:
        return self.variables() <= set(variables)

    # arithmetic ---------------------------------------------------------
    def _check(self, other: "Polynomial") -> None:
        if self.nvars != other.nvars:
            raise PolynomialError(f"dimension mismatch: {self.nvars} vs {other.nvars}")
        if self.field != other.field:
            raise PolynomialError(f"field mismatch: {self.field} vs {other.field}")

    def _lift(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        return Polynomial.constant(other, self.nvars, self.field)

    def __add__(self, other) -> "Polynomial":
        other = self._lift(other)
        p = self.field.characteristic
        out = dict(self._terms)
        for k, c in other._terms.items():
            v = out.get(k)
            if v is None:
                out[k] = c
                continue
            v = v + c
            if p:
                v %= p
            if v:
                out[k] = v
            else:
                del out[k]
        return Polynomial(self.nvars, out, self.field, _canonical=True)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        p = self.field.characteristic
        if p:
            out = {k: (-c) % p for k, c in self._terms.items()}
        else:
            out = {k: -c for k, c in self._terms.items()}
        return Polynomial(self.nvars, out, self.field, _canonical=True)

    def __sub__(self, other) -> "Polynomial":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "Polynomial":
        return self._lift(other) - self

    def scale(self, c) -> "Polynomial":
        c = self.field.coerce(c)
        if not c:
            return Polynomial.zero(self.nvars, self.field)
        p = self.field.characteristic
        if p:
            out = {k: v * c % p for k, v in self._terms.items()}
        else:
            out = {k: v * c for k, v in self._terms.items()}
        return Polynomial(self.nvars, out, self.field, _canonical=True)

    def __mul__(self, other) -> "Polynomial":
        if not isinstance(other, Polynomial):
            return self.scale(other)
        self._check(other)
        a, b = self._terms, other._terms
        if len(a) < len(b):
            a, b = b, a
        p = self.field.characteristic
        if len(a) * len(b) >= _KRONECKER_MIN:
            out = _kronecker_mul(a, b, self.nvars, p)
            if out is not None:
                return Polynomial(self.nvars, out, self.field, _canonical=True)
        out: dict[int, object] = {}
        get = out.get
        for kb, cb in b.items():
            for ka, ca in a.items():
                k = ka + kb
                out[k] = get(k, 0) + ca * cb
        if p:
            out = {k: v % p for k, v in out.items()}
            out = {k: v for k, v in out.items() if v}
        else:
            out = {k: v for k, v in out.items() if v}
        return Polynomial(self.nvars, out, self.field, _canonical=True)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "Polynomial":
        if e < 0:
            raise PolynomialError("negative power")
        result = Polynomial.one(self.nvars, self.field)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            if isinstance(other, (int, Fraction)) or type(other).__name__ == "mpq":
                return self == Polynomial.constant(other, self.nvars, self.field)
            return NotImplemented
        return (self.nvars == other.nvars and self.field == other.field
                and self._terms == other._terms)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nvars, self.field, frozenset(
                (k, str(c)) for k, c in self._terms.items())))
        return self._hash

    # substitution -------------------------------------------------------
    def substitute(self, maps: Sequence["Polynomial"], *, _powers: list | None = None,
                   budget: int | None = None) -> "Polynomial":
        """Replace x_i by ``maps[i]`` and expand.

        ``maps`` must have one entry per variable of ``self``; all entries share
        a target dimension, which becomes the dimension of the result.
        """
        if len(maps) != self.nvars:
            raise PolynomialError(f"arity mismatch: {len(maps)} replacements for {self.nvars} variables")
        if not maps:
            return self
        target = maps[0]
        for m in maps:
            if m.nvars != target.nvars or m.field != self.field:
                raise PolynomialError("replacement dimension/field mismatch")
        powers = _powers if _powers is not None else [[] for _ in maps]
        m_dim = target.nvars
        acc = Polynomial.zero(m_dim, self.field)
        for exps, c in self.sorted_terms():
            term = Polynomial.constant(c, m_dim, self.field)
            for i, e in enumerate(exps):
                if e:
                    term = term * _power(maps[i], e, powers[i])
            acc = acc + term
            if budget is not None and len(acc) > budget:
                raise BudgetExceeded(f"substitution exceeded {budget} terms")
        return acc

    def rename(self, perm: Sequence[int], nvars: int | None = None) -> "Polynomial":
        """Send variable i to variable ``perm[i]`` (0-based); pure relabeling."""
        n = self.nvars if nvars is None else nvars
        out = {}
        for exps, c in self.terms():
            new = [0] * n
            for i, e in enumerate(exps):
                if e:
                    new[perm[i]] += e
            out[pack(new)] = c
        return Polynomial(n, out, self.field, _canonical=True)

    def evaluate(self, point: Sequence):
        p = self.field.characteristic
        total = self.field.coerce(0)
        for exps, c in self.terms():
            v = c
            for x, e in zip(point, exps):
                if e:
                    v = v * x ** e
            total = total + v
        return total % p if p else total

    # text ---------------------------------------------------------------
    def __str__(self) -> str:
        if not self._terms:
            return "0"
        pieces = []
        for exps, c in self.sorted_terms():
            mono = "*".join(f"x{i + 1}" if e == 1 else f"x{i + 1}^{e}"
                            for i, e in enumerate(exps) if e)
            if self.field.characteristic == 0:
                neg = c < 0
                mag = -c if neg else c
            else:
                neg, mag = False, c
            coef = format_coefficient(mag)
            if mono:
                body = mono if coef == "1" else f"{coef}*{mono}"
            else:
                body = coef
            pieces.append(("-" if neg else "+", body))
        out = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
        for sign, body in pieces[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self) -> str:
        return f"Polynomial({str(self)!r}, nvars={self.nvars}, field={self.field})"


class BudgetExceeded(RuntimeError):
    """A symbolic computation grew past its term budget."""


def _power(p: Polynomial, e: int, cache: list) -> Polynomial:
    if not cache:
        cache.append(Polynomial.one(p.nvars, p.field))
        cache.append(p)
    while len(cache) <= e:
        cache.append(cache[-1] * p)
    return cache[e]


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:/\d+)?)|x(?P<var>\d+)(?:\^(?P<exp>\d+))?|(?P<op>[+\-*]))")


def parse_polynomial(text: str, nvars: int | None = None, field: FieldSpec = QQ) -> Polynomial:
    """Parse ``x3 + 2*x1^2*x2 - 1/3``; ``nvars`` defaults to the largest index seen."""
    terms: list[tuple[int, dict[int, int], object]] = []  # sign, exps, coeff
    pos = 0
    text = text.strip()
    if not text:
        raise ParseError("empty polynomial")
    sign = 1
    expect_factor = True
    cur_exps: dict[int, int] = {}
    cur_coef = mpq(1)
    have_factor = False
    maxvar = 0

    def flush():
        nonlocal cur_exps, cur_coef, have_factor
        if not have_factor:
            raise ParseError(f"dangling operator in {text!r}")
        terms.append((sign, cur_exps, cur_coef))
        cur_exps, cur_coef, have_factor = {}, mpq(1), False

    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected input at {pos} in {text!r}")
        pos = m.end()
        if m.group("op"):
            op = m.group("op")
            if op == "*":
                if expect_factor:
                    raise ParseError(f"misplaced '*' in {text!r}")
                expect_factor = True
                continue
            if have_factor:
                if expect_factor:
                    raise ParseError(f"dangling operator in {text!r}")
                flush()
                sign = 1 if op == "+" else -1
            else:
                sign = sign * (1 if op == "+" else -1)
            expect_factor = True
            continue
        if not expect_factor:
            raise ParseError(f"missing operator before position {m.start()} in {text!r}")
        expect_factor = False
        have_factor = True
        if m.group("num"):
            num = m.group("num")
            if "/" in num and int(num.split("/")[1]) == 0:
                raise ParseError("zero denominator")
            cur_coef *= mpq(num)
        else:
            k = int(m.group("var"))
            if k < 1:
                raise ParseError("variables are numbered from x1")
            e = int(m.group("exp") or 1)
            cur_exps[k - 1] = cur_exps.get(k - 1, 0) + e
            maxvar = max(maxvar, k)
    if expect_factor:
        raise ParseError(f"trailing operator in {text!r}")
    flush()
    n = maxvar if nvars is None else nvars
    if maxvar > n:
        raise ParseError(f"variable x{maxvar} outside dimension {n}")
    rows = []
    for s, exps, c in terms:
        vec = [0] * n
        for i, e in exps.items():
            vec[i] = e
        rows.append((vec, c * s))
    return Polynomial.from_terms(n, rows, field)
