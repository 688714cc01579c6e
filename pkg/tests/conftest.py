import sympy
from hypothesis import strategies as st

from dyndeg.polyring import QQ, Polynomial

X = sympy.symbols("x1:7")


def to_sympy(p: Polynomial):
    return sum((sympy.Rational(int(c.numerator), int(c.denominator)) if hasattr(c, "numerator") else c)
               * sympy.Mul(*[X[i] ** e for i, e in enumerate(exps)])
               for exps, c in p.terms()) if not p.is_zero() else sympy.Integer(0)


def sympy_map(f):
    return [sympy.expand(to_sympy(c)) for c in f.components]


def sympy_compose(g, f):
    """g o f via sympy substitution."""
    subs = dict(zip(X[:f.n], sympy_map(f)))
    return [sympy.expand(e.xreplace(subs)) for e in sympy_map(g)]


def sympy_degree(exprs):
    return max(sympy.Poly(e, *X[:6]).total_degree() if e != 0 else 0 for e in exprs)


def polys(n=3, max_exp=3, max_terms=4, coeff=5, field=QQ):
    term = st.tuples(st.tuples(*[st.integers(0, max_exp)] * n), st.integers(-coeff, coeff))
    return st.lists(term, max_size=max_terms).map(lambda ts: Polynomial.from_terms(n, ts, field))


def nonzero_polys(**kw):
    return polys(**kw).filter(lambda p: not p.is_zero())


# -- acceptance summary ------------------------------------------------------------

ACCEPTANCE: dict[int, list[tuple[str, bool, str]]] = {}


def record_acceptance(criterion: int, part: str, ok: bool, detail: str = "") -> None:
    ACCEPTANCE.setdefault(criterion, []).append((part, ok, detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[k]
        status = "PASS" if all(ok for _, ok, _ in parts) else "FAIL"
        bad = "; ".join(f"{p}: {d}" for p, ok, d in parts if not ok)
        terminalreporter.write_line(f"criterion {k}: {status}" + (f"  ({bad})" if bad else ""))
