"""Dynamical degree of affine-triangular automorphisms of A^4 by routing.

An input alpha o tau is brought to permutation-triangular form, the class of
omega is looked up, licensed tail eliminations and coordinate transfers are
applied along a fixed table, and the terminal form goes to the lambda engine.
Every conjugation is checked exactly and recorded, so a trace can be replayed
from the input alone.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from typing import Sequence

from .algebraic import AlgebraicNumber, power_compare
from .automorphism import (Automorphism, PermTriForm, PolyMap, compose, estimate_from_degrees,
                           line_degree_sequence, make_affine, make_permutation, make_triangular,
                           parse_map)
from .conjugation import (ConjugationError, Move, apply_transfer, eliminate_tail_case1,
                          eliminate_tail_case2, to_permutation_triangular)
from .polyring import QQ, FieldSpec, Polynomial, PolynomialError
from .projection import EngineError, LambdaNode, is_closed, lambda_engine, sub_map

__all__ = [
    "OMEGA_NAMES", "omega_name", "ClassificationError", "ClassificationTrace", "classify",
    "verify_trace", "verify_trace_report", "random_affine_triangular", "parse_classify_input",
    "route_signature",
]

CROSSCHECK_R = 8
SANDWICH_R = 6

OMEGA_NAMES: dict[str, tuple[int, ...]] = {
    "omega1": (1, 2, 3, 4), "omega2": (1, 3, 2, 4), "omega3": (2, 1, 3, 4),
    "omega4": (2, 3, 1, 4), "omega5": (3, 1, 2, 4), "omega6": (3, 2, 1, 4),
    "omega7": (1, 2, 4, 3), "omega8": (2, 1, 4, 3),
    "omega9": (1, 3, 4, 2), "omega10": (1, 4, 2, 3), "omega11": (1, 4, 3, 2),
    "omega12": (3, 2, 4, 1), "omega13": (4, 2, 1, 3), "omega14": (2, 4, 3, 1),
    "omega15": (4, 1, 3, 2), "omega16": (4, 2, 3, 1),
    "omega17": (3, 4, 1, 2), "omega18": (3, 4, 2, 1), "omega19": (4, 3, 1, 2),
    "omega20": (4, 1, 2, 3), "omega21": (2, 3, 4, 1), "omega22": (3, 1, 4, 2),
    "omega23": (2, 4, 1, 3), "omega24": (4, 3, 2, 1),
}
_BY_OMEGA = {w: k for k, w in OMEGA_NAMES.items()}

# licensed eliminations per class, in order: (kind, i)
_ELIMS: dict[str, list[tuple[str, int]]] = {
    "omega9": [("elim1", 2)],
    "omega10": [("elim1", 2), ("elim2", 4)],
    "omega11": [("elim1", 2)],
    "omega12": [("elim2", 4), ("elim1", 3)],
    "omega13": [("elim2", 3), ("elim2", 4)],
    "omega14": [("elim2", 4), ("elim1", 2)],
    "omega15": [("elim2", 2), ("elim2", 4)],
    "omega16": [("elim2", 4)],
    "omega17": [("elim2", 3), ("elim1", 2)],
    "omega18": [("elim2", 4), ("elim1", 2)],
    "omega19": [("elim2", 3), ("elim2", 4)],
    "omega20": [("elim2", 2), ("elim2", 3)],
    "omega21": [("elim2", 4), ("elim1", 2), ("elim1", 3)],
    "omega22": [("elim2", 2), ("elim1", 3), ("elim2", 4)],
    "omega23": [("elim2", 3), ("elim1", 2), ("elim2", 4)],
    "omega24": [("elim2", 4)],
}

G1, G2, G3 = (2, 1, 3, 4), (1, 3, 2, 4), (3, 2, 1, 4)

_TRANSFERS = {"omega9": G1, "omega10": G2, "omega18": G1, "omega22": G1, "omega23": G2}

# classes with one fixed point s in {2,3} whose constant tail p_s opens a special route
_SPECIAL_FIXED = {"omega12": (("f1", 2),), "omega13": (("f2", 2),), "omega14": (("f3", 3),),
                  "omega15": (("f4", 3),), "omega16": (("f5", 2), ("f6", 3))}
_SPECIAL_TRANSFER = {"f2": G3, "f3": G2, "f4": G1, "f5": G1, "f6": G2}

# the omega11 relabeling; the result is permutation-triangular only in the order x3 < x2 < x1 < x4
_OMEGA11_RELABEL = (3, 1, 2, 4)

# zero sets (1-based) of a maximal eigenvector that the case analysis allows on terminal forms
_ALLOWED_ZEROS: dict[str, set[frozenset[int]]] = {
    # old x1 (always a one-coordinate projection) is x2 here, old x3 is x1
    "omega11'": {frozenset({2}), frozenset({1, 2})},
    "omega12": {frozenset({2})}, "omega13": {frozenset({2})},
    "omega14": {frozenset({3})}, "omega15": {frozenset({3})},
    "omega16": {frozenset(s) for s in ({1, 4}, {2}, {3}, {2, 3})},
    "omega17": {frozenset({1, 3}), frozenset({2, 4})},
    "omega19": set(), "omega20": set(), "omega21": set(),
    "omega24": {frozenset({1, 4}), frozenset({2, 3})},
    "f1": {frozenset({2})},
}

_MAX_STEPS = 16


class ClassificationError(PolynomialError):
    pass


def omega_name(omega: Sequence[int]) -> str:
    return _BY_OMEGA[tuple(omega)]


@dataclass
class ClassificationTrace:
    alpha: PolyMap
    tau: PolyMap
    start: str
    steps: list[dict]
    conjugators: list[Automorphism]
    terminal: PolyMap
    terminal_class: str
    node: LambdaNode
    method: str
    value: AlgebraicNumber | None
    certified: bool
    tags: list[str] = dc_field(default_factory=list)
    crosscheck: dict = dc_field(default_factory=dict)

    @property
    def input_map(self) -> PolyMap:
        return compose(self.alpha, self.tau)

    def route(self) -> list[tuple]:
        return route_signature(self)

    def to_json(self) -> dict:
        out = {
            "input": {"alpha": str(self.alpha), "tau": str(self.tau)},
            "class": self.start,
            "terminal": {"class": self.terminal_class, "map": str(self.terminal)},
            "method": self.method,
            "certified": self.certified,
            "trace": list(self.steps),
            "engine": self.node.to_json(),
            "crosscheck": dict(self.crosscheck),
        }
        if self.value is not None:
            out["lambda"] = self.value.to_json()
        if self.tags:
            out["tags"] = list(self.tags)
        return out


def route_signature(trace: ClassificationTrace) -> list[tuple]:
    """Step names, indices and class labels only; stable under coefficient changes."""
    out = []
    for s in trace.steps:
        if s["step"] in ("elim1", "elim2"):
            out.append((s["step"], s["i"]))
        elif s["step"] in ("transfer", "relabel"):
            out.append((s["step"], s["to"]))
        elif s["step"] == "fallback":
            out.append(("fallback", s["form"]))
        elif s["step"] == "probe":
            out.append(("probe", s["g"]))
        elif s["step"] == "verdict":
            out.append(("verdict", s["class"], s["method"]))
        else:
            out.append((s["step"], s.get("to")))
    return out


# -- input handling ----------------------------------------------------------------

def _split_input(alpha, tau) -> tuple[PolyMap, PolyMap]:
    a = alpha.forward if isinstance(alpha, Automorphism) else alpha
    if tau is None:
        form = PermTriForm.from_map(a)
        if form is None:
            raise ClassificationError("a single map must be permutation-triangular; pass alpha and tau")
        return make_permutation(form.omega, a.field).forward, form.triangular_part().forward
    t = tau.forward if isinstance(tau, Automorphism) else tau
    if a.n != t.n:
        raise ClassificationError("alpha and tau have different dimensions")
    return a, t


def parse_classify_input(text: str, field: FieldSpec = QQ) -> tuple[PolyMap, PolyMap | None]:
    """``alpha: f1; ..; fn; tau: t1; ..; tn`` or a bare permutation-triangular map."""
    body = text.strip()
    if "tau:" in body:
        head, _, tail = body.partition("tau:")
        head = head.strip().rstrip(";").strip()
        if head.startswith("alpha:"):
            head = head[len("alpha:"):]
        return parse_map(head, field), parse_map(tail.strip().rstrip(";"), field)
    if body.startswith("alpha:"):
        body = body[len("alpha:"):]
    return parse_map(body, field), None


# -- routing -----------------------------------------------------------------------

def _record(move: Move, **extra) -> dict:
    rec = move.record()
    rec.update(extra)
    return rec


def _constant_tail(form: PermTriForm, s: int) -> bool:
    return not form.tails[s - 1].variables()


def _run_route(form: PermTriForm, steps: list[dict], conjs: list[Automorphism]):
    """Follow the table from ``form``; returns (terminal map, terminal class, tags)."""
    tags: list[str] = []
    for _ in range(_MAX_STEPS):
        name = omega_name(form.omega)
        cleared = []
        for kind, i in _ELIMS.get(name, []):
            move = (eliminate_tail_case1 if kind == "elim1" else eliminate_tail_case2)(form, i)
            steps.append(_record(move, **{"class": name}))
            conjs.append(move.conjugator)
            form = move.form
            cleared.append(i if kind == "elim1" else form.omega[i - 1])
        for j in cleared:
            if not form.tails[j - 1].is_zero():
                raise ConjugationError(f"tail p{j} reappeared after the eliminations for {name}")
        if name in _TRANSFERS:
            move = apply_transfer(form, _TRANSFERS[name])
            target = omega_name(move.form.omega)
            steps.append(_record(move, to=target))
            conjs.append(move.conjugator)
            form = move.form
            continue
        special = next((lab for lab, s in _SPECIAL_FIXED.get(name, ()) if _constant_tail(form, s)), None)
        if special is not None:
            tags.append(special)
            if special == "f1":
                return form.realize(), "f1", tags
            move = apply_transfer(form, _SPECIAL_TRANSFER[special])
            target = omega_name(move.form.omega)
            steps.append(_record(move, to=target, special=special))
            conjs.append(move.conjugator)
            form = move.form
            continue
        if name == "omega11":
            g = make_permutation(_OMEGA11_RELABEL, form.field)
            f = g.conjugate(form.realize())
            steps.append({"step": "relabel", "i": None, "g": str(g.forward), "to": "omega11'"})
            conjs.append(g)
            return f, "omega11'", tags
        return form.realize(), name, tags
    raise ClassificationError("routing did not terminate")


def _check_zero_pattern(cls: str, node: LambdaNode) -> None:
    if cls not in _ALLOWED_ZEROS or node.method != "projection":
        return
    v = node.verdict
    if v is None or v.mu is None:
        return
    Z = frozenset(i + 1 for i in v.zero_pattern())
    # an empty zero set here means a positive mu whose leading part degenerates
    if Z and Z not in _ALLOWED_ZEROS[cls]:
        raise EngineError(f"{cls}: maximal eigenvector with zero set {sorted(Z)} is excluded by the case analysis")


def _cited_integer(f: PolyMap, node: LambdaNode, R: int, seed: int) -> AlgebraicNumber:
    degs = line_degree_sequence(f, R, seed=seed)
    est = estimate_from_degrees(degs, certified=False).last_ratio
    node.estimate = est
    return AlgebraicNumber.rational(max(1, round(est)))


def _terminal_verdict(f: PolyMap, cls: str, R: int, seed: int) -> tuple[LambdaNode, str]:
    if f.n == 4 and cls in ("omega1", "omega2", "omega3", "omega4", "omega5", "omega6"):
        if not is_closed(f, (0, 1, 2)):
            raise EngineError(f"{cls} without the projection on x1, x2, x3")
        return lambda_engine(sub_map(f, (0, 1, 2)), None, R, seed, False), "dim3"
    if f.n == 4 and cls in ("omega7", "omega8"):
        if not is_closed(f, (0, 1)):
            raise EngineError(f"{cls} without the projection on x1, x2")
        base = lambda_engine(f, (0, 1), R, seed, False)
        fiber = lambda_engine(f, (2, 3), R, seed, False)
        val = None
        if base.value is not None and fiber.value is not None:
            val = max(base.value, fiber.value)
        return LambdaNode((0, 1, 2, 3), "projection", val, None, [base, fiber], (0, 1)), "projection"
    node = lambda_engine(f, None, R, seed, False)
    _check_zero_pattern(cls, node)
    return node, node.method


def _resolve(chain: list[PolyMap], cls: str, R: int, seed: int) -> dict:
    """Verdict on the terminal form; when it cannot be certified, on the earlier
    (conjugate, hence same lambda) forms from the last one backwards."""
    node, method = _terminal_verdict(chain[-1], cls, R, seed)
    out = {"node": node, "method": method, "value": node.value, "certified": node.certified,
           "tags": [], "fallback": None, "probe": None}
    if out["certified"]:
        return out
    for k in range(len(chain) - 2, -1, -1):
        alt = lambda_engine(chain[k], None, R, seed, False)
        if alt.certified:
            out.update(node=alt, method=alt.method, value=alt.value, certified=True, fallback=k)
            out["tags"].append("earlier-form")
            return out
    f = chain[-1]
    for g in _elementary_linear(f.n, f.field):
        alt = lambda_engine(g.conjugate(f), None, R, seed, False)
        if alt.certified:
            out.update(node=alt, method=alt.method, value=alt.value, certified=True,
                       probe=str(g.forward))
            out["tags"].append("linear-probe")
            return out
    # a two-coordinate projection forces an integer value; that fact is cited, not derived
    if f.n == 4 and any(is_closed(f, S) for S in ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))):
        out.update(method="cited-integer", value=_cited_integer(chain[0], node, R, seed))
        out["tags"].append("cited-integer")
    else:
        out.update(method="estimate", value=None)
        node.estimate = estimate_from_degrees(line_degree_sequence(chain[0], R, seed=seed),
                                              certified=False).last_ratio
    return out


def _elementary_linear(n: int, field):
    """x_i -> x_i + c x_j for i != j and c = 1, -1, in a fixed order."""
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            for c in (1, -1):
                A = [[1 if r == s else 0 for s in range(n)] for r in range(n)]
                A[i][j] = c
                yield make_affine(A, None, field)


def _replay(f: PolyMap, conjs: Sequence[Automorphism]) -> list[PolyMap]:
    chain = [f]
    for g in conjs:
        chain.append(g.conjugate(chain[-1]))
    return chain


def classify(alpha, tau=None, R: int = CROSSCHECK_R, seed: int = 0) -> ClassificationTrace:
    """lambda of alpha o tau (or of a permutation-triangular map) with its derivation."""
    a, t = _split_input(alpha, tau)
    if a.n > 4:
        raise ClassificationError("classification is implemented up to dimension 4")
    first = to_permutation_triangular(a, t)
    steps = [_record(first, omega=list(first.form.omega))]
    conjs = [first.conjugator]
    form = first.form
    start = omega_name(form.omega) if form.n == 4 else "dim" + str(form.n)
    steps[0]["to"] = start
    if form.n == 4:
        terminal, cls, tags = _run_route(form, steps, conjs)
    else:
        terminal, cls, tags = form.realize(), start, []
    chain = _replay(compose(a, t), conjs)
    if chain[-1] != terminal:
        raise ConjugationError("recorded conjugators do not reach the terminal form")
    res = _resolve(chain, cls, R, seed)
    tags += res["tags"]
    node, method, value, certified = res["node"], res["method"], res["value"], res["certified"]
    if value is not None and value.degree > 4:
        raise EngineError(f"minimal polynomial of degree {value.degree} > 4")
    if res["fallback"] is not None:
        steps.append({"step": "fallback", "form": res["fallback"], "class": cls})
    if res["probe"] is not None:
        steps.append({"step": "probe", "g": res["probe"], "class": cls})
    steps.append({"step": "verdict", "class": cls, "method": method,
                  "lambda": value.to_json() if value is not None else None})
    degs = line_degree_sequence(compose(a, t), R, seed=seed)
    est = estimate_from_degrees(degs, certified=False)
    cross = {"R": R, "degrees_lower": list(degs), "fekete_upper": est.fekete_upper,
             "last_ratio": est.last_ratio}
    return ClassificationTrace(a, t, start, steps, conjs, terminal, cls, node, method,
                               value, certified, tags, cross)


# -- verification ------------------------------------------------------------------

def verify_trace_report(trace: ClassificationTrace, alpha=None, tau=None,
                        R: int = SANDWICH_R, seed: int = 1) -> tuple[bool, str]:
    """Replay the conjugations, recompute the verdict, and test lambda^r <= deg f^r."""
    try:
        if alpha is not None:
            a, t = _split_input(alpha, tau)
        else:
            a, t = trace.alpha, trace.tau
        f = compose(a, t)
        for k, g in enumerate(trace.conjugators):
            if not g.verify():
                return False, f"conjugator {k} is not invertible as recorded"
            if str(g.forward) != trace.steps[k]["g"]:
                return False, f"conjugator {k} differs from the recorded step"
        chain = _replay(f, trace.conjugators)
        if chain[-1] != trace.terminal:
            return False, "replayed conjugations do not reach the terminal form"
        res = _resolve(chain, trace.terminal_class, CROSSCHECK_R, 0)
        method, value = res["method"], res["value"]
        if method != trace.method:
            return False, f"verdict method {method} != recorded {trace.method}"
        if (value is None) != (trace.value is None) or (value is not None and value != trace.value):
            return False, "recomputed lambda differs from the recorded value"
        if trace.value is not None:
            lows = line_degree_sequence(f, R, seed=seed)
            for r, d in enumerate(lows, start=1):
                if power_compare(trace.value, r, d) > 0:
                    return False, f"lambda^{r} exceeds a lower bound {d} for deg f^{r}"
    except (PolynomialError, EngineError) as exc:
        return False, f"verification error: {exc}"
    return True, "ok"


def verify_trace(trace: ClassificationTrace, alpha=None, tau=None, R: int = SANDWICH_R) -> bool:
    return verify_trace_report(trace, alpha, tau, R)[0]


# -- random inputs -----------------------------------------------------------------

def random_affine_triangular(rng: random.Random, n: int = 4, max_degree: int = 3,
                             coeff: int = 2, terms: int = 3) -> tuple[Automorphism, Automorphism]:
    """alpha = permutation o unipotent lower-triangular o translation, tau triangular.

    Coefficients are drawn from -coeff..coeff; diagonal entries of tau from {±1, ±2}.
    """
    fld = QQ
    perm = list(range(1, n + 1))
    rng.shuffle(perm)
    L = [[1 if i == j else (rng.randint(-coeff, coeff) if j < i and rng.random() < 0.4 else 0)
          for j in range(n)] for i in range(n)]
    b = [rng.randint(-coeff, coeff) if rng.random() < 0.3 else 0 for _ in range(n)]
    P = make_permutation(perm, fld)
    alpha = make_affine(L, b, fld).then(P)
    cs = [rng.choice((-2, -1, 1, 2)) for _ in range(n)]
    tails = []
    for j in range(n):
        p = Polynomial.zero(n, fld)
        if j:
            for _ in range(rng.randint(0, terms)):
                e = [0] * n
                for _ in range(rng.randint(0, max_degree)):
                    e[rng.randrange(j)] += 1
                c = rng.randint(-coeff, coeff)
                if c:
                    p = p + Polynomial.from_terms(n, [(e, c)], fld)
        tails.append(p)
    tau = make_triangular(cs, tails, fld)
    return alpha, tau
