"""Linear projections, the base/fiber splitting of lambda, and the recursive
lambda engine for permutation-triangular maps.

The engine works on a map together with an active coordinate set J; the other
coordinates are constants of the fraction field K.  On J it computes theta and
a maximal eigenvector mu: theta = 1 gives lambda = 1, a strictly positive mu
gives lambda = theta, and otherwise the zero set Z of mu is closed (mu_i = 0
forces deg_mu(f_i) = 0), so lambda = max(lambda on Z, lambda on J \\ Z).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from itertools import combinations
from typing import Iterable, Sequence

from .algebraic import AlgebraicNumber
from .automorphism import (Automorphism, PermTriForm, PolyMap, compose, estimate_from_degrees,
                           identity_map, iterate, line_degree_sequence)
from .polyring import Polynomial, PolynomialError
from .weights import INCONCLUSIVE, MU_STABLE, THETA_ONE, Verdict, stability_verdict

__all__ = [
    "ProjectionWitness", "is_closed", "find_linear_projections", "sub_map", "LambdaNode",
    "lambda_engine", "split_lambda", "affine_fiber_reduce", "remark_decompose",
    "EngineError",
]


class EngineError(RuntimeError):
    """A proof fact encoded in the engine was violated (indicates a bug)."""


def is_closed(f: PolyMap, S: Iterable[int], active: Iterable[int] | None = None) -> bool:
    """f_i for i in S reads no active variable outside S."""
    S = set(S)
    J = set(range(f.n)) if active is None else set(active)
    outside = J - S
    return all(not (f[i].variables() & outside) for i in S)


def sub_map(f: PolyMap, S: Sequence[int]) -> PolyMap:
    """The components indexed by the closed set S, as a map on |S| variables."""
    S = tuple(sorted(S))
    if not is_closed(f, S):
        raise PolynomialError(f"{[i + 1 for i in S]} is not a linear projection")
    perm = [0] * f.n
    for k, i in enumerate(S):
        perm[i] = k
    return PolyMap([f[i].rename(perm, len(S)) for i in S])


@dataclass(frozen=True)
class ProjectionWitness:
    subset: tuple[int, ...]
    base: PolyMap
    verified: bool

    @property
    def m(self) -> int:
        return len(self.subset)

    def fiber(self, n: int) -> tuple[int, ...]:
        return tuple(i for i in range(n) if i not in self.subset)

    def to_json(self) -> dict:
        return {"S": [i + 1 for i in self.subset], "base": str(self.base),
                "verified": self.verified}


def _witness(f: PolyMap, S: tuple[int, ...]) -> ProjectionWitness:
    base = sub_map(f, S)
    return ProjectionWitness(S, base, PermTriForm.from_map(base) is not None)


def find_linear_projections(f: PolyMap, minimal: bool = False,
                            include_full: bool = True) -> list[ProjectionWitness]:
    """Closed coordinate subsets by increasing size, then lexicographically."""
    out: list[ProjectionWitness] = []
    top = f.n if include_full else f.n - 1
    for m in range(1, top + 1):
        for S in combinations(range(f.n), m):
            if not is_closed(f, S):
                continue
            if minimal and any(set(w.subset) <= set(S) for w in out):
                continue
            out.append(_witness(f, S))
    return out


# -- the engine ------------------------------------------------------------------

@dataclass
class LambdaNode:
    active: tuple[int, ...]
    method: str
    value: AlgebraicNumber | None
    verdict: Verdict | None = None
    children: list["LambdaNode"] = dc_field(default_factory=list)
    split: tuple[int, ...] | None = None
    estimate: float | None = None
    tags: list[str] = dc_field(default_factory=list)

    @property
    def certified(self) -> bool:
        return self.value is not None and all(c.certified for c in self.children)

    def leaves(self):
        if not self.children:
            yield self
        for c in self.children:
            yield from c.leaves()

    def to_json(self) -> dict:
        out = {"active": [i + 1 for i in self.active], "method": self.method}
        if self.value is not None:
            out["lambda"] = self.value.to_json()
        if self.verdict is not None:
            out["verdict"] = self.verdict.to_json()
        if self.split is not None:
            out["split"] = [i + 1 for i in self.split]
        if self.estimate is not None:
            out["estimate"] = self.estimate
        if self.tags:
            out["tags"] = list(self.tags)
        if self.children:
            out["children"] = [c.to_json() for c in self.children]
        return out


def _max(a: AlgebraicNumber | None, b: AlgebraicNumber | None) -> AlgebraicNumber | None:
    if a is None or b is None:
        return None
    return a if a >= b else b


def lambda_engine(f: PolyMap, active: Iterable[int] | None = None, R: int = 10,
                  seed: int = 0, estimate: bool = True) -> LambdaNode:
    """lambda of the permutation-triangular map f restricted to ``active``.

    With ``estimate`` False, uncertified leaves skip the degree-growth estimate.
    """
    J = tuple(range(f.n)) if active is None else tuple(sorted(active))
    if not J:
        raise PolynomialError("empty active set")
    v = stability_verdict(f, J)
    if v.kind == THETA_ONE:
        return LambdaNode(J, "theta-one", AlgebraicNumber.rational(1), v)
    if v.kind == MU_STABLE:
        return LambdaNode(J, "mu-stable", v.theta, v)
    if v.mu is not None and v.zero_pattern():
        Z = v.zero_pattern()
        if not is_closed(f, Z, J):
            raise EngineError(f"zero set {[i + 1 for i in Z]} of a maximal eigenvector is not closed")
        split = Z
    else:
        split = next((S for m in range(1, len(J))
                      for S in combinations(J, m) if is_closed(f, S, J)), None)
    if split is None:
        # no usable eigenvector and no projection: estimate only
        if not estimate:
            return LambdaNode(J, "estimate", None, v)
        fixed = [i for i in range(f.n) if i not in J]
        degs = line_degree_sequence(f, R, seed=seed, fixed=fixed)
        est = estimate_from_degrees(degs, certified=False)
        return LambdaNode(J, "estimate", None, v, estimate=est.last_ratio)
    rest = tuple(i for i in J if i not in split)
    base = lambda_engine(f, split, R, seed, estimate)
    fiber = lambda_engine(f, rest, R, seed, estimate)
    return LambdaNode(J, "projection", _max(base.value, fiber.value), v,
                      children=[base, fiber], split=tuple(split))


# -- Lemma-style helpers on explicit witnesses -----------------------------------

def split_lambda(f: PolyMap, witness: ProjectionWitness, R: int = 8, seed: int = 0) -> dict:
    """lambda = max(lambda of the base, fiber growth under the 0/1 weight)."""
    S = witness.subset
    rest = witness.fiber(f.n)
    base = lambda_engine(f, S, R, seed)
    out = {"lambda1": base.value, "base": base}
    if rest:
        fib = lambda_engine(f, rest, R, seed)
        degs = line_degree_sequence(f, R, seed=seed, fixed=S)
        out.update(lambda2=fib.value, fiber=fib,
                   lambda2_estimate=estimate_from_degrees(degs, certified=False))
    else:
        out.update(lambda2=AlgebraicNumber.rational(1), fiber=None, lambda2_estimate=None)
    out["combined"] = _max(out["lambda1"], out["lambda2"])
    return out


def _fiber_is_affine(f: PolyMap, witness: ProjectionWitness) -> bool:
    rest = witness.fiber(f.n)
    return all(f[j].degree_in(rest) <= 1 for j in rest)


def affine_fiber_reduce(f: PolyMap, witness: ProjectionWitness) -> AlgebraicNumber:
    """lambda(f) = lambda(base) when the fiber is affine over K."""
    if not _fiber_is_affine(f, witness):
        raise PolynomialError("fiber is not affine in the fiber variables")
    node = lambda_engine(f, witness.subset)
    if node.value is None:
        raise PolynomialError("base lambda could not be certified")
    return node.value


def _lift(base: PolyMap, S: Sequence[int], n: int) -> PolyMap:
    """Base map on x_S extended by the identity on the other coordinates."""
    comps = [Polynomial.var(i, n, base.field) for i in range(n)]
    for k, i in enumerate(S):
        comps[i] = base[k].rename(list(S), n)
    return PolyMap(comps)


def base_automorphism(f: PolyMap, witness: ProjectionWitness) -> Automorphism:
    form = PermTriForm.from_map(witness.base)
    if form is None:
        raise PolynomialError("base is not permutation-triangular; no inverse available")
    a = form.automorphism()
    S = witness.subset
    return Automorphism(_lift(a.forward, S, f.n), _lift(a.inverse, S, f.n))


def remark_decompose(f: PolyMap, witness: ProjectionWitness, r: int) -> dict:
    """f^r = g^r o G_r with F = (x_S, f_fiber) and G_r built from conjugates of F."""
    if r < 1:
        raise PolynomialError("r must be >= 1")
    n = f.n
    g = base_automorphism(f, witness)
    F = PolyMap([Polynomial.var(i, n, f.field) if i in witness.subset else f[i] for i in range(n)])
    if compose(g.forward, F) != f:
        raise PolynomialError("f != g o F")
    G = F
    gk, gk_inv = identity_map(n, f.field), identity_map(n, f.field)
    for _ in range(1, r):
        gk = compose(g.forward, gk)
        gk_inv = compose(gk_inv, g.inverse)
        G = compose(compose(gk_inv, compose(F, gk)), G)
    g_power = iterate(g.forward, r)
    if compose(g_power, G) != iterate(f, r):
        raise PolynomialError("f^r != g^r o G_r")
    return {"g_power": g_power, "G_r": G}
