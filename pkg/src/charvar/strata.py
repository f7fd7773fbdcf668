"""Recursive stratification: the class of X(A, F, G) in Z[q].

X(A, F, G) is the locally closed subset of affine space on the variables A
where every f in F vanishes and every g in G does not.  The engine applies
the rewriting rules below in fixed priority order, and gives up (rather than
guessing) when none of them applies.

    1  empty: nonzero constant in F, or 0 in G
    2  no equations (or no variables): affine space
    3  a variable appears nowhere: factor off a line
    4  f = u^n: replace f by u (same for G)
    5  f univariate in a with rational roots: sum over the roots
    6  f = u*v: split into u = 0 and u != 0, v = 0
    7  f = a*u + v: split into u = v = 0 and u != 0, a = -v/u
    8  f quadratic in a with square discriminant
    9  drop some g from G by inclusion-exclusion
    10 fail
"""
from __future__ import annotations

import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import AlgorithmFailure, ResourceLimit
from .poly import (Q, MultiPoly, parse, perfect_power_root, poly_square_root,
                   split_product, univariate_linear_factors)

ONE = MultiPoly.const(1)
ZERO = MultiPoly()


@dataclass(frozen=True)
class StratumSpec:
    """Variables, vanishing polynomials and non-vanishing polynomials."""

    vars: tuple[str, ...]
    zero: tuple[MultiPoly, ...] = ()
    nonzero: tuple[MultiPoly, ...] = ()

    @staticmethod
    def make(vars: Iterable[str], zero: Iterable = (), nonzero: Iterable = ()) -> "StratumSpec":
        zs = [parse(f) if isinstance(f, str) else MultiPoly._lift(f) for f in zero]
        gs = [parse(g) if isinstance(g, str) else MultiPoly._lift(g) for g in nonzero]
        vs = tuple(sorted(set(vars)))
        for p in zs + gs:
            extra = p.variables() - set(vs)
            if extra:
                raise ValueError(f"polynomial {p} uses undeclared variables {sorted(extra)}")
        return StratumSpec(vs, tuple(zs), tuple(gs))

    @staticmethod
    def from_json(doc: dict) -> "StratumSpec":
        return StratumSpec.make(doc.get("vars", []), doc.get("zero", []), doc.get("nonzero", []))

    def to_json(self) -> dict:
        return {"vars": list(self.vars), "zero": [str(f) for f in self.zero],
                "nonzero": [str(g) for g in self.nonzero]}

    def __str__(self) -> str:
        z = ", ".join(str(f) for f in self.zero)
        g = ", ".join(str(f) for f in self.nonzero)
        return f"X({', '.join(self.vars)} | {z} | {g})"


def _norm(f: MultiPoly) -> MultiPoly:
    return f.primitive()


def _key(f: MultiPoly):
    return f.sort_key()


def canonical(vars: Iterable[str], zero: Iterable[MultiPoly], nonzero: Iterable[MultiPoly]):
    """Canonical (vars, F, G) or None when the set is visibly empty."""
    fs = {}
    for f in zero:
        if f.is_zero():
            continue
        if f.is_constant():
            return None
        f = _norm(f)
        fs[f] = None
    gs = {}
    for g in nonzero:
        if g.is_zero():
            return None
        if g.is_constant():
            continue
        g = _norm(g)
        gs[g] = None
    # an element of F that also appears in G empties the set
    if any(f in gs for f in fs):
        return None
    F = tuple(sorted(fs, key=_key))
    G = tuple(sorted(gs, key=_key))
    return tuple(sorted(set(vars))), F, G


@dataclass
class Budget:
    max_depth: int = 2000
    max_nodes: int = 50_000_000


@dataclass
class EngineStats:
    nodes: int = 0
    memo_hits: int = 0
    rules: dict = field(default_factory=dict)


class Engine:
    """Memoized evaluator; one instance can be shared by many computations."""

    def __init__(self, budget: Budget | None = None, trace: bool = False):
        self.budget = budget or Budget()
        self.trace = trace
        self.memo: dict = {}
        self.stats = EngineStats()
        if sys.getrecursionlimit() < 20000:
            sys.setrecursionlimit(20000)

    def virtual_class(self, spec: StratumSpec) -> MultiPoly:
        c = canonical(spec.vars, spec.zero, spec.nonzero)
        if c is None:
            return ZERO
        return self._run(c, 0)[0]

    def virtual_class_traced(self, spec: StratumSpec) -> tuple[MultiPoly, dict]:
        sub = Engine(self.budget, trace=True)
        c = canonical(spec.vars, spec.zero, spec.nonzero)
        if c is None:
            return ZERO, {"rule": 1, "spec": spec.to_json(), "value": "0", "children": []}
        return sub._run(c, 0)

    # -- core recursion ---------------------------------------------------
    def _run(self, c, depth: int):
        """Returns (value, trace-or-None) for a canonical triple."""
        hit = self.memo.get(c)
        if hit is not None:
            self.stats.memo_hits += 1
            return hit
        self.stats.nodes += 1
        if self.stats.nodes > self.budget.max_nodes:
            raise ResourceLimit(f"node budget {self.budget.max_nodes} exceeded")
        if depth > self.budget.max_depth:
            raise ResourceLimit(f"depth budget {self.budget.max_depth} exceeded")
        rule, value, kids = self._step(c, depth)
        self.stats.rules[rule] = self.stats.rules.get(rule, 0) + 1
        tr = None
        if self.trace:
            A, F, G = c
            tr = {"rule": rule,
                  "spec": {"vars": list(A), "zero": [str(f) for f in F], "nonzero": [str(g) for g in G]},
                  "value": str(value), "children": kids}
        out = (value, tr)
        self.memo[c] = out
        return out

    def _sub(self, A, F, G, depth, kids):
        c = canonical(A, F, G)
        if c is None:
            if self.trace:
                kids.append({"rule": 1, "spec": {"vars": sorted(A), "zero": [str(f) for f in F],
                                                  "nonzero": [str(g) for g in G]},
                             "value": "0", "children": []})
            return ZERO
        v, tr = self._run(c, depth + 1)
        if self.trace:
            kids.append(tr)
        return v

    def _step(self, c, depth):
        A, F, G = c
        kids: list = []
        # rule 2
        if (not F and not G) or not A:
            return 2, Q ** len(A), kids
        # rule 3
        used = set()
        for p in F + G:
            used |= p.variables()
        free = [a for a in A if a not in used]
        if free:
            rest = tuple(a for a in A if a in used)
            v = self._sub(rest, F, G, depth, kids)
            return 3, v * Q ** len(free), kids
        # rule 4
        for idx, f in enumerate(F):
            r = perfect_power_root(f)
            if r is not None:
                v = self._sub(A, F[:idx] + (r[0],) + F[idx + 1:], G, depth, kids)
                return 4, v, kids
        for idx, g in enumerate(G):
            r = perfect_power_root(g)
            if r is not None:
                v = self._sub(A, F, G[:idx] + (r[0],) + G[idx + 1:], depth, kids)
                return 4, v, kids
        # rule 5
        for idx, f in enumerate(F):
            vs = f.variables()
            if len(vs) != 1:
                continue
            (a,) = vs
            roots = univariate_linear_factors(f, a)
            if roots is None:
                continue
            rest = F[:idx] + F[idx + 1:]
            A2 = tuple(x for x in A if x != a)
            total = ZERO
            for r, _mult in roots:
                num, den = MultiPoly.const(r.numerator), MultiPoly.const(r.denominator)
                total = total + self._sub(A2, [h.ev(a, num, den) for h in rest],
                                          [g.ev(a, num, den) for g in G], depth, kids)
            return 5, total, kids
        # rule 6
        for idx, f in enumerate(F):
            sp = split_product(f)
            if sp is None:
                continue
            u, w = sp
            rest = F[:idx] + F[idx + 1:]
            v1 = self._sub(A, rest + (u,), G, depth, kids)
            v2 = self._sub(A, rest + (w,), G + (u,), depth, kids)
            return 6, v1 + v2, kids
        # rule 7
        pick = self._pick_linear(F)
        if pick is not None:
            idx, a, u, w = pick
            rest = F[:idx] + F[idx + 1:]
            v1 = self._sub(A, rest + (u, w), G, depth, kids)
            A2 = tuple(x for x in A if x != a)
            nw = -w
            v2 = self._sub(A2, [h.ev(a, nw, u) for h in rest],
                           [g.ev(a, nw, u) for g in G] + [u], depth, kids)
            return 7, v1 + v2, kids
        # rule 8
        pick = self._pick_quadratic(F)
        if pick is not None:
            idx, a, u, v, w, D, d = pick
            rest = F[:idx] + F[idx + 1:]
            av = MultiPoly.var(a)
            A2 = tuple(x for x in A if x != a)
            tot = self._sub(A, rest + (u, av * v + w), G, depth, kids)
            den = 2 * u
            tot = tot + self._sub(A2, [h.ev(a, -v, den) for h in rest] + [D],
                                  [g.ev(a, -v, den) for g in G] + [u], depth, kids)
            for num in (-v - d, -v + d):
                tot = tot + self._sub(A2, [h.ev(a, num, den) for h in rest],
                                      [g.ev(a, num, den) for g in G] + [u, D], depth, kids)
            return 8, tot, kids
        # rule 9
        if G:
            g = G[0]
            v1 = self._sub(A, F, G[1:], depth, kids)
            # the closed piece {g = 0} must not keep g among the units
            v2 = self._sub(A, F + (g,), G[1:], depth, kids)
            return 9, v1 - v2, kids
        raise AlgorithmFailure("no rule applies", StratumSpec(A, F, G))

    @staticmethod
    def _pick_linear(F):
        """First f (canonical order) of degree one in some variable.

        Among the linear variables of that f, prefer a constant coefficient,
        then the coefficient with fewest terms, then the variable name.
        """
        for idx, f in enumerate(F):
            best = None
            for a in sorted(f.variables()):
                cs = f.coeffs_in(a)
                if max(cs) != 1:
                    continue
                u = cs[1]
                score = (0 if u.is_constant() else 1, len(u), u.degree(), a)
                if best is None or score < best[0]:
                    best = (score, a, u, cs.get(0, ZERO))
            if best is not None:
                return idx, best[1], best[2], best[3]
        return None

    @staticmethod
    def _pick_quadratic(F):
        for idx, f in enumerate(F):
            for a in sorted(f.variables()):
                cs = f.coeffs_in(a)
                if max(cs) != 2:
                    continue
                u, v, w = cs[2], cs.get(1, ZERO), cs.get(0, ZERO)
                D = v * v - 4 * u * w
                d = poly_square_root(D)
                if d is None:
                    continue
                return idx, a, u, v, w, D, d
        return None


_default_engine: Engine | None = None


def default_engine() -> Engine:
    global _default_engine
    if _default_engine is None:
        _default_engine = Engine()
    return _default_engine


def virtual_class(spec: StratumSpec, engine: Engine | None = None) -> MultiPoly:
    """Class of X(A, F, G) as a polynomial in q; raises AlgorithmFailure on rule 10."""
    return (engine or default_engine()).virtual_class(spec)


def point_count(spec: StratumSpec, q0: int, budget: int = 10 ** 7) -> int:
    """Number of F_q0 points by exhaustive enumeration."""
    from .oracle import count_points
    return count_points(spec.vars, spec.zero, spec.nonzero, q0, budget)
