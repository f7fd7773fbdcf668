"""Conjugacy classes of T~_n: unipotent classes and non-unipotent families.

T~_n is the group of invertible upper triangular n x n matrices whose last
diagonal entry is 1.  Unipotent classes get 0/1 representatives, found by
enumerating all 0/1 unitriangular matrices and merging conjugate ones.  The
conjugacy decision is symbolic: the set {g : g xi = xi' g} is nonempty
exactly when its class is a nonzero polynomial.
"""
from __future__ import annotations

import itertools
import json
import os
from dataclasses import dataclass, field
from typing import Sequence

from . import elim
from .errors import CharvarError, InexactDivision
from .matrices import int_matmul, rank
from .poly import MultiPoly, Q, parse
from .strata import Engine, StratumSpec, default_engine

CATALOG_VERSION = 1
MAX_N = 5

Rep = tuple[tuple[int, ...], ...]


def group_class(n: int) -> MultiPoly:
    """[T~_n] = (q-1)^(n-1) q^(n(n-1)/2)."""
    return (Q - 1) ** (n - 1) * Q ** (n * (n - 1) // 2)


def unipotent_group_class(n: int) -> MultiPoly:
    return Q ** (n * (n - 1) // 2)


def identity(n: int) -> Rep:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def _positions(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def all_zero_one(n: int) -> list[Rep]:
    """All 0/1 unitriangular matrices, by number of ones then lexicographically."""
    pos = _positions(n)
    out = []
    for bits in itertools.product((0, 1), repeat=len(pos)):
        m = [list(r) for r in identity(n)]
        for (i, j), b in zip(pos, bits):
            m[i][j] = b
        out.append((sum(bits), tuple(-b for b in bits), tuple(tuple(r) for r in m)))
    out.sort()
    return [m for _, _, m in out]


def invariants(xi: Rep) -> tuple:
    """Ranks of the lower-left blocks of powers of xi - 1.

    T~_n preserves the standard flag, so rank of (xi-1)^m restricted to
    rows >= i and columns <= j is a conjugacy invariant.
    """
    n = len(xi)
    N = [[xi[i][j] - (i == j) for j in range(n)] for i in range(n)]
    out = []
    P = N
    for _m in range(1, n):
        for i in range(n):
            for j in range(i, n):
                out.append(rank([row[: j + 1] for row in P[i:]]))
        P = int_matmul(P, N)
    return tuple(out)


# ---------------------------------------------------------------- symbolic tests

def _g_matrix(n: int) -> tuple[list[list[MultiPoly]], list[str]]:
    names = []
    M = [[MultiPoly() for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            if i == j == n - 1:
                M[i][j] = MultiPoly.const(1)
            else:
                nm = elim.gname(i, j)
                names.append(nm)
                M[i][j] = MultiPoly.var(nm)
    return M, names


def intertwiner_spec(A: Sequence[Sequence[int]], B: Sequence[Sequence[int]]) -> StratumSpec:
    """{g in T~_n : g A = B g} for integer matrices A, B."""
    n = len(A)
    g, names = _g_matrix(n)
    eqs = []
    for i in range(n):
        for j in range(i, n):
            lhs = MultiPoly()
            rhs = MultiPoly()
            for k in range(i, j + 1):
                if A[k][j]:
                    lhs = lhs + g[i][k] * A[k][j]
                if B[i][k]:
                    rhs = rhs + g[k][j] * B[i][k]
            eqs.append(lhs - rhs)
    units = [g[i][i] for i in range(n - 1)]
    return StratumSpec.make(names, eqs, units)


def conjugacy_test(n: int, xi: Sequence[Sequence[int]], xi2: Sequence[Sequence[int]],
                   engine: Engine | None = None) -> bool:
    """True iff xi and xi2 are conjugate in T~_n over an algebraically closed field."""
    if len(xi) != n or len(xi2) != n:
        raise ValueError("matrix size does not match n")
    if [xi[i][i] for i in range(n)] != [xi2[i][i] for i in range(n)]:
        return False
    eng = engine or default_engine()
    return not eng.virtual_class(intertwiner_spec(xi, xi2)).is_zero()


def stabilizer_class(n: int, xi: Sequence[Sequence[int]], engine: Engine | None = None) -> MultiPoly:
    eng = engine or default_engine()
    return eng.virtual_class(intertwiner_spec(xi, xi))


def orbit_class(n: int, xi, engine: Engine | None = None) -> tuple[MultiPoly, MultiPoly]:
    """(orbit class, stabilizer class) by orbit-stabilizer."""
    st = stabilizer_class(n, xi, engine)
    try:
        return group_class(n).divexact(st), st
    except ArithmeticError as e:
        raise InexactDivision(f"[T~_{n}] not divisible by stabilizer class {st}") from e


# ---------------------------------------------------------------- catalog types

@dataclass
class UnipotentClass:
    index: int
    rep: Rep
    closure: list[MultiPoly] = field(default_factory=list)
    class_poly: MultiPoly = field(default_factory=MultiPoly)
    stabilizer_poly: MultiPoly = field(default_factory=MultiPoly)

    def to_json(self) -> dict:
        return {"index": self.index, "rep": [list(r) for r in self.rep],
                "closure": [str(f) for f in self.closure],
                "class": str(self.class_poly), "stabilizer": str(self.stabilizer_poly)}

    @staticmethod
    def from_json(d: dict) -> "UnipotentClass":
        return UnipotentClass(d["index"], tuple(tuple(r) for r in d["rep"]),
                              [parse(s) for s in d["closure"]], parse(d["class"]),
                              parse(d["stabilizer"]))


@dataclass
class DiagonalPattern:
    """Set partition of {0..n-1}; the block holding n-1 carries the value 1."""

    blocks: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return sum(len(b) for b in self.blocks)

    def free_blocks(self) -> list[tuple[int, ...]]:
        last = self.n - 1
        return [b for b in self.blocks if last not in b]

    def param_names(self) -> list[str]:
        return [f"t{k + 1}" for k in range(len(self.free_blocks()))]

    def diagonal(self, values: Sequence) -> list:
        """Diagonal entries given one value per free block (1 on the last block)."""
        out: list = [1] * self.n
        for b, v in zip(self.free_blocks(), values):
            for i in b:
                out[i] = v
        return out

    def base_spec(self) -> StratumSpec:
        ts = [MultiPoly.var(t) for t in self.param_names()]
        nz = []
        for k, t in enumerate(ts):
            nz += [t, t - 1]
            nz += [t - s for s in ts[:k]]
        return StratumSpec.make(self.param_names(), (), nz)

    def to_json(self):
        return [list(b) for b in self.blocks]


def set_partitions(n: int) -> list[DiagonalPattern]:
    """All set partitions, fewest blocks first, then by restricted growth string."""
    out = []

    def rec(i, rgs, m):
        if i == n:
            out.append(tuple(rgs))
            return
        for b in range(m + 1):
            rec(i + 1, rgs + [b], max(m, b + 1))

    rec(0, [], 0)
    out.sort(key=lambda r: (max(r) + 1 if r else 0, r))
    pats = []
    for r in out:
        blocks: dict[int, list[int]] = {}
        for i, b in enumerate(r):
            blocks.setdefault(b, []).append(i)
        pats.append(DiagonalPattern(tuple(tuple(v) for _, v in sorted(blocks.items()))))
    return pats


@dataclass
class ClassFamily:
    index: int
    pattern: DiagonalPattern
    unipotent: int
    base_poly: MultiPoly
    orbit_poly: MultiPoly
    stabilizer_poly: MultiPoly

    def matrix(self, rep: Rep, values: Sequence) -> list[list]:
        """diag(values) + xi_i - 1 with entries of whatever type values carry."""
        n = len(rep)
        d = self.pattern.diagonal(values)
        return [[d[i] if i == j else rep[i][j] for j in range(n)] for i in range(n)]

    def base_spec(self) -> StratumSpec:
        return self.pattern.base_spec()

    def to_json(self) -> dict:
        return {"index": self.index, "pattern": self.pattern.to_json(), "unipotent": self.unipotent,
                "base": str(self.base_poly), "orbit": str(self.orbit_poly),
                "stabilizer": str(self.stabilizer_poly)}

    @staticmethod
    def from_json(d: dict) -> "ClassFamily":
        return ClassFamily(d["index"], DiagonalPattern(tuple(tuple(b) for b in d["pattern"])),
                           d["unipotent"], parse(d["base"]), parse(d["orbit"]), parse(d["stabilizer"]))


@dataclass
class TransitionMatrix:
    order: list[list[bool]]  # order[i][j]: U_i lies in the closure of U_j
    C: list[list[int]]

    def to_json(self):
        return {"order": [[int(x) for x in r] for r in self.order], "C": self.C}


@dataclass
class ClassCatalog:
    n: int
    unipotent: list[UnipotentClass]
    families: list[ClassFamily]
    transition: TransitionMatrix

    @property
    def M(self) -> int:
        return len(self.unipotent)

    @property
    def N(self) -> int:
        return len(self.families)

    def family_matrix(self, j: int, values: Sequence) -> list[list]:
        f = self.families[j]
        return f.matrix(self.unipotent[f.unipotent].rep, values)

    def to_json(self) -> dict:
        return {"version": CATALOG_VERSION, "n": self.n, "M": self.M, "N": self.N,
                "unipotent": [u.to_json() for u in self.unipotent],
                "families": [f.to_json() for f in self.families],
                "transition": self.transition.to_json()}

    @staticmethod
    def from_json(d: dict) -> "ClassCatalog":
        if d.get("version") != CATALOG_VERSION:
            raise ValueError("catalog cache version mismatch")
        tr = d["transition"]
        return ClassCatalog(d["n"], [UnipotentClass.from_json(u) for u in d["unipotent"]],
                            [ClassFamily.from_json(f) for f in d["families"]],
                            TransitionMatrix([[bool(x) for x in r] for r in tr["order"]], tr["C"]))


# ---------------------------------------------------------------- construction

def enumerate_unipotent_classes(n: int, engine: Engine | None = None) -> list[UnipotentClass]:
    if n < 1 or n > MAX_N:
        raise CharvarError(f"0/1 representatives are only known to exist for 1 <= n <= {MAX_N}")
    reps: list[Rep] = []
    inv: list[tuple] = []
    for m in all_zero_one(n):
        key = invariants(m)
        if any(k == key and conjugacy_test(n, r, m, engine) for r, k in zip(reps, inv)):
            continue
        reps.append(m)
        inv.append(key)
    return [UnipotentClass(i, r) for i, r in enumerate(reps)]


def _closure_order(ideals: list[elim.Ideal]) -> list[list[bool]]:
    M = len(ideals)
    le = [[False] * M for _ in range(M)]
    for i in range(M):
        for j in range(M):
            le[i][j] = i == j or elim.ideal_contains(ideals[i], ideals[j])
    return le


def transition_from_order(le: list[list[bool]]) -> list[list[int]]:
    """Inverse of the zeta matrix Z[j][k] = [k <= j]; integer and unitriangular."""
    M = len(le)
    # process in a linear extension: fewer elements below first
    lin = sorted(range(M), key=lambda j: (sum(le[k][j] for k in range(M)), j))
    C = [[0] * M for _ in range(M)]
    for j in lin:
        # [U_j] = [Ubar_j] - sum_{k < j} [U_k]
        row = [0] * M
        row[j] = 1
        for k in lin:
            if k != j and le[k][j]:
                row = [a - b for a, b in zip(row, C[k])]
        C[j] = row
    return C


def build_unipotent(n: int, engine: Engine | None = None) -> tuple[list[UnipotentClass], TransitionMatrix]:
    eng = engine or default_engine()
    classes = enumerate_unipotent_classes(n, eng)
    ys = elim.y_vars(n)
    ideals = []
    for u in classes:
        u.closure = elim.closure_ideal_offdiag(n, u.rep)
        u.class_poly, u.stabilizer_poly = orbit_class(n, u.rep, eng)
        ideals.append(elim.Ideal(u.closure, ys))
    le = _closure_order(ideals)
    return classes, TransitionMatrix(le, transition_from_order(le))


_PRIMES = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53]


def _specializations(k: int, count: int = 3) -> list[list[int]]:
    return [_PRIMES[s * k:(s + 1) * k] for s in range(count)]


def build_families(n: int, unipotent: list[UnipotentClass],
                   engine: Engine | None = None) -> list[ClassFamily]:
    """Unipotent families first, then one family per (pattern, class) up to conjugacy."""
    eng = engine or default_engine()
    fams: list[ClassFamily] = []
    for u in unipotent:
        fams.append(ClassFamily(u.index, set_partitions(n)[0], u.index, MultiPoly.const(1),
                                u.class_poly, u.stabilizer_poly))
    for pat in set_partitions(n)[1:]:
        k = len(pat.free_blocks())
        specs = _specializations(k)
        base = eng.virtual_class(pat.base_spec())
        kept: list[int] = []
        for u in unipotent:
            probe = ClassFamily(-1, pat, u.index, base, MultiPoly(), MultiPoly())
            dup = None
            for idx in kept:
                other = ClassFamily(-1, pat, idx, base, MultiPoly(), MultiPoly())
                votes = {conjugacy_test(n, probe.matrix(u.rep, s),
                                        other.matrix(unipotent[idx].rep, s), eng) for s in specs}
                if len(votes) != 1:
                    raise CharvarError(f"conjugacy of pattern {pat.blocks} classes {idx}, {u.index} "
                                       f"depends on the diagonal specialization")
                if votes.pop():
                    dup = idx
                    break
            if dup is not None:
                continue
            stabs = {stabilizer_class(n, probe.matrix(u.rep, s), eng) for s in specs}
            if len(stabs) != 1:
                raise CharvarError(f"stabilizer of pattern {pat.blocks} class {u.index} "
                                   f"varies along the family")
            st = stabs.pop()
            try:
                orb = group_class(n).divexact(st)
            except ArithmeticError as e:
                raise InexactDivision(f"stabilizer {st} does not divide [T~_{n}]") from e
            kept.append(u.index)
            fams.append(ClassFamily(len(fams), pat, u.index, base, orb, st))
    return fams


def build_catalog(n: int, engine: Engine | None = None, cache_dir: str | None = None) -> ClassCatalog:
    """Full catalog, read from or written to cache_dir when one is given."""
    from .cache import load_json, store_json
    key = f"catalog-n{n}-v{CATALOG_VERSION}"
    doc = load_json(cache_dir, key)
    if doc is not None:
        return ClassCatalog.from_json(doc)
    eng = engine or default_engine()
    uni, tr = build_unipotent(n, eng)
    fams = build_families(n, uni, eng)
    cat = ClassCatalog(n, uni, fams, tr)
    check_catalog(cat, eng)
    store_json(cache_dir, key, cat.to_json())
    return cat


# ---------------------------------------------------------------- checks

def closure_class(n: int, gens: Sequence[MultiPoly], engine: Engine | None = None) -> MultiPoly:
    """[Ubar] computed directly from closure equations."""
    eng = engine or default_engine()
    return eng.virtual_class(StratumSpec.make(elim.y_vars(n), gens, ()))


def check_catalog(cat: ClassCatalog, engine: Engine | None = None, closures: bool = True) -> None:
    """Raises CharvarError if any structural identity fails."""
    n = cat.n
    G = group_class(n)
    for u in cat.unipotent:
        if u.class_poly * u.stabilizer_poly != G:
            raise CharvarError(f"orbit-stabilizer fails for class {u.index}")
        for f in u.closure:
            vals = {elim.yname(i, j): MultiPoly.const(u.rep[i][j]) for i, j in _positions(n)}
            if not f.subs(vals).is_zero():
                raise CharvarError(f"representative {u.index} not on its closure")
    total = MultiPoly()
    for u in cat.unipotent:
        total = total + u.class_poly
    if total != unipotent_group_class(n):
        raise CharvarError("unipotent classes do not add up to the unipotent group")
    measure = MultiPoly()
    for f in cat.families:
        measure = measure + f.base_poly * f.orbit_poly
    if measure != G:
        raise CharvarError(f"families add up to {measure}, expected {G}")
    if closures:
        le, C = cat.transition.order, cat.transition.C
        bar = []
        for j, u in enumerate(cat.unipotent):
            v = closure_class(n, u.closure, engine)
            s = MultiPoly()
            for k in range(cat.M):
                if le[k][j]:
                    s = s + cat.unipotent[k].class_poly
            if v != s:
                raise CharvarError(f"closure of class {j}: {v} != sum of classes below it {s}")
            bar.append(v)
        for i in range(cat.M):
            s = MultiPoly()
            for j in range(cat.M):
                if C[i][j]:
                    s = s + C[i][j] * bar[j]
            if s != cat.unipotent[i].class_poly:
                raise CharvarError(f"transition row {i} fails")
