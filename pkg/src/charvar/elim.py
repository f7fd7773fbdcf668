"""Buchberger's algorithm over Z for lexicographic elimination.

Polynomials are converted into dicts keyed by packed monomials in which the
highest-priority variable sits in the most significant field, so comparing
two packed ints is exactly the lex order.
"""
from __future__ import annotations

from math import gcd
from typing import Iterable, Sequence

from .errors import ResourceLimit
from .poly import MultiPoly

_B = 16
_F = (1 << _B) - 1
MAX_BASIS = 5000
MAX_DEGREE = 40


class _Ring:
    """Packing for a fixed variable order (first name = largest)."""

    def __init__(self, order: Sequence[str]):
        self.order = list(order)
        self.nv = len(self.order)
        self.pos = {n: i for i, n in enumerate(self.order)}
        self.guard = 0
        for i in range(self.nv):
            self.guard |= 1 << (_B * i + _B - 1)

    def shift(self, i: int) -> int:
        return _B * (self.nv - 1 - i)

    def pack(self, f: MultiPoly) -> dict[int, int]:
        out = {}
        for mono, c in f.items():
            m = 0
            for name, e in mono:
                if name not in self.pos:
                    raise ValueError(f"variable {name} missing from the monomial order")
                m += e << self.shift(self.pos[name])
            out[m] = c
        return out

    def unpack(self, p: dict[int, int]) -> MultiPoly:
        items = []
        for m, c in p.items():
            mono = []
            for i in range(self.nv):
                e = (m >> self.shift(i)) & _F
                if e:
                    mono.append((self.order[i], e))
            items.append((mono, c))
        return MultiPoly.from_items(items)

    def divides(self, a: int, b: int) -> bool:
        return ((b | self.guard) - a) & self.guard == self.guard

    def lcm(self, a: int, b: int) -> int:
        out = 0
        for i in range(self.nv):
            sh = _B * i
            x, y = (a >> sh) & _F, (b >> sh) & _F
            out |= (x if x > y else y) << sh
        return out

    def degree(self, m: int) -> int:
        d = 0
        while m:
            d += m & _F
            m >>= _B
        return d

    def max_field(self, m: int) -> int:
        d = 0
        while m:
            d = max(d, m & _F)
            m >>= _B
        return d


def _content(p: dict[int, int]) -> int:
    g = 0
    for c in p.values():
        g = gcd(g, c)
        if g == 1:
            return 1
    return g


def _normalize(p: dict[int, int]) -> dict[int, int]:
    if not p:
        return p
    g = _content(p)
    if p[max(p)] < 0:
        g = -g
    if g != 1:
        p = {m: c // g for m, c in p.items()}
    return p


class _Basis:
    def __init__(self, ring: _Ring):
        self.R = ring
        self.polys: list[dict[int, int]] = []
        self.lm: list[int] = []
        self.sugar: list[int] = []
        self.active: list[bool] = []

    def reduce(self, p: dict[int, int], full: bool = True) -> dict[int, int]:
        """Fraction-free normal form of p modulo the active basis, primitive."""
        R = self.R
        p = dict(p)
        rem: dict[int, int] = {}
        divs = [(self.lm[i], self.polys[i]) for i in range(len(self.polys)) if self.active[i]]
        steps = 0
        while p:
            m = max(p)
            c = p[m]
            for lm, g in divs:
                if R.divides(lm, m):
                    cg = g[lm]
                    d = gcd(c, cg)
                    a, b = cg // d, c // d
                    if a != 1:
                        if a == -1:
                            p = {k: -v for k, v in p.items()}
                            rem = {k: -v for k, v in rem.items()}
                        else:
                            p = {k: v * a for k, v in p.items()}
                            rem = {k: v * a for k, v in rem.items()}
                    sh = m - lm
                    for k, v in g.items():
                        kk = k + sh
                        nv = p.get(kk, 0) - b * v
                        if nv:
                            p[kk] = nv
                        else:
                            p.pop(kk, None)
                    steps += 1
                    if steps % 16 == 0:
                        cc = gcd(_content(p), _content(rem)) if rem else _content(p)
                        if cc > 1:
                            p = {k: v // cc for k, v in p.items()}
                            rem = {k: v // cc for k, v in rem.items()}
                    break
            else:
                if not full:
                    rem.update(p)
                    break
                rem[m] = p.pop(m)
        return _normalize(rem)

    def add(self, h: dict[int, int], sugar: int) -> int:
        self.polys.append(h)
        self.lm.append(max(h))
        self.sugar.append(sugar)
        self.active.append(True)
        if len(self.polys) > MAX_BASIS:
            raise ResourceLimit(f"Groebner basis exceeded {MAX_BASIS} elements")
        if self.R.max_field(max(h)) > MAX_DEGREE or any(self.R.max_field(m) > MAX_DEGREE for m in h):
            raise ResourceLimit(f"Groebner basis degree exceeded {MAX_DEGREE}")
        return len(self.polys) - 1


def _spoly(R: _Ring, f: dict[int, int], g: dict[int, int]) -> tuple[dict[int, int], int]:
    lf, lg = max(f), max(g)
    L = R.lcm(lf, lg)
    cf, cg = f[lf], g[lg]
    d = gcd(cf, cg)
    a, b = cg // d, cf // d
    sf, sg = L - lf, L - lg
    out: dict[int, int] = {}
    for k, v in f.items():
        out[k + sf] = a * v
    for k, v in g.items():
        kk = k + sg
        nv = out.get(kk, 0) - b * v
        if nv:
            out[kk] = nv
        else:
            out.pop(kk, None)
    return out, L


def _groebner_packed(R: _Ring, gens: list[dict[int, int]]) -> list[dict[int, int]]:
    B = _Basis(R)
    pairs: dict[tuple[int, int], tuple] = {}

    def update(h: dict[int, int], sugar: int) -> None:
        lh = max(h)
        hi = B.add(h, sugar)
        cand = []
        for i in range(hi):
            if B.active[i]:
                cand.append((i, R.lcm(lh, B.lm[i])))
        # chain criterion among the new pairs
        keep = []
        for idx, (i, L) in enumerate(cand):
            coprime = L == lh + B.lm[i]
            if coprime:
                keep.append((i, L, True))
                continue
            dominated = False
            for j, (i2, L2) in enumerate(cand):
                if j != idx and R.divides(L2, L) and (L2 != L or j < idx):
                    dominated = True
                    break
            if not dominated:
                keep.append((i, L, False))
        # prune old pairs made redundant by h
        for key in list(pairs):
            i, j = key
            L = pairs[key][1]
            if R.divides(lh, L) and R.lcm(B.lm[i], lh) != L and R.lcm(B.lm[j], lh) != L:
                del pairs[key]
        for i, L, coprime in keep:
            if coprime:
                continue
            s = max(B.sugar[i] + R.degree(L - B.lm[i]), sugar + R.degree(L - lh))
            pairs[(i, hi)] = (s, L)
        for i in range(hi):
            if B.active[i] and R.divides(lh, B.lm[i]):
                B.active[i] = False

    for f in sorted(gens, key=lambda p: max(p)):
        h = B.reduce(f)
        if h:
            update(h, max(R.degree(m) for m in h))
    while pairs:
        key = min(pairs, key=lambda k: (pairs[k][0], pairs[k][1], k))
        s, L = pairs.pop(key)
        i, j = key
        sp, _ = _spoly(R, B.polys[i], B.polys[j])
        h = B.reduce(sp)
        if h:
            if max(h) == 0:
                return [{0: 1}]
            update(h, s)
    # minimal then reduced basis
    live = [i for i in range(len(B.polys)) if B.active[i]]
    live.sort(key=lambda i: B.lm[i])
    minimal = []
    for i in live:
        if not any(R.divides(B.lm[j], B.lm[i]) for j in minimal):
            minimal.append(i)
    red = _Basis(R)
    for i in minimal:
        red.add(B.polys[i], 0)
    out = []
    for k in range(len(red.polys)):
        red.active[k] = False
        r = red.reduce(red.polys[k])
        red.active[k] = True
        red.polys[k] = r
        out.append(r)
    out.sort(key=lambda p: max(p))
    return out


def groebner(gens: Iterable[MultiPoly], order: Sequence[str]) -> list[MultiPoly]:
    """Reduced lex Groebner basis (primitive, positive leading coefficients)."""
    R = _Ring(order)
    packed = [_normalize(R.pack(f)) for f in gens if not f.is_zero()]
    if not packed:
        return []
    return [R.unpack(p) for p in _groebner_packed(R, packed)]


class Ideal:
    """Ideal with a lex order given by a priority list of variables."""

    def __init__(self, generators: Iterable[MultiPoly], order: Sequence[str]):
        self.generators = [g for g in generators if not g.is_zero()]
        self.order = list(order)
        self._basis: list[MultiPoly] | None = None

    @property
    def basis(self) -> list[MultiPoly]:
        if self._basis is None:
            self._basis = groebner(self.generators, self.order)
        return self._basis

    def normal_form(self, f: MultiPoly) -> MultiPoly:
        R = _Ring(self.order)
        B = _Basis(R)
        for g in self.basis:
            B.add(R.pack(g), 0)
        return R.unpack(B.reduce(R.pack(f)))

    def contains(self, f: MultiPoly) -> bool:
        return self.normal_form(f).is_zero()

    def is_unit(self) -> bool:
        return any(g.is_constant() for g in self.basis)


def ideal_contains(I: Ideal, J: Ideal) -> bool:
    """True iff every generator of J lies in I."""
    return all(I.contains(g) for g in J.generators)


def eliminate(gens: Iterable[MultiPoly], elim: Sequence[str], keep: Sequence[str]) -> list[MultiPoly]:
    """Generators of the elimination ideal (gens) intersected with Z[keep]."""
    basis = groebner(gens, list(elim) + list(keep))
    es = set(elim)
    return [b for b in basis if not (b.variables() & es)]


# ---------------------------------------------------------------- orbit closures

def gname(i: int, j: int) -> str:
    return f"g{i + 1}{j + 1}" if max(i, j) < 9 else f"g{i + 1}_{j + 1}"


def yname(i: int, j: int) -> str:
    return f"y{i + 1}{j + 1}" if max(i, j) < 9 else f"y{i + 1}_{j + 1}"


def y_vars(n: int) -> list[str]:
    return [yname(i, j) for i in range(n) for j in range(i + 1, n)]


def closure_ideal_offdiag(n: int, xi: Sequence[Sequence[int]]) -> list[MultiPoly]:
    """Generators in the y_ij (i < j) of the closure of the T~_n-orbit of xi.

    Uses the graph of g -> g xi g^-1 written as y g = g xi, with a unit w
    inverting the diagonal of g, and eliminates g and w.
    """
    gv = {}
    for i in range(n):
        for j in range(i, n):
            if i == j == n - 1:
                gv[(i, j)] = MultiPoly.const(1)
            else:
                gv[(i, j)] = MultiPoly.var(gname(i, j))

    def G(i, j):
        return gv[(i, j)] if i <= j else MultiPoly()

    def Y(i, j):
        if i == j:
            return MultiPoly.const(1)
        return MultiPoly.var(yname(i, j)) if i < j else MultiPoly()

    eqs = []
    for i in range(n):
        for j in range(i + 1, n):
            lhs = MultiPoly()
            for k in range(i, j + 1):
                lhs = lhs + Y(i, k) * G(k, j)
            rhs = MultiPoly()
            for k in range(i, j + 1):
                if xi[k][j]:
                    rhs = rhs + G(i, k) * xi[k][j]
            eqs.append(lhs - rhs)
    det = MultiPoly.const(1)
    for i in range(n - 1):
        det = det * G(i, i)
    eqs.append(MultiPoly.var("w") * det - 1)
    elim = ["w"] + [gname(i, j) for i in range(n) for j in range(i, n) if not (i == j == n - 1)]
    return eliminate(eqs, elim, y_vars(n))


def closure_equations(n: int, xi: Sequence[Sequence[int]]) -> list[MultiPoly]:
    """Closure ideal in T~_n coordinates: off-diagonal part plus y_ii - 1."""
    diag = [MultiPoly.var(yname(i, i)) - 1 for i in range(n - 1)]
    return diag + closure_ideal_offdiag(n, xi)
