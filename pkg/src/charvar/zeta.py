"""Representation zeta functions of connected subgroups of T_n.

A group is carried as a generic element: an upper triangular matrix whose
entries are polynomials in additive coordinates (G_a), multiplicative
coordinates (G_m, each with an inverse symbol) and the coordinates of a
parameter variety X.  The recursion peels off a torus factor, splits off
the last column N = G_a^r, and sorts the characters of N into families of
orbit representatives with their stabilizers:

    zeta_G(s) = sum_i zeta_{H_i}(s) * [H : H_i]^(-s).
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

from .errors import BranchFailure
from .matrices import rank
from .poly import MultiPoly, Q, ZetaExpr
from .strata import Engine, StratumSpec, default_engine

ONE = MultiPoly.const(1)
ZERO = MultiPoly()


def _inv(name: str) -> str:
    return "i" + name


# ---------------------------------------------------------------- the parameter variety

@dataclass(frozen=True)
class Base:
    """X: variables with vanishing and non-vanishing conditions.

    Every variable listed in `units` is known to be invertible and has an
    inverse symbol; products v * iv are cancelled eagerly.
    """

    vars: tuple[str, ...] = ()
    zero: tuple[MultiPoly, ...] = ()
    units: tuple[str, ...] = ()
    extra: tuple[str, ...] = ()  # auxiliary inverses w with w*f = 1 recorded in zero

    def spec(self) -> StratumSpec:
        names = list(self.vars) + [_inv(u) for u in self.units] + list(self.extra)
        zs = list(self.zero) + [MultiPoly.var(u) * MultiPoly.var(_inv(u)) - 1 for u in self.units]
        return StratumSpec.make(names, zs, ())


def cancel_inverses(f: MultiPoly, units: Sequence[str]) -> MultiPoly:
    """Cancel v * iv in every monomial."""
    if f.is_zero():
        return f
    us = [u for u in units]
    vs = f.variables()
    us = [u for u in us if u in vs and _inv(u) in vs]
    if not us:
        return f
    items = []
    for mono, c in f.items():
        d = dict(mono)
        for u in us:
            a, b = d.get(u, 0), d.get(_inv(u), 0)
            m = min(a, b)
            if m:
                d[u] = a - m
                d[_inv(u)] = b - m
        items.append(([(k, e) for k, e in d.items() if e], c))
    return MultiPoly.from_items(items)


# ---------------------------------------------------------------- groups

@dataclass(frozen=True)
class ParamGroup:
    """Family of subgroups of T_n over the parameter variety `base`."""

    n: int
    A: tuple[tuple[MultiPoly, ...], ...]
    add: tuple[str, ...]
    mult: tuple[str, ...]
    base: Base = field(default_factory=Base)

    def units(self) -> tuple[str, ...]:
        return self.mult + self.base.units

    def entry(self, i: int, j: int) -> MultiPoly:
        return self.A[i][j]

    def __str__(self) -> str:
        rows = ["[" + ", ".join(str(x) for x in r) + "]" for r in self.A]
        return "[" + ", ".join(rows) + "]"


def _coord(i: int, j: int) -> str:
    return f"x{i + 1}_{j + 1}"


def _dcoord(i: int) -> str:
    return f"d{i + 1}"


def pattern_group(grid: Sequence[Sequence[str]]) -> ParamGroup:
    """Group from a grid of '0', '1', '*' (free G_a entry) and 'm' (free G_m entry).

    Raises ValueError when the pattern is not closed under multiplication.
    """
    n = len(grid)
    A = [[ZERO] * n for _ in range(n)]
    add, mult = [], []
    for i in range(n):
        for j in range(n):
            c = str(grid[i][j]).strip()
            if j < i:
                if c != "0":
                    raise ValueError("pattern must be upper triangular")
                continue
            if i == j:
                if c == "1":
                    A[i][j] = ONE
                elif c == "m":
                    A[i][j] = MultiPoly.var(_dcoord(i))
                    mult.append(_dcoord(i))
                else:
                    raise ValueError("diagonal entries must be '1' or 'm'")
            else:
                if c == "0":
                    continue
                if c != "*":
                    raise ValueError("off-diagonal entries must be '0' or '*'")
                A[i][j] = MultiPoly.var(_coord(i, j))
                add.append(_coord(i, j))
    # closure: a product of two elements has no entry where the pattern has 0
    free = {(i, j) for i in range(n) for j in range(i + 1, n) if grid[i][j].strip() == "*"}
    for i in range(n):
        for j in range(i + 1, n):
            if (i, j) in free:
                continue
            for k in range(i + 1, j):
                if (i, k) in free and (k, j) in free:
                    raise ValueError(f"pattern not closed: ({i + 1},{k + 1})*({k + 1},{j + 1}) "
                                     f"lands on a fixed zero")
    return ParamGroup(n, tuple(tuple(r) for r in A), tuple(add), tuple(mult))


def unipotent_group(n: int) -> ParamGroup:
    return pattern_group([["1" if i == j else ("*" if j > i else "0") for j in range(n)]
                          for i in range(n)])


def triangular_group(n: int) -> ParamGroup:
    return pattern_group([["m" if i == j else ("*" if j > i else "0") for j in range(n)]
                          for i in range(n)])


def order_exponents(G: ParamGroup) -> tuple[int, int]:
    """|G| = q^alpha (q-1)^beta for a pattern group over a point."""
    return len(G.add), len(G.mult)


# ---------------------------------------------------------------- helpers

def _laurent_exponents(f: MultiPoly, mult: Sequence[str]) -> dict[str, int] | None:
    """Exponents of f as a monic Laurent monomial in the coordinates `mult`, else None."""
    items = f.items()
    if len(items) != 1:
        return None
    mono, c = items[0]
    if c != 1:
        return None
    ms = set(mult)
    out: dict[str, int] = {}
    for name, e in mono:
        if name in ms:
            out[name] = out.get(name, 0) + e
        elif name.startswith("i") and name[1:] in ms:
            out[name[1:]] = out.get(name[1:], 0) - e
        else:
            return None
    return {k: v for k, v in out.items() if v}


def _monomial(exps: dict[str, int]) -> MultiPoly:
    items = []
    for k, e in sorted(exps.items()):
        if e > 0:
            items.append((k, e))
        elif e < 0:
            items.append((_inv(k), -e))
    return MultiPoly.from_items([(items, 1)])


class _State:
    """Working data for the orbit search at one level of the recursion."""

    __slots__ = ("H", "M", "z", "add", "mult", "base", "alpha", "beta", "wcount", "level")

    def __init__(self, H, M, z, add, mult, base, alpha=0, beta=0, wcount=0, level=0):
        self.H = H          # (n-1) x (n-1) generic element of H
        self.M = M          # r x r action matrix, z' = z M
        self.z = z          # list of MultiPoly: constants or base variables
        self.add = add
        self.mult = mult
        self.base = base
        self.alpha = alpha  # index exponents
        self.beta = beta
        self.wcount = wcount
        self.level = level

    def copy(self) -> "_State":
        return _State([list(r) for r in self.H], [list(r) for r in self.M], list(self.z),
                      list(self.add), list(self.mult), self.base, self.alpha, self.beta,
                      self.wcount, self.level)

    def units(self):
        return tuple(self.mult) + self.base.units

    def substitute(self, values: dict[str, MultiPoly]) -> None:
        u = self.units()

        def s(f):
            if f.is_zero() or not (f.variables() & values.keys()):
                return f
            return cancel_inverses(f.subs(values), u)

        self.H = [[s(x) for x in r] for r in self.H]
        self.M = [[s(x) for x in r] for r in self.M]
        self.z = [s(x) for x in self.z]
        b = self.base
        zero = []
        for f in b.zero:
            g = s(f)
            if not g.is_zero():
                zero.append(g)
        kept = set()
        for x in values.values():
            kept |= MultiPoly._lift(x).variables()
        self.base = replace(b, vars=tuple(v for v in b.vars if v not in values or v in kept),
                            zero=tuple(zero))

    def image(self, i: int) -> MultiPoly:
        acc = ZERO
        for k, zk in enumerate(self.z):
            if zk.is_zero():
                continue
            m = self.M[k][i]
            if not m.is_zero():
                acc = acc + zk * m
        return cancel_inverses(acc, self.units())


# ---------------------------------------------------------------- branching on base functions

def _restrict_zero(st: _State, f: MultiPoly) -> list[_State]:
    """States covering X intersected with {f = 0}."""
    f = cancel_inverses(f, st.units())
    if f.is_zero():
        return [st]
    if f.is_constant():
        return []
    units = set(st.base.units)
    items = f.items()
    if len(items) == 1:
        # monomial: some non-unit variable vanishes
        mono, _c = items[0]
        names = [v for v, _ in mono if v in st.base.vars and v not in units]
        if len(names) != len([v for v, _ in mono if not v.startswith("i")]):
            pass
        out = []
        prev = st
        for idx, v in enumerate(names):
            s2 = prev.copy()
            s2.substitute({v: ZERO})
            out.append(s2)
            if idx + 1 < len(names):
                prev = _make_unit(prev.copy(), v)
        return out
    for v in sorted(f.variables()):
        if v not in st.base.vars or v in units:
            continue
        cs = f.coeffs_in(v)
        if max(cs) == 1 and cs[1].is_constant() and abs(cs[1].constant_value()) == 1:
            c = cs[1].constant_value()
            rest = cs.get(0, ZERO)
            s2 = st.copy()
            s2.substitute({v: -rest * c})
            return [s2]
    s2 = st.copy()
    s2.base = replace(s2.base, zero=s2.base.zero + (f,))
    return [s2]


def _make_unit(st: _State, v: str) -> _State:
    b = st.base
    if v in b.units:
        return st
    st.base = replace(b, units=b.units + (v,))
    return st


def _restrict_nonzero(st: _State, f: MultiPoly) -> tuple[_State, MultiPoly, MultiPoly] | None:
    """State over X intersected with {f != 0}, with 1/f and f in the new coordinates."""
    f = cancel_inverses(f, st.units())
    if f.is_zero():
        return None
    if f.is_constant():
        c = f.constant_value()
        if abs(c) != 1:
            raise BranchFailure(f"inverse of the constant {c} is not integral", str(f))
        return st, MultiPoly.const(c), f
    units = set(st.units())
    items = f.items()
    if len(items) == 1:
        mono, c = items[0]
        if abs(c) == 1 and all(v in st.base.vars or v in units or
                               (v.startswith("i") and v[1:] in units) for v, _ in mono):
            inv = []
            for v, e in mono:
                if v.startswith("i") and v[1:] in units:
                    inv.append((v[1:], e))
                else:
                    if v not in units:
                        st = _make_unit(st, v)
                        units.add(v)
                    inv.append((_inv(v), e))
            return st, MultiPoly.from_items([(inv, c)]), f
    # a change of coordinates turning f into a variable
    for v in sorted(f.variables()):
        if v not in st.base.vars or v in units:
            continue
        cs = f.coeffs_in(v)
        if max(cs) == 1 and cs[1].is_constant() and abs(cs[1].constant_value()) == 1:
            c = cs[1].constant_value()
            rest = cs.get(0, ZERO)
            st.substitute({v: c * (MultiPoly.var(v) - rest)})
            st = _make_unit(st, v)
            return st, MultiPoly.var(_inv(v)), MultiPoly.var(v)
    # last resort: a new variable w with w*f = 1
    w = f"w{st.level}_{st.wcount}"
    st.wcount += 1
    wv = MultiPoly.var(w)
    b = st.base
    st.base = replace(b, zero=b.zero + (wv * f - 1,), extra=b.extra + (w,))
    return st, wv, f


# ---------------------------------------------------------------- orbit representatives

@dataclass
class BranchOutcome:
    """One family of representatives with its stabilizer and index exponents."""

    stabilizer: ParamGroup
    alpha: int
    beta: int
    z: list[MultiPoly]


def _is_invariant(st: _State, i: int) -> bool:
    return st.image(i) == st.z[i]


def _invariant_vars(st: _State) -> set[str]:
    """Base variables that appear as free invariant z coordinates or plain parameters."""
    zvars = {str(z) for z in st.z if len(z.variables()) == 1 and z.items()[0][1] == 1}
    moving = set()
    for i, z in enumerate(st.z):
        if not _is_invariant(st, i):
            moving |= z.variables()
    return set(st.base.vars) - moving


def _strip_torus(f: MultiPoly, mult: Sequence[str]) -> MultiPoly:
    """f divided by its largest Laurent monomial factor in the torus coordinates."""
    names = [m for m in mult] + [_inv(m) for m in mult]
    return f.strip_units(names)


def _step2(st: _State):
    for i, zi in enumerate(st.z):
        if zi.is_constant():
            continue
        img = st.image(i)
        if img == zi:
            continue
        try:
            m = img.divexact(zi)
        except ArithmeticError:
            continue
        exps = _laurent_exponents(m, st.mult)
        if exps:
            return i, exps
    return None


def _step3(st: _State):
    coords = set(st.add)
    inv = _invariant_vars(st)
    for i, zi in enumerate(st.z):
        if zi.is_constant():
            continue
        img = st.image(i)
        if img == zi:
            continue
        cands = []
        for a in sorted(img.variables() & coords):
            cs = img.coeffs_in(a)
            if max(cs) != 1:
                continue
            f = _strip_torus(cs[1], st.mult)
            fv = f.variables()
            if fv & (coords | set(st.mult) | {_inv(m) for m in st.mult}):
                continue
            base_names = {v[1:] if v.startswith("i") and v[1:] in st.base.units else v for v in fv}
            if not base_names <= inv | set(st.base.extra):
                continue
            score = (0 if f.is_constant() else 1, len(f), a)
            cands.append((score, a, f))
        if cands:
            cands.sort(key=lambda t: t[0])
            return i, cands[0][1], cands[0][2]
    return None


def orbit_representatives(st: _State) -> list[tuple[_State, bool]]:
    """Leaves of the orbit search; raises BranchFailure when stuck."""
    out = []
    stack = [st]
    while stack:
        cur = stack.pop()
        if all(_is_invariant(cur, i) for i in range(len(cur.z))):
            out.append(cur)
            continue
        s2 = _step2(cur)
        if s2 is not None:
            i, exps = s2
            zname = str(cur.z[i])
            a = cur.copy()
            a.substitute({zname: ZERO})
            b = cur.copy()
            b.substitute({zname: ONE})
            pick = next((k for k in sorted(exps) if abs(exps[k]) == 1), None)
            if pick is None:
                raise BranchFailure("diagonal character has no coordinate of exponent 1",
                                    str(_monomial(exps)))
            e = exps[pick]
            rest = {k: -v * e for k, v in exps.items() if k != pick}
            val = _monomial(rest)
            ival = _monomial({k: -v for k, v in rest.items()})
            b.substitute({pick: val, _inv(pick): ival})
            b.mult = [m for m in b.mult if m != pick]
            b.beta += 1
            stack.append(b)
            stack.append(a)
            continue
        s3 = _step3(cur)
        if s3 is not None:
            i, a_l, f = s3
            zname = str(cur.z[i])
            branches = []
            if not f.is_constant():
                branches.extend(_restrict_zero(cur.copy(), f))
            nz = _restrict_nonzero(cur.copy(), f)
            if nz is not None:
                b, finv, ft = nz
                b.substitute({zname: ZERO})
                img = b.image(i)
                cs = img.coeffs_in(a_l)
                rest = cs.get(0, ZERO)
                if max(cs) != 1:
                    raise BranchFailure("coordinate vanished from the orbit equation", str(img))
                # coefficient = (torus monomial) * f
                try:
                    u = _laurent_exponents(cs[1].divexact(ft), b.mult)
                except ArithmeticError:
                    u = None
                if u is None:
                    raise BranchFailure("orbit coefficient is not a unit multiple", str(cs[1]))
                uinv = _monomial({k: -e for k, e in u.items()})
                val = cancel_inverses(-finv * uinv * rest, b.units())
                b.substitute({a_l: val})
                b.add = [x for x in b.add if x != a_l]
                b.alpha += 1
                branches.append(b)
            stack.extend(reversed(branches))
            continue
        bad = [str(cur.image(i)) for i in range(len(cur.z)) if not _is_invariant(cur, i)]
        raise BranchFailure("no orbit rule applies", {"images": bad, "z": [str(z) for z in cur.z]})
    return out


# ---------------------------------------------------------------- main recursion

class ZetaEngine:
    def __init__(self, engine: Engine | None = None):
        self.engine = engine or default_engine()

    def count(self, base: Base) -> MultiPoly:
        return self.engine.virtual_class(base.spec())

    def zeta(self, G: ParamGroup) -> ZetaExpr:
        n = G.n
        if n == 0:
            return ZetaExpr.constant(self.count(G.base))
        units = G.units()
        A = [list(r) for r in G.A]
        mult = list(G.mult)
        # step 2: the diagonal torus
        exps = []
        for i in range(n):
            e = _laurent_exponents(A[i][i], mult) if not A[i][i] == ONE else {}
            if e is None:
                raise BranchFailure("diagonal entry is not a monomial in the torus coordinates",
                                    str(A[i][i]))
            exps.append(e)
        E = [[e.get(m, 0) for m in mult] for e in exps]
        d = rank(E) if mult else 0
        # the scalars lie in G iff (1, ..., 1) is in the span of the diagonal exponents
        scalars = bool(mult) and rank([row + [1] for row in E]) == d
        factor = None
        if exps[n - 1]:
            last = exps[n - 1]
            if scalars:
                # G = G_m x (G with A_nn = 1)
                pick = next((k for k in sorted(last) if abs(last[k]) == 1), None)
                if pick is None:
                    raise BranchFailure("cannot solve A_nn = 1", str(A[n - 1][n - 1]))
                e = last[pick]
                rest = {k: -v * e for k, v in last.items() if k != pick}
                sub = {pick: _monomial(rest), _inv(pick): _monomial({k: -v for k, v in rest.items()})}
                A = [[cancel_inverses(x.subs(sub), units) if not x.is_zero() else x for x in r] for r in A]
                mult = [m for m in mult if m != pick]
                factor = Q - 1
            else:
                # G meets the scalars trivially, so A -> A / A_nn is injective
                inv = _monomial({k: -v for k, v in last.items()})
                A = [[cancel_inverses(x * inv, units) if not x.is_zero() else x for x in r] for r in A]
        elif scalars:
            raise BranchFailure("scalar subgroup with trivial last entry", str(G))
        out = self._split(G, A, mult)
        return out * factor if factor is not None else out

    def _split(self, G: ParamGroup, A, mult) -> ZetaExpr:
        """Zeta of a group inside T~_n (A_nn = 1)."""
        n = G.n
        if n == 1:
            return ZetaExpr.constant(self.count(G.base))
        units = tuple(mult) + G.base.units
        H = [[A[i][j] for j in range(n - 1)] for i in range(n - 1)]
        hvars = set()
        for r in H:
            for x in r:
                hvars |= x.variables()
        hadd = [a for a in G.add if a in hvars]
        hmult = [m for m in mult if m in hvars or _inv(m) in hvars]
        if any(m not in hmult for m in mult):
            raise BranchFailure("torus coordinate outside the Levi part", str(G))
        levi = _levi_coordinates(H, hadd, hmult, units)
        if isinstance(levi, MultiPoly):
            return self._split_on(G, A, mult, levi)
        piv, free, solved = levi
        if free:
            # coordinates that reach H only in combination with others belong to N
            drop = {f: ZERO for f in free}
            H = [[cancel_inverses(x.subs(drop), units) if not x.is_zero() else x for x in r] for r in H]
            hadd = piv
        nadd = [a for a in G.add if a not in hadd]
        ident = {a: ZERO for a in hadd}
        ident.update(solved)
        ident.update({m: ONE for m in hmult})
        ident.update({_inv(m): ONE for m in hmult})
        col = [A[i][n - 1] for i in range(n - 1)]
        v = [cancel_inverses(x.subs(ident), units) if not x.is_zero() else x for x in col]
        # v = L x with x the N coordinates
        L = [[ZERO] * len(nadd) for _ in range(n - 1)]
        for i, vi in enumerate(v):
            if vi.is_zero():
                continue
            rem = vi
            for k, x in enumerate(nadd):
                cs = vi.coeffs_in(x)
                if not cs or max(cs) == 0:
                    continue
                if max(cs) != 1:
                    raise BranchFailure("normal subgroup is not linear in its coordinates", str(vi))
                L[i][k] = cs[1]
                rem = rem - cs[1] * MultiPoly.var(x)
            if not rem.is_zero():
                raise BranchFailure("normal subgroup coordinate map has a constant part", str(vi))
            for k in range(len(nadd)):
                if L[i][k].variables() & set(nadd):
                    raise BranchFailure("normal subgroup is not linear in its coordinates", str(vi))
        E = _left_inverse(L, units, set(G.base.vars) | {_inv(u) for u in G.base.units})
        if isinstance(E, MultiPoly):
            return self._split_on(G, A, mult, E)
        r = len(nadd)
        # h acts on N by x -> B x with B = E h L (E any left inverse of L),
        # hence on characters by z -> z B
        HL = [[ZERO] * r for _ in range(n - 1)]
        for i in range(n - 1):
            for c in range(r):
                acc = ZERO
                for m in range(n - 1):
                    if not H[i][m].is_zero() and not L[m][c].is_zero():
                        acc = acc + H[i][m] * L[m][c]
                HL[i][c] = acc
        M = [[ZERO] * r for _ in range(r)]
        for k in range(r):
            for c in range(r):
                acc = ZERO
                for i in range(n - 1):
                    if not E[k][i].is_zero() and not HL[i][c].is_zero():
                        acc = acc + E[k][i] * HL[i][c]
                M[k][c] = cancel_inverses(acc, units) if not acc.is_zero() else acc
        level = n
        znames = [f"z{level}_{k + 1}" for k in range(r)]
        base = replace(G.base, vars=G.base.vars + tuple(znames))
        st = _State(H, M, [MultiPoly.var(z) for z in znames], hadd, hmult, base, level=level)
        total = ZetaExpr()
        for leaf in orbit_representatives(st):
            sub = ParamGroup(n - 1, tuple(tuple(r_) for r_ in leaf.H), tuple(leaf.add),
                             tuple(leaf.mult), _prune(leaf.base))
            total = total + self.zeta(sub).shift(leaf.alpha, leaf.beta)
        return total


    def _split_on(self, G: ParamGroup, A, mult, f: MultiPoly) -> ZetaExpr:
        """Split the parameter variety along {f = 0} and {f != 0}."""
        st = _State([list(r) for r in A], [], [], list(G.add), list(mult), G.base, level=G.n)
        parts = _restrict_zero(st.copy(), f)
        nz = _restrict_nonzero(st.copy(), f)
        if nz is not None:
            parts.append(nz[0])
        total = ZetaExpr()
        for p in parts:
            if p.base == G.base:
                raise BranchFailure("splitting on a pivot made no progress", str(f))
            sub = ParamGroup(G.n, tuple(tuple(r) for r in p.H), tuple(p.add), tuple(p.mult), p.base)
            total = total + self._split(sub, p.H, p.mult)
        return total


def _unit_inverse(c: MultiPoly, units: Sequence[str]) -> MultiPoly | None:
    """1/c when c is +-1 times a Laurent monomial in `units`, else None."""
    if c.is_constant():
        v = c.constant_value()
        return c if abs(v) == 1 else None
    if len(c) != 1:
        return None
    sign = c.items()[0][1]
    if abs(sign) != 1:
        return None
    ex = _laurent_exponents(c * sign, list(units))
    if ex is None:
        return None
    return _monomial({k: -v for k, v in ex.items()}) * sign


def _left_inverse(L, units, base_vars):
    """Polynomial E with E L = I by Gauss-Jordan on [L | I] with unit pivots.

    Returns a base function to split on when a column has no unit pivot.
    """
    m = len(L)
    r = len(L[0]) if L else 0
    W = [list(L[i]) + [ONE if j == i else ZERO for j in range(m)] for i in range(m)]
    used: list[int] = []
    for k in range(r):
        row = inv = None
        fallback = None
        for i in range(m):
            if i in used or W[i][k].is_zero():
                continue
            u = _unit_inverse(W[i][k], units)
            if u is not None:
                row, inv = i, u
                break
            if fallback is None:
                fallback = W[i][k]
        if row is None:
            if fallback is None:
                raise BranchFailure("normal subgroup coordinates are not independent", k)
            if not fallback.variables() <= base_vars:
                raise BranchFailure("pivot of the normal subgroup is not a unit", str(fallback))
            return fallback
        W[row] = [cancel_inverses(x * inv, units) if not x.is_zero() else x for x in W[row]]
        for i in range(m):
            c = W[i][k]
            if i == row or c.is_zero():
                continue
            W[i] = [cancel_inverses(x - c * y, units) for x, y in zip(W[i], W[row])]
        used.append(row)
    return [W[i][r:] for i in used]


def _levi_coordinates(H, hadd: list[str], hmult: list[str], units):
    """Split the additive coordinates of the Levi block into a basis and the rest.

    Off-diagonal entries of H are linear forms in `hadd`.  Row reduction with
    unit pivots picks coordinates that parametrize H; the others move to N.
    Returns (pivots, free, solved) where `solved` expresses each pivot at the
    identity (torus = 1, H = I) in the free coordinates, or a base function
    whose vanishing must be decided first.
    """
    hs = set(hadd)
    rows = []
    m = len(H)
    for j in range(m):
        for i in range(j):
            e = H[i][j]
            if e.is_zero():
                continue
            row = {}
            for a in hadd:
                cs = e.coeffs_in(a)
                if not cs or max(cs) == 0:
                    continue
                if max(cs) != 1 or cs[1].variables() & hs:
                    raise BranchFailure("Levi block is not linear in its coordinates", str(e))
                row[a] = cs[1]
            rows.append(row)
    pivots: list[tuple[str, dict]] = []

    def reduce(row):
        for p, prow in pivots:
            c = row.get(p)
            if c is None:
                continue
            for k, v in prow.items():
                row[k] = cancel_inverses(row.get(k, ZERO) - c * v, units)
            row = {k: v for k, v in row.items() if not v.is_zero()}
        return row

    for row in rows:
        row = reduce(dict(row))
        if not row:
            continue
        pick = None
        for a in hadd:
            if a in row and _unit_inverse(row[a], units) is not None:
                pick = a
                break
        if pick is None:
            c = row[next(a for a in hadd if a in row)]
            return c
        inv = _unit_inverse(row[pick], units)
        prow = {k: cancel_inverses(v * inv, units) for k, v in row.items()}
        # keep earlier pivot rows reduced
        new = []
        for p, r in pivots:
            c = r.get(pick)
            if c is not None:
                for k, v in prow.items():
                    r[k] = cancel_inverses(r.get(k, ZERO) - c * v, units)
                r = {k: v for k, v in r.items() if not v.is_zero()}
            new.append((p, r))
        pivots = new + [(pick, prow)]
    piv = [a for a in hadd if a in {p for p, _ in pivots}]
    free = [a for a in hadd if a not in piv]
    if not free:
        return piv, [], {}
    at_one = {t: ONE for t in hmult}
    at_one.update({_inv(t): ONE for t in hmult})
    solved = {}
    for p, r in pivots:
        acc = ZERO
        for k, v in r.items():
            if k != p:
                acc = acc - v.subs(at_one) * MultiPoly.var(k)
        solved[p] = cancel_inverses(acc, units)
    return piv, free, solved


def _prune(b: Base) -> Base:
    return b


_engine: ZetaEngine | None = None


def zeta(G: ParamGroup, engine: ZetaEngine | None = None) -> ZetaExpr:
    global _engine
    if engine is None:
        if _engine is None:
            _engine = ZetaEngine()
        engine = _engine
    return engine.zeta(G)


def zeta_family(family: str, n: int) -> ZetaExpr:
    """zeta of U_n ("un") or T_n ("tn")."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if family == "un":
        return zeta(unipotent_group(n))
    if family == "tn":
        return zeta(triangular_group(n))
    raise ValueError("family must be 'un' or 'tn'")


def conjugacy_count(Z: ZetaExpr) -> MultiPoly:
    """k(G) = zeta_G(0)."""
    return Z.substitute_s(0)
