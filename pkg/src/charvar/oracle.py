"""Brute-force ground truth over small finite fields.

Everything here is deliberately naive: explicit field tables, explicit matrix
groups, explicit orbits.  The symbolic engines are checked against it.
"""
from __future__ import annotations

import itertools
from collections import Counter, deque
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import SizeLimit

# Irreducible polynomials for the non-prime fields, low-to-high coefficients.
FIELD_MODULI = {4: (2, (1, 1, 1)), 8: (2, (1, 1, 0, 1)), 9: (3, (1, 0, 1))}
SUPPORTED_Q = (2, 3, 4, 5, 7, 8, 9)
DEFAULT_BUDGET = 1 << 24


class FiniteField:
    """F_q for q in {2,3,4,5,7,8,9} with elements encoded as 0..q-1.

    Prime-power elements are base-p digit vectors of polynomials reduced
    modulo the fixed irreducible in FIELD_MODULI.
    """

    def __init__(self, q: int):
        if q not in SUPPORTED_Q:
            raise ValueError(f"unsupported field order {q}")
        self.q = q
        if q in FIELD_MODULI:
            p, mod = FIELD_MODULI[q]
            k = len(mod) - 1
        else:
            p, mod, k = q, None, 1
        self.p = p
        self.k = k
        digits = [self._digits(x) for x in range(q)]
        self.add = [[self._encode([(a + b) % p for a, b in zip(digits[x], digits[y])])
                     for y in range(q)] for x in range(q)]
        self.mul = [[self._encode(self._polymul(digits[x], digits[y], mod))
                     for y in range(q)] for x in range(q)]
        self.neg = [next(y for y in range(q) if self.add[x][y] == 0) for x in range(q)]
        self.inv = [None] + [next(y for y in range(1, q) if self.mul[x][y] == 1) for x in range(1, q)]
        self.sub = [[self.add[x][self.neg[y]] for y in range(q)] for x in range(q)]
        self._verify()
        # integer n maps to n * 1
        self.one = 1
        self.units = list(range(1, q))
        self.generator = next(g for g in self.units if self._order(g) == q - 1)

    def _digits(self, x: int) -> list[int]:
        out = []
        for _ in range(self.k):
            out.append(x % self.p)
            x //= self.p
        return out

    def _encode(self, ds: Sequence[int]) -> int:
        x = 0
        for d in reversed(ds):
            x = x * self.p + d
        return x

    def _polymul(self, a, b, mod) -> list[int]:
        p = self.p
        prod = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % p
        if mod is None:
            return [prod[0] % p]
        k = len(mod) - 1
        for d in range(len(prod) - 1, k - 1, -1):
            c = prod[d]
            if c:
                for i, m in enumerate(mod):
                    prod[d - k + i] = (prod[d - k + i] - c * m) % p
        return prod[:k]

    def _order(self, g: int) -> int:
        x, n = g, 1
        while x != 1:
            x = self.mul[x][g]
            n += 1
        return n

    def _verify(self) -> None:
        q, add, mul = self.q, self.add, self.mul
        r = range(q)
        for x in r:
            assert add[0][x] == x and mul[1][x] == x
            for y in r:
                assert add[x][y] == add[y][x] and mul[x][y] == mul[y][x]
                for z in r:
                    assert add[add[x][y]][z] == add[x][add[y][z]]
                    assert mul[mul[x][y]][z] == mul[x][mul[y][z]]
                    assert mul[x][add[y][z]] == add[mul[x][y]][mul[x][z]]
        for x in range(1, q):
            assert any(mul[x][y] == 1 for y in r)

    def from_int(self, n: int) -> int:
        """Image of the integer n under Z -> F_q."""
        n %= self.p
        x = 0
        for _ in range(n):
            x = self.add[x][1]
        return x

    def power(self, x: int, e: int) -> int:
        r = 1
        for _ in range(e):
            r = self.mul[r][x]
        return r


@lru_cache(maxsize=None)
def field(q: int) -> FiniteField:
    return FiniteField(q)


# ---------------------------------------------------------------- polynomial counting

def compile_poly(f, names: Sequence[str], F: FiniteField):
    """Turn a MultiPoly into a list of (coef, ((index, exp), ...)) over F."""
    pos = {n: i for i, n in enumerate(names)}
    out = []
    for mono, c in f.items():
        ce = F.from_int(c)
        if ce:
            out.append((ce, tuple((pos[n], e) for n, e in mono)))
    return out


def _eval_compiled(terms, point, F: FiniteField, powtab) -> int:
    add, mul = F.add, F.mul
    acc = 0
    for c, mono in terms:
        v = c
        for i, e in mono:
            v = mul[v][powtab[point[i]][e]]
        acc = add[acc][v]
    return acc


def count_points(names: Sequence[str], zero: Iterable, nonzero: Iterable, q: int,
                 budget: int = 10 ** 7) -> int:
    """Number of F_q points with all of `zero` vanishing and none of `nonzero`."""
    F = field(q)
    n = len(names)
    if q ** n > budget:
        raise SizeLimit(f"{q}^{n} points exceeds enumeration budget {budget}")
    zs = [compile_poly(f, names, F) for f in zero]
    gs = [compile_poly(g, names, F) for g in nonzero]
    maxe = 1
    for t in zs + gs:
        for _, mono in t:
            for _, e in mono:
                maxe = max(maxe, e)
    powtab = [[F.power(x, e) for e in range(maxe + 1)] for x in range(q)]
    count = 0
    for pt in itertools.product(range(q), repeat=n):
        if all(_eval_compiled(t, pt, F, powtab) == 0 for t in zs) and \
                all(_eval_compiled(t, pt, F, powtab) != 0 for t in gs):
            count += 1
    return count


# ---------------------------------------------------------------- matrix groups

class MatrixGroup:
    """U_n, T_n or T~_n over F_q with elements as row-major tuples."""

    def __init__(self, kind: str, n: int, q: int, budget: int = DEFAULT_BUDGET):
        if kind not in ("U", "T", "Tt"):
            raise ValueError("kind must be U, T or Tt")
        self.kind, self.n, self.q = kind, n, q
        self.F = field(q)
        units = q - 1
        nd = {"U": 0, "T": n, "Tt": max(n - 1, 0)}[kind]
        self.order = q ** (n * (n - 1) // 2) * units ** nd
        if self.order > budget:
            raise SizeLimit(f"|G| = {self.order} exceeds budget {budget}")
        self.identity = tuple(1 if i == j else 0 for i in range(n) for j in range(n))

    def diag_choices(self, i: int) -> list[int]:
        if self.kind == "U" or (self.kind == "Tt" and i == self.n - 1):
            return [1]
        return self.F.units

    def elements(self):
        n, q = self.n, self.q
        upper = [(i, j) for i in range(n) for j in range(i + 1, n)]
        for diag in itertools.product(*(self.diag_choices(i) for i in range(n))):
            for vals in itertools.product(range(q), repeat=len(upper)):
                m = [0] * (n * n)
                for i in range(n):
                    m[i * n + i] = diag[i]
                for (i, j), v in zip(upper, vals):
                    m[i * n + j] = v
                yield tuple(m)

    def mul(self, a, b):
        n, add, mul = self.n, self.F.add, self.F.mul
        out = [0] * (n * n)
        for i in range(n):
            for j in range(i, n):
                acc = 0
                for k in range(i, j + 1):
                    x = a[i * n + k]
                    if x:
                        y = b[k * n + j]
                        if y:
                            acc = add[acc][mul[x][y]]
                out[i * n + j] = acc
        return tuple(out)

    def inv(self, a):
        n, F = self.n, self.F
        add, mul, neg, inv = F.add, F.mul, F.neg, F.inv
        out = [0] * (n * n)
        for i in range(n):
            out[i * n + i] = inv[a[i * n + i]]
        for d in range(1, n):
            for i in range(n - d):
                j = i + d
                acc = 0
                for k in range(i + 1, j + 1):
                    acc = add[acc][mul[a[i * n + k]][out[k * n + j]]]
                out[i * n + j] = mul[neg[acc]][out[i * n + i]]
        return tuple(out)

    def generators(self) -> list:
        n = self.n
        gens = []
        for i in range(n - 1):
            for j in range(i + 1, n):
                m = list(self.identity)
                m[i * n + j] = 1
                gens.append(tuple(m))
                if self.F.p != self.q:
                    # additive generators of F_q beyond 1
                    for b in range(1, self.F.k):
                        m = list(self.identity)
                        m[i * n + j] = self.F.p ** b
                        gens.append(tuple(m))
        for i in range(n):
            if self.diag_choices(i) != [1]:
                m = list(self.identity)
                m[i * n + i] = self.F.generator
                gens.append(tuple(m))
        return gens

    def conj(self, g, x):
        return self.mul(self.mul(g, x), self.inv(g))

    def commutator(self, a, b):
        return self.mul(self.mul(a, b), self.mul(self.inv(a), self.inv(b)))

    def orbit(self, x) -> set:
        gens = self.generators()
        ginv = [self.inv(g) for g in gens]
        seen = {x}
        todo = deque([x])
        while todo:
            y = todo.popleft()
            for g, gi in zip(gens, ginv):
                z = self.mul(self.mul(g, y), gi)
                if z not in seen:
                    seen.add(z)
                    todo.append(z)
        return seen


class _F2Unipotent:
    """Bitmask model of U_n(F_2): row i is an int whose bit j is entry (i, j)."""

    def __init__(self, n: int):
        self.n = n
        self.order = 2 ** (n * (n - 1) // 2)
        self.identity = tuple(1 << i for i in range(n))

    def elements(self):
        n = self.n
        upper = [(i, j) for i in range(n) for j in range(i + 1, n)]
        for vals in itertools.product((0, 1), repeat=len(upper)):
            rows = [1 << i for i in range(n)]
            for (i, j), v in zip(upper, vals):
                if v:
                    rows[i] |= 1 << j
            yield tuple(rows)

    def mul(self, a, b):
        out = []
        for r in a:
            acc = 0
            k = 0
            while r:
                if r & 1:
                    acc ^= b[k]
                r >>= 1
                k += 1
            out.append(acc)
        return tuple(out)

    def inv(self, a):
        # (I + N)^{-1} = I + N + N^2 + ... over F_2, N nilpotent
        nil = tuple(r ^ (1 << i) for i, r in enumerate(a))
        p = self.identity
        res = self.identity
        for _ in range(self.n - 1):
            p = self.mul(p, nil)
            res = tuple(u ^ v for u, v in zip(res, p))
        return res

    def conj_adjacent(self, x, i):
        """Conjugate by I + e_(i,i+1), which is its own inverse over F_2."""
        rows = list(x)
        rows[i] ^= rows[i + 1]
        # right multiplication: column i+1 += column i
        bit_i, bit_j = 1 << i, 1 << (i + 1)
        for r in range(len(rows)):
            if rows[r] & bit_i:
                rows[r] ^= bit_j
        return tuple(rows)

    def orbit(self, x) -> set:
        seen = {x}
        todo = [x]
        while todo:
            y = todo.pop()
            for i in range(self.n - 1):
                z = self.conj_adjacent(y, i)
                if z not in seen:
                    seen.add(z)
                    todo.append(z)
        return seen

    def commutator(self, a, b):
        return self.mul(self.mul(a, b), self.mul(self.inv(a), self.inv(b)))


def make_group(kind: str, n: int, q: int, budget: int = DEFAULT_BUDGET):
    """Group view; U_n and T_n over F_2 use the bitmask model."""
    if q == 2 and kind in ("U", "T", "Tt"):
        g = _F2Unipotent(n)
        if g.order > budget:
            raise SizeLimit(f"|G| = {g.order} exceeds budget {budget}")
        return g
    return MatrixGroup(kind, n, q, budget)


def count_conjugacy_classes(kind: str, n: int, q: int, budget: int = DEFAULT_BUDGET) -> int:
    """k(G) by explicit orbit partition under conjugation."""
    G = make_group(kind, n, q, budget)
    seen: set = set()
    classes = 0
    total = 0
    for x in G.elements():
        if x in seen:
            continue
        orb = G.orbit(x)
        seen |= orb
        total += len(orb)
        classes += 1
    assert total == G.order
    return classes


def commutator_distribution(G) -> Counter:
    """D[x] = #{(A, B) : [A, B] = x} by full pair enumeration."""
    els = list(G.elements())
    invs = {a: G.inv(a) for a in els}
    D: Counter = Counter()
    for a in els:
        ai = invs[a]
        for b in els:
            D[G.mul(G.mul(a, b), G.mul(ai, invs[b]))] += 1
    return D


def count_representation_variety(kind: str, n: int, q: int, g: int,
                                  punctures: Sequence = (), budget: int = 1 << 12) -> int:
    """#{(A_i, B_i, C_j) : prod [A_i, B_i] * prod C_j = 1, C_j in the given classes}.

    Punctures are 0/1 upper unitriangular matrices given as nested lists; each
    stands for its conjugacy class in T~_n(F_q).
    """
    G = make_group(kind, n, q, budget)
    classes = [_class_of(kind, n, q, xi, budget) for xi in punctures]
    if g == 0 and not classes:
        return 1
    ident = G.identity
    dist = Counter({ident: 1})
    if g:
        D = commutator_distribution(G)
        for _ in range(g):
            new: Counter = Counter()
            for x, cx in dist.items():
                for y, cy in D.items():
                    new[G.mul(x, y)] += cx * cy
            dist = new
    for cls in classes:
        new = Counter()
        for x, cx in dist.items():
            for c in cls:
                new[G.mul(x, c)] += cx
        dist = new
    return dist.get(ident, 0)


def _class_of(kind: str, n: int, q: int, xi, budget: int) -> set:
    # Conjugacy classes of unipotent elements agree for T_n and T~_n; U_n
    # punctures use U_n-conjugacy.
    G = make_group(kind, n, q, budget)
    return G.orbit(encode_matrix(G, xi))


def encode_matrix(G, rows) -> tuple:
    n = len(rows)
    if isinstance(G, _F2Unipotent):
        return tuple(sum((rows[i][j] % 2) << j for j in range(n)) for i in range(n))
    F = G.F
    return tuple(F.from_int(rows[i][j]) for i in range(n) for j in range(n))


def commuting_pairs_naive(kind: str, n: int, q: int, budget: int = 1 << 12) -> int:
    G = make_group(kind, n, q, budget)
    els = list(G.elements())
    return sum(1 for a in els for b in els if G.mul(a, b) == G.mul(b, a))


def commuting_pairs(kind: str, n: int, q: int, budget: int = DEFAULT_BUDGET) -> int:
    """sum_A |C(A)|: one centralizer count per conjugacy class, times its size."""
    G = make_group(kind, n, q, budget)
    els = list(G.elements())
    seen: set = set()
    total = 0
    for x in els:
        if x in seen:
            continue
        orb = G.orbit(x)
        seen |= orb
        cent = sum(1 for b in els if G.mul(x, b) == G.mul(b, x))
        total += len(orb) * cent
    return total


def orbit_partition(kind: str, n: int, q: int, elements: Sequence) -> list[list[int]]:
    """Partition indices of the given matrices into conjugacy classes of G(F_q)."""
    G = make_group(kind, n, q)
    enc = [encode_matrix(G, m) for m in elements]
    blocks: list[list[int]] = []
    orbits: list[set] = []
    for idx, x in enumerate(enc):
        for b, orb in zip(blocks, orbits):
            if x in orb:
                b.append(idx)
                break
        else:
            blocks.append([idx])
            orbits.append(G.orbit(x))
    return blocks


def orbit_size(kind: str, n: int, q: int, rows) -> int:
    G = make_group(kind, n, q)
    return len(G.orbit(encode_matrix(G, rows)))
