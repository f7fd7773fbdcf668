"""Exact integer polynomials over named variables, plus the two closed-form
algebras used for final answers (GenusPoly and ZetaExpr).

Monomials are packed into a single Python int: every interned variable owns a
16-bit field, whose top bit is kept clear as an overflow guard.  Multiplying
monomials is then integer addition.  Interned ids never leak into ordering or
printing; everything observable is keyed on variable names.
"""
from __future__ import annotations

import re
from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Iterable, Mapping

__all__ = [
    "MultiPoly", "parse", "const", "var", "Q",
    "LaurentQ", "GenusPoly", "ZetaExpr",
    "perfect_power_root", "poly_square_root", "univariate_linear_factors",
    "split_product", "zeta_to_genus", "parse_param_expr", "format_q",
]

_BITS = 16
_FIELD = (1 << _BITS) - 1
_MAXEXP = (1 << (_BITS - 1)) - 1

_names: list[str] = []
_ids: dict[str, int] = {}
_guard = 0


def _vid(name: str) -> int:
    global _guard
    i = _ids.get(name)
    if i is None:
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", name):
            raise ValueError(f"bad variable name {name!r}")
        i = len(_names)
        _names.append(name)
        _ids[name] = i
        _guard |= 1 << (_BITS * i + _BITS - 1)
    return i


def _mono_vars(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & _FIELD:
            out.append(i)
        mask >>= _BITS
        i += 1
    return out


def _exp(m: int, i: int) -> int:
    return (m >> (_BITS * i)) & _FIELD


def _divides(m2: int, m1: int) -> bool:
    """True iff monomial m2 divides m1."""
    return ((m1 | _guard) - m2) & _guard == _guard


def _mono_items(m: int) -> list[tuple[str, int]]:
    out = []
    i = 0
    while m:
        e = m & _FIELD
        if e:
            out.append((_names[i], e))
        m >>= _BITS
        i += 1
    out.sort()
    return out


def _mono_from_items(items: Iterable[tuple[str, int]]) -> int:
    m = 0
    for name, e in items:
        if e < 0 or e > _MAXEXP:
            raise OverflowError(f"exponent {e} out of range")
        if e:
            m += e << (_BITS * _vid(name))
    return m


def _check(terms: dict[int, int]) -> None:
    for m in terms:
        if m & _guard:
            raise OverflowError("monomial exponent overflow")


class MultiPoly:
    """Immutable polynomial with integer coefficients."""

    __slots__ = ("_t", "_hash", "_key", "_vars")

    def __init__(self, terms: Mapping[int, int] | None = None, _clean: bool = False):
        if terms is None:
            self._t: dict[int, int] = {}
        elif _clean:
            self._t = terms  # type: ignore[assignment]
        else:
            self._t = {m: c for m, c in terms.items() if c}
        self._hash = None
        self._key = None
        self._vars = None

    # construction
    @staticmethod
    def const(c: int) -> "MultiPoly":
        c = int(c)
        return MultiPoly({0: c} if c else None, _clean=True)

    @staticmethod
    def var(name: str, power: int = 1) -> "MultiPoly":
        return MultiPoly({power << (_BITS * _vid(name)): 1}, _clean=True)

    @staticmethod
    def from_items(items: Iterable[tuple[Iterable[tuple[str, int]], int]]) -> "MultiPoly":
        t: dict[int, int] = {}
        for mono, c in items:
            m = _mono_from_items(mono)
            t[m] = t.get(m, 0) + c
        return MultiPoly(t)

    @staticmethod
    def from_coeffs(coeffs: Iterable[int], name: str = "q") -> "MultiPoly":
        """Univariate polynomial from a low-to-high coefficient list."""
        sh = _BITS * _vid(name)
        return MultiPoly({k << sh: c for k, c in enumerate(coeffs) if c}, _clean=True)

    # basic queries
    def items(self) -> list[tuple[tuple[tuple[str, int], ...], int]]:
        """Terms as (((name, exp), ...), coeff), in canonical order."""
        out = [(tuple(_mono_items(m)), c) for m, c in self._t.items()]
        out.sort(key=lambda it: _mono_order_key(it[0]))
        return out

    def __len__(self) -> int:
        return len(self._t)

    def is_zero(self) -> bool:
        return not self._t

    def is_constant(self) -> bool:
        return not self._t or (len(self._t) == 1 and 0 in self._t)

    def constant_value(self) -> int:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self._t.get(0, 0)

    def is_monomial(self) -> bool:
        return len(self._t) == 1

    def _mask(self) -> int:
        mask = 0
        for m in self._t:
            mask |= m
        return mask

    def variables(self) -> frozenset[str]:
        if self._vars is None:
            self._vars = frozenset(_names[i] for i in _mono_vars(self._mask()))
        return self._vars

    def degree(self, name: str | None = None) -> int:
        """Degree in one variable, or total degree; -1 for the zero polynomial."""
        if not self._t:
            return -1
        if name is None:
            return max(sum(e for _, e in _mono_items(m)) for m in self._t)
        i = _ids.get(name)
        if i is None:
            return 0
        return max(_exp(m, i) for m in self._t)

    def coeffs_in(self, name: str) -> dict[int, "MultiPoly"]:
        """Write self = sum_k c_k * name^k; returns {k: c_k} with c_k nonzero."""
        i = _ids.get(name)
        if i is None:
            return {0: self} if self._t else {}
        sh = _BITS * i
        out: dict[int, dict[int, int]] = {}
        for m, c in self._t.items():
            k = (m >> sh) & _FIELD
            out.setdefault(k, {})[m - (k << sh)] = c
        return {k: MultiPoly(t, _clean=True) for k, t in out.items()}

    def univariate_coeffs(self, name: str) -> list[int]:
        """Dense low-to-high integer coefficients; requires no other variables."""
        if self.variables() - {name}:
            raise ValueError("polynomial is not univariate in " + name)
        d = self.degree(name)
        out = [0] * (d + 1)
        i = _ids.get(name)
        for m, c in self._t.items():
            out[_exp(m, i) if i is not None else 0] = c
        return out

    # arithmetic
    @staticmethod
    def _lift(x) -> "MultiPoly":
        if isinstance(x, MultiPoly):
            return x
        if isinstance(x, int):
            return MultiPoly.const(x)
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other):
        other = MultiPoly._lift(other)
        if other is NotImplemented:
            return other
        if not other._t:
            return self
        if not self._t:
            return other
        a, b = (self._t, other._t) if len(self._t) >= len(other._t) else (other._t, self._t)
        t = dict(a)
        for m, c in b.items():
            v = t.get(m, 0) + c
            if v:
                t[m] = v
            else:
                del t[m]
        return MultiPoly(t, _clean=True)

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        return MultiPoly({m: -c for m, c in self._t.items()}, _clean=True)

    def __sub__(self, other):
        other = MultiPoly._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = MultiPoly._lift(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, int):
            if not other:
                return MultiPoly()
            return MultiPoly({m: c * other for m, c in self._t.items()}, _clean=True)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        if not self._t or not other._t:
            return MultiPoly()
        t: dict[int, int] = {}
        get = t.get
        for m1, c1 in self._t.items():
            for m2, c2 in other._t.items():
                m = m1 + m2
                t[m] = get(m, 0) + c1 * c2
        if (self._mask() | other._mask()) & (_guard >> 1):
            _check(t)
        return MultiPoly(t)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "MultiPoly":
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a non-negative integer")
        if n == 0:
            return MultiPoly.const(1)
        if len(self._t) == 1:
            (m, c), = self._t.items()
            items = _mono_items(m)
            return MultiPoly({_mono_from_items((k, e * n) for k, e in items): c ** n}, _clean=True)
        result = MultiPoly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = MultiPoly.const(other)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self._t == other._t

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._t.items()))
        return self._hash

    def __reduce__(self):
        return (MultiPoly.from_items, ([(mono, c) for mono, c in self.items()],))

    # normalization
    def content(self) -> int:
        return reduce(gcd, self._t.values(), 0)

    def leading(self) -> tuple[tuple[tuple[str, int], ...], int]:
        """Leading term under lex order with variables ordered by name."""
        best = None
        for m, c in self._t.items():
            k = _lex_key(m)
            if best is None or k > best[0]:
                best = (k, m, c)
        if best is None:
            raise ValueError("zero polynomial has no leading term")
        return tuple(_mono_items(best[1])), best[2]

    def _lead_raw(self) -> tuple[int, int]:
        best = None
        for m, c in self._t.items():
            k = _lex_key(m)
            if best is None or k > best[0]:
                best = (k, m, c)
        return best[1], best[2]

    def primitive(self) -> "MultiPoly":
        """Divide by content and fix the sign so the leading coefficient is positive."""
        if not self._t:
            return self
        c = self.content()
        if self._lead_raw()[1] < 0:
            c = -c
        if c == 1:
            return self
        return MultiPoly({m: v // c for m, v in self._t.items()}, _clean=True)

    def monomial_gcd(self) -> int:
        g = None
        for m in self._t:
            if g is None:
                g = m
                continue
            out = 0
            for i in _mono_vars(g):
                e = min(_exp(g, i), _exp(m, i))
                if e:
                    out |= e << (_BITS * i)
            g = out
            if not g:
                break
        return g or 0

    def div_monomial(self, m: int) -> "MultiPoly":
        return MultiPoly({k - m: c for k, c in self._t.items()}, _clean=True)

    def strip_units(self, names: Iterable[str]) -> "MultiPoly":
        """Divide out the largest monomial factor in the given variables."""
        g = self.monomial_gcd()
        if not g:
            return self
        keep = {_ids[n] for n in names if n in _ids}
        m = 0
        for i in _mono_vars(g):
            if i in keep:
                m |= _exp(g, i) << (_BITS * i)
        return self.div_monomial(m) if m else self

    # substitution and evaluation
    def subs(self, values: Mapping[str, "MultiPoly | int"]) -> "MultiPoly":
        vals = {k: MultiPoly._lift(v) for k, v in values.items() if k in self.variables()}
        if not vals:
            return self
        keep_ids = {_ids[k] for k in vals}
        powcache: dict[tuple[str, int], MultiPoly] = {}
        acc: dict[int, int] = {}
        out = MultiPoly()
        groups: dict[tuple, dict[int, int]] = {}
        for m, c in self._t.items():
            key = []
            rest = m
            for i in keep_ids:
                e = _exp(m, i)
                if e:
                    key.append((_names[i], e))
                    rest -= e << (_BITS * i)
            key.sort()
            g = groups.setdefault(tuple(key), {})
            g[rest] = c
        for key, t in groups.items():
            if not key:
                for m, c in t.items():
                    acc[m] = acc.get(m, 0) + c
                continue
            f = MultiPoly(t, _clean=True)
            for name, e in key:
                p = powcache.get((name, e))
                if p is None:
                    p = vals[name] ** e
                    powcache[(name, e)] = p
                f = f * p
            out = out + f
        return out + MultiPoly(acc)

    def ev(self, name: str, num: "MultiPoly | int", den: "MultiPoly | int" = 1) -> "MultiPoly":
        """den^deg * self(name = num/den), the denominator-cleared evaluation."""
        num = MultiPoly._lift(num)
        den = MultiPoly._lift(den)
        if name in num.variables() or name in den.variables():
            raise ValueError(f"substituted value mentions {name}")
        cs = self.coeffs_in(name)
        if not cs:
            return self
        d = max(cs)
        if d == 0:
            return self
        if den == 1:
            npow = [MultiPoly.const(1)]
            for _ in range(d):
                npow.append(npow[-1] * num)
            out = MultiPoly()
            for k, c in cs.items():
                out = out + c * npow[k]
            return out
        npow = [MultiPoly.const(1)]
        dpow = [MultiPoly.const(1)]
        for _ in range(d):
            npow.append(npow[-1] * num)
            dpow.append(dpow[-1] * den)
        out = MultiPoly()
        for k, c in cs.items():
            out = out + c * npow[k] * dpow[d - k]
        return out

    def evaluate(self, values: Mapping[str, int], modulus: int | None = None) -> int:
        tot = 0
        for m, c in self._t.items():
            v = c
            for name, e in _mono_items(m):
                x = values[name]
                v *= pow(x, e, modulus) if modulus else x ** e
            tot += v
        return tot % modulus if modulus else tot

    def evaluate_q(self, x, name: str = "q"):
        """Evaluate a univariate polynomial with Horner; x may be int or Fraction."""
        cs = self.univariate_coeffs(name)
        acc = 0
        for c in reversed(cs):
            acc = acc * x + c
        return acc

    # exact division
    def divexact(self, other: "MultiPoly | int") -> "MultiPoly":
        """Exact quotient; raises ArithmeticError on a nonzero remainder."""
        other = MultiPoly._lift(other)
        if not other._t:
            raise ZeroDivisionError("division by zero polynomial")
        if other.is_constant():
            c = other.constant_value()
            t = {}
            for m, v in self._t.items():
                qv, r = divmod(v, c)
                if r:
                    raise ArithmeticError("inexact division")
                t[m] = qv
            return MultiPoly(t, _clean=True)
        lm, lc = other._lead_raw()
        rem = dict(self._t)
        quot: dict[int, int] = {}
        ot = other._t
        while rem:
            best = None
            for m, c in rem.items():
                k = _lex_key(m)
                if best is None or k > best[0]:
                    best = (k, m, c)
            _, m, c = best
            if not _divides(lm, m) or c % lc:
                raise ArithmeticError("inexact division")
            qm, qc = m - lm, c // lc
            quot[qm] = qc
            for m2, c2 in ot.items():
                mm = m2 + qm
                v = rem.get(mm, 0) - qc * c2
                if v:
                    rem[mm] = v
                else:
                    rem.pop(mm, None)
        return MultiPoly(quot, _clean=True)

    # ordering and printing
    def sort_key(self) -> tuple:
        """Deterministic total order key, independent of interning order."""
        if self._key is None:
            its = self.items()
            self._key = (len(its) and max(sum(e for _, e in mono) for mono, _ in its),
                         len(its), tuple((mono, c) for mono, c in its))
        return self._key

    def __str__(self) -> str:
        return _format(self.items())

    def __repr__(self) -> str:
        return f"MultiPoly({str(self)!r})"


_name_keys: dict[str, tuple] = {}
_LEX_END = ((-(1 << 30),), 0)


def _name_key(n: str) -> tuple:
    # earlier names compare larger; the trailing 1 handles prefixes
    k = _name_keys.get(n)
    if k is None:
        k = tuple(-ord(ch) for ch in n) + (1,)
        _name_keys[n] = k
    return k


def _lex_key(m: int) -> tuple:
    """Sort key for lex order with variables ranked alphabetically (a > b > ...)."""
    return tuple((_name_key(n), e) for n, e in _mono_items(m)) + (_LEX_END,)


def _mono_order_key(mono) -> tuple:
    # descending total degree, then lex by name with larger exponent first
    deg = sum(e for _, e in mono)
    return (-deg, tuple((n, -e) for n, e in mono))


def _format(items) -> str:
    if not items:
        return "0"
    parts = []
    for idx, (mono, c) in enumerate(items):
        mstr = "*".join(n if e == 1 else f"{n}^{e}" for n, e in mono)
        a = abs(c)
        if mstr:
            body = mstr if a == 1 else f"{a}*{mstr}"
        else:
            body = str(a)
        if idx == 0:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append((" - " if c < 0 else " + ") + body)
    return "".join(parts)


def const(c: int) -> MultiPoly:
    return MultiPoly.const(c)


def var(name: str) -> MultiPoly:
    return MultiPoly.var(name)


Q = MultiPoly.var("q")


# ---------------------------------------------------------------- parser

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\*\*|[-+*^()/,]))")


def _tokenize(text: str) -> list[tuple[str, str]]:
    pos = 0
    out = []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"unexpected character at {pos}: {text[pos:pos + 10]!r}")
        num, ident, op = m.groups()
        if num is not None:
            out.append(("num", num))
        elif ident is not None:
            out.append(("id", ident))
        else:
            out.append(("op", "^" if op == "**" else op))
        pos = m.end()
    out.append(("end", ""))
    return out


class _Parser:
    """Recursive descent over + - * ^ with the usual precedence.

    Subclasses override `atom_ident`, `power` and the arithmetic hooks to
    build other algebras from the same grammar.
    """

    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None, val=None):
        k, v = self.toks[self.i]
        if (kind and k != kind) or (val is not None and v != val):
            raise ValueError(f"expected {val or kind}, got {v or k!r}")
        self.i += 1
        return v

    def parse(self):
        r = self.expr()
        if self.peek()[0] != "end":
            raise ValueError(f"trailing input near {self.peek()[1]!r}")
        return r

    def expr(self):
        k, v = self.peek()
        neg = False
        if k == "op" and v in "+-":
            self.take()
            neg = v == "-"
        acc = self.term()
        if neg:
            acc = -acc
        while True:
            k, v = self.peek()
            if k == "op" and v in "+-":
                self.take()
                t = self.term()
                acc = acc + t if v == "+" else acc - t
            else:
                return acc

    def term(self):
        acc = self.unary()
        while self.peek() == ("op", "*"):
            self.take()
            acc = acc * self.unary()
        return acc

    def unary(self):
        if self.peek() == ("op", "-"):
            self.take()
            return -self.unary()
        return self.factor()

    def factor(self):
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            return self.power(base)
        return base

    def atom(self):
        k, v = self.peek()
        if k == "num":
            self.take()
            return self.atom_num(int(v))
        if k == "id":
            self.take()
            return self.atom_ident(v)
        if (k, v) == ("op", "("):
            self.take()
            r = self.expr()
            self.take("op", ")")
            return r
        raise ValueError(f"unexpected token {v or k!r}")

    def int_exponent(self) -> int:
        k, v = self.peek()
        if k == "num":
            self.take()
            return int(v)
        if (k, v) == ("op", "("):
            self.take()
            e = self.int_exponent()
            self.take("op", ")")
            return e
        raise ValueError("exponent must be a non-negative integer literal")

    def atom_num(self, n):
        return MultiPoly.const(n)

    def atom_ident(self, name):
        return MultiPoly.var(name)

    def power(self, base):
        return base ** self.int_exponent()


def parse(text: str) -> MultiPoly:
    """Parse the polynomial DSL: identifiers, integers, + - * ^ and parentheses."""
    return _Parser(text).parse()


# ---------------------------------------------------------------- roots

def _iroot(c: int, n: int) -> int | None:
    if c < 0:
        if n % 2 == 0:
            return None
        r = _iroot(-c, n)
        return None if r is None else -r
    if c < 2:
        return c
    r = int(round(c ** (1.0 / n))) if c.bit_length() < 1000 else 1 << (c.bit_length() // n)
    # Newton refinement
    while True:
        nr = ((n - 1) * r + c // r ** (n - 1)) // n
        if nr >= r:
            break
        r = nr
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand ** n == c:
            return cand
    return None


def _nth_root_exact(f: MultiPoly, n: int) -> MultiPoly | None:
    """u with u^n == f, by peeling lex leading terms; None if no such u."""
    lm, lc = f._lead_raw()
    rc = _iroot(lc, n)
    if rc is None:
        return None
    items = _mono_items(lm)
    if any(e % n for _, e in items):
        return None
    r0m = _mono_from_items((k, e // n) for k, e in items)
    bounds = {k: f.degree(k) // n for k in f.variables()}
    root = MultiPoly({r0m: rc}, _clean=True)
    denom_m = r0m * (n - 1)
    denom_c = n * rc ** (n - 1)
    for _ in range(len(f) * 4 + 16):
        rem = f - root ** n
        if rem.is_zero():
            return root
        m, c = rem._lead_raw()
        if not _divides(denom_m, m) or c % denom_c:
            return None
        tm = m - denom_m
        if any(e > bounds.get(k, 0) for k, e in _mono_items(tm)):
            return None
        if _lex_key(tm) >= _lex_key(r0m):
            return None
        root = root + MultiPoly({tm: c // denom_c}, _clean=True)
    return None


def _prime_factors(n: int) -> list[int]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def perfect_power_root(f: MultiPoly) -> tuple[MultiPoly, int] | None:
    """(u, n) with f = c * u^n for a nonzero constant c and n >= 2, maximal n.

    The constant is irrelevant for vanishing and non-vanishing conditions, so
    callers only need u.
    """
    if f.is_constant():
        return None
    g = 0
    for name in f.variables():
        g = gcd(g, f.degree(name))
    if g < 2:
        return None
    p = f.primitive()
    best = None
    for n in _prime_factors(g):
        u = _nth_root_exact(p, n)
        if u is None and n % 2 == 1:
            u = _nth_root_exact(-p, n)
        if u is not None:
            deeper = perfect_power_root(u)
            if deeper is not None:
                return deeper[0], deeper[1] * n
            best = (u.primitive(), n)
            break
    return best


def poly_square_root(D: MultiPoly) -> MultiPoly | None:
    """d with d*d == D exactly, normalized to a positive leading coefficient."""
    if D.is_zero():
        return MultiPoly()
    if D.is_constant():
        r = _iroot(D.constant_value(), 2)
        return None if r is None else MultiPoly.const(r)
    d = _nth_root_exact(D, 2)
    if d is None or d * d != D:
        return None
    return d


def _divisors(n: int) -> list[int]:
    n = abs(n)
    small, large = [], []
    i = 1
    while i * i <= n:
        if n % i == 0:
            small.append(i)
            if i * i != n:
                large.append(n // i)
        i += 1
    return small + large[::-1]


def _udiv_linear(cs: list[int], p: int, q: int) -> list[int] | None:
    """Divide a dense polynomial by (q*x - p); None if inexact."""
    n = len(cs) - 1
    out = [0] * n
    rem = list(cs)
    for k in range(n, 0, -1):
        if rem[k] % q:
            return None
        c = rem[k] // q
        out[k - 1] = c
        rem[k - 1] += c * p
        rem[k] = 0
    if rem[0]:
        return None
    return out


def univariate_linear_factors(f: MultiPoly, a: str) -> list[tuple[Fraction, int]] | None:
    """Rational roots with multiplicity if f splits into linear factors over Q.

    Roots are returned sorted ascending; None means f does not split (or is
    not univariate in a, or has degree < 1).
    """
    if f.variables() != {a}:
        return None
    cs = f.univariate_coeffs(a)
    roots: list[tuple[Fraction, int]] = []
    k0 = 0
    while cs[k0] == 0:
        k0 += 1
    if k0:
        roots.append((Fraction(0), k0))
        cs = cs[k0:]
    while len(cs) > 1:
        lead, tail = cs[-1], cs[0]
        found = None
        for q_ in _divisors(lead):
            for p_ in _divisors(tail):
                for sp in (p_, -p_):
                    if gcd(sp, q_) != 1:
                        continue
                    r = _udiv_linear(cs, sp, q_)
                    if r is not None:
                        found = (sp, q_, r)
                        break
                if found:
                    break
            if found:
                break
        if not found:
            return None
        sp, q_, rest = found
        mult = 1
        while len(rest) > 1:
            r2 = _udiv_linear(rest, sp, q_)
            if r2 is None:
                break
            rest = r2
            mult += 1
        roots.append((Fraction(sp, q_), mult))
        cs = rest
    roots.sort()
    return roots


# ---------------------------------------------------------------- factor split

_split_cache: dict[MultiPoly, tuple[MultiPoly, MultiPoly] | None] = {}


def _linear_monomial_coeff(f: MultiPoly) -> bool:
    """True if f has degree one in some variable whose coefficient is a monomial."""
    for name in f.variables():
        cs = f.coeffs_in(name)
        if max(cs) == 1 and len(cs[1]) == 1:
            return True
    return False


def split_product(f: MultiPoly) -> tuple[MultiPoly, MultiPoly] | None:
    """A factorization f = c*u*v with u, v non-constant, or None if f is irreducible.

    Cheap cases are decided locally; the rest goes to sympy's factor_list.
    """
    if f.is_constant():
        return None
    hit = _split_cache.get(f, False)
    if hit is not False:
        return hit
    res = _split_uncached(f)
    _split_cache[f] = res
    return res


def _split_uncached(f: MultiPoly) -> tuple[MultiPoly, MultiPoly] | None:
    mg = f.monomial_gcd()
    if mg:
        items = _mono_items(mg)
        x = MultiPoly.var(items[0][0])
        rest = f.div_monomial(_mono_from_items([(items[0][0], 1)]))
        if rest.is_constant():
            return None
        return x, rest
    if f.degree() <= 1 or _linear_monomial_coeff(f):
        return None
    factors = _sympy_factors(f)
    if len(factors) == 1 and factors[0][1] == 1:
        return None
    factors.sort(key=lambda fm: fm[0].sort_key())
    u = factors[0][0]
    v = f.primitive().divexact(u)
    return u, v


def _sympy_factors(f: MultiPoly) -> list[tuple[MultiPoly, int]]:
    import sympy

    names = sorted(f.variables())
    gens = sympy.symbols(names)
    data = {}
    for mono, c in f.items():
        d = dict(mono)
        data[tuple(d.get(n, 0) for n in names)] = c
    P = sympy.Poly.from_dict(data, *gens, domain="ZZ")
    _, fl = P.factor_list()
    out = []
    for fac, mult in fl:
        items = []
        for exps, c in fac.terms():
            items.append(([(n, e) for n, e in zip(names, exps) if e], int(c)))
        out.append((MultiPoly.from_items(items).primitive(), mult))
    return out


# ---------------------------------------------------------------- dense Z[q]

def _ustrip(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _uadd(a: list[int], b: list[int]) -> list[int]:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] += c
    return _ustrip(out)


def _umul(a: list[int], b: list[int]) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _umul_qm1(a: list[int], k: int) -> list[int]:
    for _ in range(k):
        out = [0] * (len(a) + 1)
        for i, c in enumerate(a):
            out[i + 1] += c
            out[i] -= c
        a = out
    return _ustrip(a)


def _udiv_qm1(a: list[int]) -> list[int] | None:
    """Divide by (q - 1); None if inexact."""
    if not a:
        return []
    n = len(a) - 1
    out = [0] * n
    carry = 0
    for k in range(n, 0, -1):
        carry = a[k] + carry
        out[k - 1] = carry
    if a[0] + carry != 0:
        return None
    return out


class LaurentQ:
    """Element of Z[q, 1/q, 1/(q-1)] stored as q^eq * (q-1)^e1 * P(q).

    P is kept coprime to q and to q-1, which makes the form unique.
    """

    __slots__ = ("eq", "e1", "c")

    def __init__(self, coeffs: Iterable[int] = (), eq: int = 0, e1: int = 0):
        c = _ustrip(list(coeffs))
        if not c:
            self.eq, self.e1, self.c = 0, 0, ()
            return
        while c[0] == 0:
            c.pop(0)
            eq += 1
        while True:
            d = _udiv_qm1(c)
            if d is None:
                break
            c = d
            e1 += 1
        self.eq, self.e1, self.c = eq, e1, tuple(c)

    @staticmethod
    def from_poly(p: MultiPoly, name: str = "q") -> "LaurentQ":
        return LaurentQ(p.univariate_coeffs(name))

    @staticmethod
    def mono(eq: int = 0, e1: int = 0, c: int = 1) -> "LaurentQ":
        return LaurentQ([c], eq, e1)

    def is_zero(self) -> bool:
        return not self.c

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = LaurentQ([other])
        if not isinstance(other, LaurentQ):
            return NotImplemented
        return (self.eq, self.e1, self.c) == (other.eq, other.e1, other.c)

    def __hash__(self) -> int:
        return hash((self.eq, self.e1, self.c))

    def __mul__(self, other):
        if isinstance(other, int):
            other = LaurentQ([other])
        if not isinstance(other, LaurentQ):
            return NotImplemented
        if not self.c or not other.c:
            return LaurentQ()
        out = LaurentQ.__new__(LaurentQ)
        out.eq = self.eq + other.eq
        out.e1 = self.e1 + other.e1
        out.c = tuple(_umul(list(self.c), list(other.c)))
        return out

    __rmul__ = __mul__

    def __neg__(self) -> "LaurentQ":
        out = LaurentQ.__new__(LaurentQ)
        out.eq, out.e1, out.c = self.eq, self.e1, tuple(-x for x in self.c)
        return out

    def __add__(self, other):
        if isinstance(other, int):
            other = LaurentQ([other])
        if not isinstance(other, LaurentQ):
            return NotImplemented
        if not self.c:
            return other
        if not other.c:
            return self
        eq = min(self.eq, other.eq)
        e1 = min(self.e1, other.e1)
        a = [0] * (self.eq - eq) + list(self.c)
        a = _umul_qm1(a, self.e1 - e1)
        b = [0] * (other.eq - eq) + list(other.c)
        b = _umul_qm1(b, other.e1 - e1)
        return LaurentQ(_uadd(a, b), eq, e1)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def shift(self, eq: int, e1: int) -> "LaurentQ":
        if not self.c:
            return self
        out = LaurentQ.__new__(LaurentQ)
        out.eq, out.e1, out.c = self.eq + eq, self.e1 + e1, self.c
        return out

    def is_polynomial(self) -> bool:
        return not self.c or (self.eq >= 0 and self.e1 >= 0)

    def coeffs(self) -> list[int]:
        if not self.is_polynomial():
            raise ValueError("not a polynomial in q")
        if not self.c:
            return []
        return _umul_qm1([0] * self.eq + list(self.c), self.e1)

    def to_poly(self, name: str = "q") -> MultiPoly:
        return MultiPoly.from_coeffs(self.coeffs(), name)

    def evaluate(self, x: int) -> Fraction:
        p = Fraction(0)
        for c in reversed(self.c):
            p = p * x + c
        return p * Fraction(x) ** self.eq * Fraction(x - 1) ** self.e1

    def divexact(self, other: "LaurentQ") -> "LaurentQ":
        """Quotient in Z[q, 1/q, 1/(q-1)]; the polynomial parts must divide."""
        if not other.c:
            raise ZeroDivisionError("division by zero")
        num = MultiPoly.from_coeffs(self.c)
        den = MultiPoly.from_coeffs(other.c)
        quo = num.divexact(den)
        return LaurentQ(quo.univariate_coeffs("q") if not quo.is_zero() else [],
                        self.eq - other.eq, self.e1 - other.e1)

    def qm1_expansion(self) -> list[tuple[int, int, int]]:
        """Unique expansion as sum of c * q^b * (q-1)^d with one b: [(c, b, d)]."""
        if not self.c:
            return []
        # Taylor shift P(q) = sum c_k (q-1)^k
        cs = list(self.c)
        n = len(cs)
        out = []
        for k in range(n):
            # synthetic division by (q-1) repeatedly, collecting remainders
            rem = 0
            new = [0] * (len(cs) - 1)
            carry = 0
            for i in range(len(cs) - 1, 0, -1):
                carry = cs[i] + carry
                new[i - 1] = carry
            rem = cs[0] + carry
            if rem:
                out.append((rem, self.eq, self.e1 + k))
            cs = new
            if not cs:
                break
        return out

    def __str__(self) -> str:
        return format_q_parts(self.c, self.eq, self.e1)

    def __repr__(self) -> str:
        return f"LaurentQ({str(self)!r})"


def _fmt_pow(base: str, e: int) -> str:
    if e == 1:
        return base
    if e < 0:
        return f"{base}^({e})"
    return f"{base}^{e}"


def format_q_parts(coeffs, eq: int, e1: int) -> str:
    """Render c * q^eq * (q - 1)^e1 * (rest) for a polynomial rest in q."""
    coeffs = list(coeffs)
    if not coeffs:
        return "0"
    factors = []
    const_c = 1
    if len(coeffs) == 1:
        const_c = coeffs[0]
    else:
        if coeffs[-1] < 0:
            const_c = -1
            coeffs = [-c for c in coeffs]
        g = reduce(gcd, coeffs)
        if g > 1:
            const_c *= g
            coeffs = [c // g for c in coeffs]
    if eq:
        factors.append(_fmt_pow("q", eq))
    if e1:
        factors.append(_fmt_pow("(q - 1)", e1))
    if len(coeffs) > 1:
        factors.append("(" + str(MultiPoly.from_coeffs(coeffs)) + ")")
    if not factors:
        return str(const_c)
    body = "*".join(factors)
    if const_c == 1:
        return body
    if const_c == -1:
        return "-" + body
    return f"{const_c}*{body}"


def format_q(p: MultiPoly) -> str:
    """Factored rendering of a polynomial in q, e.g. q^2*(q - 1)."""
    if p.is_zero():
        return "0"
    lq = LaurentQ.from_poly(p)
    return format_q_parts(lq.c, lq.eq, lq.e1)


# ---------------------------------------------------------------- GenusPoly

class GenusPoly:
    """Sum of L_(a,c)(q) * q^(a*g) * (q-1)^(c*g) with L Laurent in q and q-1."""

    __slots__ = ("_d",)

    def __init__(self, data: Mapping[tuple[int, int], LaurentQ] | None = None):
        self._d = {k: v for k, v in (data or {}).items() if not v.is_zero()}

    @staticmethod
    def from_terms(terms: Iterable[tuple[int, int, int, int, int]]) -> "GenusPoly":
        out = GenusPoly()
        for coef, a, b, c, d in terms:
            out = out + GenusPoly({(a, c): LaurentQ.mono(b, d, coef)})
        return out

    @staticmethod
    def constant(x: "LaurentQ | int") -> "GenusPoly":
        if isinstance(x, int):
            x = LaurentQ([x])
        return GenusPoly({(0, 0): x})

    def __add__(self, other: "GenusPoly") -> "GenusPoly":
        d = dict(self._d)
        for k, v in other._d.items():
            d[k] = d[k] + v if k in d else v
        return GenusPoly(d)

    def __sub__(self, other: "GenusPoly") -> "GenusPoly":
        return self + GenusPoly({k: -v for k, v in other._d.items()})

    def __mul__(self, other: "GenusPoly") -> "GenusPoly":
        out: dict = {}
        for (a1, c1), v1 in self._d.items():
            for (a2, c2), v2 in other._d.items():
                k = (a1 + a2, c1 + c2)
                p = v1 * v2
                out[k] = out[k] + p if k in out else p
        return GenusPoly(out)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GenusPoly):
            return NotImplemented
        return self._d == other._d

    def __hash__(self) -> int:
        return hash(frozenset(self._d.items()))

    def keys(self) -> list[tuple[int, int]]:
        return sorted(self._d)

    def coefficient(self, a: int, c: int) -> LaurentQ:
        return self._d.get((a, c), LaurentQ())

    def terms(self) -> list[tuple[int, int, int, int, int]]:
        """Canonical integer terms (coef, a, b, c, d) sorted by (a, c, b, d)."""
        out = []
        for (a, c), v in self._d.items():
            for coef, b, d in v.qm1_expansion():
                out.append((coef, a, b, c, d))
        out.sort(key=lambda t: (t[1], t[3], t[2], t[4]))
        return out

    def evaluate_laurent(self, g: int) -> LaurentQ:
        acc = LaurentQ()
        for (a, c), v in self._d.items():
            acc = acc + v.shift(a * g, c * g)
        return acc

    def evaluate(self, g: int) -> MultiPoly:
        """Value at a fixed genus; raises if it is not a polynomial in q."""
        return self.evaluate_laurent(g).to_poly()

    def is_polynomial_at(self, g: int) -> bool:
        return self.evaluate_laurent(g).is_polynomial()

    def __str__(self) -> str:
        if not self._d:
            return "0"
        parts = []
        for (a, c) in sorted(self._d):
            v = self._d[(a, c)]
            coeffs = list(v.c)
            sign = 1
            if coeffs[-1] < 0:
                sign = -1
                coeffs = [-x for x in coeffs]
            cst = 1
            if len(coeffs) == 1:
                cst = coeffs[0]
            facs = []
            qa = _affine("g", a, v.eq)
            if qa is not None:
                facs.append("q" if qa == "1" else f"q^{qa}" if _simple(qa) else f"q^({qa})")
            ca = _affine("g", c, v.e1)
            if ca is not None:
                facs.append("(q - 1)" if ca == "1" else f"(q - 1)^{ca}" if _simple(ca) else f"(q - 1)^({ca})")
            if len(coeffs) > 1:
                facs.append("(" + str(MultiPoly.from_coeffs(coeffs)) + ")")
            body = "*".join(facs)
            if not body:
                body = str(cst)
            elif cst != 1:
                body = f"{cst}*{body}"
            parts.append((sign, body))
        out = ("-" if parts[0][0] < 0 else "") + parts[0][1]
        for sign, body in parts[1:]:
            out += (" - " if sign < 0 else " + ") + body
        return out

    def __repr__(self) -> str:
        return f"GenusPoly({str(self)!r})"

    def to_json(self) -> list[dict]:
        return [{"coef": c, "a": a, "b": b, "c": cc, "d": d} for c, a, b, cc, d in self.terms()]

    @staticmethod
    def from_json(data: list[dict]) -> "GenusPoly":
        return GenusPoly.from_terms((t["coef"], t["a"], t["b"], t["c"], t["d"]) for t in data)


def _simple(s: str) -> bool:
    return re.fullmatch(r"\d+|[a-z]", s) is not None


def _affine(x: str, k: int, c: int) -> str | None:
    """Render k*x + c; None when it is identically zero."""
    if k == 0 and c == 0:
        return None
    if k == 0:
        return str(c)
    lead = x if k == 1 else f"-{x}" if k == -1 else f"{k}*{x}"
    if c == 0:
        return lead
    return f"{lead} + {c}" if c > 0 else f"{lead} - {-c}"


# ---------------------------------------------------------------- ZetaExpr

class ZetaExpr:
    """Sum of p_(a,b)(q) * q^(-a*s) * (q-1)^(-b*s) with p in Z[q]."""

    __slots__ = ("_d",)

    def __init__(self, data: Mapping[tuple[int, int], MultiPoly] | None = None):
        self._d = {k: v for k, v in (data or {}).items() if not v.is_zero()}

    @staticmethod
    def constant(p: "MultiPoly | int") -> "ZetaExpr":
        return ZetaExpr({(0, 0): MultiPoly._lift(p)})

    def __add__(self, other: "ZetaExpr") -> "ZetaExpr":
        d = dict(self._d)
        for k, v in other._d.items():
            d[k] = d[k] + v if k in d else v
        return ZetaExpr(d)

    def __mul__(self, other) -> "ZetaExpr":
        if isinstance(other, (int, MultiPoly)):
            other = ZetaExpr.constant(other)
        out: dict = {}
        for (a1, b1), v1 in self._d.items():
            for (a2, b2), v2 in other._d.items():
                k = (a1 + a2, b1 + b2)
                p = v1 * v2
                out[k] = out[k] + p if k in out else p
        return ZetaExpr(out)

    __rmul__ = __mul__

    def shift(self, a: int, b: int) -> "ZetaExpr":
        """Multiply by q^(-a*s) * (q-1)^(-b*s)."""
        return ZetaExpr({(k[0] + a, k[1] + b): v for k, v in self._d.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, ZetaExpr):
            return NotImplemented
        return self._d == other._d

    def __hash__(self) -> int:
        return hash(frozenset(self._d.items()))

    def keys(self) -> list[tuple[int, int]]:
        return sorted(self._d, key=lambda k: (k[0] + k[1], k[0], k[1]))

    def coefficient(self, a: int, b: int) -> MultiPoly:
        return self._d.get((a, b), MultiPoly())

    def substitute_s(self, s0: int) -> MultiPoly:
        if s0 > 0:
            raise ValueError("substitute_s needs s0 <= 0 to stay polynomial")
        q = Q
        out = MultiPoly()
        for (a, b), p in self._d.items():
            out = out + p * q ** (-a * s0) * (q - 1) ** (-b * s0)
        return out

    def __str__(self) -> str:
        if not self._d:
            return "0"
        parts = []
        for a, b in self.keys():
            p = self._d[(a, b)]
            lq = LaurentQ.from_poly(p)
            coef = format_q_parts(lq.c, lq.eq, lq.e1)
            sfac = []
            if a:
                sfac.append("q^(-s)" if a == 1 else f"q^(-{a}*s)")
            if b:
                sfac.append("(q - 1)^(-s)" if b == 1 else f"(q - 1)^(-{b}*s)")
            neg = coef.startswith("-")
            if neg:
                coef = coef[1:]
            if sfac:
                body = "*".join(sfac) if coef == "1" else coef + "*" + "*".join(sfac)
            else:
                body = coef
            parts.append((neg, body))
        out = ("-" if parts[0][0] else "") + parts[0][1]
        for neg, body in parts[1:]:
            out += (" - " if neg else " + ") + body
        return out

    def __repr__(self) -> str:
        return f"ZetaExpr({str(self)!r})"

    def to_json(self) -> list[dict]:
        out = []
        for a, b in self.keys():
            cs = self._d[(a, b)].univariate_coeffs("q")
            out.append({"p": {str(k): c for k, c in enumerate(cs) if c}, "a": a, "b": b})
        return out

    @staticmethod
    def from_json(data: list[dict]) -> "ZetaExpr":
        d = {}
        for t in data:
            cs = [0] * (max((int(k) for k in t["p"]), default=0) + 1)
            for k, c in t["p"].items():
                cs[int(k)] = c
            d[(t["a"], t["b"])] = MultiPoly.from_coeffs(cs)
        return ZetaExpr(d)


def zeta_to_genus(Z: ZetaExpr, alpha: int, beta: int) -> GenusPoly:
    """|G|^(2g-1) * zeta_G(2g-2) for |G| = q^alpha * (q-1)^beta."""
    out: dict = {}
    for (a, b), p in Z._d.items():
        key = (2 * alpha - 2 * a, 2 * beta - 2 * b)
        v = LaurentQ.from_poly(p).shift(2 * a - alpha, 2 * b - beta)
        out[key] = out[key] + v if key in out else v
    return GenusPoly(out)


# ---------------------------------------------------------------- parametric parser

class _ParamVal:
    """Element of the GenusPoly-shaped algebra used while parsing closed forms.

    Keys are (kq, k1): exponents of q and (q - 1) per unit of the parameter.
    """

    __slots__ = ("d",)

    def __init__(self, d):
        self.d = {k: v for k, v in d.items() if not v.is_zero()}

    @staticmethod
    def scalar(x: LaurentQ) -> "_ParamVal":
        return _ParamVal({(0, 0): x})

    def __add__(self, o):
        d = dict(self.d)
        for k, v in o.d.items():
            d[k] = d[k] + v if k in d else v
        return _ParamVal(d)

    def __neg__(self):
        return _ParamVal({k: -v for k, v in self.d.items()})

    def __sub__(self, o):
        return self + (-o)

    def __mul__(self, o):
        out: dict = {}
        for (a1, c1), v1 in self.d.items():
            for (a2, c2), v2 in o.d.items():
                k = (a1 + a2, c1 + c2)
                p = v1 * v2
                out[k] = out[k] + p if k in out else p
        return _ParamVal(out)

    def as_scalar(self) -> LaurentQ | None:
        if not self.d:
            return LaurentQ()
        if list(self.d) == [(0, 0)]:
            return self.d[(0, 0)]
        return None


class _ParamParser(_Parser):
    def __init__(self, text: str, param: str):
        super().__init__(text)
        self.param = param

    def atom_num(self, n):
        return _ParamVal.scalar(LaurentQ([n]))

    def atom_ident(self, name):
        if name != "q":
            raise ValueError(f"unknown symbol {name!r} in closed form")
        return _ParamVal.scalar(LaurentQ([0, 1]))

    def power(self, base):
        k, c = self.affine_exponent()
        b = base.as_scalar()
        if k == 0:
            if c >= 0:
                out = _ParamVal.scalar(LaurentQ([1]))
                for _ in range(c):
                    out = out * base
                return out
            if b is None:
                raise ValueError("negative power of a non-scalar")
        if b == LaurentQ([0, 1]):
            return _ParamVal({(k, 0): LaurentQ.mono(c, 0)})
        if b == LaurentQ([-1, 1]):
            return _ParamVal({(0, k): LaurentQ.mono(0, c)})
        raise ValueError("symbolic exponents are only allowed on q and (q - 1)")

    def affine_exponent(self) -> tuple[int, int]:
        tk, tv = self.peek()
        if tk == "num":
            self.take()
            return 0, int(tv)
        if tk == "id" and tv == self.param:
            self.take()
            return 1, 0
        self.take("op", "(")
        k = c = 0
        sign = 1
        first = True
        while True:
            tk, tv = self.peek()
            if tk == "op" and tv in "+-":
                self.take()
                sign = -1 if tv == "-" else 1
            elif not first:
                break
            first = False
            tk, tv = self.peek()
            if tk == "num":
                self.take()
                n = int(tv)
                if self.peek() == ("op", "*"):
                    self.take()
                    self.take("id", self.param)
                    k += sign * n
                else:
                    c += sign * n
            else:
                self.take("id", self.param)
                k += sign
            sign = 1
            if self.peek() == ("op", ")"):
                break
        self.take("op", ")")
        return k, c


def parse_param_expr(text: str, param: str) -> dict[tuple[int, int], LaurentQ]:
    """Parse a closed form with exponents affine in one parameter.

    Returns {(kq, k1): L} meaning sum L * q^(kq*param) * (q - 1)^(k1*param).
    """
    return _ParamParser(text, param).parse().d


def parse_genus(text: str) -> GenusPoly:
    return GenusPoly(parse_param_expr(text, "g"))


def parse_zeta(text: str) -> ZetaExpr:
    d = {}
    for (kq, k1), v in parse_param_expr(text, "s").items():
        if kq > 0 or k1 > 0:
            raise ValueError("zeta exponents must be non-positive multiples of s")
        if not v.is_polynomial():
            raise ValueError("zeta coefficients must be polynomials in q")
        d[(-kq, -k1)] = v.to_poly()
    return ZetaExpr(d)
