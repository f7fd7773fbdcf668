"""E-polynomials of representation varieties of closed surfaces.

By Frobenius, |R_G(Sigma_g)| = |G|^(2g-1) * zeta_G(2g-2) over F_q, and by
Katz a polynomial count is the E-polynomial (with q = uv).  The same class
is also produced by the TQFT; `cross_check` compares the two pipelines.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .poly import GenusPoly, MultiPoly, ZetaExpr, zeta_to_genus
from .zeta import zeta_family

FAMILIES = ("un", "tn")


def group_order(family: str, n: int) -> tuple[int, int]:
    """(alpha, beta) with |G| = q^alpha (q-1)^beta."""
    if family == "un":
        return n * (n - 1) // 2, 0
    if family == "tn":
        return n * (n - 1) // 2, n
    raise ValueError("family must be 'un' or 'tn'")


def genus_form(Z: ZetaExpr, family: str, n: int) -> GenusPoly:
    return zeta_to_genus(Z, *group_order(family, n))


def e_polynomial(family: str, n: int, g: int | None = None,
                 zeta: ZetaExpr | None = None) -> MultiPoly | GenusPoly:
    """e(R_G(Sigma_g)) for G = U_n or T_n; symbolic in g when g is None."""
    Z = zeta if zeta is not None else zeta_family(family, n)
    gp = genus_form(Z, family, n)
    if g is None:
        return gp
    if g < 0:
        raise ValueError("genus must be non-negative")
    return gp.evaluate(g)


def to_uv(p: MultiPoly) -> MultiPoly:
    uv = MultiPoly.var("u") * MultiPoly.var("v")
    return p.subs({"q": uv})


# ---------------------------------------------------------------- cross-check

@dataclass
class CrossRow:
    family: str
    n: int
    g: int
    tqft: MultiPoly
    arithmetic: MultiPoly

    @property
    def ok(self) -> bool:
        return self.tqft == self.arithmetic

    def to_json(self) -> dict:
        d = {"family": self.family, "n": self.n, "g": self.g, "ok": self.ok,
             "tqft": str(self.tqft), "arithmetic": str(self.arithmetic)}
        if not self.ok:
            d["diff"] = str(self.tqft - self.arithmetic)
        return d


@dataclass
class CrossReport:
    rows: list[CrossRow] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.rows)

    def table(self) -> str:
        lines = [f"{'family':<7}{'n':>3}{'g':>4}  result"]
        for r in self.rows:
            lines.append(f"{r.family:<7}{r.n:>3}{r.g:>4}  {'pass' if r.ok else 'FAIL'}")
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {"ok": self.ok, "rows": [r.to_json() for r in self.rows]}


def cross_check(families=FAMILIES, n_max: int = 4, g_max: int = 4, g_min: int = 0,
                cache_dir: str | None = None, threads: int | None = None) -> CrossReport:
    """Compare the TQFT class with the arithmetic E-polynomial for each (family, n, g)."""
    from .tqft import representation_variety_class

    rep = CrossReport()
    for fam in families:
        for n in range(1, n_max + 1):
            gp = e_polynomial(fam, n)
            for g in range(g_min, g_max + 1):
                t = representation_variety_class("U" if fam == "un" else "T", n, g,
                                                 cache_dir=cache_dir, threads=threads)
                rep.rows.append(CrossRow(fam, n, g, t, gp.evaluate(g)))
    return rep
