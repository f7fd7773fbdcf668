"""Command-line entry point.

Exit codes: 0 success, 1 a verification reported a mismatch, 2 user error,
3 AlgorithmFailure, 4 BranchFailure, 5 resource budget exceeded, 6 any other
engine error (inexact division, interpolation failure).
"""
from __future__ import annotations

import functools
import json
import sys

import click

from . import cache, parallel
from .errors import (AlgorithmFailure, BranchFailure, CharvarError, ResourceLimit)
from .poly import format_q, parse

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2
EXIT_ALGORITHM = 3
EXIT_BRANCH = 4
EXIT_RESOURCE = 5
EXIT_ENGINE = 6

# beyond these sizes a run takes hours
LONG_ZETA = {"un": 9, "tn": 8}
LONG_TQFT = 5


class Ctx:
    def __init__(self, as_json: bool, cache_dir: str | None, threads: int, allow_long: bool):
        self.json = as_json
        self.cache_dir = cache.resolve(cache_dir)
        self.threads = threads
        self.allow_long = allow_long

    def emit(self, text: str, doc) -> None:
        if self.json:
            click.echo(json.dumps(doc, sort_keys=True))
        else:
            click.echo(text)

    def gate(self, what: str, long: bool) -> None:
        if long and not self.allow_long:
            raise click.UsageError(f"{what} is a long-running target; pass --allow-long")


def show_q(p) -> str:
    """Factored form in q and q - 1 for polynomials in q alone."""
    if p.variables() - {"q"}:
        return str(p)
    s = format_q(p)
    if s.startswith("(") and s.endswith(")") and s.count("(") == 1:
        s = s[1:-1]
    return s


def _spec_detail(e) -> object:
    s = getattr(e, "spec", None)
    if s is not None and hasattr(s, "to_json"):
        return s.to_json()
    return getattr(e, "detail", None)


def common(fn):
    """Options shared by every subcommand; maps engine errors to exit codes."""

    @click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
    @click.option("--cache-dir", type=click.Path(file_okay=False), default=None,
                  help=f"Result cache directory (default: ${cache.ENV}, else no cache).")
    @click.option("--threads", type=click.IntRange(min=1), default=1, show_default=True,
                  help="Worker processes.")
    @click.option("--allow-long", is_flag=True, help="Permit long-running targets.")
    @functools.wraps(fn)
    def wrapper(as_json, cache_dir, threads, allow_long, **kw):
        ctx = Ctx(as_json, cache_dir, threads, allow_long)
        parallel.set_threads(threads)
        try:
            code = fn(ctx, **kw)
        except (click.UsageError, click.BadParameter):
            raise
        except (ValueError, KeyError, json.JSONDecodeError) as e:
            raise click.UsageError(str(e))
        except AlgorithmFailure as e:
            _fail(ctx, "AlgorithmFailure", e, EXIT_ALGORITHM)
        except BranchFailure as e:
            _fail(ctx, "BranchFailure", e, EXIT_BRANCH)
        except ResourceLimit as e:
            _fail(ctx, "ResourceLimit", e, EXIT_RESOURCE)
        except CharvarError as e:
            _fail(ctx, type(e).__name__, e, EXIT_ENGINE)
        sys.exit(code or EXIT_OK)

    return wrapper


def _fail(ctx: Ctx, kind: str, e: Exception, code: int):
    doc = {"error": kind, "message": str(e), "detail": _spec_detail(e)}
    if ctx.json:
        click.echo(json.dumps(doc, sort_keys=True, default=str))
    else:
        click.echo(f"{kind}: {e}", err=True)
        if doc["detail"] is not None:
            click.echo(f"  at: {json.dumps(doc['detail'], default=str)}", err=True)
    sys.exit(code)


FAMILY = click.Choice(["un", "tn"])


def _group_of(family: str) -> str:
    return {"un": "U", "tn": "T", "tt": "Tt"}[family]


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(package_name="charvar")
def main():
    """Virtual classes and representation zeta functions of U_n and T_n."""


# ---------------------------------------------------------------- zeta

@main.command()
@click.option("--family", type=FAMILY, required=True)
@click.option("--n", "n", type=click.IntRange(min=1), required=True)
@click.option("--eval-s", "eval_s", type=int, default=None,
              help="Substitute s = S0 (S0 <= 0) and print a polynomial in q.")
@common
def zeta(ctx: Ctx, family, n, eval_s):
    """Representation zeta function of U_n or T_n."""
    from .zeta import zeta_family

    ctx.gate(f"zeta for n = {n}", n >= LONG_ZETA[family])
    Z = _cached_zeta(ctx, family, n)
    if eval_s is not None:
        v = Z.substitute_s(eval_s)
        ctx.emit(show_q(v), {"family": family, "n": n, "s": eval_s, "value": str(v)})
    else:
        ctx.emit(str(Z), Z.to_json())


def _cached_zeta(ctx: Ctx, family: str, n: int):
    from .poly import ZetaExpr
    from .zeta import zeta_family

    key = f"zeta-{family}-n{n}-v1"
    doc = cache.load_json(ctx.cache_dir, key)
    if doc is not None:
        return ZetaExpr.from_json(doc)
    Z = zeta_family(family, n)
    cache.store_json(ctx.cache_dir, key, Z.to_json())
    return Z


# ---------------------------------------------------------------- epoly

@main.command()
@click.option("--family", type=FAMILY, required=True)
@click.option("--n", "n", type=click.IntRange(min=1), required=True)
@click.option("--genus", type=click.IntRange(min=0), default=None)
@click.option("--symbolic", is_flag=True, help="Closed form in g (the default without --genus).")
@click.option("--uv", is_flag=True, help="Print in u, v with q = uv (fixed genus only).")
@common
def epoly(ctx: Ctx, family, n, genus, symbolic, uv):
    """E-polynomial of the representation variety via the zeta function."""
    from .surface import e_polynomial, to_uv

    if genus is not None and symbolic:
        raise click.UsageError("--genus and --symbolic are exclusive")
    ctx.gate(f"zeta for n = {n}", n >= LONG_ZETA[family])
    Z = _cached_zeta(ctx, family, n)
    if genus is None:
        if uv:
            raise click.UsageError("--uv needs --genus")
        gp = e_polynomial(family, n, zeta=Z)
        ctx.emit(str(gp), {"family": family, "n": n, "terms": gp.to_json()})
        return
    p = e_polynomial(family, n, genus, zeta=Z)
    text = str(to_uv(p)) if uv else show_q(p)
    ctx.emit(text, {"family": family, "n": n, "g": genus, "value": str(p)})


# ---------------------------------------------------------------- motive

@main.command()
@click.option("--family", type=click.Choice(["un", "tn", "tt"]), required=True,
              help="un = U_n, tn = T_n, tt = T_n with last diagonal entry 1.")
@click.option("--n", "n", type=click.IntRange(min=1), required=True)
@click.option("--genus", type=click.IntRange(min=0), default=None)
@click.option("--symbolic", is_flag=True)
@click.option("--punctures", default="", help="Comma-separated unipotent class indices (1-based).")
@common
def motive(ctx: Ctx, family, n, genus, symbolic, punctures):
    """Virtual class of the representation variety via the TQFT."""
    from . import tqft

    ctx.gate(f"TQFT for n = {n}", n >= LONG_TQFT)
    group = _group_of(family)
    if symbolic == (genus is not None):
        raise click.UsageError("give exactly one of --genus or --symbolic")
    if symbolic:
        if punctures:
            raise click.UsageError("--punctures needs a fixed --genus")
        gp = tqft.representation_variety_closed_form(group, n, ctx.cache_dir, ctx.threads)
        ctx.emit(str(gp), {"family": family, "n": n, "terms": gp.to_json()})
        return
    if punctures:
        idx = [int(x) - 1 for x in punctures.split(",") if x.strip()]
        if any(i < 0 for i in idx):
            raise click.UsageError("puncture indices are 1-based")
        v = tqft.twisted_class(group, n, genus, idx, ctx.cache_dir, ctx.threads)
    else:
        v = tqft.representation_variety_class(group, n, genus, ctx.cache_dir, ctx.threads)
    ctx.emit(show_q(v), {"family": family, "n": n, "g": genus, "punctures": punctures,
                      "value": str(v)})


# ---------------------------------------------------------------- classes

@main.command()
@click.option("--n", "n", type=click.IntRange(min=1), required=True)
@common
def classes(ctx: Ctx, n):
    """Conjugacy classes of T_n with last diagonal entry 1."""
    from .classes import MAX_N, build_catalog

    if n > MAX_N:
        raise click.UsageError(f"catalogs are supported for n <= {MAX_N}")
    ctx.gate(f"the class catalog for n = {n}", n >= 5)
    cat = build_catalog(n, cache_dir=ctx.cache_dir)
    if ctx.json:
        ctx.emit("", cat.to_json())
        return
    lines = [f"n = {n}: M = {cat.M} unipotent classes, N = {cat.N} class families"]
    for u in cat.unipotent:
        rep = "[" + "; ".join(" ".join(str(x) for x in r) for r in u.rep) + "]"
        lines.append(f"U{u.index + 1}: rep {rep}  class {show_q(u.class_poly)}  "
                     f"stabilizer {show_q(u.stabilizer_poly)}")
    for f in cat.families:
        blocks = "|".join(",".join(str(i + 1) for i in b) for b in f.pattern.blocks)
        lines.append(f"family {f.index + 1}: diagonal {blocks}  unipotent U{f.unipotent + 1}  "
                     f"base {show_q(f.base_poly)}  orbit {show_q(f.orbit_poly)}")
    lines.append("transition matrix:")
    for r in cat.transition.C:
        lines.append("  " + " ".join(f"{x:3d}" for x in r))
    click.echo("\n".join(lines))


# ---------------------------------------------------------------- strata-class

@main.command("strata-class")
@click.argument("spec_file", type=click.File("r"), default="-")
@click.option("--trace", is_flag=True, help="Emit the derivation tree as JSON.")
@common
def strata_class(ctx: Ctx, spec_file, trace):
    """Class of X(vars | zero | nonzero) read as JSON from SPEC_FILE (or stdin)."""
    from .strata import StratumSpec, default_engine

    spec = StratumSpec.from_json(json.load(spec_file))
    eng = default_engine()
    if trace:
        v, tree = eng.virtual_class_traced(spec)
        click.echo(json.dumps({"value": str(v), "trace": tree}, sort_keys=True))
        return
    v = eng.virtual_class(spec)
    ctx.emit(show_q(v), {"value": str(v)})


# ---------------------------------------------------------------- verify

@main.command()
@click.option("--family", type=FAMILY, required=True)
@click.option("--n", "n", type=click.IntRange(min=1), required=True)
@click.option("--q", "qs", default="2,3", show_default=True)
@click.option("--genus", type=click.IntRange(min=0), default=None)
@click.option("--budget", type=click.IntRange(min=1), default=1 << 20, show_default=True,
              help="Largest group order enumerated.")
@common
def verify(ctx: Ctx, family, n, qs, genus, budget):
    """Compare symbolic results with brute-force counts over small fields."""
    from . import oracle
    from .surface import e_polynomial

    Z = _cached_zeta(ctx, family, n)
    kind = _group_of(family)
    rows = []
    for q0 in [int(x) for x in qs.split(",") if x.strip()]:
        if q0 not in oracle.SUPPORTED_Q:
            raise click.UsageError(f"q must be one of {oracle.SUPPORTED_Q}")
        k = oracle.count_conjugacy_classes(kind, n, q0, budget)
        kz = Z.substitute_s(0).evaluate({"q": q0})
        rows.append({"check": "classes", "q": q0, "oracle": k, "symbolic": kz, "ok": k == kz})
        if genus is not None:
            c = oracle.count_representation_variety(kind, n, q0, genus, budget=budget)
            e = e_polynomial(family, n, genus, zeta=Z).evaluate({"q": q0})
            rows.append({"check": f"genus {genus}", "q": q0, "oracle": c, "symbolic": e,
                         "ok": c == e})
    ok = all(r["ok"] for r in rows)
    text = "\n".join(f"{r['check']:<10} q={r['q']}  oracle={r['oracle']}  symbolic={r['symbolic']}  "
                     f"{'pass' if r['ok'] else 'FAIL'}" for r in rows)
    ctx.emit(text, {"family": family, "n": n, "ok": ok, "rows": rows})
    return EXIT_OK if ok else EXIT_MISMATCH


# ---------------------------------------------------------------- crosscheck

@main.command()
@click.option("--n-max", type=click.IntRange(min=1), default=3, show_default=True)
@click.option("--genus-max", type=click.IntRange(min=0), default=4, show_default=True)
@click.option("--family", "families", type=FAMILY, multiple=True)
@common
def crosscheck(ctx: Ctx, n_max, genus_max, families):
    """TQFT classes against arithmetic E-polynomials."""
    from .surface import FAMILIES, cross_check

    ctx.gate(f"TQFT for n = {n_max}", n_max >= LONG_TQFT)
    rep = cross_check(families or FAMILIES, n_max, genus_max, cache_dir=ctx.cache_dir,
                      threads=ctx.threads)
    ctx.emit(rep.table(), rep.to_json())
    return EXIT_OK if rep.ok else EXIT_MISMATCH


# ---------------------------------------------------------------- polynomial DSL

@main.command()
@click.argument("expr")
@common
def poly(ctx: Ctx, expr):
    """Parse a polynomial in the DSL and print its canonical form."""
    p = parse(expr)
    ctx.emit(str(p), {"value": str(p)})


if __name__ == "__main__":  # pragma: no cover
    main()
