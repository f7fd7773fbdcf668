"""Bundled reference data: published closed forms transcribed to the DSL."""
from __future__ import annotations

from functools import lru_cache
from importlib import resources

from .poly import GenusPoly, ZetaExpr, parse, parse_genus, parse_zeta

FILES = ("zeta_un.txt", "zeta_tn.txt", "virtual_classes.txt", "epoly_t6.txt")


def read_text(name: str) -> str:
    return resources.files("charvar").joinpath("data", name).read_text()


@lru_cache(maxsize=None)
def entries(name: str) -> dict[str, str]:
    """NAME -> expression text for a NAME: EXPR file; '#' starts a comment line."""
    out = {}
    for line in read_text(name).splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, _, expr = line.partition(":")
        out[key.strip()] = expr.strip()
    return out


def zeta(family: str, n: int) -> ZetaExpr:
    fname, tag = {"un": ("zeta_un.txt", "U"), "tn": ("zeta_tn.txt", "T")}[family]
    return parse_zeta(entries(fname)[f"{tag}{n}"])


def zeta_range(family: str) -> list[int]:
    fname = {"un": "zeta_un.txt", "tn": "zeta_tn.txt"}[family]
    return sorted(int(k[1:]) for k in entries(fname))


def virtual_class(key: str) -> GenusPoly:
    """Symbolic class, key one of Tt2, U2..U5, T5."""
    return parse_genus(entries("virtual_classes.txt")[key])


def virtual_class_at(key: str, g: int):
    """Published fixed-genus value, e.g. key T5 and g in (1, 2)."""
    return parse(entries("virtual_classes.txt")[f"{key}@{g}"])


def epoly_t6() -> GenusPoly:
    return parse_genus(entries("epoly_t6.txt")["T6"])


def eigenvalues_tt5() -> list[tuple[int, int, int]]:
    """(a, b, multiplicity) for eigenvalues q^a (q-1)^b."""
    out = []
    for line in read_text("eigen_tt5.txt").splitlines():
        if line.strip() and not line.startswith("#"):
            a, b, m = (int(x) for x in line.split())
            out.append((a, b, m))
    return out
