import json
from importlib import resources

import pytest

from charvar.strata import StratumSpec


def corpus():
    doc = json.loads(resources.files("charvar").joinpath("data", "strata_corpus.json").read_text())
    return doc["specs"]


def tt2_commutator_path():
    return str(resources.files("charvar").joinpath("data", "tt2_commutator.json"))


@pytest.fixture(scope="session")
def catalogs():
    from charvar.classes import build_catalog
    cache = {}

    def get(n):
        if n not in cache:
            cache[n] = build_catalog(n)
        return cache[n]
    return get


@pytest.fixture(scope="session")
def models():
    from charvar.tqft import model
    return lambda n, unipotent=False: model(n, unipotent)


def spec_of(d):
    return StratumSpec.from_json(d)
