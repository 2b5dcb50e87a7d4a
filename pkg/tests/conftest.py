import time

import pytest

from chi5.coloring import derive_root_colorings
from chi5.graphs import build_base_graph
from chi5.pipeline import RunConfig, full_proof

SEED = 7


@pytest.fixture(scope="session")
def base():
    return build_base_graph()


@pytest.fixture(scope="session")
def roots():
    return {r.label: r for r in derive_root_colorings()}


@pytest.fixture(scope="session")
def proof_run(tmp_path_factory):
    """One fast full run, shared by the pipeline, cli and acceptance tests."""
    out = tmp_path_factory.mktemp("bundle-a")
    t = time.perf_counter()
    bundle = full_proof(RunConfig(seed=SEED), out)
    return bundle, out, time.perf_counter() - t


@pytest.fixture(scope="session")
def proof_run_again(tmp_path_factory):
    out = tmp_path_factory.mktemp("bundle-b")
    bundle = full_proof(RunConfig(seed=SEED), out)
    return bundle, out, None
