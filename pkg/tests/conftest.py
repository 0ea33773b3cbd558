import os

import pytest

from theta2.groebner import GFP1, GFP2
from theta2.numerics import EvalConfig, sample_siegel
from theta2.thetaring import RelationOracle, StructurePipeline


@pytest.fixture(scope="session")
def cache_dir(tmp_path_factory):
    # a persistent cache (set THETA2_TEST_CACHE) makes local reruns fast;
    # the default is hermetic
    env = os.environ.get("THETA2_TEST_CACHE")
    if env:
        os.makedirs(env, exist_ok=True)
        return env
    return str(tmp_path_factory.mktemp("basis-cache"))


@pytest.fixture(scope="session")
def oracle():
    return RelationOracle()


@pytest.fixture(scope="session")
def pipe_p1(cache_dir, oracle):
    return StructurePipeline(GFP1, cache_dir, oracle=oracle)


@pytest.fixture(scope="session")
def pipe_p2(cache_dir, oracle):
    return StructurePipeline(GFP2, cache_dir, oracle=oracle)


@pytest.fixture(scope="session")
def eval_cfg():
    return EvalConfig(radius=10, target_eps=1e-12, seed=7)


@pytest.fixture(scope="session")
def points(eval_cfg):
    return sample_siegel(eval_cfg.seed, 10)
