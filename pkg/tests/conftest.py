from pathlib import Path

import pytest

from mbat import Codebook, SpaceConfig, gen_orthogonal

DIM = 1000


@pytest.fixture(scope="session")
def space():
    return SpaceConfig(dimension=DIM, master_seed=20260810)


@pytest.fixture(scope="session")
def book(space):
    return Codebook(space)


@pytest.fixture(scope="session")
def matrix_pool(space):
    # 20 binders at n=1000; generation dominates suite runtime, so share them.
    return [gen_orthogonal(seed, space) for seed in range(20)]


@pytest.fixture(scope="session")
def small_space():
    return SpaceConfig(dimension=64, master_seed=7)


@pytest.fixture(scope="session")
def small_book(small_space):
    return Codebook(small_space)


@pytest.fixture(scope="session")
def data_dir():
    return Path(__file__).parent / "data"
