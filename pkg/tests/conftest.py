import functools
from pathlib import Path

import pytest

PACK_DIR = Path(__file__).resolve().parent.parent / "packs" / "sample"
SITES = ("braidwood", "cooper", "davis_besse", "prairie_island", "south_texas")


@functools.lru_cache(maxsize=None)
def scenario(site: str):
    """Resolved pack scenario, cached per session (model trained lazily)."""
    from synfuel.config import resolve

    return resolve(PACK_DIR / f"{site}.json")


@pytest.fixture(scope="session")
def pack_dir() -> Path:
    return PACK_DIR


@pytest.fixture(scope="session")
def braidwood():
    return scenario("braidwood")


@pytest.fixture(scope="session")
def prairie():
    return scenario("prairie_island")
