import os

import hypothesis
import pytest

from colorcache.cache import CacheGeometry

hypothesis.settings.register_profile("ci", max_examples=50, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.register_profile("thorough", max_examples=200, deadline=None)
hypothesis.settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "ci"))


@pytest.fixture(scope="session")
def paper_geom():
    """2 MB, 8-way, 64-color geometry used for the pinned-value checks."""
    return CacheGeometry(sets=4096, ways=8, block_size=64, page_size=4096, tag_bits=40)


@pytest.fixture(scope="session")
def small_geom():
    """256 KB, 4-way, 16-color geometry that keeps bulk simulations cheap."""
    return CacheGeometry(sets=1024, ways=4, block_size=64, page_size=4096, tag_bits=40)
