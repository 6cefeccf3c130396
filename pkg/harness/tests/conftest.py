import pytest

from specpaths import BAND_SPEC, CARTPOLE_SPEC, REACH_AVOID_SPEC, TRAIN_SPEC


@pytest.fixture(scope="session", autouse=True)
def _specs_exist():
    for p in (CARTPOLE_SPEC, REACH_AVOID_SPEC, TRAIN_SPEC, BAND_SPEC):
        assert p.exists(), p
