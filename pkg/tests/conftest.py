import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def rng():
    return np.random.default_rng(20260808)


@pytest.fixture(scope="session")
def candidate_lists():
    """The full Weil-admissible candidate tables (cached for the session)."""
    from ssforms import lift

    return {d: lift.enumerate_candidates(d) for d in range(1, 7)}
